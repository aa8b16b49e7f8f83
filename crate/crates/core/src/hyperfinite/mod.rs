//! Isoperimetry, Følner sets, edge measures and hyperfinite partitions.
//!
//! Means are normalized counting measures on a finite support. Every
//! constant is an exact rational.

mod partition;
mod planar;

pub use partition::{
    partition_enumerate, partition_exact, partition_heuristic, vertex_mode_from, CertificateJson,
    ExactLimits, HeuristicStrategy, PartitionCertificate, PartitionMode, Removed,
    ENUMERATION_GUARD,
};
pub use planar::{check_planarity, coordinate_rotation_system, PlanarityEvidence, RotationSystem};

use std::collections::{BTreeSet, HashSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::Action;
use crate::graphs::{ball, schreier, Dsu, GraphError, LabeledGraph};
use crate::rational::{self, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HyperfiniteError {
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex {0} not in graph")]
    UnknownVertex(usize),
    #[error("subgraph is not contained in the ambient graph: {0}")]
    NotSubgraph(String),
    #[error("component {component:?} has {size} vertices, more than {bound}")]
    ComponentTooLarge {
        component: Vec<usize>,
        size: usize,
        bound: usize,
    },
    #[error("component {component:?} has edge density {density} below alpha")]
    DensityBelowAlpha { component: Vec<usize>, density: String },
    #[error("mean support cuts component {component:?}")]
    SupportCutsComponent { component: Vec<usize> },
    #[error("instance has {edges} edges, above the exact guard of {guard}; use a heuristic")]
    Capacity { edges: usize, guard: usize },
    #[error("branch and bound exceeded {0} nodes; use a heuristic")]
    SearchBudget(u64),
    #[error("strategy unavailable: {0}")]
    StrategyUnavailable(String),
    #[error("certificate invalid: {0}")]
    InvalidCertificate(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Normalized counting measure on a finite vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitelySupportedMean {
    member: Vec<bool>,
    size: usize,
}

impl FinitelySupportedMean {
    pub fn new(n: usize, support: &[usize]) -> Result<Self, HyperfiniteError> {
        let mut member = vec![false; n];
        for &v in support {
            *member.get_mut(v).ok_or(HyperfiniteError::UnknownVertex(v))? = true;
        }
        let size = member.iter().filter(|&&b| b).count();
        if size == 0 {
            return Err(HyperfiniteError::EmptySet);
        }
        Ok(Self { member, size })
    }

    pub fn uniform(n: usize) -> Result<Self, HyperfiniteError> {
        Self::new(n, &(0..n).collect::<Vec<_>>())
    }

    pub fn support_size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, v: usize) -> bool {
        self.member.get(v).copied().unwrap_or(false)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&v| self.member[v]).collect()
    }

    pub fn total_mass(&self) -> Q {
        rational::from_count(self.size, self.size)
    }

    pub fn mass(&self, set: impl IntoIterator<Item = usize>) -> Q {
        let unique: BTreeSet<usize> = set.into_iter().filter(|&v| self.contains(v)).collect();
        rational::from_count(unique.len(), self.size)
    }
}

/// Outgoing edges of `set` divided by its size.
pub fn isoperimetric(g: &LabeledGraph, set: &[usize]) -> Result<Q, HyperfiniteError> {
    let members = member_mask(g, set)?;
    let size = members.iter().filter(|&&b| b).count();
    if size == 0 {
        return Err(HyperfiniteError::EmptySet);
    }
    let boundary = boundary_edges(g, &members);
    Ok(rational::from_count(boundary, size))
}

fn member_mask(g: &LabeledGraph, set: &[usize]) -> Result<Vec<bool>, HyperfiniteError> {
    let mut members = vec![false; g.vertex_count()];
    for &v in set {
        *members.get_mut(v).ok_or(HyperfiniteError::UnknownVertex(v))? = true;
    }
    Ok(members)
}

fn boundary_edges(g: &LabeledGraph, members: &[bool]) -> usize {
    g.edges().filter(|&(u, v, _)| members[u] != members[v]).count()
}

/// How candidate sets are generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FolnerStrategy {
    /// Metric balls around the basepoint, radius 0, 1, 2, ...
    Balls,
    /// A caller-supplied increasing family, tried in order.
    Sequence(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FolnerOutcome {
    Found {
        set: Vec<usize>,
        constant: Q,
        /// Ball radius, or position in the supplied sequence.
        step: usize,
    },
    Failure {
        best_constant: Q,
        best_size: usize,
        tried: usize,
    },
}

/// First candidate set containing `basepoint`, connected, of size at most
/// `max_size`, with isoperimetric constant at most `target`.
pub fn folner_search(
    g: &LabeledGraph,
    basepoint: usize,
    target: Q,
    max_size: usize,
    strategy: &FolnerStrategy,
) -> Result<FolnerOutcome, HyperfiniteError> {
    if basepoint >= g.vertex_count() {
        return Err(HyperfiniteError::UnknownVertex(basepoint));
    }
    let mut best: Option<(Q, usize)> = None;
    let mut tried = 0;
    let mut consider = |set: Vec<usize>, step: usize| -> Result<Option<FolnerOutcome>, HyperfiniteError> {
        let constant = isoperimetric(g, &set)?;
        tried += 1;
        if best.as_ref().map_or(true, |(c, _)| constant < *c) {
            best = Some((constant, set.len()));
        }
        Ok((constant <= target).then(|| FolnerOutcome::Found { set, constant, step }))
    };
    match strategy {
        FolnerStrategy::Balls => {
            let mut previous = 0;
            for r in 0.. {
                let mut set = ball(g, basepoint, r)?.original;
                if set.len() > max_size || (r > 0 && set.len() == previous) {
                    break;
                }
                previous = set.len();
                set.sort_unstable();
                if let Some(found) = consider(set, r)? {
                    return Ok(found);
                }
            }
        }
        FolnerStrategy::Sequence(sets) => {
            for (i, set) in sets.iter().enumerate() {
                let mut set = set.clone();
                set.sort_unstable();
                set.dedup();
                if set.len() > max_size {
                    break;
                }
                if !set.contains(&basepoint) || !induced_connected(g, &set) {
                    continue;
                }
                if let Some(found) = consider(set, i)? {
                    return Ok(found);
                }
            }
        }
    }
    let (best_constant, best_size) = best.unwrap_or((Q::from_integer(g.degree_bound() as i64), 0));
    Ok(FolnerOutcome::Failure {
        best_constant,
        best_size,
        tried,
    })
}

fn induced_connected(g: &LabeledGraph, set: &[usize]) -> bool {
    let inside: HashSet<usize> = set.iter().copied().collect();
    let Some(&start) = set.first() else {
        return false;
    };
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if inside.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == inside.len()
}

/// Squares of side 1, 2, ..., `max_side` in a `Z^2` point list, each the
/// set of indices with coordinates in `[-floor(s/2), s - 1 - floor(s/2)]^2`.
pub fn centered_squares(points: &[Vec<i64>], max_side: usize) -> Vec<Vec<usize>> {
    (1..=max_side as i64)
        .map(|s| {
            let lo = -(s / 2);
            let hi = lo + s - 1;
            points
                .iter()
                .enumerate()
                .filter(|(_, p)| p.iter().all(|&c| (lo..=hi).contains(&c)))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointPick {
    pub index: usize,
    pub trimmed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointifyFailure {
    /// 1-based step that could not be completed.
    pub step: usize,
    pub allowed_loss: Q,
    pub picks: Vec<DisjointPick>,
}

/// `[1/10, 1/100, ...]` with `steps - 1` entries.
pub fn default_loss_schedule(steps: usize) -> Vec<Q> {
    let mut out = Vec::new();
    let mut d: i64 = 10;
    for _ in 1..steps {
        out.push(Q::new(1, d));
        d = d.saturating_mul(10);
    }
    out
}

/// Picks `n_1 = 0 < n_2 < ...` so that at step `k >= 2` the trimmed set
/// `F_{n_k} \ (F_{n_1} ∪ ... ∪ F_{n_{k-1}})` keeps more than
/// `(1 - schedule[k-2]) |F_{n_k}|` points. Runs `schedule.len() + 1` steps.
pub fn disjointify(sets: &[Vec<usize>], schedule: &[Q]) -> Result<Vec<DisjointPick>, DisjointifyFailure> {
    let mut picks = Vec::new();
    let Some(first) = sets.first() else {
        return Err(DisjointifyFailure {
            step: 1,
            allowed_loss: Q::zero(),
            picks,
        });
    };
    let mut used: HashSet<usize> = first.iter().copied().collect();
    picks.push(DisjointPick {
        index: 0,
        trimmed: sorted_unique(first),
    });
    let mut next = 1;
    for (k, &delta) in schedule.iter().enumerate() {
        let keep = Q::from_integer(1) - delta;
        let found = (next..sets.len()).find(|&i| {
            let set = sorted_unique(&sets[i]);
            let fresh = set.iter().filter(|v| !used.contains(v)).count();
            !set.is_empty() && rational::from_count(fresh, 1) > keep * Q::from_integer(set.len() as i64)
        });
        let Some(i) = found else {
            return Err(DisjointifyFailure {
                step: k + 2,
                allowed_loss: delta,
                picks,
            });
        };
        let trimmed: Vec<usize> = sorted_unique(&sets[i]).into_iter().filter(|v| !used.contains(v)).collect();
        used.extend(trimmed.iter().copied());
        picks.push(DisjointPick { index: i, trimmed });
        next = i + 1;
    }
    Ok(picks)
}

fn sorted_unique(set: &[usize]) -> Vec<usize> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

fn check_subgraph(g: &LabeledGraph, sub: &LabeledGraph) -> Result<(), HyperfiniteError> {
    if sub.vertex_count() != g.vertex_count() {
        return Err(HyperfiniteError::NotSubgraph(format!(
            "{} vertices vs {}",
            sub.vertex_count(),
            g.vertex_count()
        )));
    }
    for (u, v, _) in sub.edges() {
        if !g.has_edge(u, v) {
            return Err(HyperfiniteError::NotSubgraph(format!("edge {{{u}, {v}}}")));
        }
    }
    for (v, labels) in sub.loops() {
        if labels.len() > g.loop_labels(v).len() {
            return Err(HyperfiniteError::NotSubgraph(format!("loops at {v}")));
        }
    }
    Ok(())
}

/// Degree in the plain subgraph: distinct neighbours plus one per loop.
pub fn subgraph_degree(sub: &LabeledGraph, v: usize) -> usize {
    sub.plain_degree(v) + sub.loop_labels(v).len()
}

/// Half the mean of the subgraph degree function.
pub fn edge_measure(
    g: &LabeledGraph,
    sub: &LabeledGraph,
    mean: &FinitelySupportedMean,
) -> Result<Q, HyperfiniteError> {
    check_subgraph(g, sub)?;
    let total: usize = mean.support().into_iter().map(|v| subgraph_degree(sub, v)).sum();
    Ok(rational::from_count(total, 2 * mean.support_size()))
}

/// Both sides of `alpha * mu(V(R)) <= mu_E(R)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityVerdict {
    #[serde(with = "rational")]
    pub lhs: Q,
    #[serde(with = "rational")]
    pub rhs: Q,
    pub holds: bool,
}

/// Vertices of `sub` with positive degree, grouped into components.
pub fn subgraph_components(sub: &LabeledGraph) -> Vec<Vec<usize>> {
    let n = sub.vertex_count();
    let mut dsu = Dsu::new(n);
    for (u, v, _) in sub.edges() {
        dsu.union(u, v);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut first = std::collections::HashMap::new();
    for v in (0..n).filter(|&v| subgraph_degree(sub, v) > 0) {
        let r = dsu.find(v);
        let key = *first.entry(r).or_insert(v);
        groups.entry(key).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Checks the preconditions on `r` (components of at most `max_component`
/// vertices, each of density at least `alpha`, none cut by the support of
/// the mean) and then compares `alpha * mu(V(r))` with `mu_E(r)`.
///
/// The density of a component is half its degree sum over its size, so a
/// loop counts as half an edge, matching the degree convention of
/// [`edge_measure`].
pub fn check_density_bound(
    g: &LabeledGraph,
    r: &LabeledGraph,
    alpha: Q,
    max_component: usize,
    mean: &FinitelySupportedMean,
) -> Result<DensityVerdict, HyperfiniteError> {
    check_subgraph(g, r)?;
    let comps = subgraph_components(r);
    for comp in &comps {
        if comp.len() > max_component {
            return Err(HyperfiniteError::ComponentTooLarge {
                component: comp.clone(),
                size: comp.len(),
                bound: max_component,
            });
        }
        let degree_sum: usize = comp.iter().map(|&v| subgraph_degree(r, v)).sum();
        let density = rational::from_count(degree_sum, 2 * comp.len());
        if density < alpha {
            return Err(HyperfiniteError::DensityBelowAlpha {
                component: comp.clone(),
                density: rational::to_string(&density),
            });
        }
        let inside = comp.iter().filter(|&&v| mean.contains(v)).count();
        if inside != 0 && inside != comp.len() {
            return Err(HyperfiniteError::SupportCutsComponent {
                component: comp.clone(),
            });
        }
    }
    let lhs = alpha * mean.mass(comps.iter().flatten().copied());
    let rhs = edge_measure(g, r, mean)?;
    Ok(DensityVerdict {
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentFilter {
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
    #[serde(with = "rational")]
    pub good_mass: Q,
    #[serde(with = "rational")]
    pub bad_mass: Q,
    /// Edge measure of the removed edges lying inside some component.
    #[serde(with = "rational")]
    pub removed_measure: Q,
}

/// Splits components into good and bad: a component is bad when its
/// internal removed edges number at least `threshold` times its size.
/// Masses and the removed-edge measure are normalized by `|V(g)|`.
pub fn filter_components(
    g: &LabeledGraph,
    components: &[Vec<usize>],
    removed: &[(usize, usize)],
    threshold: Q,
) -> Result<ComponentFilter, HyperfiniteError> {
    let n = g.vertex_count();
    let mut owner = vec![usize::MAX; n];
    for (i, comp) in components.iter().enumerate() {
        for &v in comp {
            let slot = owner.get_mut(v).ok_or(HyperfiniteError::UnknownVertex(v))?;
            if *slot != usize::MAX {
                return Err(HyperfiniteError::NotSubgraph(format!("vertex {v} in two components")));
            }
            *slot = i;
        }
    }
    let mut internal = vec![0usize; components.len()];
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(u, v) in removed {
        if u >= n || v >= n {
            return Err(HyperfiniteError::UnknownVertex(u.max(v)));
        }
        pairs.insert((u.min(v), u.max(v)));
    }
    for &(u, v) in &pairs {
        if owner[u] != usize::MAX && owner[u] == owner[v] {
            internal[owner[u]] += 1;
        }
    }
    let (mut good, mut bad) = (Vec::new(), Vec::new());
    let (mut good_size, mut bad_size) = (0, 0);
    for (i, comp) in components.iter().enumerate() {
        let is_bad = !comp.is_empty()
            && if threshold.is_zero() {
                internal[i] > 0
            } else {
                rational::from_count(internal[i], comp.len()) >= threshold
            };
        if is_bad {
            bad.push(i);
            bad_size += comp.len();
        } else {
            good.push(i);
            good_size += comp.len();
        }
    }
    Ok(ComponentFilter {
        good,
        bad,
        good_mass: rational::from_count(good_size, n),
        bad_mass: rational::from_count(bad_size, n),
        removed_measure: rational::from_count(internal.iter().sum(), n),
    })
}

/// `eps_i = 4^{-(i+1)}` and `sqrt(eps_i) = 2^{-(i+1)}` for `i = 1..=steps`;
/// the square roots sum to less than 1/2.
pub fn sqrt_summable_schedule(steps: usize) -> Vec<(Q, Q)> {
    (1..=steps.min(30))
        .map(|i| {
            let root = Q::new(1, 1i64 << (i + 1));
            (root * root, root)
        })
        .collect()
}

/// A labeled action graph on a finite point set, with the number of
/// generator arrows that leave it.
#[derive(Debug, Clone)]
pub struct ActionGraph<P> {
    pub graph: LabeledGraph,
    pub points: Vec<P>,
    pub defect: usize,
}

pub fn action_graph<A: Action>(action: &A, set: &[A::Point]) -> ActionGraph<A::Point> {
    let sg = schreier(action, set);
    ActionGraph {
        graph: sg.graph,
        points: sg.points,
        defect: sg.dropped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{Action, F2ZAction, F2ZConfig, TranslationAction};
    use crate::rational::q;
    use crate::words::Letter;
    use num_traits::One;

    fn path(n: usize) -> LabeledGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        LabeledGraph::from_edges(n, &edges).unwrap()
    }

    fn sub(n: usize, edges: &[(usize, usize)]) -> LabeledGraph {
        LabeledGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn isoperimetric_examples() {
        let g = path(41);
        assert_eq!(isoperimetric(&g, &(0..41).collect::<Vec<_>>()).unwrap(), Q::zero());
        assert_eq!(isoperimetric(&g, &(20..30).collect::<Vec<_>>()).unwrap(), q(2, 10));
        assert_eq!(isoperimetric(&g, &[]), Err(HyperfiniteError::EmptySet));
        let grid = TranslationAction::cube(2, 8);
        let points = grid.points();
        let sg = schreier(&grid, &points);
        for (s, square) in centered_squares(&points, 10).iter().enumerate() {
            let r = s as i64 + 1;
            assert_eq!(isoperimetric(&sg.graph, square).unwrap(), q(4 * r, r * r));
        }
    }

    #[test]
    fn folner_examples() {
        let g = path(101);
        match folner_search(&g, 50, q(1, 5), 101, &FolnerStrategy::Balls).unwrap() {
            FolnerOutcome::Found { set, constant, .. } => {
                assert!(set.len() >= 10);
                assert!(constant <= q(1, 5));
            }
            other => panic!("{other:?}"),
        }
        match folner_search(&g, 50, q(2, 1), 101, &FolnerStrategy::Balls).unwrap() {
            FolnerOutcome::Found { set, .. } => assert_eq!(set, [50]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn folner_fails_on_small_expander() {
        // two Petersen graphs joined by one edge; 19 vertices is not enough
        // to swallow a whole component
        let mut edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        edges.extend((0..5).map(|i| (i, i + 5)));
        edges.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
        let mut doubled = edges.clone();
        doubled.extend(edges.iter().map(|&(u, v)| (u + 10, v + 10)));
        doubled.push((0, 10));
        let g = LabeledGraph::from_edges(20, &doubled).unwrap();
        match folner_search(&g, 3, q(1, 100), 19, &FolnerStrategy::Balls).unwrap() {
            FolnerOutcome::Failure { best_constant, .. } => assert!(best_constant > q(1, 100)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn disjointify_examples() {
        let disjoint = vec![vec![0, 1], vec![2, 3], vec![4]];
        let picks = disjointify(&disjoint, &default_loss_schedule(3)).unwrap();
        assert_eq!(picks.iter().map(|p| p.index).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!(picks[1].trimmed, [2, 3]);
        let same = vec![vec![0, 1, 2], vec![0, 1, 2]];
        assert_eq!(disjointify(&same, &[q(1, 10)]).unwrap_err().step, 2);
        let nested: Vec<Vec<usize>> = (0..6).map(|k| (0..=10usize.pow(k)).collect()).collect();
        let picks = disjointify(&nested, &default_loss_schedule(3)).unwrap();
        assert_eq!(picks.iter().map(|p| p.index).collect::<Vec<_>>(), [0, 2, 5]);
    }

    #[test]
    fn edge_measure_examples() {
        let g = path(10);
        let mean = FinitelySupportedMean::uniform(10).unwrap();
        assert_eq!(mean.total_mass(), Q::one());
        assert_eq!(edge_measure(&g, &sub(10, &[]), &mean).unwrap(), Q::zero());
        let matching = sub(10, &[(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)]);
        assert_eq!(edge_measure(&g, &matching, &mean).unwrap(), q(1, 2));
        assert_eq!(edge_measure(&g, &sub(10, &[(3, 4)]), &mean).unwrap(), q(1, 10));
        assert!(matches!(
            edge_measure(&g, &sub(10, &[(0, 9)]), &mean),
            Err(HyperfiniteError::NotSubgraph(_))
        ));
    }

    #[test]
    fn density_examples() {
        let triangles = sub(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let mean = FinitelySupportedMean::uniform(6).unwrap();
        let v = check_density_bound(&triangles, &triangles, Q::one(), 3, &mean).unwrap();
        assert!(v.holds);
        assert_eq!(v.lhs, v.rhs);
        let g = path(6);
        let empty = sub(6, &[]);
        let v = check_density_bound(&g, &empty, Q::one(), 1, &mean).unwrap();
        assert_eq!((v.lhs, v.rhs), (Q::zero(), Q::zero()));
        let singles = sub(6, &[(0, 1), (2, 3)]);
        let v = check_density_bound(&g, &singles, q(1, 2), 2, &mean).unwrap();
        assert_eq!(v.lhs, v.rhs);
        assert!(matches!(
            check_density_bound(&g, &singles, Q::one(), 2, &mean),
            Err(HyperfiniteError::DensityBelowAlpha { .. })
        ));
        let half = FinitelySupportedMean::new(6, &[0]).unwrap();
        assert!(matches!(
            check_density_bound(&g, &singles, q(1, 2), 2, &half),
            Err(HyperfiniteError::SupportCutsComponent { .. })
        ));
    }

    #[test]
    fn filter_examples() {
        let g = path(8);
        let comps = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]];
        let none = filter_components(&g, &comps, &[], q(1, 2)).unwrap();
        assert_eq!(none.bad, Vec::<usize>::new());
        let f = filter_components(&g, &comps, &[(0, 1), (2, 3), (3, 4)], q(1, 2)).unwrap();
        assert_eq!(f.bad, [0]);
        assert_eq!(f.bad_mass, q(1, 2));
        assert!(f.bad_mass <= f.removed_measure / q(1, 2));
        let zero = filter_components(&g, &comps, &[(5, 6)], Q::zero()).unwrap();
        assert_eq!(zero.bad, [1]);
    }

    #[test]
    fn schedule_is_sqrt_summable() {
        let s = sqrt_summable_schedule(20);
        assert!(s.iter().all(|(e, r)| *r * *r == *e));
        let sum: Q = s.iter().map(|(_, r)| *r).sum();
        assert!(sum < Q::one());
    }

    #[test]
    fn action_graph_examples() {
        let cfg = F2ZConfig::default_covering(-20, 20);
        let action = F2ZAction::new(cfg.clone());
        // a point strictly inside an odd block is fixed by s; pick one fixed by t as well
        let fixed: Vec<i64> = (-20..20)
            .filter(|&x| {
                action.apply(Letter::new(0, false), &x) == Ok(x) && action.apply(Letter::new(1, false), &x) == Ok(x)
            })
            .collect();
        if let Some(&x) = fixed.first() {
            let ag = action_graph(&action, &[x]);
            assert_eq!(ag.graph.edge_count(), 0);
            assert_eq!(ag.graph.loop_labels(0).len(), 2);
            assert_eq!(ag.defect, 0);
        }
        // one even block [i_0, i_1] is a closed s-cycle
        let (a, b) = (cfg.anchor(0).unwrap(), cfg.anchor(1).unwrap());
        let block: Vec<i64> = (a..=b).collect();
        let ag = action_graph(&action, &block);
        let s_edges = ag
            .graph
            .edges()
            .filter(|(_, _, l)| l.iter().any(|x| x.starts_with('s')))
            .count();
        assert_eq!(s_edges, block.len());
    }
}
