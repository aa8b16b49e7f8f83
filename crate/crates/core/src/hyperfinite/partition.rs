//! Bounded-component partitions: certificates, exact optimizers and
//! heuristics.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graphs::{components_with, Dsu, LabeledGraph};
use crate::rational::{self, Q};

use super::planar::{check_planarity, RotationSystem};
use super::HyperfiniteError;

/// Largest edge count accepted by [`partition_enumerate`].
pub const ENUMERATION_GUARD: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMode {
    Edge,
    Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Removed {
    Edges(Vec<(usize, usize)>),
    Vertices(Vec<usize>),
}

impl Removed {
    pub fn len(&self) -> usize {
        match self {
            Removed::Edges(e) => e.len(),
            Removed::Vertices(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Removing `removed` from the graph leaves components of at most `k`
/// vertices; `epsilon = |removed| / |V|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionCertificate {
    pub k: usize,
    pub removed: Removed,
    pub epsilon: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub mode: PartitionMode,
    #[serde(rename = "K")]
    pub k: usize,
    pub removed: Vec<serde_json::Value>,
    pub epsilon: String,
    pub epsilon_decimal: f64,
}

impl PartitionCertificate {
    pub fn from_edges(g: &LabeledGraph, k: usize, mut removed: Vec<(usize, usize)>) -> Self {
        for e in &mut removed {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        removed.sort_unstable();
        removed.dedup();
        let epsilon = rational::from_count(removed.len(), g.vertex_count());
        Self {
            k,
            removed: Removed::Edges(removed),
            epsilon,
        }
    }

    pub fn from_vertices(g: &LabeledGraph, k: usize, mut removed: Vec<usize>) -> Self {
        removed.sort_unstable();
        removed.dedup();
        let epsilon = rational::from_count(removed.len(), g.vertex_count());
        Self {
            k,
            removed: Removed::Vertices(removed),
            epsilon,
        }
    }

    pub fn mode(&self) -> PartitionMode {
        match self.removed {
            Removed::Edges(_) => PartitionMode::Edge,
            Removed::Vertices(_) => PartitionMode::Vertex,
        }
    }

    pub fn cost(&self) -> usize {
        self.removed.len()
    }

    /// Recomputes components after removal and the stated epsilon.
    pub fn verify(&self, g: &LabeledGraph) -> Result<(), HyperfiniteError> {
        let n = g.vertex_count();
        let invalid = |m: String| Err(HyperfiniteError::InvalidCertificate(m));
        let comps = match &self.removed {
            Removed::Edges(removed) => {
                let set: BTreeSet<(usize, usize)> = removed.iter().copied().collect();
                if set.len() != removed.len() {
                    return invalid("duplicate removed edge".into());
                }
                if let Some(&(u, v)) = removed.iter().find(|&&(u, v)| u >= v || v >= n || !g.has_edge(u, v)) {
                    return invalid(format!("{{{u}, {v}}} is not an edge"));
                }
                components_with(n, g.edge_pairs().into_iter().filter(|e| !set.contains(e)))
            }
            Removed::Vertices(removed) => {
                let mut gone = vec![false; n];
                for &v in removed {
                    if v >= n || gone[v] {
                        return invalid(format!("bad removed vertex {v}"));
                    }
                    gone[v] = true;
                }
                components_with(n, g.edge_pairs().into_iter().filter(|&(u, v)| !gone[u] && !gone[v]))
                    .into_iter()
                    .filter(|c| !(c.len() == 1 && gone[c[0]]))
                    .collect()
            }
        };
        if let Some(c) = comps.iter().find(|c| c.len() > self.k) {
            return invalid(format!("component of size {} exceeds K = {}", c.len(), self.k));
        }
        if self.epsilon != rational::from_count(self.removed.len(), n) {
            return invalid(format!(
                "epsilon {} differs from {}/{n}",
                rational::to_string(&self.epsilon),
                self.removed.len()
            ));
        }
        Ok(())
    }

    pub fn to_json_value(&self) -> CertificateJson {
        let removed = match &self.removed {
            Removed::Edges(e) => e.iter().map(|&(u, v)| serde_json::json!([u, v])).collect(),
            Removed::Vertices(v) => v.iter().map(|&x| serde_json::json!(x)).collect(),
        };
        CertificateJson {
            mode: self.mode(),
            k: self.k,
            removed,
            epsilon: rational::to_string(&self.epsilon),
            epsilon_decimal: rational::to_f64(&self.epsilon),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("certificate json")
    }

    pub fn from_json(text: &str) -> Result<Self, HyperfiniteError> {
        let raw: CertificateJson =
            serde_json::from_str(text).map_err(|e| HyperfiniteError::InvalidCertificate(e.to_string()))?;
        let epsilon = rational::parse(&raw.epsilon)
            .ok_or_else(|| HyperfiniteError::InvalidCertificate(format!("bad epsilon {}", raw.epsilon)))?;
        let malformed = || HyperfiniteError::InvalidCertificate("malformed removed entry".into());
        let removed = match raw.mode {
            PartitionMode::Edge => Removed::Edges(
                raw.removed
                    .iter()
                    .map(|x| serde_json::from_value::<(usize, usize)>(x.clone()).map_err(|_| malformed()))
                    .collect::<Result<_, _>>()?,
            ),
            PartitionMode::Vertex => Removed::Vertices(
                raw.removed
                    .iter()
                    .map(|x| serde_json::from_value::<usize>(x.clone()).map_err(|_| malformed()))
                    .collect::<Result<_, _>>()?,
            ),
        };
        Ok(Self {
            k: raw.k,
            removed,
            epsilon,
        })
    }
}

fn largest_component(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut dsu = Dsu::new(n);
    let mut best = usize::from(n > 0);
    for (u, v) in edges {
        dsu.union(u, v);
        best = best.max(dsu.size_of(u));
    }
    best
}

/// Minimum edge removal by enumerating subsets in order of size.
pub fn partition_enumerate(g: &LabeledGraph, k: usize) -> Result<PartitionCertificate, HyperfiniteError> {
    let edges = g.edge_pairs();
    let m = edges.len();
    if m > ENUMERATION_GUARD {
        return Err(HyperfiniteError::Capacity {
            edges: m,
            guard: ENUMERATION_GUARD,
        });
    }
    let n = g.vertex_count();
    for size in 0..=m {
        // Gosper's hack over m-bit masks with `size` bits set
        let mut mask: u64 = (1u64 << size) - 1;
        let limit = 1u64 << m;
        while mask < limit {
            let kept = (0..m).filter(|&i| mask >> i & 1 == 0).map(|i| edges[i]);
            if largest_component(n, kept) <= k {
                let removed = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
                return Ok(PartitionCertificate::from_edges(g, k, removed));
            }
            if mask == 0 {
                break;
            }
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    unreachable!("removing every edge leaves singletons")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_edges: usize,
    pub max_nodes: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_edges: 96,
            max_nodes: 20_000_000,
        }
    }
}

/// Union-find without path compression so that unions can be undone.
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<(usize, usize)>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union_roots(&mut self, mut a: usize, mut b: usize) {
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.history.push((a, b));
    }

    fn undo(&mut self) {
        let (a, b) = self.history.pop().expect("undo without union");
        self.parent[b] = b;
        self.size[a] -= self.size[b];
    }
}

struct Search<'a> {
    edges: &'a [(usize, usize)],
    k: usize,
    dsu: RollbackDsu,
    removed: Vec<bool>,
    best_cost: usize,
    best: Option<Vec<bool>>,
    nodes: u64,
    max_nodes: u64,
}

impl Search<'_> {
    /// Undecided edges that must be removed because their endpoints already
    /// sit in components too large to merge.
    fn forced(&self, from: usize) -> usize {
        self.edges[from..]
            .iter()
            .filter(|&&(u, v)| {
                let (a, b) = (self.dsu.find(u), self.dsu.find(v));
                a != b && self.dsu.size[a] + self.dsu.size[b] > self.k
            })
            .count()
    }

    fn run(&mut self, i: usize, cost: usize) -> Result<(), HyperfiniteError> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(HyperfiniteError::SearchBudget(self.max_nodes));
        }
        if cost + self.forced(i) >= self.best_cost {
            return Ok(());
        }
        if i == self.edges.len() {
            self.best_cost = cost;
            self.best = Some(self.removed.clone());
            return Ok(());
        }
        let (u, v) = self.edges[i];
        let (a, b) = (self.dsu.find(u), self.dsu.find(v));
        if a == b {
            return self.run(i + 1, cost);
        }
        if self.dsu.size[a] + self.dsu.size[b] <= self.k {
            self.dsu.union_roots(a, b);
            let result = self.run(i + 1, cost);
            self.dsu.undo();
            result?;
        }
        self.removed[i] = true;
        let result = self.run(i + 1, cost + 1);
        self.removed[i] = false;
        result
    }
}

/// Edge betweenness (Brandes) on the plain graph, indexed like `edges`.
fn edge_betweenness(g: &LabeledGraph, edges: &[(usize, usize)]) -> Vec<f64> {
    let n = g.vertex_count();
    let index: std::collections::HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut score = vec![0.0; edges.len()];
    for s in 0..n {
        let mut stack = Vec::new();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![usize::MAX; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                score[index[&(v.min(w), v.max(w))]] += c;
                delta[v] += c;
            }
        }
    }
    score
}

/// Minimum edge removal by branch and bound. Edges are decided in order of
/// decreasing betweenness, keeping before removing; the bound adds the
/// undecided edges whose endpoints can no longer be merged.
pub fn partition_exact(
    g: &LabeledGraph,
    k: usize,
    limits: ExactLimits,
) -> Result<PartitionCertificate, HyperfiniteError> {
    let base = g.edge_pairs();
    if base.len() > limits.max_edges {
        return Err(HyperfiniteError::Capacity {
            edges: base.len(),
            guard: limits.max_edges,
        });
    }
    let k = k.max(1);
    let initial = partition_heuristic(g, k, HeuristicStrategy::BfsChunks, None)?;
    let betweenness = edge_betweenness(g, &base);
    let mut order: Vec<usize> = (0..base.len()).collect();
    order.sort_by(|&a, &b| betweenness[b].total_cmp(&betweenness[a]).then(a.cmp(&b)));
    let edges: Vec<(usize, usize)> = order.iter().map(|&i| base[i]).collect();
    let mut search = Search {
        edges: &edges,
        k,
        dsu: RollbackDsu::new(g.vertex_count()),
        removed: vec![false; edges.len()],
        best_cost: initial.cost() + 1,
        best: None,
        nodes: 0,
        max_nodes: limits.max_nodes,
    };
    search.run(0, 0)?;
    let chosen = search.best.expect("the heuristic solution is within the initial bound");
    let removed = (0..edges.len()).filter(|&i| chosen[i]).map(|i| edges[i]).collect();
    Ok(PartitionCertificate::from_edges(g, k, removed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicStrategy {
    BfsChunks,
    PlanarSeparator,
}

impl std::str::FromStr for HeuristicStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfs_chunks" => Ok(Self::BfsChunks),
            "planar_separator" => Ok(Self::PlanarSeparator),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// Valid but not necessarily optimal edge removal. `PlanarSeparator` needs
/// the graph to be a cactus or `hint` to be a planar rotation system.
pub fn partition_heuristic(
    g: &LabeledGraph,
    k: usize,
    strategy: HeuristicStrategy,
    hint: Option<&RotationSystem>,
) -> Result<PartitionCertificate, HyperfiniteError> {
    let k = k.max(1);
    let edges = g.edge_pairs();
    let n = g.vertex_count();
    if largest_component(n, edges.iter().copied()) <= k {
        return Ok(PartitionCertificate::from_edges(g, k, Vec::new()));
    }
    let mut alive = match strategy {
        HeuristicStrategy::BfsChunks => bfs_chunks(g, &edges, k),
        HeuristicStrategy::PlanarSeparator => {
            check_planarity(g, hint)?;
            separator_split(g, &edges, k)
        }
    };
    merge_pass(n, &edges, &mut alive, k);
    let removed = (0..edges.len()).filter(|&i| !alive[i]).map(|i| edges[i]).collect();
    let cert = PartitionCertificate::from_edges(g, k, removed);
    debug_assert!(cert.verify(g).is_ok());
    Ok(cert)
}

fn bfs_order(g: &LabeledGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let start = order.len();
        order.push(s);
        let mut head = start;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }
    order
}

/// Consecutive runs of `k` vertices in breadth-first order.
fn bfs_chunks(g: &LabeledGraph, edges: &[(usize, usize)], k: usize) -> Vec<bool> {
    let mut chunk = vec![0; g.vertex_count()];
    for (i, v) in bfs_order(g).into_iter().enumerate() {
        chunk[v] = i / k;
    }
    edges.iter().map(|&(u, v)| chunk[u] == chunk[v]).collect()
}

/// Repeatedly cuts an oversized component along the boundary of a subtree
/// of a breadth-first tree, choosing the subtree with the fewest crossing
/// edges per vertex on its smaller side among cuts that waste no capacity.
fn separator_split(g: &LabeledGraph, edges: &[(usize, usize)], k: usize) -> Vec<bool> {
    let n = g.vertex_count();
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(u, v)) in edges.iter().enumerate() {
        incident[u].push((v, id));
        incident[v].push((u, id));
    }
    let mut alive = vec![true; edges.len()];
    let mut stamp = vec![usize::MAX; n];
    let mut round = 0;
    let mut pending: Vec<Vec<usize>> = components_with(n, edges.iter().copied())
        .into_iter()
        .filter(|c| c.len() > k)
        .collect();
    let mut parent = vec![usize::MAX; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut size = vec![0usize; n];
    let mut acc = vec![0i64; n];
    let mut in_sub = vec![false; n];
    while let Some(comp) = pending.pop() {
        round += 1;
        for &v in &comp {
            stamp[v] = round;
        }
        let far = bfs_tree(&comp, comp[0], &incident, &alive, &mut parent, &mut parent_edge, &mut depth).last().copied().unwrap();
        let order = bfs_tree(&comp, far, &incident, &alive, &mut parent, &mut parent_edge, &mut depth);
        for &v in &order {
            size[v] = 1;
            acc[v] = 0;
        }
        for &v in &order {
            for &(w, id) in &incident[v] {
                if alive[id] && v < w && parent_edge[v] != id && parent_edge[w] != id {
                    acc[v] += 1;
                    acc[w] += 1;
                    let (mut a, mut b) = (v, w);
                    while depth[a] > depth[b] {
                        a = parent[a];
                    }
                    while depth[b] > depth[a] {
                        b = parent[b];
                    }
                    while a != b {
                        a = parent[a];
                        b = parent[b];
                    }
                    acc[a] -= 2;
                }
            }
        }
        for &v in order.iter().skip(1).rev() {
            let p = parent[v];
            size[p] += size[v];
            acc[p] += acc[v];
        }
        let total = comp.len();
        let pieces = |s: usize| s.div_ceil(k);
        // prefer cuts that do not raise the number of K-pieces still needed
        let tight = order
            .iter()
            .skip(1)
            .any(|&v| pieces(size[v]) + pieces(total - size[v]) == pieces(total));
        let mut best: Option<(usize, u64, usize)> = None;
        for &v in order.iter().skip(1) {
            if tight && pieces(size[v]) + pieces(total - size[v]) != pieces(total) {
                continue;
            }
            let crossing = acc[v] as u64 + 1;
            let small = size[v].min(total - size[v]);
            let better = match best {
                None => true,
                Some((bv, bc, bs)) => {
                    let lhs = crossing as u128 * bs as u128;
                    let rhs = bc as u128 * small as u128;
                    lhs < rhs || (lhs == rhs && (small > bs || (small == bs && v < bv)))
                }
            };
            if better {
                best = Some((v, crossing, small));
            }
        }
        let (cut, _, _) = best.expect("component with more than one vertex");
        for &v in &order {
            in_sub[v] = v == cut || (v != far && in_sub[parent[v]]);
        }
        for &v in &order {
            if in_sub[v] {
                for &(w, id) in &incident[v] {
                    if alive[id] && !in_sub[w] {
                        alive[id] = false;
                    }
                }
            }
        }
        for &v in &order {
            in_sub[v] = false;
        }
        for piece in split_components(&comp, &incident, &alive, &stamp, round) {
            if piece.len() > k {
                pending.push(piece);
            }
        }
    }
    alive
}

fn bfs_tree(
    comp: &[usize],
    root: usize,
    incident: &[Vec<(usize, usize)>],
    alive: &[bool],
    parent: &mut [usize],
    parent_edge: &mut [usize],
    depth: &mut [usize],
) -> Vec<usize> {
    for &v in comp {
        parent[v] = usize::MAX;
    }
    parent[root] = root;
    parent_edge[root] = usize::MAX;
    depth[root] = 0;
    let mut order = vec![root];
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &(w, id) in &incident[u] {
            if alive[id] && parent[w] == usize::MAX {
                parent[w] = u;
                parent_edge[w] = id;
                depth[w] = depth[u] + 1;
                order.push(w);
            }
        }
    }
    order
}

fn split_components(
    comp: &[usize],
    incident: &[Vec<(usize, usize)>],
    alive: &[bool],
    stamp: &[usize],
    round: usize,
) -> Vec<Vec<usize>> {
    let mut seen: std::collections::HashSet<usize> = std::collections::HashSet::with_capacity(comp.len());
    let mut out = Vec::new();
    for &s in comp {
        if !seen.insert(s) {
            continue;
        }
        let mut piece = vec![s];
        let mut head = 0;
        while head < piece.len() {
            let u = piece[head];
            head += 1;
            for &(w, id) in &incident[u] {
                if alive[id] && stamp[w] == round && seen.insert(w) {
                    piece.push(w);
                }
            }
        }
        out.push(piece);
    }
    out
}

/// Restores removed edges whose endpoints can be merged without exceeding `k`.
fn merge_pass(n: usize, edges: &[(usize, usize)], alive: &mut [bool], k: usize) {
    let mut dsu = Dsu::new(n);
    for (i, &(u, v)) in edges.iter().enumerate() {
        if alive[i] {
            dsu.union(u, v);
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if alive[i] {
                continue;
            }
            let (a, b) = (dsu.find(u), dsu.find(v));
            if a == b || dsu.size_of(a) + dsu.size_of(b) <= k {
                alive[i] = true;
                dsu.union(a, b);
                changed = true;
            }
        }
    }
}

/// Vertex-mode certificate from an edge-mode one: a greedy vertex cover of
/// the removed edges. Components only shrink, so the bound `K` carries over.
pub fn vertex_mode_from(g: &LabeledGraph, cert: &PartitionCertificate) -> PartitionCertificate {
    let Removed::Edges(removed) = &cert.removed else {
        return cert.clone();
    };
    let mut remaining: BTreeSet<(usize, usize)> = removed.iter().copied().collect();
    let mut chosen = Vec::new();
    while !remaining.is_empty() {
        let mut count = std::collections::BTreeMap::new();
        for &(u, v) in &remaining {
            *count.entry(u).or_insert(0usize) += 1;
            *count.entry(v).or_insert(0usize) += 1;
        }
        let (&v, _) = count.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).unwrap();
        chosen.push(v);
        remaining.retain(|&(a, b)| a != v && b != v);
    }
    PartitionCertificate::from_vertices(g, cert.k, chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> LabeledGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        LabeledGraph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> LabeledGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        LabeledGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn exact_examples() {
        assert_eq!(partition_enumerate(&path(9), 3).unwrap().cost(), 2);
        assert_eq!(partition_exact(&path(9), 3, ExactLimits::default()).unwrap().cost(), 2);
        assert_eq!(partition_enumerate(&cycle(12), 3).unwrap().cost(), 4);
        assert_eq!(partition_exact(&cycle(12), 3, ExactLimits::default()).unwrap().cost(), 4);
        assert_eq!(partition_exact(&cycle(5), 5, ExactLimits::default()).unwrap().cost(), 0);
        let big = LabeledGraph::from_edges(30, &(0..29).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        assert!(matches!(partition_enumerate(&big, 3), Err(HyperfiniteError::Capacity { .. })));
    }

    #[test]
    fn heuristic_examples() {
        let p = path(100);
        let c = partition_heuristic(&p, 10, HeuristicStrategy::BfsChunks, None).unwrap();
        assert!(c.cost() <= 10);
        c.verify(&p).unwrap();
        let small = partition_heuristic(&path(5), 5, HeuristicStrategy::BfsChunks, None).unwrap();
        assert!(small.removed.is_empty());
        let sep = partition_heuristic(&p, 10, HeuristicStrategy::PlanarSeparator, None).unwrap();
        sep.verify(&p).unwrap();
        assert!(sep.cost() <= 10);
    }

    #[test]
    fn planar_requires_evidence() {
        let k4 = LabeledGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(matches!(
            partition_heuristic(&k4, 2, HeuristicStrategy::PlanarSeparator, None),
            Err(HyperfiniteError::StrategyUnavailable(_))
        ));
    }

    #[test]
    fn certificate_json_and_vertex_mode() {
        let g = cycle(12);
        let c = partition_exact(&g, 3, ExactLimits::default()).unwrap();
        let text = c.to_json();
        let back = PartitionCertificate::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        back.verify(&g).unwrap();
        let v = vertex_mode_from(&g, &c);
        v.verify(&g).unwrap();
        assert_eq!(PartitionCertificate::from_json(&v.to_json()).unwrap(), v);
        let mut forged = c.clone();
        forged.epsilon = rational::q(1, 12);
        assert!(forged.verify(&g).is_err());
    }

    #[test]
    fn exact_matches_enumeration_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..60 {
            let n = rng.gen_range(2..12);
            let mut edges = Vec::new();
            for _ in 0..rng.gen_range(0..16) {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if u != v {
                    edges.push((u, v));
                }
            }
            let g = LabeledGraph::from_edges(n, &edges).unwrap();
            let k = rng.gen_range(1..5);
            let a = partition_enumerate(&g, k).unwrap();
            let b = partition_exact(&g, k, ExactLimits::default()).unwrap();
            b.verify(&g).unwrap();
            assert_eq!(a.cost(), b.cost());
            for s in [HeuristicStrategy::BfsChunks] {
                assert!(partition_heuristic(&g, k, s, None).unwrap().cost() >= a.cost());
            }
        }
    }
}
