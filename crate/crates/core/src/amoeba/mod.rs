//! Amoebas: finite connected `{A, B, C, D}`-labeled cacti, their two-fold
//! doublings, and towers of doublings along which the basepoint
//! neighbourhoods become trees.
//!
//! An amoeba is stored as a star table: `star[v][l]` is the other end of the
//! unique edge at `v` labeled `l`, and equals `v` for a loop. Basic cycles
//! are the blocks of the multigraph together with the loops.

mod io;
mod plan;
mod tower;

pub use io::{load_tower, save_tower, CoveringJson, LevelEntry, TowerManifest};
pub use plan::{plan_moves, PlannedKind, PlannedMove};
pub use tower::{
    build_tower, freeness_witness, level_stats, AmoebaTower, LevelStats, TowerStrategy, Witness, WitnessMethod,
    DEFAULT_BUDGET,
};

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{Action, ActionError};
use crate::graphs::{multigraph_blocks, Dsu, LabeledGraph};
use crate::hyperfinite::HyperfiniteError;
use crate::words::{Letter, Presentation};

pub const LABELS: [&str; 4] = ["A", "B", "C", "D"];
pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmoebaError {
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("not an amoeba: {0}")]
    Violation(Violation),
    #[error("level with {vertices} vertices exceeds the vertex budget {budget}")]
    Capacity { vertices: usize, budget: usize },
    #[error("tower schedule covers k <= {covered}, witness needs k = {required}")]
    ScheduleTooShort { required: usize, covered: usize },
    #[error("no moved point found in the fiber of {vertex} at level {level}")]
    NoWitness { level: usize, vertex: usize },
    #[error("word must be nontrivial")]
    TrivialWord,
    #[error("vertex {0} not in amoeba")]
    UnknownVertex(usize),
    #[error("level {0} not in tower")]
    UnknownLevel(usize),
    #[error("covering check failed: {0}")]
    Covering(String),
    #[error("malformed tower data: {0}")]
    Format(String),
    #[error(transparent)]
    Partition(#[from] HyperfiniteError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Invariant {
    Connected,
    CycleCover,
    CyclesMeetOnce,
    CycleTree,
    StarLabels,
    LoopLabels,
    LoopCount,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Invariant::Connected => "connected",
            Invariant::CycleCover => "(i) union of basic cycles",
            Invariant::CyclesMeetOnce => "(ii) cycles share at most one vertex",
            Invariant::CycleTree => "(iii) cycle structure is a tree",
            Invariant::StarLabels => "(iv) one edge or loop per label at each vertex",
            Invariant::LoopLabels => "(v) loops labeled C or D",
            Invariant::LoopCount => "(vi) zero or two loops per vertex",
        };
        f.write_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {}", self.invariant, self.witness)
    }
}

/// `Ok(())` when every invariant holds, otherwise the first violation.
pub type VerifyReport = Result<(), Violation>;

fn violation(invariant: Invariant, witness: impl Into<String>) -> VerifyReport {
    Err(Violation {
        invariant,
        witness: witness.into(),
    })
}

/// A basic cycle in cyclic order; `labels[i]` labels the edge from
/// `vertices[i]` to `vertices[i + 1]`. Loops have one vertex and one label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicCycle {
    pub vertices: Vec<u32>,
    pub labels: Vec<u8>,
}

impl BasicCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_loop(&self) -> bool {
        self.vertices.len() == 1
    }
}

/// Checks connectivity and invariants (i) to (vi) on a multigraph given as
/// labeled non-loop edges and labeled loops, reporting the first failure.
/// The tree condition (iii) is checked on the vertex-cycle incidence graph.
pub fn verify_parts(n: usize, edges: &[(usize, usize, usize)], loops: &[(usize, usize)]) -> VerifyReport {
    if n == 0 {
        return violation(Invariant::Connected, "empty graph");
    }
    let mut dsu = Dsu::new(n);
    for &(u, v, _) in edges {
        dsu.union(u, v);
    }
    if let Some(v) = (0..n).find(|&v| dsu.find(v) != dsu.find(0)) {
        return violation(Invariant::Connected, format!("vertex {v} unreachable from 0"));
    }
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
    let blocks = multigraph_blocks(n, &pairs);
    let mut cycles: Vec<Vec<usize>> = Vec::with_capacity(blocks.len() + loops.len());
    for block in &blocks {
        let mut degree: HashMap<usize, usize> = HashMap::new();
        for &e in block {
            *degree.entry(pairs[e].0).or_default() += 1;
            *degree.entry(pairs[e].1).or_default() += 1;
        }
        if block.len() < 2 || degree.len() != block.len() || degree.values().any(|&d| d != 2) {
            let (u, v) = pairs[block[0]];
            return violation(
                Invariant::CycleCover,
                format!("edge {{{u}, {v}}} lies in a block that is not a cycle"),
            );
        }
        let mut vs: Vec<usize> = degree.into_keys().collect();
        vs.sort_unstable();
        cycles.push(vs);
    }
    for &(v, _) in loops {
        cycles.push(vec![v]);
    }
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, vs) in cycles.iter().enumerate() {
        for &v in vs {
            at_vertex[v].push(c);
        }
    }
    for (v, list) in at_vertex.iter().enumerate() {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let count = shared.entry((list[i], list[j])).or_default();
                *count += 1;
                if *count > 1 {
                    return violation(
                        Invariant::CyclesMeetOnce,
                        format!("cycles {} and {} share vertex {v} and another", list[i], list[j]),
                    );
                }
            }
        }
    }
    let mut incidence = Dsu::new(n + cycles.len());
    for (c, vs) in cycles.iter().enumerate() {
        for &v in vs {
            if !incidence.union(v, n + c) {
                return violation(Invariant::CycleTree, format!("cycle {c} closes a circuit at vertex {v}"));
            }
        }
    }
    let mut counts = vec![[0usize; 4]; n];
    let mut loop_count = vec![0usize; n];
    for &(u, v, l) in edges {
        if l >= 4 {
            return violation(Invariant::StarLabels, format!("unknown label on edge {{{u}, {v}}}"));
        }
        counts[u][l] += 1;
        counts[v][l] += 1;
    }
    for &(v, l) in loops {
        if l >= 4 {
            return violation(Invariant::StarLabels, format!("unknown loop label at {v}"));
        }
        counts[v][l] += 1;
        loop_count[v] += 1;
    }
    if let Some(v) = (0..n).find(|&v| counts[v] != [1, 1, 1, 1]) {
        return violation(
            Invariant::StarLabels,
            format!("vertex {v} has label counts A,B,C,D = {:?}", counts[v]),
        );
    }
    if let Some(&(v, l)) = loops.iter().find(|&&(_, l)| l != C && l != D) {
        return violation(Invariant::LoopLabels, format!("loop {} at vertex {v}", LABELS[l]));
    }
    if let Some(v) = (0..n).find(|&v| loop_count[v] != 0 && loop_count[v] != 2) {
        return violation(Invariant::LoopCount, format!("vertex {v} has {} loops", loop_count[v]));
    }
    Ok(())
}

fn label_index(name: &str) -> usize {
    LABELS.iter().position(|&l| l == name).unwrap_or(usize::MAX)
}

/// Verifies a labeled graph against the amoeba definition.
pub fn verify_graph(g: &LabeledGraph) -> VerifyReport {
    let mut edges = Vec::new();
    for (u, v, labels) in g.edges() {
        for l in labels {
            edges.push((u, v, label_index(l)));
        }
    }
    let mut loops = Vec::new();
    for (v, labels) in g.loops() {
        for l in labels {
            loops.push((v, label_index(l)));
        }
    }
    verify_parts(g.vertex_count(), &edges, &loops)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    /// Unroll the non-loop basic cycle with this id.
    Cycle(usize),
    /// Replace the two loops at this vertex by a two-cycle between its lifts.
    Loop(usize),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Cycle(c) => write!(f, "cycle {c}"),
            Move::Loop(v) => write!(f, "loops at {v}"),
        }
    }
}

/// Vertex map of a two-fold covering, `map[v]` in the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covering {
    pub map: Vec<u32>,
}

impl Covering {
    pub fn apply(&self, v: usize) -> usize {
        self.map[v] as usize
    }

    /// Checks fibers of size exactly two and that every labeled incidence at
    /// `v` maps to the same-labeled incidence at its image.
    pub fn verify(&self, source: &Amoeba, target: &Amoeba) -> Result<(), AmoebaError> {
        self.verify_fold(source, target, 2)
    }

    /// As [`Covering::verify`] with every fiber of size `fold`.
    pub fn verify_fold(&self, source: &Amoeba, target: &Amoeba, fold: usize) -> Result<(), AmoebaError> {
        let fail = |m: String| Err(AmoebaError::Covering(m));
        if self.map.len() != source.vertex_count() {
            return fail(format!("map has {} entries for {} vertices", self.map.len(), source.vertex_count()));
        }
        let mut fiber = vec![0usize; target.vertex_count()];
        for &w in &self.map {
            match fiber.get_mut(w as usize) {
                Some(c) => *c += 1,
                None => return fail(format!("image {w} outside target")),
            }
        }
        if let Some(w) = fiber.iter().position(|&c| c != fold) {
            return fail(format!("fiber of {w} has {} points", fiber[w]));
        }
        for v in 0..source.vertex_count() {
            for l in 0..4 {
                let image = self.apply(source.neighbor(v, l));
                if image != target.neighbor(self.apply(v), l) {
                    return fail(format!("label {} at {v} not preserved", LABELS[l]));
                }
            }
        }
        Ok(())
    }

    /// `self` followed by `next`: source of `self` to target of `next`.
    pub fn then(&self, next: &Covering) -> Covering {
        Covering {
            map: self.map.iter().map(|&v| next.map[v as usize]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amoeba {
    star: Vec<[u32; 4]>,
    cycles: Vec<BasicCycle>,
    cycle_at: Vec<[u32; 4]>,
}

impl Amoeba {
    /// Two vertices joined by an `A`/`B` two-cycle, `C` and `D` loops at each.
    pub fn minimal() -> Self {
        Self::from_star(vec![[1, 1, 0, 0], [0, 0, 1, 1]]).expect("minimal amoeba is valid")
    }

    /// Builds and verifies an amoeba from its star table.
    pub fn from_star(star: Vec<[u32; 4]>) -> Result<Self, AmoebaError> {
        let n = star.len();
        for (v, s) in star.iter().enumerate() {
            for (l, &w) in s.iter().enumerate() {
                if w as usize >= n || star[w as usize][l] as usize != v {
                    return Err(AmoebaError::Violation(Violation {
                        invariant: Invariant::StarLabels,
                        witness: format!("label {} at vertex {v} is not an involution", LABELS[l]),
                    }));
                }
            }
        }
        let (edges, loops) = star_parts(&star);
        verify_parts(n, &edges, &loops).map_err(AmoebaError::Violation)?;
        let (cycles, cycle_at) = derive_cycles(&star, &edges);
        Ok(Self { star, cycles, cycle_at })
    }

    pub fn from_graph(g: &LabeledGraph) -> Result<Self, AmoebaError> {
        verify_graph(g).map_err(AmoebaError::Violation)?;
        let mut star = vec![[u32::MAX; 4]; g.vertex_count()];
        for (u, v, labels) in g.edges() {
            for l in labels {
                let l = label_index(l);
                star[u][l] = v as u32;
                star[v][l] = u as u32;
            }
        }
        for (v, labels) in g.loops() {
            for l in labels {
                star[v][label_index(l)] = v as u32;
            }
        }
        Self::from_star(star)
    }

    pub fn to_graph(&self) -> LabeledGraph {
        let mut b = LabeledGraph::builder(self.vertex_count(), 4);
        for (v, s) in self.star.iter().enumerate() {
            for (l, &w) in s.iter().enumerate() {
                let w = w as usize;
                if w == v {
                    b.add_loop(v, LABELS[l]);
                } else if v < w {
                    b.add_edge(v, w, LABELS[l]);
                }
            }
        }
        b.build().expect("amoeba degree is 4")
    }

    pub fn vertex_count(&self) -> usize {
        self.star.len()
    }

    pub fn star(&self) -> &[[u32; 4]] {
        &self.star
    }

    pub fn neighbor(&self, v: usize, label: usize) -> usize {
        self.star[v][label] as usize
    }

    pub fn has_loops(&self, v: usize) -> bool {
        self.star[v].iter().any(|&w| w as usize == v)
    }

    pub fn cycles(&self) -> &[BasicCycle] {
        &self.cycles
    }

    /// Id of the basic cycle through the edge or loop labeled `label` at `v`.
    pub fn cycle_at(&self, v: usize, label: usize) -> usize {
        self.cycle_at[v][label] as usize
    }

    /// Re-runs the full invariant check.
    pub fn verify(&self) -> VerifyReport {
        let (edges, loops) = star_parts(&self.star);
        verify_parts(self.vertex_count(), &edges, &loops)
    }

    /// Vertices whose neighbourhoods a move modifies.
    pub fn touched(&self, mv: Move) -> Vec<usize> {
        match mv {
            Move::Cycle(c) => self.cycles.get(c).map_or(Vec::new(), |c| {
                c.vertices.iter().map(|&v| v as usize).collect()
            }),
            Move::Loop(v) => vec![v],
        }
    }

    /// Two sheets, vertex `(v, s)` with id `v + s n`. A cycle move crosses
    /// sheets on the first edge of the cycle; a loop move turns the two loops
    /// at `x` into a two-cycle between `(x, 0)` and `(x, 1)`. The covering is
    /// `(v, s) -> v`.
    pub fn double(&self, mv: Move) -> Result<(Amoeba, Covering), AmoebaError> {
        let n = self.vertex_count();
        let crossing: Vec<(usize, usize)> = match mv {
            Move::Cycle(id) => {
                let cycle = self
                    .cycles
                    .get(id)
                    .ok_or_else(|| AmoebaError::InvalidMove(format!("no cycle {id}")))?;
                if cycle.is_loop() {
                    return Err(AmoebaError::InvalidMove(format!("cycle {id} is a loop")));
                }
                vec![(cycle.vertices[0] as usize, cycle.labels[0] as usize)]
            }
            Move::Loop(x) => {
                if x >= n {
                    return Err(AmoebaError::UnknownVertex(x));
                }
                let loops: Vec<usize> = (0..4).filter(|&l| self.neighbor(x, l) == x).collect();
                if loops.len() != 2 {
                    return Err(AmoebaError::InvalidMove(format!("vertex {x} has {} loops", loops.len())));
                }
                loops.into_iter().map(|l| (x, l)).collect()
            }
        };
        let crosses = |v: usize, l: usize| {
            let w = self.neighbor(v, l);
            crossing.iter().any(|&(a, la)| la == l && (a == v || a == w))
        };
        let mut star = vec![[0u32; 4]; 2 * n];
        for s in 0..2 {
            for v in 0..n {
                for l in 0..4 {
                    let w = self.neighbor(v, l);
                    let t = if crosses(v, l) { 1 - s } else { s };
                    star[v + s * n][l] = (w + t * n) as u32;
                }
            }
        }
        let doubled = Amoeba::from_star(star)?;
        let covering = Covering {
            map: (0..2 * n).map(|v| (v % n) as u32).collect(),
        };
        covering.verify(&doubled, self)?;
        Ok((doubled, covering))
    }

    /// Largest `k` such that the radius-`k` ball around `v` is a tree
    /// (no loops, edges with multiplicity one fewer than vertices); `-1`
    /// when `v` carries a loop.
    pub fn tree_radius(&self, v: usize) -> i64 {
        let n = self.vertex_count();
        if self.has_loops(v) {
            return -1;
        }
        let mut dist = HashMap::from([(v, 0usize)]);
        let mut layer = vec![v];
        let mut vertices = 1usize;
        let mut edges = 0usize;
        for k in 1.. {
            let mut next = Vec::new();
            for &u in &layer {
                for l in 0..4 {
                    let w = self.neighbor(u, l);
                    if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                        e.insert(k);
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return k as i64 - 1;
            }
            // edges of ball(k) not in ball(k-1): those touching the new layer
            for &w in &next {
                for l in 0..4 {
                    let x = self.neighbor(w, l);
                    if x == w {
                        return k as i64 - 1;
                    }
                    let dx = dist.get(&x).copied();
                    if dx == Some(k - 1) || (dx == Some(k) && w < x) {
                        edges += 1;
                    }
                }
            }
            vertices += next.len();
            if edges != vertices - 1 || vertices > n {
                return k as i64 - 1;
            }
            layer = next;
        }
        unreachable!()
    }

    pub fn distances(&self, v: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        dist[v] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for l in 0..4 {
                let w = self.neighbor(u, l);
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Γ-orbit of `v`; an amoeba is connected, so this is every vertex.
    pub fn orbit_size(&self, v: usize) -> usize {
        self.distances(v).iter().filter(|&&d| d != u32::MAX).count()
    }

    pub fn gamma_act(&self, generator: usize, v: usize) -> usize {
        self.neighbor(v, generator)
    }

    /// The Γ-action with generators `A, B, C, D` as an [`Action`].
    pub fn action(&self) -> AmoebaAction<'_> {
        AmoebaAction {
            amoeba: self,
            presentation: Arc::new(Presentation::gamma()),
        }
    }

    /// Moves that remove an obstruction to a tree ball of radius `k` at `p`:
    /// loop pairs within distance `k`, and cycles `C` whose closest vertex
    /// is at distance `d` with `d + floor(|C| / 2) <= k`. Sorted by distance,
    /// then by the smallest cycle id involved.
    pub fn obstructions(&self, p: usize, k: usize) -> Vec<(usize, usize, Move)> {
        let dist = self.distances(p);
        let mut out = Vec::new();
        for (id, cycle) in self.cycles.iter().enumerate() {
            let dm = cycle.vertices.iter().map(|&v| dist[v as usize] as usize).min().unwrap();
            if cycle.is_loop() {
                let v = cycle.vertices[0] as usize;
                let other = (0..4).filter(|&l| self.neighbor(v, l) == v).map(|l| self.cycle_at(v, l)).min();
                if dm <= k && other == Some(id) {
                    out.push((dm, id, Move::Loop(v)));
                }
            } else if dm + cycle.len() / 2 <= k {
                out.push((dm, id, Move::Cycle(id)));
            }
        }
        out.sort_by_key(|&(d, id, _)| (d, id));
        out
    }
}

fn star_parts(star: &[[u32; 4]]) -> (Vec<(usize, usize, usize)>, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    let mut loops = Vec::new();
    for (v, s) in star.iter().enumerate() {
        for (l, &w) in s.iter().enumerate() {
            let w = w as usize;
            if w == v {
                loops.push((v, l));
            } else if v < w {
                edges.push((v, w, l));
            }
        }
    }
    (edges, loops)
}

/// Cycles in id order: scanning vertices upward and labels `A..D`, each
/// unseen incidence opens the next cycle, walked from that vertex along
/// that label.
fn derive_cycles(star: &[[u32; 4]], edges: &[(usize, usize, usize)]) -> (Vec<BasicCycle>, Vec<[u32; 4]>) {
    let n = star.len();
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
    let mut block_of: HashMap<(usize, usize), usize> = HashMap::with_capacity(edges.len() * 2);
    for (b, block) in multigraph_blocks(n, &pairs).into_iter().enumerate() {
        for e in block {
            let (u, v, l) = edges[e];
            block_of.insert((u, l), b);
            block_of.insert((v, l), b);
        }
    }
    let mut cycle_at = vec![[u32::MAX; 4]; n];
    let mut cycles = Vec::new();
    for v in 0..n {
        for l in 0..4 {
            if cycle_at[v][l] != u32::MAX {
                continue;
            }
            let id = cycles.len() as u32;
            if star[v][l] as usize == v {
                cycle_at[v][l] = id;
                cycles.push(BasicCycle {
                    vertices: vec![v as u32],
                    labels: vec![l as u8],
                });
                continue;
            }
            let block = block_of[&(v, l)];
            let mut vertices = vec![v as u32];
            let mut labels = Vec::new();
            let (mut cur, mut label) = (v, l);
            loop {
                labels.push(label as u8);
                cycle_at[cur][label] = id;
                let next = star[cur][label] as usize;
                cycle_at[next][label] = id;
                if next == v {
                    break;
                }
                vertices.push(next as u32);
                label = (0..4)
                    .find(|&m| m != label && star[next][m] as usize != next && block_of.get(&(next, m)) == Some(&block))
                    .expect("block is a cycle");
                cur = next;
            }
            cycles.push(BasicCycle { vertices, labels });
        }
    }
    (cycles, cycle_at)
}

pub struct AmoebaAction<'a> {
    amoeba: &'a Amoeba,
    presentation: Arc<Presentation>,
}

impl Action for AmoebaAction<'_> {
    type Point = usize;

    fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    fn apply(&self, letter: Letter, &x: &usize) -> Result<usize, ActionError> {
        if x >= self.amoeba.vertex_count() || letter.generator >= 4 {
            return Err(ActionError::OutOfWindow { point: x.to_string() });
        }
        Ok(self.amoeba.neighbor(x, letter.generator))
    }
}
