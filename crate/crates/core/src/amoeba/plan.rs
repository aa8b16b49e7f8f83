//! Move planning on the radius-`k` ball around the basepoint.
//!
//! Doubling never brings a cycle closer to the lifted basepoint, and the new
//! ball projects into the old one, so the search only needs the ball: a
//! star table over vertices at distance `<= k`, with `UNKNOWN` for edges
//! that leave it. Vertices are numbered in label-ordered BFS order from the
//! basepoint, which makes the table a canonical form of the pointed ball.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Amoeba, AmoebaError, Move};
use crate::graphs::multigraph_blocks;

const UNKNOWN: u32 = u32::MAX;

/// A move located by the label path from the basepoint to a vertex `x`:
/// either the loops at `x` or the cycle through the edge at `x` with `label`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedMove {
    pub path: Vec<u8>,
    pub kind: PlannedKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannedKind {
    Loop,
    Cycle { label: u8 },
}

impl PlannedMove {
    /// The move in `amoeba` with basepoint `p`.
    pub fn locate(&self, amoeba: &Amoeba, p: usize) -> Move {
        let x = self.path.iter().fold(p, |v, &l| amoeba.neighbor(v, l as usize));
        match self.kind {
            PlannedKind::Loop => Move::Loop(x),
            PlannedKind::Cycle { label } => Move::Cycle(amoeba.cycle_at(x, label as usize)),
        }
    }
}

#[derive(Clone)]
struct Ball {
    star: Vec<[u32; 4]>,
    parent: Vec<(u32, u8)>,
    dist: Vec<u32>,
}

struct Obstruction {
    dist: u32,
    cost: u32,
    anchor: u32,
    kind: PlannedKind,
}

impl Ball {
    /// BFS from vertex 0 of `star`, keeping distance `<= k` and renumbering.
    fn truncate(star: &[[u32; 4]], k: u32) -> Ball {
        let mut id: HashMap<u32, u32> = HashMap::from([(0, 0)]);
        let mut order = vec![0u32];
        let mut parent = vec![(0u32, 0u8)];
        let mut dist = vec![0u32];
        let mut queue = VecDeque::from([0u32]);
        while let Some(u) = queue.pop_front() {
            let du = dist[id[&u] as usize];
            if du == k {
                continue;
            }
            for l in 0..4 {
                let w = star[u as usize][l];
                if w == UNKNOWN || id.contains_key(&w) {
                    continue;
                }
                id.insert(w, order.len() as u32);
                parent.push((id[&u], l as u8));
                dist.push(du + 1);
                order.push(w);
                queue.push_back(w);
            }
        }
        let star = order
            .iter()
            .map(|&v| {
                let mut row = [UNKNOWN; 4];
                for l in 0..4 {
                    let w = star[v as usize][l];
                    if w != UNKNOWN {
                        row[l] = id.get(&w).copied().unwrap_or(UNKNOWN);
                    }
                }
                row
            })
            .collect();
        Ball { star, parent, dist }
    }

    fn path_to(&self, mut v: u32) -> Vec<u8> {
        let mut path = Vec::new();
        while v != 0 {
            let (p, l) = self.parent[v as usize];
            path.push(l);
            v = p;
        }
        path.reverse();
        path
    }

    /// Complete cycles are exactly the blocks of the known edges that are
    /// cycles; returned as (vertices, anchor vertex, anchor label).
    fn cycles(&self) -> Vec<(Vec<u32>, u32, u8)> {
        let mut edges = Vec::new();
        let mut labels = Vec::new();
        for (v, row) in self.star.iter().enumerate() {
            for (l, &w) in row.iter().enumerate() {
                if w != UNKNOWN && (v as u32) < w {
                    edges.push((v, w as usize));
                    labels.push(l as u8);
                }
            }
        }
        let mut out = Vec::new();
        for block in multigraph_blocks(self.star.len(), &edges) {
            let mut degree: HashMap<usize, u32> = HashMap::new();
            for &e in &block {
                *degree.entry(edges[e].0).or_default() += 1;
                *degree.entry(edges[e].1).or_default() += 1;
            }
            if block.len() >= 2 && degree.len() == block.len() && degree.values().all(|&d| d == 2) {
                let anchor = block.iter().copied().min_by_key(|&e| edges[e]).unwrap();
                out.push((
                    degree.into_keys().map(|v| v as u32).collect(),
                    edges[anchor].0 as u32,
                    labels[anchor],
                ));
            }
        }
        out
    }

    fn obstructions(&self, k: u32) -> Vec<Obstruction> {
        let need = |mut len: u32, dm: u32| {
            let mut moves = 0;
            while dm + len / 2 <= k {
                len *= 2;
                moves += 1;
            }
            moves
        };
        let mut out = Vec::new();
        for (v, row) in self.star.iter().enumerate() {
            if row.iter().any(|&w| w == v as u32) {
                let d = self.dist[v];
                out.push(Obstruction {
                    dist: d,
                    cost: 1 + need(2, d),
                    anchor: v as u32,
                    kind: PlannedKind::Loop,
                });
            }
        }
        for (vertices, anchor, label) in self.cycles() {
            let dm = vertices.iter().map(|&v| self.dist[v as usize]).min().unwrap();
            if dm + vertices.len() as u32 / 2 <= k {
                out.push(Obstruction {
                    dist: dm,
                    cost: need(vertices.len() as u32, dm),
                    anchor,
                    kind: PlannedKind::Cycle { label },
                });
            }
        }
        out.sort_by_key(|o| (o.dist, o.anchor));
        out
    }

    fn double(&self, o: &Obstruction, k: u32) -> Ball {
        let n = self.star.len() as u32;
        let x = o.anchor as usize;
        let crosses = |v: usize, l: usize| match o.kind {
            PlannedKind::Loop => v == x && self.star[v][l] == v as u32,
            PlannedKind::Cycle { label } => {
                l == label as usize && (v == x || self.star[v][l] == x as u32)
            }
        };
        let mut star = vec![[UNKNOWN; 4]; 2 * n as usize];
        for s in 0..2u32 {
            for v in 0..n as usize {
                for l in 0..4 {
                    let w = self.star[v][l];
                    if w != UNKNOWN {
                        let t = if crosses(v, l) { 1 - s } else { s };
                        star[v + (s * n) as usize][l] = w + t * n;
                    }
                }
            }
        }
        Ball::truncate(&star, k)
    }
}

struct Search {
    k: u32,
    limit: u32,
    nodes: u64,
    max_nodes: u64,
    seen: HashMap<Vec<[u32; 4]>, u32>,
    path: Vec<PlannedMove>,
}

enum Step {
    Found,
    Bound(u32),
    Exhausted,
}

impl Search {
    fn dfs(&mut self, ball: &Ball, depth: u32) -> Step {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Step::Exhausted;
        }
        let obstructions = ball.obstructions(self.k);
        if obstructions.is_empty() {
            return Step::Found;
        }
        let h: u32 = obstructions.iter().map(|o| o.cost).sum();
        if depth + h > self.limit {
            return Step::Bound(depth + h);
        }
        match self.seen.get(&ball.star) {
            Some(&d) if d <= depth => return Step::Bound(u32::MAX),
            _ => {
                self.seen.insert(ball.star.clone(), depth);
            }
        }
        let mut next_bound = u32::MAX;
        for o in &obstructions {
            self.path.push(PlannedMove {
                path: ball.path_to(o.anchor),
                kind: o.kind,
            });
            match self.dfs(&ball.double(o, self.k), depth + 1) {
                Step::Found => return Step::Found,
                Step::Exhausted => return Step::Exhausted,
                Step::Bound(b) => next_bound = next_bound.min(b),
            }
            self.path.pop();
        }
        Step::Bound(next_bound)
    }
}

/// Shortest sequence of obstruction-removing moves after which the radius-`k`
/// ball at `p` is a tree, found by iterative deepening with an admissible
/// per-obstruction doubling count. Fails with `Capacity` once more than
/// `max_moves` moves would be needed.
pub fn plan_moves(amoeba: &Amoeba, p: usize, k: usize, max_moves: usize) -> Result<Vec<PlannedMove>, AmoebaError> {
    let n = amoeba.vertex_count();
    if p >= n {
        return Err(AmoebaError::UnknownVertex(p));
    }
    // relabel so that p is vertex 0
    let mut star: Vec<[u32; 4]> = amoeba.star().to_vec();
    star.swap(0, p);
    let swap = |w: u32| match w as usize {
        w if w == p => 0,
        0 => p as u32,
        w => w as u32,
    };
    for row in &mut star {
        for w in row.iter_mut() {
            *w = swap(*w);
        }
    }
    let k32 = k as u32;
    let root = Ball::truncate(&star, k32);
    let mut search = Search {
        k: k32,
        limit: root.obstructions(k32).iter().map(|o| o.cost).sum(),
        nodes: 0,
        max_nodes: 200_000_000,
        seen: HashMap::new(),
        path: Vec::new(),
    };
    let too_many = |moves: usize| AmoebaError::Capacity {
        vertices: n.saturating_mul(1usize.checked_shl(moves as u32).unwrap_or(usize::MAX)),
        budget: n.saturating_mul(1usize.checked_shl(max_moves as u32).unwrap_or(usize::MAX)),
    };
    loop {
        if search.limit as usize > max_moves {
            return Err(too_many(search.limit as usize));
        }
        search.seen.clear();
        match search.dfs(&root, 0) {
            Step::Found => return Ok(search.path),
            Step::Bound(u32::MAX) => return Err(too_many(max_moves + 1)),
            Step::Bound(b) => search.limit = b,
            Step::Exhausted => {
                return Err(AmoebaError::InvalidMove("planner node limit reached".into()))
            }
        }
    }
}
