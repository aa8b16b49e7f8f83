//! Finite labeled graphs and the Schreier-graph constructions built on them.
//!
//! A [`LabeledGraph`] keeps non-loop edges as unordered pairs carrying a
//! label multiset and stores loops separately. The labeled degree counts
//! every label (a loop contributes 1); the plain view ignores loops and
//! multiplicities.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{Action, ActionError};
use crate::words::{Letter, Presentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} not in graph")]
    UnknownVertex(usize),
    #[error("edge {{{0}, {0}}} must be stored as a loop")]
    SelfEdge(usize),
    #[error("vertex {vertex} has degree {degree} above the bound {bound}")]
    DegreeBound {
        vertex: usize,
        degree: usize,
        bound: usize,
    },
    #[error("edge {{{0}, {1}}} has an empty label multiset")]
    EmptyLabels(usize, usize),
    #[error("graph has loops; this operation needs a loop-free graph")]
    LoopsPresent,
    #[error("unknown export format `{0}`")]
    UnknownFormat(String),
    #[error("malformed graph json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), Vec<String>>,
    loops: BTreeMap<usize, Vec<String>>,
    degree_bound: usize,
    adj: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n: usize,
    degree_bound: usize,
    edges: BTreeMap<(usize, usize), Vec<String>>,
    loops: BTreeMap<usize, Vec<String>>,
}

impl GraphBuilder {
    pub fn add_edge(&mut self, u: usize, v: usize, label: impl Into<String>) -> &mut Self {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.entry(key).or_default().push(label.into());
        self
    }

    pub fn add_loop(&mut self, v: usize, label: impl Into<String>) -> &mut Self {
        self.loops.entry(v).or_default().push(label.into());
        self
    }

    pub fn build(self) -> Result<LabeledGraph, GraphError> {
        LabeledGraph::from_parts(self.n, self.edges, self.loops, self.degree_bound)
    }
}

impl LabeledGraph {
    pub fn builder(n: usize, degree_bound: usize) -> GraphBuilder {
        GraphBuilder {
            n,
            degree_bound,
            edges: BTreeMap::new(),
            loops: BTreeMap::new(),
        }
    }

    pub fn empty() -> Self {
        Self::builder(0, 0).build().expect("empty graph")
    }

    /// Unlabeled simple graph; every edge gets the label `"e"`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut b = Self::builder(n, usize::MAX);
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfEdge(u));
            }
            let key = if u < v { (u, v) } else { (v, u) };
            b.edges.entry(key).or_insert_with(|| vec!["e".to_owned()]);
        }
        let mut g = b.build()?;
        g.degree_bound = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
        Ok(g)
    }

    pub fn from_parts(
        n: usize,
        mut edges: BTreeMap<(usize, usize), Vec<String>>,
        mut loops: BTreeMap<usize, Vec<String>>,
        degree_bound: usize,
    ) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for (&(u, v), labels) in edges.iter_mut() {
            if u >= n {
                return Err(GraphError::UnknownVertex(u));
            }
            if v >= n {
                return Err(GraphError::UnknownVertex(v));
            }
            if u == v {
                return Err(GraphError::SelfEdge(u));
            }
            if labels.is_empty() {
                return Err(GraphError::EmptyLabels(u, v));
            }
            labels.sort();
            adj[u].push(v);
            adj[v].push(u);
        }
        loops.retain(|_, l| !l.is_empty());
        for (&v, labels) in loops.iter_mut() {
            if v >= n {
                return Err(GraphError::UnknownVertex(v));
            }
            labels.sort();
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Self {
            n,
            edges,
            loops,
            degree_bound,
            adj,
        };
        for v in 0..n {
            let degree = g.degree(v);
            if degree > degree_bound {
                return Err(GraphError::DegreeBound {
                    vertex: v,
                    degree,
                    bound: degree_bound,
                });
            }
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of distinct vertex pairs joined by an edge.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &[String])> + '_ {
        self.edges.iter().map(|(&(u, v), l)| (u, v, l.as_slice()))
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.keys().copied().collect()
    }

    pub fn edge_labels(&self, u: usize, v: usize) -> Option<&[String]> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.get(&key).map(Vec::as_slice)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_labels(u, v).is_some()
    }

    pub fn loops(&self) -> impl Iterator<Item = (usize, &[String])> + '_ {
        self.loops.iter().map(|(&v, l)| (v, l.as_slice()))
    }

    pub fn loop_labels(&self, v: usize) -> &[String] {
        self.loops.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn has_loops(&self) -> bool {
        !self.loops.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Labeled degree: each edge label counts once, each loop once.
    pub fn degree(&self, v: usize) -> usize {
        let edge_part: usize = self.adj[v]
            .iter()
            .map(|&u| self.edge_labels(u, v).map_or(0, <[String]>::len))
            .sum();
        edge_part + self.loop_labels(v).len()
    }

    /// Distinct neighbours, loops ignored.
    pub fn plain_degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_plain_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The same graph without its loops.
    pub fn without_loops(&self) -> Self {
        Self {
            loops: BTreeMap::new(),
            ..self.clone()
        }
    }

    /// Relabels vertices by `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|(&(u, v), l)| {
                let (a, b) = (perm[u], perm[v]);
                ((a.min(b), a.max(b)), l.clone())
            })
            .collect();
        let loops = self.loops.iter().map(|(&v, l)| (perm[v], l.clone())).collect();
        Self::from_parts(self.n, edges, loops, self.degree_bound).expect("permutation keeps validity")
    }

    /// Breadth-first distances from `v`.
    pub fn distances(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        if v >= self.n {
            return dist;
        }
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_with(self.n, self.edges.keys().copied())
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().len() == 1
    }

    /// Subgraph induced on `vertices`, re-indexed in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(GraphError::UnknownVertex(v));
            }
            index.insert(v, i);
        }
        let mut edges = BTreeMap::new();
        let mut loops = BTreeMap::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &u in &self.adj[v] {
                if let Some(&j) = index.get(&u) {
                    if i < j {
                        edges.insert((i, j), self.edge_labels(u, v).unwrap().to_vec());
                    }
                }
            }
            if !self.loop_labels(v).is_empty() {
                loops.insert(i, self.loop_labels(v).to_vec());
            }
        }
        Self::from_parts(vertices.len(), edges, loops, self.degree_bound)
    }

    pub fn export(&self, format: &str) -> Result<Vec<u8>, GraphError> {
        match format {
            "json" => Ok(self.to_json().into_bytes()),
            "dot" => Ok(self.to_dot().into_bytes()),
            other => Err(GraphError::UnknownFormat(other.to_owned())),
        }
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson {
            vertices: (0..self.n).collect(),
            edges: self
                .edges
                .iter()
                .map(|(&(u, v), labels)| EdgeJson {
                    u,
                    v,
                    labels: labels.clone(),
                })
                .collect(),
            loops: self
                .loops
                .iter()
                .map(|(&v, labels)| LoopJson {
                    v,
                    labels: labels.clone(),
                })
                .collect(),
            degree_bound: self.degree_bound,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph json")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let raw: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        Self::from_json_value(raw)
    }

    pub fn from_json_value(raw: GraphJson) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(raw.vertices.len());
        for (i, &id) in raw.vertices.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(GraphError::Json(format!("duplicate vertex id {id}")));
            }
        }
        let lookup = |id: usize| index.get(&id).copied().ok_or(GraphError::UnknownVertex(id));
        let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
        for e in raw.edges {
            let (a, b) = (lookup(e.u)?, lookup(e.v)?);
            if a == b {
                return Err(GraphError::SelfEdge(e.u));
            }
            edges.entry((a.min(b), a.max(b))).or_default().extend(e.labels);
        }
        let mut loops: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for l in raw.loops {
            loops.entry(lookup(l.v)?).or_default().extend(l.labels);
        }
        Self::from_parts(raw.vertices.len(), edges, loops, raw.degree_bound)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {v};");
        }
        for (&(u, v), labels) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v} [label=\"{}\"];", labels.join(","));
        }
        for (&v, labels) in &self.loops {
            for label in labels {
                let _ = writeln!(out, "  {v} -- {v} [label=\"{label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopJson {
    pub v: usize,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeJson>,
    pub loops: Vec<LoopJson>,
    pub degree_bound: usize,
}

/// Components of the graph on `0..n` with the given edges.
pub fn components_with(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut dsu = Dsu::new(n);
    for (u, v) in edges {
        dsu.union(u, v);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut first_of_root = HashMap::new();
    for v in 0..n {
        let r = dsu.find(v);
        let key = *first_of_root.entry(r).or_insert(v);
        groups.entry(key).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    pub fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Schreier graph of an action restricted to a finite point set.
#[derive(Debug, Clone)]
pub struct SchreierGraph<P> {
    pub graph: LabeledGraph,
    pub points: Vec<P>,
    /// Generator arrows whose image left the point set (or the window).
    pub dropped: usize,
}

/// Builds the labeled Schreier graph on `points` (sorted, deduplicated).
///
/// For a generator `g` with `g(x) = y != x` the edge `{x, y}` gets the label
/// `g` when `x < y` and `g^-1` otherwise, so each arrow is read from the
/// smaller endpoint. Involutive generators label each pair once. Fixed
/// points become loops labeled `g`.
pub fn schreier<A: Action>(action: &A, points: &[A::Point]) -> SchreierGraph<A::Point> {
    let mut points = points.to_vec();
    points.sort();
    points.dedup();
    let index: HashMap<&A::Point, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let presentation = action.presentation();
    let mut b = LabeledGraph::builder(points.len(), presentation.symmetric_size());
    let mut dropped = 0;
    for (i, x) in points.iter().enumerate() {
        for g in 0..presentation.rank() {
            let name = presentation.name(g);
            match action.apply(Letter::new(g, false), x) {
                Ok(y) if &y == x => {
                    b.add_loop(i, name);
                }
                Ok(y) => match index.get(&y) {
                    Some(&j) => {
                        if presentation.is_involutive() {
                            if i < j {
                                b.add_edge(i, j, name);
                            }
                        } else if i < j {
                            b.add_edge(i, j, name);
                        } else {
                            b.add_edge(j, i, format!("{name}^-1"));
                        }
                    }
                    None => dropped += 1,
                },
                Err(_) => dropped += 1,
            }
        }
    }
    let graph = b.build().expect("schreier degree is bounded by |S|");
    SchreierGraph {
        graph,
        points,
        dropped,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    pub colors: BTreeMap<(usize, usize), usize>,
    pub num_colors: usize,
}

/// Greedy proper edge coloring in edge order; uses at most `2d - 1` colors.
pub fn proper_edge_coloring(g: &LabeledGraph) -> Result<EdgeColoring, GraphError> {
    if g.has_loops() {
        return Err(GraphError::LoopsPresent);
    }
    Ok(greedy_coloring(g))
}

fn greedy_coloring(g: &LabeledGraph) -> EdgeColoring {
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    let mut colors = BTreeMap::new();
    let mut num_colors = 0;
    for (u, v) in g.edge_pairs() {
        let c = (0..)
            .find(|c| !used[u].contains(c) && !used[v].contains(c))
            .unwrap();
        used[u].push(c);
        used[v].push(c);
        colors.insert((u, v), c);
        num_colors = num_colors.max(c + 1);
    }
    EdgeColoring { colors, num_colors }
}

impl EdgeColoring {
    pub fn is_proper(&self) -> bool {
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        for (&(u, v), &c) in &self.colors {
            if seen.insert((u, c), ()).is_some() || seen.insert((v, c), ()).is_some() {
                return false;
            }
        }
        true
    }

    pub fn classes(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.num_colors];
        for (&e, &c) in &self.colors {
            out[c].push(e);
        }
        out
    }

    /// The graph relabeled with colors `c1, ..., cn`.
    pub fn relabeled(&self, g: &LabeledGraph) -> LabeledGraph {
        let mut b = LabeledGraph::builder(g.vertex_count(), self.num_colors);
        for (&(u, v), &c) in &self.colors {
            b.add_edge(u, v, format!("c{}", c + 1));
        }
        b.build().expect("proper coloring has degree <= colors")
    }

    /// Each color class as an order-2 generator of `C2 * ... * C2`.
    pub fn to_action(&self, n: usize) -> MatchingAction {
        let names: Vec<String> = (1..=self.num_colors.max(1)).map(|c| format!("c{c}")).collect();
        let mut partner = vec![vec![None; n]; names.len()];
        for (&(u, v), &c) in &self.colors {
            partner[c][u] = Some(v);
            partner[c][v] = Some(u);
        }
        MatchingAction {
            presentation: Arc::new(Presentation::free_product_c2(&names).expect("distinct names")),
            partner,
        }
    }
}

/// Involutions given by partial matchings on `0..n`; unmatched points are fixed.
#[derive(Debug, Clone)]
pub struct MatchingAction {
    presentation: Arc<Presentation>,
    partner: Vec<Vec<Option<usize>>>,
}

impl Action for MatchingAction {
    type Point = usize;

    fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    fn apply(&self, letter: Letter, &x: &usize) -> Result<usize, ActionError> {
        let table = self
            .partner
            .get(letter.generator)
            .filter(|t| x < t.len())
            .ok_or_else(|| ActionError::OutOfWindow {
                point: x.to_string(),
            })?;
        Ok(table[x].unwrap_or(x))
    }
}

/// A partial bijection `t: A -> B` whose pairs are edges of the ambient graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicSubgraph {
    pub domain: Vec<usize>,
    pub range: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

/// Edge-disjoint cover of the non-loop edges by partial matchings, one per
/// color of a greedy proper coloring. Loops are not edges here and are skipped.
pub fn basic_subgraph_decomposition(g: &LabeledGraph) -> Vec<BasicSubgraph> {
    greedy_coloring(&g.without_loops())
        .classes()
        .into_iter()
        .map(|pairs| BasicSubgraph {
            domain: pairs.iter().map(|p| p.0).collect(),
            range: pairs.iter().map(|p| p.1).collect(),
            pairs,
        })
        .collect()
}

/// A graph with a distinguished root; `original[i]` is the ambient vertex of `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: LabeledGraph,
    pub root: usize,
    pub original: Vec<usize>,
}

/// Subgraph induced on the vertices within distance `r` of `v`, loops
/// included. Vertices are ordered by (distance, ambient id), so the root is 0.
pub fn ball(g: &LabeledGraph, v: usize, r: usize) -> Result<RootedGraph, GraphError> {
    if v >= g.vertex_count() {
        return Err(GraphError::UnknownVertex(v));
    }
    let mut order = vec![v];
    let mut dist = HashMap::from([(v, 0usize)]);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        let d = dist[&u];
        if d == r {
            continue;
        }
        let start = order.len();
        for &w in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                order.push(w);
            }
        }
        order[start..].sort_unstable();
    }
    order.sort_by_key(|u| (dist[u], *u));
    Ok(RootedGraph {
        graph: g.induced(&order)?,
        root: 0,
        original: order,
    })
}

/// Blocks (biconnected components) of a multigraph without loops, as lists
/// of edge indices. Parallel edges land in the same block.
pub fn multigraph_blocks(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(u, v)) in edges.iter().enumerate() {
        incident[u].push((v, id));
        incident[v].push((u, id));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut blocks = Vec::new();
    // frame: (vertex, parent edge id, next incident position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (u, parent_edge, ref mut pos)) = stack.last_mut() {
            if *pos < incident[u].len() {
                let (w, id) = incident[u][*pos];
                *pos += 1;
                if id == parent_edge {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(id);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, id, 0));
                } else if disc[w] < disc[u] {
                    edge_stack.push(id);
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some(id) = edge_stack.pop() {
                            block.push(id);
                            if id == parent_edge {
                                break;
                            }
                        }
                        block.sort_unstable();
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{F2ZAction, F2ZConfig, TranslationAction, Window};

    fn cycle(n: usize) -> LabeledGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        LabeledGraph::from_edges(n, &edges).unwrap()
    }

    fn path(n: usize) -> LabeledGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        LabeledGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn translation_schreier_is_a_path() {
        let a = TranslationAction::new(vec![0], vec![9]).unwrap();
        let sg = schreier(&a, &a.points());
        assert_eq!(sg.graph.vertex_count(), 10);
        assert_eq!(sg.graph.edge_count(), 9);
        assert!(!sg.graph.has_loops());
        // the two ends each lose one arrow
        assert_eq!(sg.dropped, 1);
        assert!((0..10).all(|v| sg.graph.degree(v) <= 2));
    }

    #[test]
    fn f2z_block_schreier() {
        // one s-block [0,3] with f = +1 and t acting on the odd neighbours
        let cfg = F2ZConfig::new(-1, vec![-2, 0, 3, 5], vec![1, 1, 1, 1]).unwrap();
        let a = F2ZAction::new(cfg);
        let sg = schreier(&a, &[0, 1, 2, 3]);
        let g = &sg.graph;
        assert_eq!(g.edge_labels(0, 1).unwrap(), ["s"]);
        assert_eq!(g.edge_labels(1, 2).unwrap(), ["s"]);
        assert_eq!(g.edge_labels(2, 3).unwrap(), ["s"]);
        // s(3) = 0, read from the smaller endpoint as s^-1
        assert_eq!(g.edge_labels(0, 3).unwrap(), ["s^-1"]);
        // t fixes the interior of the even block
        assert_eq!(g.loop_labels(1), ["t"]);
        assert_eq!(g.loop_labels(2), ["t"]);
        // t moves the anchors out of the window
        assert_eq!(sg.dropped, 2);
        assert!((0..4).all(|v| g.degree(v) <= 4));
    }

    #[test]
    fn coloring_examples() {
        let single = LabeledGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(proper_edge_coloring(&single).unwrap().num_colors, 1);
        assert_eq!(proper_edge_coloring(&path(3)).unwrap().num_colors, 2);
        let c5 = proper_edge_coloring(&cycle(5)).unwrap();
        assert_eq!(c5.num_colors, 3);
        assert!(c5.is_proper());
    }

    #[test]
    fn c5_has_no_proper_two_coloring() {
        let edges = cycle(5).edge_pairs();
        for mask in 0u32..(1 << 5) {
            let color = |i: usize| (mask >> i) & 1;
            let proper = (0..5).all(|v| {
                let inc: Vec<usize> = (0..5).filter(|&i| edges[i].0 == v || edges[i].1 == v).collect();
                color(inc[0]) != color(inc[1])
            });
            assert!(!proper);
        }
    }

    #[test]
    fn coloring_rejects_loops() {
        let mut b = LabeledGraph::builder(1, 1);
        b.add_loop(0, "a");
        assert_eq!(proper_edge_coloring(&b.build().unwrap()), Err(GraphError::LoopsPresent));
    }

    #[test]
    fn coloring_realizes_graph_as_c2_schreier() {
        let g = cycle(7);
        let col = proper_edge_coloring(&g).unwrap();
        let action = col.to_action(7);
        let sg = schreier(&action, &(0..7).collect::<Vec<_>>());
        assert_eq!(sg.graph.without_loops().edge_pairs(), g.edge_pairs());
        assert_eq!(sg.graph.without_loops(), col.relabeled(&g));
    }

    #[test]
    fn basic_subgraphs() {
        let single = basic_subgraph_decomposition(&LabeledGraph::from_edges(2, &[(0, 1)]).unwrap());
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].domain, [0]);
        assert_eq!(single[0].range, [1]);
        assert_eq!(basic_subgraph_decomposition(&path(3)).len(), 2);
        let c5 = basic_subgraph_decomposition(&cycle(5));
        assert_eq!(c5.len(), 3);
        assert_eq!(c5.iter().map(|b| b.pairs.len()).sum::<usize>(), 5);
    }

    #[test]
    fn balls() {
        let g = path(10);
        let b0 = ball(&g, 4, 0).unwrap();
        assert_eq!(b0.graph.vertex_count(), 1);
        let b1 = ball(&g, 4, 1).unwrap();
        assert_eq!(b1.original, [4, 3, 5]);
        assert_eq!(b1.graph.edge_count(), 2);
        assert_eq!(ball(&g, 0, 20).unwrap().graph.vertex_count(), 10);
        assert_eq!(ball(&g, 10, 1), Err(GraphError::UnknownVertex(10)));
    }

    #[test]
    fn json_examples() {
        let empty = LabeledGraph::empty();
        let v: serde_json::Value = serde_json::from_slice(&empty.export("json").unwrap()).unwrap();
        assert_eq!(v["vertices"], serde_json::json!([]));
        assert_eq!(v["edges"], serde_json::json!([]));
        let mut b = LabeledGraph::builder(2, 1);
        b.add_edge(0, 1, "a");
        let g = b.build().unwrap();
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(v["edges"], serde_json::json!([{"u": 0, "v": 1, "labels": ["a"]}]));
        assert_eq!(LabeledGraph::from_json(&g.to_json()).unwrap(), g);
        assert!(matches!(g.export("xml"), Err(GraphError::UnknownFormat(_))));
        let dot = String::from_utf8(g.export("dot").unwrap()).unwrap();
        assert!(dot.contains("0 -- 1 [label=\"a\"]"));
    }

    #[test]
    fn degree_bound_enforced() {
        let mut b = LabeledGraph::builder(2, 1);
        b.add_edge(0, 1, "a").add_loop(0, "b");
        assert!(matches!(b.build(), Err(GraphError::DegreeBound { vertex: 0, .. })));
    }

    #[test]
    fn blocks_of_cactus() {
        // triangle 0-1-2, bridge 2-3, double edge 3-4
        let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (3, 4)];
        let mut blocks = multigraph_blocks(5, &edges);
        blocks.sort();
        assert_eq!(blocks, vec![vec![0, 1, 2], vec![3], vec![4, 5]]);
    }

    #[test]
    fn z2_schreier_degrees() {
        let a = TranslationAction::cube(2, 3);
        let sg = schreier(&a, &a.points());
        assert_eq!(sg.graph.vertex_count(), 49);
        assert_eq!(sg.graph.edge_count(), 2 * 7 * 6);
        let _ = Window::new(0, 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_graph() -> impl Strategy<Value = LabeledGraph> {
            (2usize..14)
                .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..30)))
                .prop_map(|(n, pairs)| {
                    let edges: Vec<_> = pairs.into_iter().filter(|(u, v)| u != v).collect();
                    LabeledGraph::from_edges(n, &edges).unwrap()
                })
        }

        proptest! {
            #[test]
            fn coloring_is_proper_and_bounded(g in random_graph()) {
                let c = proper_edge_coloring(&g).unwrap();
                prop_assert!(c.is_proper());
                let d = g.max_plain_degree();
                prop_assert!(c.num_colors <= (2 * d).saturating_sub(1).max(0));
                let parts = basic_subgraph_decomposition(&g);
                prop_assert_eq!(parts.iter().map(|b| b.pairs.len()).sum::<usize>(), g.edge_count());
                for part in &parts {
                    let mut seen = std::collections::HashSet::new();
                    for &(a, b) in &part.pairs {
                        prop_assert!(g.has_edge(a, b));
                        prop_assert!(seen.insert(a) && seen.insert(b));
                    }
                }
            }

            #[test]
            fn balls_are_nested(g in random_graph(), r in 0usize..4) {
                let b1 = ball(&g, 0, r).unwrap();
                let b2 = ball(&g, 0, r + 1).unwrap();
                prop_assert!(b1.original.iter().all(|v| b2.original.contains(v)));
                let full = ball(&g, 0, g.vertex_count()).unwrap();
                let comp = g.components().into_iter().find(|c| c.contains(&0)).unwrap();
                let mut got = full.original.clone();
                got.sort_unstable();
                prop_assert_eq!(got, comp);
            }

            #[test]
            fn json_roundtrip(g in random_graph()) {
                prop_assert_eq!(LabeledGraph::from_json(&g.to_json()).unwrap(), g);
            }
        }
    }
}
