//! Rooted ball codes and radius-r neighbourhood censuses.
//!
//! A code is the lexicographically least encoding of the rooted graph over
//! the leaves of an individualization-refinement search, with branches
//! pruned by automorphisms found along the way. The code is decodable back
//! into a rooted graph, which is what lets a labeled census be marginalized.
//! The unlabeled variant forgets label names but keeps edge multiplicities
//! and loop counts.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{ball, Dsu, GraphError, LabeledGraph, RootedGraph};
use crate::rational::{self, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalStatsError {
    #[error("vertex {0} is not connected to the root")]
    Disconnected(usize),
    #[error("censuses differ in radius ({0} vs {1})")]
    RadiusMismatch(usize, usize),
    #[error("censuses differ in labeling (labeled {0} vs {1})")]
    LabelingMismatch(bool, bool),
    #[error("census is already unlabeled")]
    AlreadyUnlabeled,
    #[error("malformed ball code: {0}")]
    MalformedCode(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Canonical byte string of a rooted ball.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedBallCode(Vec<u8>);

impl RootedBallCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(text: &str) -> Result<Self, LocalStatsError> {
        if text.len() % 2 != 0 {
            return Err(LocalStatsError::MalformedCode("odd hex length".into()));
        }
        let bytes = (0..text.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&text[i..i + 2], 16))
            .collect::<Result<Vec<u8>, _>>()
            .map_err(|e| LocalStatsError::MalformedCode(e.to_string()))?;
        let code = Self(bytes);
        code.decode()?;
        Ok(code)
    }

    pub fn is_labeled(&self) -> bool {
        self.0.first() == Some(&1)
    }

    /// The rooted graph in canonical vertex order; the root is vertex 0.
    /// Unlabeled codes decode with every label set to the empty string.
    pub fn decode(&self) -> Result<RootedGraph, LocalStatsError> {
        let mut r = Reader { bytes: &self.0, pos: 0 };
        let _labeled = r.byte()?;
        let n = r.uint()?;
        let mut loops = BTreeMap::new();
        for v in 0..n {
            let labels = r.labels()?;
            if !labels.is_empty() {
                loops.insert(v, labels);
            }
        }
        let m = r.uint()?;
        let mut edges = BTreeMap::new();
        for _ in 0..m {
            let (u, v) = (r.uint()?, r.uint()?);
            edges.insert((u, v), r.labels()?);
        }
        if r.pos != self.0.len() {
            return Err(LocalStatsError::MalformedCode("trailing bytes".into()));
        }
        let mut degree_bound = 0;
        let mut deg = vec![0usize; n];
        for (&(u, v), l) in &edges {
            deg[u] += l.len();
            deg[v] += l.len();
        }
        for (&v, l) in &loops {
            deg[v] += l.len();
        }
        for d in deg {
            degree_bound = degree_bound.max(d);
        }
        let graph = LabeledGraph::from_parts(n, edges, loops, degree_bound)?;
        Ok(RootedGraph {
            graph,
            root: 0,
            original: (0..n).collect(),
        })
    }
}

impl fmt::Debug for RootedBallCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootedBallCode({})", self.to_hex())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Result<u8, LocalStatsError> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| LocalStatsError::MalformedCode("truncated".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn uint(&mut self) -> Result<usize, LocalStatsError> {
        let hi = self.byte()? as usize;
        let lo = self.byte()? as usize;
        Ok(hi << 8 | lo)
    }

    fn labels(&mut self) -> Result<Vec<String>, LocalStatsError> {
        let count = self.uint()?;
        (0..count)
            .map(|_| {
                let len = self.byte()? as usize;
                let end = self.pos + len;
                let raw = self
                    .bytes
                    .get(self.pos..end)
                    .ok_or_else(|| LocalStatsError::MalformedCode("truncated label".into()))?;
                self.pos = end;
                String::from_utf8(raw.to_vec()).map_err(|e| LocalStatsError::MalformedCode(e.to_string()))
            })
            .collect()
    }
}

fn put_uint(out: &mut Vec<u8>, x: usize) {
    assert!(x < 1 << 16, "ball too large for code");
    out.push((x >> 8) as u8);
    out.push(x as u8);
}

fn put_labels(out: &mut Vec<u8>, labels: &[String]) {
    put_uint(out, labels.len());
    for l in labels {
        assert!(l.len() < 256, "label too long");
        out.push(l.len() as u8);
        out.extend_from_slice(l.as_bytes());
    }
}

/// Search state shared by the whole canonical-form computation.
struct Canon {
    n: usize,
    loop_labels: Vec<Vec<String>>,
    adj: Vec<Vec<(usize, usize)>>,
    edge_labels: Vec<Vec<String>>,
    edges: Vec<(usize, usize, usize)>,
    labeled: bool,
    best: Option<(Vec<u8>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Canon {
    fn new(rooted: &RootedGraph, labeled: bool) -> (Self, Vec<usize>) {
        let g = &rooted.graph;
        let n = g.vertex_count();
        let strip = |labels: &[String]| -> Vec<String> {
            if labeled {
                labels.to_vec()
            } else {
                vec![String::new(); labels.len()]
            }
        };
        let loop_labels: Vec<Vec<String>> = (0..n).map(|v| strip(g.loop_labels(v))).collect();
        let mut edge_kinds: Vec<Vec<String>> = g.edges().map(|(_, _, l)| strip(l)).collect();
        edge_kinds.sort();
        edge_kinds.dedup();
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for (u, v, l) in g.edges() {
            let kind = edge_kinds.binary_search(&strip(l)).unwrap();
            adj[u].push((v, kind));
            adj[v].push((u, kind));
            edges.push((u, v, kind));
        }
        let mut loop_kinds = loop_labels.clone();
        loop_kinds.sort();
        loop_kinds.dedup();
        let initial: Vec<(bool, usize)> = (0..n)
            .map(|v| {
                (
                    v != rooted.root,
                    loop_kinds.binary_search(&loop_labels[v]).unwrap(),
                )
            })
            .collect();
        let cells = rank(&initial);
        (
            Self {
                n,
                loop_labels,
                adj,
                edge_labels: edge_kinds,
                edges,
                labeled,
                best: None,
                automorphisms: Vec::new(),
            },
            cells,
        )
    }

    fn refine(&self, cells: &mut Vec<usize>) {
        let mut count = cell_count(cells);
        loop {
            let sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..self.n)
                .map(|v| {
                    let mut nb: Vec<(usize, usize)> =
                        self.adj[v].iter().map(|&(u, k)| (cells[u], k)).collect();
                    nb.sort_unstable();
                    (cells[v], nb)
                })
                .collect();
            *cells = rank(&sigs);
            let next = cell_count(cells);
            if next == count {
                return;
            }
            count = next;
        }
    }

    fn encode(&self, pos: &[usize]) -> Vec<u8> {
        let mut inv = vec![0; self.n];
        for (v, &p) in pos.iter().enumerate() {
            inv[p] = v;
        }
        let mut out = vec![u8::from(self.labeled)];
        put_uint(&mut out, self.n);
        for &v in &inv {
            put_labels(&mut out, &self.loop_labels[v]);
        }
        let mut edges: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v, k)| (pos[u].min(pos[v]), pos[u].max(pos[v]), k))
            .collect();
        edges.sort_unstable();
        put_uint(&mut out, edges.len());
        for (a, b, k) in edges {
            put_uint(&mut out, a);
            put_uint(&mut out, b);
            put_labels(&mut out, &self.edge_labels[k]);
        }
        out
    }

    fn search(&mut self, mut cells: Vec<usize>, prefix: &mut Vec<usize>) {
        self.refine(&mut cells);
        let k = cell_count(&cells);
        if k == self.n {
            let enc = self.encode(&cells);
            match &self.best {
                Some((best, best_pos)) if &enc == best => {
                    let mut inv = vec![0; self.n];
                    for (v, &p) in best_pos.iter().enumerate() {
                        inv[p] = v;
                    }
                    let auto: Vec<usize> = (0..self.n).map(|v| inv[cells[v]]).collect();
                    self.automorphisms.push(auto);
                }
                Some((best, _)) if &enc > best => {}
                _ => self.best = Some((enc, cells)),
            }
            return;
        }
        let mut sizes = vec![0usize; k];
        for &c in &cells {
            sizes[c] += 1;
        }
        let target = (0..k).find(|&c| sizes[c] > 1).unwrap();
        let members: Vec<usize> = (0..self.n).filter(|&v| cells[v] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &members {
            if !tried.is_empty() {
                let mut dsu = Dsu::new(self.n);
                for a in self
                    .automorphisms
                    .iter()
                    .filter(|a| prefix.iter().all(|&p| a[p] == p))
                {
                    for (x, &y) in a.iter().enumerate() {
                        dsu.union(x, y);
                    }
                }
                let root = dsu.find(v);
                if tried.iter().any(|&t| dsu.find(t) == root) {
                    continue;
                }
            }
            tried.push(v);
            let child: Vec<usize> = cells
                .iter()
                .enumerate()
                .map(|(w, &c)| if c > target || (c == target && w != v) { c + 1 } else { c })
                .collect();
            prefix.push(v);
            self.search(child, prefix);
            prefix.pop();
        }
    }
}

fn rank<T: Ord>(keys: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut out = vec![0; keys.len()];
    let mut c = 0;
    for i in 0..order.len() {
        if i > 0 && keys[order[i]] != keys[order[i - 1]] {
            c += 1;
        }
        out[order[i]] = c;
    }
    out
}

fn cell_count(cells: &[usize]) -> usize {
    cells.iter().max().map_or(0, |m| m + 1)
}

/// Canonical code of a rooted graph, up to rooted isomorphism
/// (label-preserving when `labeled`).
pub fn canonical_code(rooted: &RootedGraph, labeled: bool) -> Result<RootedBallCode, LocalStatsError> {
    let g = &rooted.graph;
    if rooted.root >= g.vertex_count() {
        return Err(GraphError::UnknownVertex(rooted.root).into());
    }
    if let Some(v) = g.distances(rooted.root).iter().position(Option::is_none) {
        return Err(LocalStatsError::Disconnected(v));
    }
    let (mut canon, cells) = Canon::new(rooted, labeled);
    canon.search(cells, &mut Vec::new());
    Ok(RootedBallCode(canon.best.expect("at least one leaf").0))
}

/// Counts of ball codes over all vertices of one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallCensus {
    pub radius: usize,
    pub labeled: bool,
    pub counts: BTreeMap<RootedBallCode, usize>,
    pub total: usize,
}

impl BallCensus {
    pub fn frequency(&self, code: &RootedBallCode) -> Q {
        rational::from_count(self.counts.get(code).copied().unwrap_or(0), self.total)
    }

    pub fn frequencies(&self) -> BTreeMap<RootedBallCode, Q> {
        self.counts
            .iter()
            .map(|(c, &k)| (c.clone(), rational::from_count(k, self.total)))
            .collect()
    }

    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    /// Forgets labels: sums frequencies over labeled classes with the same
    /// underlying unlabeled ball.
    pub fn marginalize(&self) -> Result<BallCensus, LocalStatsError> {
        if !self.labeled {
            return Err(LocalStatsError::AlreadyUnlabeled);
        }
        let mut counts = BTreeMap::new();
        for (code, &k) in &self.counts {
            let plain = canonical_code(&code.decode()?, false)?;
            *counts.entry(plain).or_insert(0) += k;
        }
        Ok(BallCensus {
            radius: self.radius,
            labeled: false,
            counts,
            total: self.total,
        })
    }

    pub fn to_json_value(&self) -> CensusJson {
        CensusJson {
            radius: self.radius,
            labeled: self.labeled,
            classes: self
                .counts
                .iter()
                .map(|(c, &count)| ClassJson {
                    code: c.to_hex(),
                    count,
                })
                .collect(),
            total: self.total,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("census json")
    }

    pub fn from_json(text: &str) -> Result<Self, LocalStatsError> {
        let raw: CensusJson =
            serde_json::from_str(text).map_err(|e| LocalStatsError::MalformedCode(e.to_string()))?;
        let mut counts = BTreeMap::new();
        let mut sum = 0;
        for class in raw.classes {
            let code = RootedBallCode::from_hex(&class.code)?;
            if code.is_labeled() != raw.labeled {
                return Err(LocalStatsError::MalformedCode("labeling flag mismatch".into()));
            }
            sum += class.count;
            if counts.insert(code, class.count).is_some() {
                return Err(LocalStatsError::MalformedCode("duplicate class".into()));
            }
        }
        if sum != raw.total {
            return Err(LocalStatsError::MalformedCode(format!(
                "class counts sum to {sum}, total is {}",
                raw.total
            )));
        }
        Ok(Self {
            radius: raw.radius,
            labeled: raw.labeled,
            counts,
            total: raw.total,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub code: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusJson {
    pub radius: usize,
    pub labeled: bool,
    pub classes: Vec<ClassJson>,
    pub total: usize,
}

/// Code of the radius-`r` ball around every vertex, in vertex order.
pub fn ball_codes(g: &LabeledGraph, r: usize, labeled: bool) -> Vec<RootedBallCode> {
    (0..g.vertex_count())
        .into_par_iter()
        .map(|v| {
            let b = ball(g, v, r).expect("vertex in range");
            canonical_code(&b, labeled).expect("balls are connected")
        })
        .collect()
}

pub fn census(g: &LabeledGraph, r: usize, labeled: bool) -> BallCensus {
    let mut counts = BTreeMap::new();
    for code in ball_codes(g, r, labeled) {
        *counts.entry(code).or_insert(0) += 1;
    }
    BallCensus {
        radius: r,
        labeled,
        counts,
        total: g.vertex_count(),
    }
}

/// Total-variation distance between two censuses.
pub fn census_distance(c1: &BallCensus, c2: &BallCensus) -> Result<Q, LocalStatsError> {
    if c1.radius != c2.radius {
        return Err(LocalStatsError::RadiusMismatch(c1.radius, c2.radius));
    }
    if c1.labeled != c2.labeled {
        return Err(LocalStatsError::LabelingMismatch(c1.labeled, c2.labeled));
    }
    let mut sum = Q::from_integer(0);
    let codes: std::collections::BTreeSet<&RootedBallCode> = c1.counts.keys().chain(c2.counts.keys()).collect();
    for code in codes {
        let d = c1.frequency(code) - c2.frequency(code);
        sum += if d < Q::from_integer(0) { -d } else { d };
    }
    Ok(sum / 2)
}
