//! Combinatorial planarity evidence: cacti are accepted directly, anything
//! else needs a rotation system that passes the Euler-formula check.

use std::collections::HashMap;

use crate::graphs::{components_with, multigraph_blocks, LabeledGraph};

use super::HyperfiniteError;

/// Cyclic neighbour order around each vertex of the plain graph.
pub type RotationSystem = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanarityEvidence {
    /// Every block is a single edge or a cycle.
    Cactus,
    /// A rotation system whose face count satisfies `V - E + F = 2` on
    /// every component with an edge.
    Embedding { faces: usize },
}

pub fn check_planarity(
    g: &LabeledGraph,
    hint: Option<&RotationSystem>,
) -> Result<PlanarityEvidence, HyperfiniteError> {
    if is_cactus(g) {
        return Ok(PlanarityEvidence::Cactus);
    }
    match hint {
        Some(rot) => verify_rotation_system(g, rot).map(|faces| PlanarityEvidence::Embedding { faces }),
        None => Err(HyperfiniteError::StrategyUnavailable(
            "graph is not a cactus and no embedding hint was given".into(),
        )),
    }
}

pub fn is_cactus(g: &LabeledGraph) -> bool {
    let edges = g.edge_pairs();
    multigraph_blocks(g.vertex_count(), &edges).iter().all(|block| {
        let mut vertices: Vec<usize> = block.iter().flat_map(|&e| [edges[e].0, edges[e].1]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        block.len() == 1 || block.len() == vertices.len()
    })
}

/// Returns the number of faces traced by `rot`, or an error when `rot` is
/// not a rotation system of `g` or describes a surface of higher genus.
pub fn verify_rotation_system(g: &LabeledGraph, rot: &RotationSystem) -> Result<usize, HyperfiniteError> {
    let n = g.vertex_count();
    let bad = |msg: String| HyperfiniteError::StrategyUnavailable(format!("embedding hint rejected: {msg}"));
    if rot.len() != n {
        return Err(bad(format!("{} rotations for {n} vertices", rot.len())));
    }
    let mut position: Vec<HashMap<usize, usize>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut sorted = rot[v].clone();
        sorted.sort_unstable();
        if sorted != g.neighbors(v) {
            return Err(bad(format!("rotation at {v} is not its neighbour set")));
        }
        position.push(rot[v].iter().enumerate().map(|(i, &w)| (w, i)).collect());
    }
    // dart (u, i) is u -> rot[u][i]
    let offsets: Vec<usize> = rot
        .iter()
        .scan(0, |acc, r| {
            let start = *acc;
            *acc += r.len();
            Some(start)
        })
        .collect();
    let darts: usize = rot.iter().map(Vec::len).sum();
    let mut seen = vec![false; darts];
    let mut faces = 0;
    for u in 0..n {
        for i in 0..rot[u].len() {
            if seen[offsets[u] + i] {
                continue;
            }
            faces += 1;
            let (mut a, mut j) = (u, i);
            while !seen[offsets[a] + j] {
                seen[offsets[a] + j] = true;
                let b = rot[a][j];
                let back = position[b][&a];
                let next = (back + 1) % rot[b].len();
                a = b;
                j = next;
            }
        }
    }
    let edges = g.edge_count();
    let comps = components_with(n, g.edge_pairs());
    let nontrivial: Vec<&Vec<usize>> = comps.iter().filter(|c| c.len() > 1).collect();
    let vertices: usize = nontrivial.iter().map(|c| c.len()).sum();
    if vertices + faces != edges + 2 * nontrivial.len() {
        return Err(bad(format!(
            "V - E + F = {} - {edges} + {faces} on {} components",
            vertices,
            nontrivial.len()
        )));
    }
    Ok(faces)
}

/// Neighbours ordered by angle around each vertex of a straight-line
/// drawing with integer coordinates.
pub fn coordinate_rotation_system(g: &LabeledGraph, coords: &[Vec<i64>]) -> RotationSystem {
    (0..g.vertex_count())
        .map(|v| {
            let mut nb = g.neighbors(v).to_vec();
            nb.sort_by(|&a, &b| {
                let angle = |w: usize| {
                    let dx = (coords[w][0] - coords[v][0]) as f64;
                    let dy = (coords[w][1] - coords[v][1]) as f64;
                    dy.atan2(dx)
                };
                angle(a).total_cmp(&angle(b))
            });
            nb
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::TranslationAction;
    use crate::graphs::schreier;

    #[test]
    fn cactus_and_not() {
        let tri_tail = LabeledGraph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_eq!(check_planarity(&tri_tail, None).unwrap(), PlanarityEvidence::Cactus);
        let k4 = LabeledGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(check_planarity(&k4, None).is_err());
        // K4 drawn as a triangle with a centre vertex
        let rot = vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]];
        assert_eq!(check_planarity(&k4, Some(&rot)).unwrap(), PlanarityEvidence::Embedding { faces: 4 });
    }

    #[test]
    fn k33_rotation_rejected() {
        let edges: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
        let g = LabeledGraph::from_edges(6, &edges).unwrap();
        let rot: RotationSystem = (0..6).map(|v| g.neighbors(v).to_vec()).collect();
        assert!(verify_rotation_system(&g, &rot).is_err());
    }

    #[test]
    fn grid_embedding() {
        let a = TranslationAction::cube(2, 4);
        let points = a.points();
        let g = schreier(&a, &points).graph;
        let rot = coordinate_rotation_system(&g, &points);
        // 9 x 9 grid: 64 unit squares plus the outer face
        assert_eq!(verify_rotation_system(&g, &rot).unwrap(), 65);
    }
}
