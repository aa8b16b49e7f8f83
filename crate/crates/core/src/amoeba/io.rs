//! Tower directories: `level_<n>.json` graph files plus `manifest.json`.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Amoeba, AmoebaError, AmoebaTower, Covering, Move};
use crate::graphs::LabeledGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub level: usize,
    pub file: String,
    pub vertices: usize,
    pub tree_radius: i64,
}

/// `pairs` lists `[v, φ(v)]` for every vertex of level `source`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringJson {
    pub source: usize,
    pub target: usize,
    pub pairs: Vec<[u32; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerManifest {
    pub levels: Vec<LevelEntry>,
    pub coverings: Vec<CoveringJson>,
    pub basepoints: Vec<usize>,
    pub schedule: BTreeMap<usize, usize>,
    pub moves: Vec<Move>,
}

impl TowerManifest {
    pub fn of(tower: &AmoebaTower) -> Self {
        let radii = tower.tree_radii();
        Self {
            levels: tower
                .levels
                .iter()
                .enumerate()
                .map(|(i, a)| LevelEntry {
                    level: i + 1,
                    file: level_file(i + 1),
                    vertices: a.vertex_count(),
                    tree_radius: radii[i],
                })
                .collect(),
            coverings: tower
                .coverings
                .iter()
                .enumerate()
                .map(|(i, c)| CoveringJson {
                    source: i + 2,
                    target: i + 1,
                    pairs: c.map.iter().enumerate().map(|(v, &w)| [v as u32, w]).collect(),
                })
                .collect(),
            basepoints: tower.basepoints.clone(),
            schedule: tower.schedule.clone(),
            moves: tower.moves.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

pub fn level_file(n: usize) -> String {
    format!("level_{n}.json")
}

fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// Writes every level and the manifest into `dir`, creating it if needed.
pub fn save_tower(tower: &AmoebaTower, dir: &Path) -> io::Result<TowerManifest> {
    fs::create_dir_all(dir)?;
    for (i, a) in tower.levels.iter().enumerate() {
        write_atomic(&dir.join(level_file(i + 1)), &a.to_graph().to_json())?;
    }
    let manifest = TowerManifest::of(tower);
    write_atomic(&dir.join("manifest.json"), &manifest.to_json())?;
    Ok(manifest)
}

/// Reads a tower directory and re-verifies levels, coverings, basepoints,
/// the schedule, and that every covering is the one the recorded move gives.
pub fn load_tower(dir: &Path) -> Result<AmoebaTower, AmoebaError> {
    let read = |name: &str| fs::read_to_string(dir.join(name)).map_err(|e| AmoebaError::Format(format!("{name}: {e}")));
    let manifest: TowerManifest =
        serde_json::from_str(&read("manifest.json")?).map_err(|e| AmoebaError::Format(e.to_string()))?;
    let mut levels = Vec::with_capacity(manifest.levels.len());
    for (i, entry) in manifest.levels.iter().enumerate() {
        if entry.level != i + 1 {
            return Err(AmoebaError::Format(format!("level entry {} out of order", entry.level)));
        }
        let g = LabeledGraph::from_json(&read(&entry.file)?).map_err(|e| AmoebaError::Format(e.to_string()))?;
        levels.push(Amoeba::from_graph(&g)?);
    }
    let mut coverings = Vec::with_capacity(manifest.coverings.len());
    for (i, c) in manifest.coverings.iter().enumerate() {
        if (c.source, c.target) != (i + 2, i + 1) {
            return Err(AmoebaError::Format(format!("covering {} -> {} out of order", c.source, c.target)));
        }
        let mut map = vec![u32::MAX; c.pairs.len()];
        for &[v, w] in &c.pairs {
            match map.get_mut(v as usize) {
                Some(slot) if *slot == u32::MAX => *slot = w,
                _ => return Err(AmoebaError::Format(format!("covering {}: bad pair [{v}, {w}]", c.source))),
            }
        }
        coverings.push(Covering { map });
    }
    if manifest.moves.len() != coverings.len() {
        return Err(AmoebaError::Format("one move per covering expected".into()));
    }
    for (i, &mv) in manifest.moves.iter().enumerate() {
        let (h, c) = levels[i].double(mv)?;
        if h != levels[i + 1] || c != coverings[i] {
            return Err(AmoebaError::Format(format!("level {} is not the recorded doubling", i + 2)));
        }
    }
    let tower = AmoebaTower {
        levels,
        coverings,
        basepoints: manifest.basepoints,
        schedule: manifest.schedule,
        moves: manifest.moves,
    };
    tower.verify()?;
    Ok(tower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amoeba::{build_tower, TowerStrategy, DEFAULT_BUDGET};

    #[test]
    fn directory_round_trip() {
        let t = build_tower(1, TowerStrategy::Search, DEFAULT_BUDGET).unwrap();
        let dir = std::env::temp_dir().join(format!("amoeba-io-{}", std::process::id()));
        let manifest = save_tower(&t, &dir).unwrap();
        let loaded = load_tower(&dir).unwrap();
        assert_eq!(loaded, t);
        assert_eq!(TowerManifest::of(&loaded).to_json(), manifest.to_json());
        fs::remove_dir_all(&dir).unwrap();
    }
}
