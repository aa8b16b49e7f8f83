use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{plan_moves, Amoeba, AmoebaError, Covering, Move};
use crate::actions::act_word;
use crate::hyperfinite::{partition_heuristic, HeuristicStrategy, PartitionCertificate};
use crate::localstats::{census, census_distance, BallCensus};
use crate::rational::Q;
use crate::words::Word;

/// Default largest level size.
pub const DEFAULT_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TowerStrategy {
    /// Repeatedly remove the obstruction closest to the basepoint.
    NearestCycleFirst,
    /// Shortest move sequence found by iterative deepening.
    Search,
}

impl FromStr for TowerStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nearest-cycle-first" => Ok(Self::NearestCycleFirst),
            "search" => Ok(Self::Search),
            other => Err(format!("unknown tower strategy {other:?}")),
        }
    }
}

impl fmt::Display for TowerStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NearestCycleFirst => "nearest-cycle-first",
            Self::Search => "search",
        })
    }
}

/// Levels `G_1, G_2, ...` (1-based) with `coverings[i]: G_{i+2} -> G_{i+1}`,
/// basepoints, and the schedule `k -> n_k`, the first level whose basepoint
/// has tree radius at least `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmoebaTower {
    pub levels: Vec<Amoeba>,
    pub coverings: Vec<Covering>,
    pub basepoints: Vec<usize>,
    pub schedule: BTreeMap<usize, usize>,
    pub moves: Vec<Move>,
}

impl AmoebaTower {
    /// The one-level tower on the minimal amoeba.
    pub fn new() -> Self {
        Self {
            levels: vec![Amoeba::minimal()],
            coverings: Vec::new(),
            basepoints: vec![0],
            schedule: BTreeMap::new(),
            moves: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, n: usize) -> Result<&Amoeba, AmoebaError> {
        n.checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .ok_or(AmoebaError::UnknownLevel(n))
    }

    pub fn top(&self) -> &Amoeba {
        self.levels.last().expect("tower has a level")
    }

    pub fn basepoint(&self, n: usize) -> Result<usize, AmoebaError> {
        self.level(n)?;
        Ok(self.basepoints[n - 1])
    }

    /// Applies `mv` to the top level. The basepoint lifts to its smaller
    /// preimage.
    pub fn push(&mut self, mv: Move) -> Result<(), AmoebaError> {
        let (next, covering) = self.top().double(mv)?;
        let p = *self.basepoints.last().unwrap();
        let lift = (0..next.vertex_count()).find(|&v| covering.apply(v) == p).unwrap();
        self.levels.push(next);
        self.coverings.push(covering);
        self.basepoints.push(lift);
        self.moves.push(mv);
        Ok(())
    }

    /// Replays planned moves from the minimal amoeba, tracking basepoints.
    pub fn from_plan(plan: &[super::PlannedMove]) -> Result<Self, AmoebaError> {
        let mut tower = Self::new();
        for planned in plan {
            let mv = planned.locate(tower.top(), *tower.basepoints.last().unwrap());
            tower.push(mv)?;
        }
        Ok(tower)
    }

    /// `φ^m_n(v)` for a vertex `v` of level `m >= n`.
    pub fn project(&self, m: usize, n: usize, v: usize) -> Result<usize, AmoebaError> {
        self.level(m)?;
        self.level(n)?;
        if n > m {
            return Err(AmoebaError::UnknownLevel(n));
        }
        Ok((n..m).rev().fold(v, |v, i| self.coverings[i - 1].apply(v)))
    }

    /// The composite covering `G_m -> G_n`.
    pub fn composite(&self, m: usize, n: usize) -> Result<Covering, AmoebaError> {
        let size = self.level(m)?.vertex_count();
        (0..size)
            .map(|v| self.project(m, n, v).map(|w| w as u32))
            .collect::<Result<Vec<_>, _>>()
            .map(|map| Covering { map })
    }

    /// `(φ^m_n)^{-1}(q)`, in increasing order.
    pub fn fiber(&self, m: usize, n: usize, q: usize) -> Result<Vec<usize>, AmoebaError> {
        let size = self.level(m)?.vertex_count();
        let mut out = Vec::new();
        for v in 0..size {
            if self.project(m, n, v)? == q {
                out.push(v);
            }
        }
        Ok(out)
    }

    pub fn tree_radii(&self) -> Vec<i64> {
        self.levels
            .iter()
            .zip(&self.basepoints)
            .map(|(a, &p)| a.tree_radius(p))
            .collect()
    }

    /// Recomputes the schedule for `k = 1..=k_max` from the tree radii.
    pub fn reschedule(&mut self, k_max: usize) {
        let radii = self.tree_radii();
        self.schedule = (1..=k_max)
            .filter_map(|k| radii.iter().position(|&r| r >= k as i64).map(|i| (k, i + 1)))
            .collect();
    }

    /// Checks every level, covering, basepoint relation and scheduled radius.
    pub fn verify(&self) -> Result<(), AmoebaError> {
        if self.levels.is_empty()
            || self.coverings.len() + 1 != self.levels.len()
            || self.basepoints.len() != self.levels.len()
        {
            return Err(AmoebaError::Format("levels, coverings and basepoints disagree in length".into()));
        }
        for a in &self.levels {
            a.verify().map_err(AmoebaError::Violation)?;
        }
        for (i, c) in self.coverings.iter().enumerate() {
            c.verify(&self.levels[i + 1], &self.levels[i])?;
            if c.apply(self.basepoints[i + 1]) != self.basepoints[i] {
                return Err(AmoebaError::Covering(format!("basepoint of level {} does not project", i + 2)));
            }
        }
        for (&k, &n) in &self.schedule {
            let r = self.level(n)?.tree_radius(self.basepoints[n - 1]);
            if r < k as i64 {
                return Err(AmoebaError::Format(format!("level {n} scheduled for k = {k} has tree radius {r}")));
            }
        }
        Ok(())
    }
}

impl Default for AmoebaTower {
    fn default() -> Self {
        Self::new()
    }
}

/// Builds a tower from the minimal amoeba until the basepoint has tree
/// radius `k_target`, keeping every level within `budget` vertices.
pub fn build_tower(k_target: usize, strategy: TowerStrategy, budget: usize) -> Result<AmoebaTower, AmoebaError> {
    let mut tower = AmoebaTower::new();
    let over = |vertices: usize| AmoebaError::Capacity { vertices, budget };
    match strategy {
        TowerStrategy::Search => {
            let max_moves = (budget / 2).checked_ilog2().unwrap_or(0) as usize;
            if budget < 2 {
                return Err(over(2));
            }
            let plan = plan_moves(tower.top(), 0, k_target, max_moves).map_err(|e| match e {
                AmoebaError::Capacity { vertices, .. } => over(vertices),
                other => other,
            })?;
            tower = AmoebaTower::from_plan(&plan)?;
        }
        TowerStrategy::NearestCycleFirst => {
            for k in 1..=k_target {
                loop {
                    let p = *tower.basepoints.last().unwrap();
                    if tower.top().tree_radius(p) >= k as i64 {
                        break;
                    }
                    let size = 2 * tower.top().vertex_count();
                    if size > budget {
                        return Err(over(size));
                    }
                    let (_, _, mv) = tower.top().obstructions(p, k)[0];
                    tower.push(mv)?;
                }
            }
        }
    }
    tower.reschedule(k_target);
    Ok(tower)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMethod {
    /// Lifted a geodesic to the level scheduled for `d + |γ|`.
    Scheduled,
    /// The schedule was too short; found by scanning fibers upward.
    FiberScan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub level: usize,
    pub vertex: usize,
    pub image: usize,
    pub method: WitnessMethod,
}

/// A vertex `z` of some level `m >= n` with `φ^m_n(z) = q` and `γ z != z`.
pub fn freeness_witness(tower: &AmoebaTower, word: &Word, n: usize, q: usize) -> Result<Witness, AmoebaError> {
    if word.is_identity() {
        return Err(AmoebaError::TrivialWord);
    }
    let g = tower.level(n)?;
    if q >= g.vertex_count() {
        return Err(AmoebaError::UnknownVertex(q));
    }
    let moved = |m: usize, z: usize| -> Result<Option<usize>, AmoebaError> {
        let level = tower.level(m)?;
        let image = act_word(&level.action(), word, &z).map_err(|e| AmoebaError::InvalidMove(e.to_string()))?;
        Ok((image != z).then_some(image))
    };
    let p = tower.basepoints[n - 1];
    let required = g.distances(p)[q] as usize + word.len();
    if let Some(&scheduled) = tower.schedule.get(&required) {
        let m = scheduled.max(n);
        let z = tower
            .level(m)?
            .lift_path(tower.basepoints[m - 1], &g.geodesic_labels(p, q));
        if tower.project(m, n, z)? != q {
            return Err(AmoebaError::Covering(format!("lift of {q} does not project back")));
        }
        return match moved(m, z)? {
            Some(image) => Ok(Witness {
                level: m,
                vertex: z,
                image,
                method: WitnessMethod::Scheduled,
            }),
            None => Err(AmoebaError::NoWitness { level: m, vertex: q }),
        };
    }
    for m in n..=tower.len() {
        for z in tower.fiber(m, n, q)? {
            if let Some(image) = moved(m, z)? {
                return Ok(Witness {
                    level: m,
                    vertex: z,
                    image,
                    method: WitnessMethod::FiberScan,
                });
            }
        }
    }
    Err(AmoebaError::ScheduleTooShort {
        required,
        covered: tower.schedule.keys().next_back().copied().unwrap_or(0),
    })
}

impl Amoeba {
    /// Labels along the BFS-first shortest path from `from` to `to`.
    pub fn geodesic_labels(&self, from: usize, to: usize) -> Vec<u8> {
        let dist = self.distances(to);
        let mut path = Vec::new();
        let mut v = from;
        while v != to {
            let l = (0..4)
                .find(|&l| dist[self.neighbor(v, l)] + 1 == dist[v])
                .expect("connected");
            path.push(l as u8);
            v = self.neighbor(v, l);
        }
        path
    }

    pub fn lift_path(&self, from: usize, labels: &[u8]) -> usize {
        labels.iter().fold(from, |v, &l| self.neighbor(v, l as usize))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub level: usize,
    pub vertices: usize,
    pub tree_radius: i64,
    pub certificate: PartitionCertificate,
    pub census: Option<BallCensus>,
    /// Every vertex of the level below has exactly two preimages, so the
    /// covering pushes normalized counting measure to normalized counting.
    pub pushforward_uniform: bool,
    pub transitive: bool,
    /// Total-variation distance to the previous level's census.
    pub disagreement: Option<Q>,
}

/// Per-level partition certificate with component bound `k` (planar
/// separator strategy), optional census at `radius`, and measure and
/// transitivity checks. Levels larger than `census_limit` skip the census.
pub fn level_stats(
    tower: &AmoebaTower,
    k: usize,
    radius: Option<usize>,
    census_limit: usize,
) -> Result<Vec<LevelStats>, AmoebaError> {
    let rows: Vec<Result<LevelStats, AmoebaError>> = tower
        .levels
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let g = a.to_graph();
            let certificate = partition_heuristic(&g, k, HeuristicStrategy::PlanarSeparator, None)?;
            let census = radius
                .filter(|_| a.vertex_count() <= census_limit)
                .map(|r| census(&g, r, true));
            let pushforward_uniform = match i.checked_sub(1) {
                None => true,
                Some(j) => {
                    let mut fiber = vec![0u32; tower.levels[j].vertex_count()];
                    tower.coverings[j].map.iter().for_each(|&w| fiber[w as usize] += 1);
                    fiber.iter().all(|&c| c == 2)
                }
            };
            Ok(LevelStats {
                level: i + 1,
                vertices: a.vertex_count(),
                tree_radius: a.tree_radius(tower.basepoints[i]),
                certificate,
                census,
                pushforward_uniform,
                transitive: a.orbit_size(tower.basepoints[i]) == a.vertex_count(),
                disagreement: None,
            })
        })
        .collect();
    let mut rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    for i in 1..rows.len() {
        if let (Some(a), Some(b)) = (&rows[i - 1].census, &rows[i].census) {
            rows[i].disagreement = Some(census_distance(a, b).expect("same radius and labeling"));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{enumerate_reduced, Presentation};
    use std::sync::Arc;

    #[test]
    fn nearest_first_small_towers() {
        for k in 1..=2 {
            let t = build_tower(k, TowerStrategy::NearestCycleFirst, DEFAULT_BUDGET).unwrap();
            t.verify().unwrap();
            for (&kk, &n) in &t.schedule {
                assert!(t.level(n).unwrap().tree_radius(t.basepoints[n - 1]) >= kk as i64);
            }
            for (i, a) in t.levels.iter().enumerate() {
                assert_eq!(a.vertex_count(), 1 << (i + 1));
            }
        }
    }

    #[test]
    fn search_tower_k1() {
        let t = build_tower(1, TowerStrategy::Search, DEFAULT_BUDGET).unwrap();
        t.verify().unwrap();
        assert_eq!(t.moves.len(), 4);
        assert_eq!(t.schedule[&1], 5);
        let c = t.composite(5, 2).unwrap();
        c.verify_fold(t.level(5).unwrap(), t.level(2).unwrap(), 8).unwrap();
        assert!(c.verify(t.level(5).unwrap(), t.level(2).unwrap()).is_err());
        let p = t.basepoints[4];
        assert_eq!(c.apply(p), t.basepoints[1]);
    }

    #[test]
    fn capacity_error() {
        assert!(matches!(
            build_tower(3, TowerStrategy::NearestCycleFirst, 64),
            Err(AmoebaError::Capacity { .. })
        ));
        assert!(matches!(build_tower(3, TowerStrategy::Search, 64), Err(AmoebaError::Capacity { .. })));
    }

    #[test]
    fn witnesses() {
        let t = build_tower(2, TowerStrategy::Search, DEFAULT_BUDGET).unwrap();
        let gamma = Arc::new(Presentation::gamma());
        let a = Word::parse("A", &gamma).unwrap();
        assert_eq!(freeness_witness(&t, &Word::identity(&gamma), 1, 0), Err(AmoebaError::TrivialWord));
        for q in 0..2 {
            let w = freeness_witness(&t, &a, 1, q).unwrap();
            assert_eq!(t.project(w.level, 1, w.vertex).unwrap(), q);
            assert_ne!(w.image, w.vertex);
        }
        // basepoint with |γ| = 2 uses the scheduled level
        let n = t.schedule[&2];
        for word in enumerate_reduced(&gamma, 2).into_iter().filter(|w| !w.is_identity()) {
            let w = freeness_witness(&t, &word, n, t.basepoints[n - 1]).unwrap();
            assert_eq!(w.method, WitnessMethod::Scheduled);
            assert_eq!(w.level, n);
        }
    }

    #[test]
    fn stats_small_tower() {
        let t = build_tower(1, TowerStrategy::Search, DEFAULT_BUDGET).unwrap();
        let rows = level_stats(&t, 2, Some(1), 1 << 10).unwrap();
        assert_eq!(rows[0].certificate.cost(), 0);
        for row in &rows {
            assert!(row.transitive && row.pushforward_uniform);
            row.certificate.verify(&t.level(row.level).unwrap().to_graph()).unwrap();
        }
        assert!(rows[1].disagreement.is_some());
    }
}
