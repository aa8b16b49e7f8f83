//! Group actions evaluated on finite windows.
//!
//! An [`Action`] knows how a single letter moves a point and reports an error
//! instead of guessing when the image is not available inside its window.
//! The main instance is [`F2ZAction`], the block-cycle action of `F2 = <s, t>`
//! on the integers, together with [`SnakeBijection`] which transports it to
//! `Z^2`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Debug};
use std::hash::Hash;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::rational::{self, Q};
use crate::words::{enumerate_reduced, GroupKind, Letter, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("point {point} is outside the evaluable window")]
    OutOfWindow { point: String },
    #[error("orbit left the window at {point} while evaluating `{escaping_part}`")]
    BoundaryEscape { escaping_part: String, point: String },
    #[error("invalid action: {0}")]
    Invalid(String),
    #[error("malformed config: {0}")]
    Config(String),
}

/// A group action that can be evaluated letter by letter.
pub trait Action {
    type Point: Clone + Ord + Hash + Debug;

    fn presentation(&self) -> &Arc<Presentation>;

    /// Image of `x` under one letter, or `OutOfWindow` when it is not known.
    fn apply(&self, letter: Letter, x: &Self::Point) -> Result<Self::Point, ActionError>;
}

/// Evaluates `w(x)` right to left, so the last letter acts first.
pub fn act_word<A: Action>(action: &A, w: &Word, x: &A::Point) -> Result<A::Point, ActionError> {
    let letters = w.letters();
    let mut current = x.clone();
    for (i, &letter) in letters.iter().enumerate().rev() {
        current = action.apply(letter, &current).map_err(|_| {
            let part = Word::from_letters(letters[i..].iter().copied(), w.presentation());
            ActionError::BoundaryEscape {
                escaping_part: part.to_string(),
                point: format!("{current:?}"),
            }
        })?;
    }
    Ok(current)
}

/// Inclusive integer window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    /// `[-radius, radius]`.
    pub fn symmetric(radius: i64) -> Self {
        Self::new(-radius, radius)
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn len(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// A window `{i_n : n_min <= n <= n_max}` of the anchor sequence together
/// with the sign attached to each anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2ZConfig {
    first_index: i64,
    anchors: Vec<i64>,
    signs: Vec<i8>,
}

impl F2ZConfig {
    pub fn new(first_index: i64, anchors: Vec<i64>, signs: Vec<i8>) -> Result<Self, ActionError> {
        if anchors.len() < 2 {
            return Err(ActionError::Config("need at least two anchors".into()));
        }
        if anchors.len() != signs.len() {
            return Err(ActionError::Config(format!(
                "{} anchors but {} signs",
                anchors.len(),
                signs.len()
            )));
        }
        if let Some(w) = anchors.windows(2).find(|w| w[0] >= w[1]) {
            return Err(ActionError::Config(format!(
                "anchors not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(ActionError::Config(format!("sign {bad} is not +1 or -1")));
        }
        Ok(Self {
            first_index,
            anchors,
            signs,
        })
    }

    /// The shipped quasi-periodic configuration: `i_0 = 0`, gaps
    /// `i_{n+1} - i_n = 2 + (n mod 3)` and `f(i_n) = +1` iff `n mod 4` is 0 or 1.
    /// Anchors are generated until `[lo, hi]` lies strictly inside the covered
    /// range with at least one spare block on each side.
    pub fn default_covering(lo: i64, hi: i64) -> Self {
        let gap = |n: i64| 2 + n.rem_euclid(3);
        let sign = |n: i64| if n.rem_euclid(4) <= 1 { 1 } else { -1 };
        let mut first = 0i64;
        let mut start = 0i64;
        while start > lo - 8 {
            first -= 1;
            start -= gap(first);
        }
        let mut anchors = vec![start];
        let mut n = first;
        while *anchors.last().unwrap() < hi + 8 {
            let next = anchors.last().unwrap() + gap(n);
            anchors.push(next);
            n += 1;
        }
        let signs = (0..anchors.len() as i64).map(|k| sign(first + k)).collect();
        Self::new(first, anchors, signs).expect("generated config is valid")
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn last_index(&self) -> i64 {
        self.first_index + self.anchors.len() as i64 - 1
    }

    pub fn anchors(&self) -> &[i64] {
        &self.anchors
    }

    pub fn anchor(&self, n: i64) -> Option<i64> {
        let k = usize::try_from(n - self.first_index).ok()?;
        self.anchors.get(k).copied()
    }

    pub fn sign(&self, n: i64) -> Option<i8> {
        let k = usize::try_from(n - self.first_index).ok()?;
        self.signs.get(k).copied()
    }

    /// Points covered by at least one block: `[i_{n_min}, i_{n_max}]`.
    pub fn coverage(&self) -> Window {
        Window::new(self.anchors[0], *self.anchors.last().unwrap())
    }

    /// Largest window `[i_a, i_b]` inside `within` that is a union of whole
    /// orbits of the generator with the given block parity (0 for `s`, 1 for `t`).
    pub fn orbit_aligned_window(&self, parity: i64, within: Window) -> Option<Window> {
        let ns: Vec<i64> = (self.first_index..=self.last_index())
            .filter(|&n| within.contains(self.anchor(n).unwrap()))
            .collect();
        let start = ns.iter().copied().find(|n| n.rem_euclid(2) == parity)?;
        let end = ns
            .iter()
            .rev()
            .copied()
            .find(|&n| n > start && (n - 1).rem_euclid(2) == parity)?;
        Some(Window::new(self.anchor(start)?, self.anchor(end)?))
    }
}

impl fmt::Display for F2ZConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "first_index {}", self.first_index)?;
        let anchors: Vec<String> = self.anchors.iter().map(i64::to_string).collect();
        writeln!(f, "anchors {}", anchors.join(" "))?;
        let signs: Vec<&str> = self
            .signs
            .iter()
            .map(|&s| if s > 0 { "+" } else { "-" })
            .collect();
        writeln!(f, "signs {}", signs.join(" "))
    }
}

impl FromStr for F2ZConfig {
    type Err = ActionError;

    /// Line format: `first_index N`, `anchors a b c ...`, `signs + - ...`;
    /// blank lines and `#` comments are ignored.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut first = None;
        let mut anchors = None;
        let mut signs = None;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            let bad = |what: &str| ActionError::Config(format!("bad {what} entry in `{line}`"));
            match key {
                "first_index" => {
                    let value = rest.first().ok_or_else(|| bad("first_index"))?;
                    first = Some(value.parse::<i64>().map_err(|_| bad("first_index"))?);
                }
                "anchors" => {
                    anchors = Some(
                        rest.iter()
                            .map(|s| s.parse::<i64>().map_err(|_| bad("anchor")))
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                "signs" => {
                    signs = Some(
                        rest.iter()
                            .map(|s| match *s {
                                "+" | "+1" | "1" => Ok(1i8),
                                "-" | "-1" => Ok(-1i8),
                                _ => Err(bad("sign")),
                            })
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                other => return Err(ActionError::Config(format!("unknown key `{other}`"))),
            }
        }
        Self::new(
            first.ok_or_else(|| ActionError::Config("missing first_index".into()))?,
            anchors.ok_or_else(|| ActionError::Config("missing anchors".into()))?,
            signs.ok_or_else(|| ActionError::Config("missing signs".into()))?,
        )
    }
}

/// `F2` acting on `Z` by cycling even blocks with `s` and odd blocks with `t`.
#[derive(Debug, Clone)]
pub struct F2ZAction {
    config: F2ZConfig,
    presentation: Arc<Presentation>,
}

impl F2ZAction {
    pub fn new(config: F2ZConfig) -> Self {
        Self {
            config,
            presentation: Arc::new(Presentation::f2()),
        }
    }

    pub fn config(&self) -> &F2ZConfig {
        &self.config
    }

    /// Block `n` (spanning `[i_n, i_{n+1}]`) handled by the generator of the
    /// given parity at `j`, or `None` when `j` is fixed.
    fn block_for(&self, parity: i64, j: i64) -> Result<Option<i64>, ActionError> {
        let out = || ActionError::OutOfWindow {
            point: j.to_string(),
        };
        let first = self.config.first_index;
        let last_block = self.config.last_index() - 1;
        let block = match self.config.anchors.binary_search(&j) {
            Ok(k) => {
                let n = first + k as i64;
                if n.rem_euclid(2) == parity {
                    n
                } else {
                    n - 1
                }
            }
            Err(k) => {
                if k == 0 || k == self.config.anchors.len() {
                    return Err(out());
                }
                let n = first + k as i64 - 1;
                if n.rem_euclid(2) != parity {
                    return Ok(None);
                }
                n
            }
        };
        if block < first || block > last_block {
            return Err(out());
        }
        Ok(Some(block))
    }
}

impl Action for F2ZAction {
    type Point = i64;

    fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    fn apply(&self, letter: Letter, &j: &i64) -> Result<i64, ActionError> {
        if letter.generator > 1 {
            return Err(ActionError::Invalid(format!(
                "generator {} not in F2",
                letter.generator
            )));
        }
        let parity = letter.generator as i64;
        let Some(n) = self.block_for(parity, j)? else {
            return Ok(j);
        };
        let lo = self.config.anchor(n).unwrap();
        let hi = self.config.anchor(n + 1).unwrap();
        let mut sign = self.config.sign(n).unwrap();
        if letter.inverse {
            sign = -sign;
        }
        Ok(if sign > 0 {
            if j < hi {
                j + 1
            } else {
                lo
            }
        } else if j > lo {
            j - 1
        } else {
            hi
        })
    }
}

/// Translations of `Z^d` by the unit vectors, on the box `lo <= x <= hi`.
#[derive(Debug, Clone)]
pub struct TranslationAction {
    lo: Vec<i64>,
    hi: Vec<i64>,
    presentation: Arc<Presentation>,
}

impl TranslationAction {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self, ActionError> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(ActionError::Invalid("box corners must share a dimension".into()));
        }
        let names: Vec<String> = (1..=lo.len()).map(|i| format!("e{i}")).collect();
        let presentation = Presentation::free_group(&names)
            .map_err(|e| ActionError::Invalid(e.to_string()))?;
        Ok(Self {
            lo,
            hi,
            presentation: Arc::new(presentation),
        })
    }

    /// `[-radius, radius]^dim`.
    pub fn cube(dim: usize, radius: i64) -> Self {
        Self::new(vec![-radius; dim], vec![radius; dim]).expect("valid cube")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| l <= v && v <= h)
    }

    /// Box points in lexicographic order.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (*l..=*h).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

impl Action for TranslationAction {
    type Point = Vec<i64>;

    fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    fn apply(&self, letter: Letter, x: &Vec<i64>) -> Result<Vec<i64>, ActionError> {
        if !self.contains(x) || letter.generator >= self.dim() {
            return Err(ActionError::OutOfWindow {
                point: format!("{x:?}"),
            });
        }
        let mut y = x.clone();
        y[letter.generator] += if letter.inverse { -1 } else { 1 };
        if self.contains(&y) {
            Ok(y)
        } else {
            Err(ActionError::OutOfWindow {
                point: format!("{y:?}"),
            })
        }
    }
}

/// Generator maps given as explicit tables on a window; `None` marks an image
/// that leaves the window.
#[derive(Debug, Clone)]
pub struct TableAction {
    window: Window,
    forward: Vec<Vec<Option<i64>>>,
    backward: Vec<HashMap<i64, i64>>,
    presentation: Arc<Presentation>,
}

impl TableAction {
    pub fn new(
        presentation: Arc<Presentation>,
        window: Window,
        tables: Vec<Vec<Option<i64>>>,
    ) -> Result<Self, ActionError> {
        if tables.len() != presentation.rank() {
            return Err(ActionError::Invalid(format!(
                "{} tables for {} generators",
                tables.len(),
                presentation.rank()
            )));
        }
        let mut backward = Vec::with_capacity(tables.len());
        for (g, table) in tables.iter().enumerate() {
            if table.len() != window.len() {
                return Err(ActionError::Invalid(format!(
                    "table {g} has {} entries for a window of {}",
                    table.len(),
                    window.len()
                )));
            }
            let mut inv = HashMap::new();
            for (x, image) in window.points().zip(table) {
                if let Some(y) = *image {
                    if inv.insert(y, x).is_some() {
                        return Err(ActionError::Invalid(format!(
                            "generator {g} is not injective at image {y}"
                        )));
                    }
                }
            }
            if presentation.kind() == GroupKind::FreeProductC2 {
                for (x, image) in window.points().zip(table) {
                    if let Some(y) = *image {
                        if window.contains(y) {
                            let back = table[(y - window.lo) as usize];
                            if back.is_some_and(|z| z != x) {
                                return Err(ActionError::Invalid(format!(
                                    "generator {g} is not an involution at {x}"
                                )));
                            }
                        }
                    }
                }
            }
            backward.push(inv);
        }
        Ok(Self {
            window,
            forward: tables,
            backward,
            presentation,
        })
    }

    pub fn window(&self) -> Window {
        self.window
    }
}

impl Action for TableAction {
    type Point = i64;

    fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    fn apply(&self, letter: Letter, &x: &i64) -> Result<i64, ActionError> {
        let out = || ActionError::OutOfWindow {
            point: x.to_string(),
        };
        if letter.generator >= self.forward.len() {
            return Err(out());
        }
        if letter.inverse {
            self.backward[letter.generator].get(&x).copied().ok_or_else(out)
        } else {
            if !self.window.contains(x) {
                return Err(out());
            }
            self.forward[letter.generator][(x - self.window.lo) as usize].ok_or_else(out)
        }
    }
}

/// A bounded-step bijection `Z -> Z^d` (`d` is 1 or 2), tabulated for
/// `|n| <= reach`. In dimension 2 it is a double spiral: the arms `n >= 0`
/// and `n < 0` alternately wrap the current rectangle, so consecutive
/// images are unit steps apart.
#[derive(Debug, Clone)]
pub struct SnakeBijection {
    dim: usize,
    reach: i64,
    forward: Vec<Vec<i64>>,
    inverse: HashMap<Vec<i64>, i64>,
}

impl SnakeBijection {
    pub fn new(dim: usize, reach: i64) -> Result<Self, ActionError> {
        let reach = reach.max(1);
        let (pos, neg) = match dim {
            1 => (
                (0..=reach).map(|n| vec![n]).collect::<Vec<_>>(),
                (1..=reach).map(|n| vec![-n]).collect::<Vec<_>>(),
            ),
            2 => double_spiral(reach as usize),
            _ => {
                return Err(ActionError::Invalid(format!(
                    "snake bijection implemented for d = 1, 2 only, got {dim}"
                )))
            }
        };
        // forward[k] = phi(k - reach)
        let mut forward = Vec::with_capacity(2 * reach as usize + 1);
        for k in (1..=reach as usize).rev() {
            forward.push(neg[k - 1].clone());
        }
        forward.extend(pos.into_iter().take(reach as usize + 1));
        let inverse = forward
            .iter()
            .enumerate()
            .map(|(k, p)| (p.clone(), k as i64 - reach))
            .collect();
        Ok(Self {
            dim,
            reach,
            forward,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reach(&self) -> i64 {
        self.reach
    }

    /// Step bound between consecutive images.
    pub fn step_bound(&self) -> i64 {
        1
    }

    pub fn eval(&self, n: i64) -> Option<&[i64]> {
        if n.abs() > self.reach {
            return None;
        }
        Some(&self.forward[(n + self.reach) as usize])
    }

    pub fn index_of(&self, point: &[i64]) -> Option<i64> {
        self.inverse.get(point).copied()
    }

    pub fn distance(a: &[i64], b: &[i64]) -> i64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }
}

fn double_spiral(reach: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut pos = vec![vec![0, 0], vec![1, 0]];
    let mut neg: Vec<Vec<i64>> = Vec::new();
    let (mut x0, mut x1, mut y0, mut y1) = (0i64, 1i64, 0i64, 0i64);
    let mut phase = 0usize;
    while pos.len() <= reach || neg.len() < reach {
        let (arm, points): (&mut Vec<Vec<i64>>, Vec<Vec<i64>>) = match phase % 8 {
            // (arm, side): neg-left, pos-right, neg-top, pos-bottom,
            // neg-right, pos-left, neg-bottom, pos-top
            0 | 5 => {
                x0 -= 1;
                let pts = (y0..=y1).map(|y| vec![x0, y]).collect();
                (if phase % 8 == 0 { &mut neg } else { &mut pos }, pts)
            }
            1 | 4 => {
                x1 += 1;
                let pts = (y0..=y1).rev().map(|y| vec![x1, y]).collect();
                (if phase % 8 == 1 { &mut pos } else { &mut neg }, pts)
            }
            2 | 7 => {
                y1 += 1;
                let pts = (x0..=x1).map(|x| vec![x, y1]).collect();
                (if phase % 8 == 2 { &mut neg } else { &mut pos }, pts)
            }
            _ => {
                y0 -= 1;
                let pts = (x0..=x1).rev().map(|x| vec![x, y0]).collect();
                (if phase % 8 == 3 { &mut pos } else { &mut neg }, pts)
            }
        };
        arm.extend(points);
        phase += 1;
    }
    (pos, neg)
}

/// Result of sweeping nontrivial reduced words for a moved point.
#[derive(Debug, Clone)]
pub struct FaithfulnessReport<P> {
    /// Each nontrivial word with the least point it moves, if any.
    pub witnesses: Vec<(Word, Option<P>)>,
    /// `(word, point)` pairs skipped because evaluation left the window.
    pub diagnostics: Vec<(Word, P)>,
}

impl<P> FaithfulnessReport<P> {
    pub fn unwitnessed(&self) -> Vec<&Word> {
        self.witnesses
            .iter()
            .filter(|(_, p)| p.is_none())
            .map(|(w, _)| w)
            .collect()
    }
}

pub fn faithfulness_witnesses<A: Action>(
    action: &A,
    max_len: usize,
    points: &[A::Point],
) -> FaithfulnessReport<A::Point> {
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut witnesses = Vec::new();
    let mut diagnostics = Vec::new();
    for w in enumerate_reduced(action.presentation(), max_len.max(1)) {
        if w.is_identity() {
            continue;
        }
        let mut found = None;
        for x in &sorted {
            match act_word(action, &w, x) {
                Ok(y) if &y != x => {
                    found = Some(x.clone());
                    break;
                }
                Ok(_) => {}
                Err(_) => diagnostics.push((w.clone(), x.clone())),
            }
        }
        witnesses.push((w, found));
    }
    FaithfulnessReport {
        witnesses,
        diagnostics,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DisplacementRow {
    pub n: u64,
    pub count: usize,
    #[serde(with = "rational")]
    pub fraction: Q,
    /// `1/n + boundary_correction`.
    #[serde(with = "rational")]
    pub bound: Q,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DisplacementProfile {
    pub generator: String,
    pub window: Window,
    pub step_bound: i64,
    /// Orbit pieces of the generator that touch the window boundary.
    pub cut_orbits: usize,
    #[serde(with = "rational")]
    pub boundary_correction: Q,
    pub rows: Vec<DisplacementRow>,
}

/// Fraction of window points moved at least `K n` by one letter, for
/// `n = 1..=n_max`. Distances are `|g(x) - x|` with `K = 1`, or the `L1`
/// distance of the images under `snake` with its step bound.
pub fn displacement_profile<A: Action<Point = i64>>(
    action: &A,
    letter: Letter,
    window: Window,
    snake: Option<&SnakeBijection>,
    n_max: u64,
) -> Result<DisplacementProfile, ActionError> {
    if window.is_empty() {
        return Err(ActionError::Invalid("empty window".into()));
    }
    let step = snake.map_or(1, SnakeBijection::step_bound);
    let inverse = letter.inverse_in(action.presentation());
    let size = window.len();
    let mut displacement: Vec<Option<i64>> = Vec::with_capacity(size);
    for x in window.points() {
        let d = match action.apply(letter, &x) {
            Ok(y) => match snake {
                Some(phi) => match (phi.eval(x), phi.eval(y)) {
                    (Some(a), Some(b)) => Some(SnakeBijection::distance(a, b)),
                    _ => None,
                },
                None => Some((y - x).abs()),
            },
            Err(_) => None,
        };
        displacement.push(d);
    }
    let cut_orbits = cut_orbit_pieces(action, letter, inverse, window);
    let correction = rational::from_count(cut_orbits, size);
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let threshold = step * n as i64;
        // unresolved points are counted as displaced
        let count = displacement
            .iter()
            .filter(|d| d.map_or(true, |d| d >= threshold))
            .count();
        let fraction = rational::from_count(count, size);
        let bound = Q::new(1, n as i64) + correction;
        rows.push(DisplacementRow {
            n,
            count,
            fraction,
            bound,
            holds: fraction <= bound,
        });
    }
    Ok(DisplacementProfile {
        generator: action.presentation().letter_name(letter),
        window,
        step_bound: step,
        cut_orbits,
        boundary_correction: correction,
        rows,
    })
}

/// Components of `x -> g(x)` restricted to the window that have a member
/// whose image or preimage lies outside it.
fn cut_orbit_pieces<A: Action<Point = i64>>(
    action: &A,
    letter: Letter,
    inverse: Letter,
    window: Window,
) -> usize {
    let size = window.len();
    let idx = |x: i64| (x - window.lo) as usize;
    let mut parent: Vec<usize> = (0..size).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut leaks = vec![false; size];
    for x in window.points() {
        for l in [letter, inverse] {
            match action.apply(l, &x) {
                Ok(y) if window.contains(y) => {
                    let (a, b) = (find(&mut parent, idx(x)), find(&mut parent, idx(y)));
                    parent[a] = b;
                }
                _ => leaks[idx(x)] = true,
            }
        }
    }
    let mut cut = std::collections::BTreeSet::new();
    for i in 0..size {
        if leaks[i] {
            cut.insert(find(&mut parent, i));
        }
    }
    cut.len()
}

/// Orbits of one letter on a window: closed cycles inside the window, and
/// the open pieces cut by its boundary.
pub fn letter_orbits<A: Action<Point = i64>>(
    action: &A,
    letter: Letter,
    window: Window,
) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut seen = BTreeMap::new();
    let mut closed = Vec::new();
    let mut open = Vec::new();
    for start in window.points() {
        if seen.contains_key(&start) {
            continue;
        }
        let mut orbit = vec![start];
        seen.insert(start, ());
        let mut x = start;
        let mut is_closed = false;
        loop {
            match action.apply(letter, &x) {
                Ok(y) if y == start => {
                    is_closed = true;
                    break;
                }
                Ok(y) if window.contains(y) && !seen.contains_key(&y) => {
                    seen.insert(y, ());
                    orbit.push(y);
                    x = y;
                }
                _ => break,
            }
        }
        if is_closed {
            closed.push(orbit);
        } else {
            open.push(orbit);
        }
    }
    (closed, open)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: Letter = Letter::new(0, false);
    const S_INV: Letter = Letter::new(0, true);
    const T: Letter = Letter::new(1, false);

    fn small(sign: i8) -> F2ZAction {
        F2ZAction::new(F2ZConfig::new(0, vec![0, 3], vec![sign, 1]).unwrap())
    }

    #[test]
    fn positive_block_cycles_forward() {
        let a = small(1);
        let images: Vec<i64> = (0..=3).map(|j| a.apply(S, &j).unwrap()).collect();
        assert_eq!(images, [1, 2, 3, 0]);
        // t is the identity strictly inside an even block
        assert_eq!(a.apply(T, &1).unwrap(), 1);
        assert_eq!(a.apply(T, &2).unwrap(), 2);
        // anchors need the odd neighbours, which are not covered
        assert!(matches!(a.apply(T, &0), Err(ActionError::OutOfWindow { .. })));
    }

    #[test]
    fn negative_block_cycles_backward() {
        let a = small(-1);
        let images: Vec<i64> = (0..=3).map(|j| a.apply(S, &j).unwrap()).collect();
        assert_eq!(images, [3, 0, 1, 2]);
    }

    #[test]
    fn word_evaluation() {
        let a = small(1);
        let p = a.presentation().clone();
        assert_eq!(act_word(&a, &Word::identity(&p), &7).unwrap(), 7);
        let s4 = Word::parse("s s s s", &p).unwrap();
        assert_eq!(act_word(&a, &s4, &0).unwrap(), 0);
        let s_inv = Word::parse("s^-1", &p).unwrap();
        assert_eq!(act_word(&a, &s_inv, &1).unwrap(), 0);
        assert_eq!(a.apply(S_INV, &0).unwrap(), 3);
        let err = act_word(&a, &Word::parse("t s", &p).unwrap(), &3).unwrap_err();
        assert_eq!(
            err,
            ActionError::BoundaryEscape {
                escaping_part: "t s".into(),
                point: "0".into()
            }
        );
    }

    #[test]
    fn default_config_rules() {
        let cfg = F2ZConfig::default_covering(-50, 50);
        assert_eq!(cfg.anchor(0), Some(0));
        assert_eq!(cfg.anchor(1), Some(2));
        assert_eq!(cfg.anchor(2), Some(5));
        assert_eq!(cfg.anchor(3), Some(9));
        assert_eq!(cfg.sign(0), Some(1));
        assert_eq!(cfg.sign(2), Some(-1));
        assert!(cfg.coverage().lo < -50 && cfg.coverage().hi > 50);
        let a = F2ZAction::new(cfg);
        // block 0 = [0, 2], even, f = +1: s cycles 0 -> 1 -> 2 -> 0
        assert_eq!(a.apply(S, &0).unwrap(), 1);
        assert_eq!(a.apply(S, &2).unwrap(), 0);
        // block 1 = [2, 5], odd, f = +1: t cycles 2 -> 3 -> 4 -> 5 -> 2, s fixes 3, 4
        assert_eq!(a.apply(T, &2).unwrap(), 3);
        assert_eq!(a.apply(T, &5).unwrap(), 2);
        assert_eq!(a.apply(S, &3).unwrap(), 3);
        // block 2 = [5, 9], even, f = -1
        assert_eq!(a.apply(S, &5).unwrap(), 9);
        assert_eq!(a.apply(S, &6).unwrap(), 5);
    }

    #[test]
    fn config_text_roundtrip() {
        let cfg = F2ZConfig::default_covering(-20, 20);
        let parsed: F2ZConfig = cfg.to_string().parse().unwrap();
        assert_eq!(parsed, cfg);
        assert!("first_index 0\nanchors 0 3\nsigns + x".parse::<F2ZConfig>().is_err());
        assert!("first_index 0\nanchors 3 0\nsigns + +".parse::<F2ZConfig>().is_err());
    }

    #[test]
    fn orbits_are_blocks() {
        let cfg = F2ZConfig::default_covering(-100, 100);
        let a = F2ZAction::new(cfg.clone());
        let w = cfg.orbit_aligned_window(0, Window::new(-60, 60)).unwrap();
        let (closed, open) = letter_orbits(&a, S, w);
        assert!(open.is_empty());
        for orbit in &closed {
            let lo = *orbit.iter().min().unwrap();
            let hi = *orbit.iter().max().unwrap();
            if orbit.len() > 1 {
                // a whole even block [i_n, i_{n+1}]
                let k = cfg.anchors().binary_search(&lo).unwrap();
                assert_eq!(cfg.anchors()[k + 1], hi);
                assert_eq!(orbit.len() as i64, hi - lo + 1);
                assert_eq!((cfg.first_index() + k as i64).rem_euclid(2), 0);
            }
        }
        let total: usize = closed.iter().map(Vec::len).sum();
        assert_eq!(total, w.len());
    }

    #[test]
    fn displacement_of_identity_is_zero() {
        let p = Arc::new(Presentation::free_group(&["a"]).unwrap());
        let w = Window::new(0, 9);
        let table = TableAction::new(p, w, vec![w.points().map(Some).collect()]).unwrap();
        let prof = displacement_profile(&table, Letter::new(0, false), w, None, 4).unwrap();
        assert!(prof.rows.iter().all(|r| r.count == 0));
    }

    #[test]
    fn displacement_counts_wrap_points() {
        // gaps all 3 on even blocks: blocks [0,3], [3,6] odd, [6,9], [9,12] odd ...
        let anchors: Vec<i64> = (0..=6).map(|k| 3 * k).collect();
        let cfg = F2ZConfig::new(0, anchors, vec![1; 7]).unwrap();
        let a = F2ZAction::new(cfg.clone());
        // [0, 9] = s-blocks [0,3] and [6,9] plus the fixed points 4, 5
        let w = cfg.orbit_aligned_window(0, Window::new(0, 9)).unwrap();
        assert_eq!(w, Window::new(0, 9));
        let prof = displacement_profile(&a, S, w, None, 4).unwrap();
        assert_eq!(prof.cut_orbits, 0);
        assert_eq!(prof.rows[0].count, 8);
        assert_eq!(prof.rows[1].fraction, Q::new(2, 10));
        assert_eq!(prof.rows[2].fraction, Q::new(2, 10));
        assert_eq!(prof.rows[3].fraction, Q::new(0, 1));
        assert!(prof.rows.iter().all(|r| r.holds));
    }

    #[test]
    fn snake_steps_are_unit() {
        for dim in [1, 2] {
            let phi = SnakeBijection::new(dim, 2000).unwrap();
            let mut seen = std::collections::HashSet::new();
            for n in -2000..2000 {
                let a = phi.eval(n).unwrap();
                let b = phi.eval(n + 1).unwrap();
                assert_eq!(SnakeBijection::distance(a, b), 1, "n = {n}");
                assert!(seen.insert(a.to_vec()));
                assert_eq!(phi.index_of(a), Some(n));
            }
        }
    }

    #[test]
    fn snake_fills_boxes() {
        let phi = SnakeBijection::new(2, 5000).unwrap();
        for x in -10..=10 {
            for y in -10..=10 {
                assert!(phi.index_of(&[x, y]).is_some(), "({x}, {y}) missing");
            }
        }
        assert!(SnakeBijection::new(3, 10).is_err());
    }

    #[test]
    fn table_action_validation() {
        let p = Arc::new(Presentation::free_group(&["a"]).unwrap());
        let w = Window::new(0, 2);
        assert!(TableAction::new(p.clone(), w, vec![vec![Some(1), Some(1), None]]).is_err());
        let a = TableAction::new(p, w, vec![vec![Some(1), Some(2), None]]).unwrap();
        assert_eq!(a.apply(Letter::new(0, true), &2).unwrap(), 1);
        assert!(a.apply(Letter::new(0, false), &2).is_err());
        let c2 = Arc::new(Presentation::free_product_c2(&["c"]).unwrap());
        assert!(TableAction::new(c2, w, vec![vec![Some(1), Some(2), Some(0)]]).is_err());
    }

    #[test]
    fn faithfulness_sweep_finds_s() {
        let cfg = F2ZConfig::default_covering(-64, 64);
        let a = F2ZAction::new(cfg);
        let pts: Vec<i64> = Window::symmetric(64).points().collect();
        let report = faithfulness_witnesses(&a, 2, &pts);
        assert_eq!(report.witnesses.len(), 16);
        assert!(report.witnesses.iter().all(|(w, p)| !w.is_identity() && p.is_some()));
    }

    #[test]
    fn faithfulness_reports_absent_witness() {
        // one odd block only: s fixes every interior point
        let cfg = F2ZConfig::new(1, vec![0, 10], vec![1, 1]).unwrap();
        let a = F2ZAction::new(cfg);
        let pts: Vec<i64> = (1..=9).collect();
        let report = faithfulness_witnesses(&a, 1, &pts);
        let s = &report.witnesses[0];
        assert_eq!(s.0.to_string(), "s");
        assert_eq!(s.1, None);
    }
}
