//! Reduced words in free groups and in free products of copies of `C2`.
//!
//! Words are always stored reduced; every constructor normalizes. The
//! letter order of a [`Presentation`] is `g0, g0^-1, g1, g1^-1, ...` for free
//! groups and `g0, g1, ...` for free products of involutions, and enumeration
//! sorts by `(length, lexicographic)` under that order.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {index} out of range for a presentation with {rank} generators")]
    InvalidGenerator { index: usize, rank: usize },
    #[error("exponent {0} is not +1 or -1")]
    InvalidExponent(i64),
    #[error("unknown generator `{0}`")]
    UnknownName(String),
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("words belong to different presentations")]
    PresentationMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum GroupKind {
    /// Free group on the named generators.
    FreeGroup,
    /// Free product of copies of `C2`, one per named generator.
    FreeProductC2,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    kind: GroupKind,
    names: Vec<String>,
}

impl Presentation {
    pub fn new<S: AsRef<str>>(kind: GroupKind, names: &[S]) -> Result<Self, WordError> {
        if names.is_empty() {
            return Err(WordError::InvalidPresentation(
                "at least one generator is required".into(),
            ));
        }
        let mut seen = HashSet::new();
        for name in names {
            let name = name.as_ref();
            let valid = !name.is_empty()
                && name != "1"
                && !name.contains('^')
                && !name.chars().any(char::is_whitespace);
            if !valid {
                return Err(WordError::InvalidPresentation(format!(
                    "bad generator name `{name}`"
                )));
            }
            if !seen.insert(name) {
                return Err(WordError::InvalidPresentation(format!(
                    "duplicate generator name `{name}`"
                )));
            }
        }
        Ok(Self {
            kind,
            names: names.iter().map(|s| s.as_ref().to_owned()).collect(),
        })
    }

    pub fn free_group<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        Self::new(GroupKind::FreeGroup, names)
    }

    pub fn free_product_c2<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        Self::new(GroupKind::FreeProductC2, names)
    }

    /// `F2 = <s, t>`.
    pub fn f2() -> Self {
        Self::free_group(&["s", "t"]).expect("static presentation")
    }

    /// `C2 * C2 * C2 * C2` with involutions `A, B, C, D`.
    pub fn gamma() -> Self {
        Self::free_product_c2(&["A", "B", "C", "D"]).expect("static presentation")
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, generator: usize) -> &str {
        &self.names[generator]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Size of the symmetric generating set `S`.
    pub fn symmetric_size(&self) -> usize {
        match self.kind {
            GroupKind::FreeGroup => 2 * self.rank(),
            GroupKind::FreeProductC2 => self.rank(),
        }
    }

    pub fn is_involutive(&self) -> bool {
        self.kind == GroupKind::FreeProductC2
    }

    /// All letters in lexicographic order.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.rank())
            .flat_map(|g| match self.kind {
                GroupKind::FreeGroup => vec![Letter::new(g, false), Letter::new(g, true)],
                GroupKind::FreeProductC2 => vec![Letter::new(g, false)],
            })
            .collect()
    }

    pub fn letter_name(&self, letter: Letter) -> String {
        if letter.inverse {
            format!("{}^-1", self.names[letter.generator])
        } else {
            self.names[letter.generator].clone()
        }
    }

    fn letter(&self, generator: usize, exponent: i64) -> Result<Letter, WordError> {
        if generator >= self.rank() {
            return Err(WordError::InvalidGenerator {
                index: generator,
                rank: self.rank(),
            });
        }
        match exponent {
            1 => Ok(Letter::new(generator, false)),
            -1 => Ok(Letter::new(generator, self.kind == GroupKind::FreeGroup)),
            e => Err(WordError::InvalidExponent(e)),
        }
    }
}

/// A generator or its inverse. Derived order gives `s < s^-1 < t < t^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inverse_in(self, presentation: &Presentation) -> Self {
        match presentation.kind {
            GroupKind::FreeGroup => Self::new(self.generator, !self.inverse),
            GroupKind::FreeProductC2 => self,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    presentation: Arc<Presentation>,
}

/// Reduce a raw `(generator, exponent)` sequence.
pub fn reduce<I>(raw: I, presentation: &Arc<Presentation>) -> Result<Word, WordError>
where
    I: IntoIterator<Item = (usize, i64)>,
{
    let letters = raw
        .into_iter()
        .map(|(g, e)| presentation.letter(g, e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Word::from_letters(letters, presentation))
}

/// Every reduced word of length at most `max_length`, sorted by length and
/// then lexicographically.
pub fn enumerate_reduced(presentation: &Arc<Presentation>, max_length: usize) -> Vec<Word> {
    let alphabet = presentation.letters();
    let mut out = vec![Word::identity(presentation)];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_length {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for prefix in &layer {
            for &letter in &alphabet {
                let cancels = prefix
                    .last()
                    .is_some_and(|&last| last.inverse_in(presentation) == letter);
                if !cancels {
                    let mut w = prefix.clone();
                    w.push(letter);
                    next.push(w);
                }
            }
        }
        out.extend(next.iter().map(|letters| Word {
            letters: letters.clone(),
            presentation: Arc::clone(presentation),
        }));
        layer = next;
    }
    out
}

impl Word {
    pub fn identity(presentation: &Arc<Presentation>) -> Self {
        Self {
            letters: Vec::new(),
            presentation: Arc::clone(presentation),
        }
    }

    /// Builds a word from letters, cancelling adjacent inverse pairs.
    pub fn from_letters<I>(letters: I, presentation: &Arc<Presentation>) -> Self
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut stack: Vec<Letter> = Vec::new();
        for letter in letters {
            let letter = if presentation.is_involutive() {
                Letter::new(letter.generator, false)
            } else {
                letter
            };
            if stack
                .last()
                .is_some_and(|&top| top.inverse_in(presentation) == letter)
            {
                stack.pop();
            } else {
                stack.push(letter);
            }
        }
        Self {
            letters: stack,
            presentation: Arc::clone(presentation),
        }
    }

    /// Parses `"s t^-1 s"`, `"A B C"`, `"s^3"`; `""` and `"1"` give the identity.
    pub fn parse(text: &str, presentation: &Arc<Presentation>) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, power) = match token.split_once('^') {
                Some((name, exp)) => {
                    let power: i64 = exp
                        .parse()
                        .map_err(|_| WordError::MalformedToken(token.to_owned()))?;
                    (name, power)
                }
                None => (token, 1),
            };
            let generator = presentation
                .index_of(name)
                .ok_or_else(|| WordError::UnknownName(name.to_owned()))?;
            let letter = presentation.letter(generator, power.signum())?;
            for _ in 0..power.unsigned_abs() {
                letters.push(letter);
            }
        }
        Ok(Self::from_letters(letters, presentation))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| l.inverse_in(&self.presentation))
                .collect(),
            presentation: Arc::clone(&self.presentation),
        }
    }

    /// `self · other`, acting as `other` first.
    pub fn concat(&self, other: &Word) -> Result<Self, WordError> {
        if self.presentation != other.presentation {
            return Err(WordError::PresentationMismatch);
        }
        Ok(Self::from_letters(
            self.letters.iter().chain(other.letters.iter()).copied(),
            &self.presentation,
        ))
    }

    /// The word obtained by reversing the letter sequence, unreduced input allowed.
    pub fn reversed(&self) -> Self {
        Self::from_letters(self.letters.iter().rev().copied(), &self.presentation)
    }

    pub fn is_reduced(&self) -> bool {
        self.letters
            .windows(2)
            .all(|w| w[0].inverse_in(&self.presentation) != w[1])
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, &letter) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&self.presentation.letter_name(letter))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<Presentation> {
        Arc::new(Presentation::f2())
    }

    fn gamma() -> Arc<Presentation> {
        Arc::new(Presentation::gamma())
    }

    /// Rewrites by deleting the leftmost cancelling pair until none is left.
    fn brute_reduce(mut w: Vec<Letter>, p: &Presentation) -> Vec<Letter> {
        loop {
            let pos = w.windows(2).position(|x| x[0].inverse_in(p) == x[1]);
            match pos {
                Some(i) => {
                    w.drain(i..i + 2);
                }
                None => return w,
            }
        }
    }

    #[test]
    fn cancels_in_free_group() {
        let p = f2();
        let w = reduce([(0, 1), (0, -1)], &p).unwrap();
        assert!(w.is_identity());
    }

    #[test]
    fn involutions_cancel() {
        let p = gamma();
        assert!(reduce([(0, 1), (0, 1)], &p).unwrap().is_identity());
        let w = reduce([(0, 1), (1, 1), (1, 1), (2, 1)], &p).unwrap();
        let expected = brute_reduce(
            vec![
                Letter::new(0, false),
                Letter::new(1, false),
                Letter::new(1, false),
                Letter::new(2, false),
            ],
            &p,
        );
        assert_eq!(w.letters(), expected.as_slice());
        assert_eq!(w.to_string(), "A C");
    }

    #[test]
    fn invalid_generator_rejected() {
        let p = f2();
        assert!(matches!(
            reduce([(2, 1)], &p),
            Err(WordError::InvalidGenerator { index: 2, rank: 2 })
        ));
        assert!(matches!(
            reduce([(0, 2)], &p),
            Err(WordError::InvalidExponent(2))
        ));
    }

    #[test]
    fn enumeration_counts() {
        let p = f2();
        let zero = enumerate_reduced(&p, 0);
        assert_eq!(zero.len(), 1);
        assert!(zero[0].is_identity());
        let one: Vec<String> = enumerate_reduced(&p, 1)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(one, ["1", "s", "s^-1", "t", "t^-1"]);
        for len in 0..=6usize {
            let expected: usize = 1 + (1..=len).map(|k| 4 * 3usize.pow(k as u32 - 1)).sum::<usize>();
            assert_eq!(enumerate_reduced(&p, len).len(), expected);
        }
        assert_eq!(enumerate_reduced(&gamma(), 2).len(), 17);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        // filter all raw sequences of length <= 3 down to the reduced ones
        let p = f2();
        let alphabet = p.letters();
        let mut brute: Vec<Vec<Letter>> = vec![Vec::new()];
        let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &alphabet {
                    let mut x = w.clone();
                    x.push(l);
                    next.push(x);
                }
            }
            brute.extend(next.iter().filter(|w| brute_reduce((*w).clone(), &p) == **w).cloned());
            frontier = next;
        }
        brute.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let fast: Vec<Vec<Letter>> = enumerate_reduced(&p, 3)
            .into_iter()
            .map(|w| w.letters().to_vec())
            .collect();
        assert_eq!(fast, brute);
    }

    #[test]
    fn parse_and_render() {
        let p = f2();
        let w = Word::parse("s t^-1 s", &p).unwrap();
        assert_eq!(w.to_string(), "s t^-1 s");
        assert_eq!(Word::parse("s^3", &p).unwrap().len(), 3);
        assert!(Word::parse("1", &p).unwrap().is_identity());
        assert!(Word::parse("", &p).unwrap().is_identity());
        assert!(matches!(Word::parse("u", &p), Err(WordError::UnknownName(_))));
        assert!(matches!(Word::parse("s^x", &p), Err(WordError::MalformedToken(_))));
        let g = gamma();
        assert_eq!(Word::parse("A B C", &g).unwrap().to_string(), "A B C");
        assert!(Word::parse("A A", &g).unwrap().is_identity());
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(Presentation::free_group(&["s", "s"]).is_err());
        assert!(Presentation::free_product_c2::<&str>(&[]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn raw_word(rank: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
            prop::collection::vec((0..rank, prop::bool::ANY), 0..24)
                .prop_map(|v| v.into_iter().map(|(g, b)| (g, if b { 1 } else { -1 })).collect())
        }

        proptest! {
            #[test]
            fn reduce_is_idempotent_and_confluent(raw in raw_word(2)) {
                let p = f2();
                let w = reduce(raw.clone(), &p).unwrap();
                prop_assert!(w.is_reduced());
                let again = Word::from_letters(w.letters().iter().copied(), &p);
                prop_assert_eq!(&again, &w);
                let letters: Vec<Letter> = raw.iter().map(|&(g, e)| Letter::new(g, e < 0)).collect();
                let expected = brute_reduce(letters, &p);
                prop_assert_eq!(w.letters(), expected.as_slice());
            }

            #[test]
            fn word_times_inverse_is_identity(raw in raw_word(2)) {
                let p = f2();
                let w = reduce(raw, &p).unwrap();
                prop_assert!(w.concat(&w.inverse()).unwrap().is_identity());
            }

            #[test]
            fn involutive_word_times_reverse_is_identity(raw in raw_word(4)) {
                let p = gamma();
                let w = reduce(raw, &p).unwrap();
                let rev = Word::from_letters(w.letters().iter().rev().copied(), &p);
                prop_assert!(w.concat(&rev).unwrap().is_identity());
            }

            #[test]
            fn display_parse_roundtrip(raw in raw_word(2)) {
                let p = f2();
                let w = reduce(raw, &p).unwrap();
                prop_assert_eq!(Word::parse(&w.to_string(), &p).unwrap(), w);
            }
        }
    }
}
