//! Letters, words and alphabets.
//!
//! A letter is either a base letter `x_i` or a bracket letter
//! `x_{i1,...,in}` standing for the pointwise product of the inputs
//! `u_{i1}...u_{in}`. Bracket letters are interned so that every letter is a
//! `Copy` integer code; the multiset of indices is kept sorted, which makes
//! the bracket operation commutative and associative by construction.
//!
//! Words are ordered first by length, then lexicographically by letter.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const BRACKET_BASE: u32 = 1 << 24;

#[derive(Default)]
struct Interner {
    codes: HashMap<Arc<[u32]>, u32>,
    indices: Vec<Arc<[u32]>>,
}

static INTERNER: Lazy<RwLock<Interner>> = Lazy::new(|| RwLock::new(Interner::default()));

fn intern(sorted: Vec<u32>) -> u32 {
    if let Some(code) = INTERNER.read().codes.get(sorted.as_slice()) {
        return *code;
    }
    let mut guard = INTERNER.write();
    if let Some(code) = guard.codes.get(sorted.as_slice()) {
        return *code;
    }
    let key: Arc<[u32]> = sorted.into();
    let code = BRACKET_BASE + guard.indices.len() as u32;
    guard.indices.push(key.clone());
    guard.codes.insert(key, code);
    code
}

fn bracket_indices(code: u32) -> Arc<[u32]> {
    INTERNER.read().indices[(code - BRACKET_BASE) as usize].clone()
}

/// A base letter `x_i` or a bracket letter `x_{i1,...,in}` (n >= 2).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn base(index: u32) -> Letter {
        assert!(index < BRACKET_BASE, "base letter index {index} too large");
        Letter(index)
    }

    /// Builds the letter for a multiset of base indices. A singleton collapses
    /// to the base letter.
    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Letter {
        let mut v: Vec<u32> = indices.into_iter().collect();
        assert!(!v.is_empty(), "a letter needs at least one index");
        if v.len() == 1 {
            return Letter::base(v[0]);
        }
        v.sort_unstable();
        Letter(intern(v))
    }

    pub fn is_base(self) -> bool {
        self.0 < BRACKET_BASE
    }

    pub fn base_index(self) -> Option<u32> {
        self.is_base().then_some(self.0)
    }

    /// The sorted multiset of base indices; `[i]` for a base letter.
    pub fn indices(self) -> Vec<u32> {
        if self.is_base() {
            vec![self.0]
        } else {
            bracket_indices(self.0).to_vec()
        }
    }

    /// Number of base indices in the letter (1 for base letters).
    pub fn weight(self) -> usize {
        if self.is_base() {
            1
        } else {
            bracket_indices(self.0).len()
        }
    }

    /// The commutative, associative bracket `[x y]`: multiset union of indices.
    pub fn bracket(self, other: Letter) -> Letter {
        let mut v = self.indices();
        v.extend(other.indices());
        Letter::from_indices(v)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_base(), other.is_base()) {
            (true, true) => self.0.cmp(&other.0),
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => {
                if self.0 == other.0 {
                    return Ordering::Equal;
                }
                let a = bracket_indices(self.0);
                let b = bracket_indices(other.0);
                a.len().cmp(&b.len()).then_with(|| a.cmp(&b))
            }
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_base() {
            write!(f, "x{}", self.0)
        } else {
            let idx = bracket_indices(self.0);
            let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            write!(f, "x[{}]", parts.join(","))
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Letter> {
        let body = s
            .strip_prefix('x')
            .ok_or_else(|| Error::Parse(format!("letter must start with 'x': {s:?}")))?;
        if let Some(inner) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let idx: std::result::Result<Vec<u32>, _> = inner.split(',').map(|p| p.trim().parse::<u32>()).collect();
            let idx = idx.map_err(|_| Error::Parse(format!("bad bracket letter {s:?}")))?;
            if idx.is_empty() {
                return Err(Error::Parse(format!("empty bracket letter {s:?}")));
            }
            Ok(Letter::from_indices(idx))
        } else {
            body.parse::<u32>()
                .map(Letter::base)
                .map_err(|_| Error::Parse(format!("bad letter {s:?}")))
        }
    }
}

/// Shorthand for the base letter `x_i`.
pub fn x(i: u32) -> Letter {
    Letter::base(i)
}

/// A finite word over the (bracket-extended) alphabet.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    /// Word over base letters, e.g. `Word::from_indices(&[0, 1])` is `x0 x1`.
    pub fn from_indices(indices: &[u32]) -> Word {
        Word(indices.iter().map(|&i| Letter::base(i)).collect())
    }

    pub fn letter(x: Letter) -> Word {
        Word(vec![x])
    }

    /// `x^k`
    pub fn power(x: Letter, k: usize) -> Word {
        Word(vec![x; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn letter_count(&self, x: Letter) -> usize {
        self.0.iter().filter(|&&l| l == x).count()
    }

    pub fn bracket_count(&self) -> usize {
        self.0.iter().filter(|l| !l.is_base()).count()
    }

    pub fn is_base_word(&self) -> bool {
        self.0.iter().all(|l| l.is_base())
    }

    /// `||eta|| = 2|eta|_0 + |eta|_1`, defined for base words only.
    pub fn feedback_degree(&self) -> Result<usize> {
        self.0.iter().try_fold(0usize, |acc, l| match l.base_index() {
            Some(0) => Ok(acc + 2),
            Some(_) => Ok(acc + 1),
            None => Err(Error::DegreeUndefined),
        })
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `x eta`
    pub fn prepend(&self, x: Letter) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(x);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// `eta x`
    pub fn append(&self, x: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(x);
        Word(v)
    }

    /// `x^{-1}(eta)`: the remainder if `eta = x eta'`, `None` otherwise.
    pub fn left_shift(&self, x: Letter) -> Option<Word> {
        match self.0.split_first() {
            Some((&first, rest)) if first == x => Some(Word(rest.to_vec())),
            _ => None,
        }
    }

    /// `xi^{-1}(eta)`: the remainder if `xi` is a prefix of `eta`.
    pub fn shift_by(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|rest| Word(rest.to_vec()))
    }

    /// Tail after the first letter.
    pub fn tail(&self) -> Word {
        Word(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

/// `x^{-1}` applied letter by letter; free function form of [`Word::left_shift`].
pub fn left_shift(x: Letter, eta: &Word) -> Option<Word> {
    eta.left_shift(x)
}

pub fn bracket(x: Letter, y: Letter) -> Letter {
    x.bracket(y)
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "∅" {
            return Ok(Word::empty());
        }
        s.split_whitespace().map(Letter::from_str).collect::<Result<Vec<_>>>().map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Letter, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Control alphabet `X = {x0, ..., xm}`, optionally closed under brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    pub m: u32,
    pub extended: bool,
}

impl Alphabet {
    pub fn new(m: u32) -> Alphabet {
        Alphabet { m, extended: false }
    }

    pub fn extended(m: u32) -> Alphabet {
        Alphabet { m, extended: true }
    }

    /// `x0, ..., xm`
    pub fn letters(&self) -> Vec<Letter> {
        (0..=self.m).map(Letter::base).collect()
    }

    /// `x1, ..., xm` (the alphabet without the drift letter).
    pub fn input_letters(&self) -> Vec<Letter> {
        (1..=self.m).map(Letter::base).collect()
    }

    pub fn contains(&self, l: Letter) -> bool {
        let idx = l.indices();
        idx.iter().all(|&i| i <= self.m) && (idx.len() == 1 || self.extended)
    }

    /// All base words of length at most `max_len`, in canonical order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        words_up_to(&self.letters(), max_len)
    }
}

/// All words over `letters` of length exactly `len`, in canonical order when
/// `letters` is sorted.
pub fn words_of_length(letters: &[Letter], len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * letters.len());
        for w in &out {
            for &l in letters {
                next.push(w.append(l));
            }
        }
        out = next;
    }
    out
}

pub fn words_up_to(letters: &[Letter], max_len: usize) -> Vec<Word> {
    let mut sorted = letters.to_vec();
    sorted.sort();
    sorted.dedup();
    (0..=max_len).flat_map(|n| words_of_length(&sorted, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn lengths() {
        assert_eq!(Word::empty().len(), 0);
        assert_eq!(w("x1 x2").len(), 2);
        assert_eq!(w("x0 x1 x0").len(), 3);
    }

    #[test]
    fn letter_counts() {
        let eta = w("x1 x[1,1] x1");
        assert_eq!(eta.letter_count(x(1)), 2);
        assert_eq!(eta.letter_count(Letter::from_indices([1, 1])), 1);
        assert_eq!(Word::empty().letter_count(x(0)), 0);
    }

    #[test]
    fn feedback_degrees() {
        assert_eq!(Word::empty().feedback_degree(), Ok(0));
        assert_eq!(w("x0").feedback_degree(), Ok(2));
        assert_eq!(w("x1 x0").feedback_degree(), Ok(3));
        assert_eq!(w("x1 x[1,2]").feedback_degree(), Err(Error::DegreeUndefined));
    }

    #[test]
    fn left_shifts() {
        assert_eq!(left_shift(x(1), &w("x1 x2")), Some(w("x2")));
        assert_eq!(left_shift(x(2), &w("x1 x2")), None);
        assert_eq!(left_shift(x(1), &Word::empty()), None);
        assert_eq!(w("x0 x1 x2").shift_by(&w("x0 x1")), Some(w("x2")));
    }

    #[test]
    fn brackets() {
        assert_eq!(bracket(x(1), x(2)).to_string(), "x[1,2]");
        assert_eq!(bracket(x(1), x(1)).to_string(), "x[1,1]");
        assert_ne!(bracket(x(1), x(1)), x(1));
        assert_eq!(bracket(bracket(x(1), x(2)), x(3)).to_string(), "x[1,2,3]");
        assert_eq!(Letter::from_indices([3]), x(3));
        assert_eq!("x[2,1]".parse::<Letter>().unwrap(), bracket(x(1), x(2)));
    }

    #[test]
    fn bracket_is_commutative_and_associative() {
        let mut letters: Vec<Letter> = (0..=4).map(x).collect();
        letters.push(bracket(x(1), x(2)));
        letters.push(bracket(x(3), x(3)));
        for &a in &letters {
            for &b in &letters {
                assert_eq!(bracket(a, b), bracket(b, a));
                for &c in &letters {
                    assert_eq!(bracket(bracket(a, b), c), bracket(a, bracket(b, c)));
                }
            }
        }
    }

    #[test]
    fn shift_inverts_prepend() {
        for eta in Alphabet::new(2).words_up_to(5) {
            for l in Alphabet::new(2).letters() {
                assert_eq!(left_shift(l, &eta.prepend(l)), Some(eta.clone()));
            }
        }
    }

    #[test]
    fn degree_is_additive() {
        let words = Alphabet::new(2).words_up_to(3);
        for a in &words {
            for b in &words {
                assert_eq!(
                    a.concat(b).feedback_degree().unwrap(),
                    a.feedback_degree().unwrap() + b.feedback_degree().unwrap()
                );
            }
        }
    }

    #[test]
    fn canonical_order_and_round_trip() {
        let mut ws = vec![w("x2 x1"), w("x0"), Word::empty(), w("x1 x2"), w("x[1,2]")];
        ws.sort();
        let printed: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(printed, ["e", "x0", "x[1,2]", "x1 x2", "x2 x1"]);
        for word in ws {
            assert_eq!(word.to_string().parse::<Word>().unwrap(), word);
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Alphabet::new(2).words_up_to(3).len(), 1 + 3 + 9 + 27);
        assert!(Alphabet::extended(2).contains(bracket(x(1), x(2))));
        assert!(!Alphabet::new(2).contains(bracket(x(1), x(2))));
        assert!(!Alphabet::new(2).contains(x(3)));
    }
}
