//! Sparse formal power series with coefficients in `C^ell`.
//!
//! Every series carries a [`Truncation`]: either `Exact` (a polynomial whose
//! support is fully known) or `At(n)`, meaning coefficients are reliable only
//! for words of length at most `n`. Reading past the truncation is an error.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::words::{Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Exact,
    At(usize),
}

impl Truncation {
    pub fn min(self, other: Truncation) -> Truncation {
        match (self, other) {
            (Truncation::Exact, t) | (t, Truncation::Exact) => t,
            (Truncation::At(a), Truncation::At(b)) => Truncation::At(a.min(b)),
        }
    }

    pub fn allows(self, len: usize) -> bool {
        match self {
            Truncation::Exact => true,
            Truncation::At(n) => len <= n,
        }
    }

    pub fn limit(self) -> Option<usize> {
        match self {
            Truncation::Exact => None,
            Truncation::At(n) => Some(n),
        }
    }

    /// Truncation after stripping a prefix of length `k`.
    pub fn minus(self, k: usize) -> Truncation {
        match self {
            Truncation::Exact => Truncation::Exact,
            Truncation::At(n) => Truncation::At(n.saturating_sub(k)),
        }
    }

    /// Truncation after prefixing every word with `k` letters.
    pub fn plus(self, k: usize) -> Truncation {
        match self {
            Truncation::Exact => Truncation::Exact,
            Truncation::At(n) => Truncation::At(n + k),
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Exact => write!(f, "exact"),
            Truncation::At(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct Series<C> {
    ell: usize,
    terms: BTreeMap<Word, Vec<C>>,
    truncation: Truncation,
}

fn is_zero_vec<C: Scalar>(v: &[C]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// Componentwise product; a length-1 operand is broadcast.
pub(crate) fn mul_vec<C: Scalar>(a: &[C], b: &[C]) -> Vec<C> {
    match (a.len(), b.len()) {
        (1, _) => b.iter().map(|y| a[0].clone() * y.clone()).collect(),
        (_, 1) => a.iter().map(|v| v.clone() * b[0].clone()).collect(),
        _ => a.iter().zip(b).map(|(v, y)| v.clone() * y.clone()).collect(),
    }
}

/// Output dimension of a componentwise product of series with dimensions `a`, `b`.
pub(crate) fn product_ell(a: usize, b: usize) -> Result<usize> {
    if a == b || b == 1 {
        Ok(a)
    } else if a == 1 {
        Ok(b)
    } else {
        Err(Error::DimensionMismatch { expected: a, found: b })
    }
}

impl<C: Scalar> Series<C> {
    pub fn zero(ell: usize) -> Series<C> {
        Series { ell, terms: BTreeMap::new(), truncation: Truncation::Exact }
    }

    /// The unit `1 = 1 e` with every component equal to one.
    pub fn one(ell: usize) -> Series<C> {
        Series::constant(vec![C::one(); ell])
    }

    pub fn constant(v: Vec<C>) -> Series<C> {
        Series::monomial(Word::empty(), v)
    }

    pub fn monomial(word: Word, coeff: Vec<C>) -> Series<C> {
        let mut s = Series::zero(coeff.len());
        s.add_term(word, coeff);
        s
    }

    /// Scalar (`ell = 1`) single-term series `c * word`.
    pub fn term(word: Word, c: C) -> Series<C> {
        Series::monomial(word, vec![c])
    }

    /// Scalar series with coefficient one on `word`.
    pub fn word(word: Word) -> Series<C> {
        Series::term(word, C::one())
    }

    /// Scalar polynomial from `(word, coefficient)` pairs; repeated words add up.
    pub fn from_pairs<I: IntoIterator<Item = (Word, C)>>(pairs: I) -> Series<C> {
        let mut s = Series::zero(1);
        for (w, c) in pairs {
            s.add_term(w, vec![c]);
        }
        s
    }

    /// Stacks scalar series into one series with `components.len()` outputs.
    pub fn from_components(components: &[Series<C>]) -> Result<Series<C>> {
        let mut out = Series::zero(components.len());
        for (i, comp) in components.iter().enumerate() {
            if comp.ell != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: comp.ell });
            }
            out.truncation = out.truncation.min(comp.truncation);
            for (w, v) in &comp.terms {
                let mut coeff = vec![C::zero(); components.len()];
                coeff[i] = v[0].clone();
                out.add_term(w.clone(), coeff);
            }
        }
        Ok(out)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn with_truncation(mut self, t: Truncation) -> Series<C> {
        self.truncation = t;
        self.terms.retain(|w, _| t.allows(w.len()));
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Vec<C>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest word in the support.
    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Coefficient vector of `eta`; fails past the truncation.
    pub fn coefficient(&self, eta: &Word) -> Result<Vec<C>> {
        if !self.truncation.allows(eta.len()) {
            return Err(Error::Truncation {
                requested: eta.len(),
                available: self.truncation.limit().unwrap_or(0),
            });
        }
        Ok(self.coeff_unchecked(eta))
    }

    /// Scalar coefficient of a one-output series (or component 0).
    pub fn coeff1(&self, eta: &Word) -> Result<C> {
        Ok(self.coefficient(eta)?.swap_remove(0))
    }

    pub(crate) fn coeff_unchecked(&self, eta: &Word) -> Vec<C> {
        self.terms.get(eta).cloned().unwrap_or_else(|| vec![C::zero(); self.ell])
    }

    /// Adds `coeff * word` in place, dropping terms beyond the truncation.
    pub fn add_term(&mut self, word: Word, coeff: Vec<C>) {
        debug_assert_eq!(coeff.len(), self.ell);
        if !self.truncation.allows(word.len()) || is_zero_vec(&coeff) {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                for (a, b) in e.get_mut().iter_mut().zip(coeff) {
                    *a = a.clone() + b;
                }
                if is_zero_vec(e.get()) {
                    e.remove();
                }
            }
        }
    }

    fn check_ell(&self, other: &Series<C>) -> Result<()> {
        if self.ell != other.ell {
            return Err(Error::DimensionMismatch { expected: self.ell, found: other.ell });
        }
        Ok(())
    }

    pub fn add(&self, other: &Series<C>) -> Result<Series<C>> {
        self.check_ell(other)?;
        let mut out = self.clone().with_truncation(self.truncation.min(other.truncation));
        for (w, v) in &other.terms {
            out.add_term(w.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series<C>) -> Result<Series<C>> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series<C> {
        self.scale(&-C::one())
    }

    pub fn scale(&self, alpha: &C) -> Series<C> {
        let mut out = Series { ell: self.ell, terms: BTreeMap::new(), truncation: self.truncation };
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v.iter().map(|c| alpha.clone() * c.clone()).collect());
        }
        out
    }

    /// Catenation product `(cd, eta) = sum_{eta = xi nu} (c, xi)(d, nu)`.
    pub fn cat_product(&self, other: &Series<C>) -> Result<Series<C>> {
        let ell = product_ell(self.ell, other.ell)?;
        let t = self.truncation.min(other.truncation);
        let mut out = Series { ell, terms: BTreeMap::new(), truncation: t };
        for (a, va) in &self.terms {
            for (b, vb) in &other.terms {
                if !t.allows(a.len() + b.len()) {
                    continue;
                }
                out.add_term(a.concat(b), mul_vec(va, vb));
            }
        }
        Ok(out)
    }

    /// `x * c`: prefixes every word with `x`.
    pub fn prefix_letter(&self, x: Letter) -> Series<C> {
        Series {
            ell: self.ell,
            terms: self.terms.iter().map(|(w, v)| (w.prepend(x), v.clone())).collect(),
            truncation: self.truncation.plus(1),
        }
    }

    pub fn is_proper(&self) -> bool {
        !self.terms.contains_key(&Word::empty())
    }

    /// Length of the shortest supported word; `None` for the zero series.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().next().map(Word::len)
    }

    /// `sum_{i=0}^{degree} c^i`, truncated to word length `degree`.
    pub fn star(&self, degree: usize) -> Result<Series<C>> {
        if self.ell != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.ell });
        }
        if !self.is_proper() {
            return Err(Error::NotProper);
        }
        let t = self.truncation.min(Truncation::At(degree));
        let base = self.clone().with_truncation(t);
        let mut acc = Series::one(1).with_truncation(t);
        let mut power = acc.clone();
        for _ in 0..degree {
            power = power.cat_product(&base)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc)
    }

    /// Catenation inverse `c^{-1} = (1/(c,e)) (c')^*` with `c = (c,e)(1 - c')`.
    pub fn cat_inverse(&self, degree: usize) -> Result<Series<C>> {
        if self.ell != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.ell });
        }
        let c0 = self.coeff_unchecked(&Word::empty()).swap_remove(0);
        let inv = c0.recip().ok_or(Error::NotInvertible)?;
        let mut c_prime = self.scale(&-inv.clone());
        c_prime.terms.remove(&Word::empty());
        Ok(c_prime.star(degree)?.scale(&inv))
    }

    /// `xi^{-1}(c)`: `(xi^{-1}c, eta) = (c, xi eta)`.
    pub fn shift_series(&self, xi: &Word) -> Series<C> {
        let mut out = Series { ell: self.ell, terms: BTreeMap::new(), truncation: self.truncation.minus(xi.len()) };
        for (w, v) in &self.terms {
            if let Some(rest) = w.shift_by(xi) {
                out.terms.insert(rest, v.clone());
            }
        }
        out
    }

    /// `x^{-1}(c)` for a single letter.
    pub fn left_shift(&self, x: Letter) -> Series<C> {
        self.shift_series(&Word::letter(x))
    }

    /// Drops all words longer than `degree` and tightens the truncation.
    pub fn truncate(&self, degree: usize) -> Series<C> {
        self.clone().with_truncation(self.truncation.min(Truncation::At(degree)))
    }

    /// Component `i` as a scalar series.
    pub fn component(&self, i: usize) -> Series<C> {
        let mut out = Series { ell: 1, terms: BTreeMap::new(), truncation: self.truncation };
        for (w, v) in &self.terms {
            out.add_term(w.clone(), vec![v[i].clone()]);
        }
        out
    }

    pub fn components(&self) -> Vec<Series<C>> {
        (0..self.ell).map(|i| self.component(i)).collect()
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut out = Series { ell: self.ell, terms: BTreeMap::new(), truncation: self.truncation };
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v.iter().map(&f).collect());
        }
        out
    }

    pub fn to_f64(&self) -> Series<f64> {
        self.map(|c| c.to_float())
    }

    /// Equality of stored coefficients up to the common truncation.
    pub fn agrees_with(&self, other: &Series<C>) -> bool {
        let t = self.truncation.min(other.truncation);
        self.ell == other.ell && self.clone().with_truncation(t).terms == other.clone().with_truncation(t).terms
    }

    /// Largest absolute coefficient difference up to the common truncation.
    pub fn max_abs_diff(&self, other: &Series<C>) -> f64 {
        let t = self.truncation.min(other.truncation);
        let mut worst = 0f64;
        for w in self.terms.keys().chain(other.terms.keys()) {
            if !t.allows(w.len()) {
                continue;
            }
            let a = self.coeff_unchecked(w);
            let b = other.coeff_unchecked(w);
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x.clone() - y.clone()).to_float().abs());
            }
        }
        worst
    }

    /// All words (with their letters) in the support.
    pub fn support(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    /// Letters occurring anywhere in the support, sorted.
    pub fn letters(&self) -> Vec<Letter> {
        let mut v: Vec<Letter> = self.terms.keys().flat_map(|w| w.letters().iter().copied()).collect();
        v.sort();
        v.dedup();
        v
    }
}

impl<C: Scalar> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, v)) in self.terms.iter().enumerate() {
            let word = if w.is_empty() { String::new() } else { w.to_string() };
            if self.ell == 1 {
                let c = &v[0];
                let neg = *c < C::zero();
                let mag = c.abs_value();
                match (k, neg) {
                    (0, true) => write!(f, "-")?,
                    (0, false) => {}
                    (_, true) => write!(f, " - ")?,
                    (_, false) => write!(f, " + ")?,
                }
                if mag.is_one() && !word.is_empty() {
                    write!(f, "{word}")?;
                } else if word.is_empty() {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "{mag} {word}")?;
                }
            } else {
                if k > 0 {
                    write!(f, " + ")?;
                }
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                if word.is_empty() {
                    write!(f, "[{}]", parts.join(", "))?;
                } else {
                    write!(f, "[{}] {word}", parts.join(", "))?;
                }
            }
        }
        Ok(())
    }
}

impl<C: Scalar> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series(ell={}, trunc={}; {})", self.ell, self.truncation, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int, Rational};
    use crate::words::x;

    fn p(s: &str) -> Series<Rational> {
        crate::io::parse_series(s).unwrap()
    }

    #[test]
    fn coefficient_lookup() {
        let c = p("2 + 3 x1");
        assert_eq!(c.coeff1(&"x1".parse().unwrap()).unwrap(), rat_int(3));
        let star = Series::<Rational>::word(Word::letter(x(1))).star(6).unwrap();
        assert_eq!(star.coeff1(&"x1 x1 x1".parse().unwrap()).unwrap(), rat_int(1));
        assert_eq!(star.coeff1(&"x0".parse().unwrap()).unwrap(), rat_int(0));
        assert!(matches!(star.coefficient(&Word::power(x(1), 7)), Err(Error::Truncation { .. })));
    }

    #[test]
    fn linear_structure() {
        assert_eq!(p("x1").add(&p("x2")).unwrap(), p("x1 + x2"));
        let c = p("3 x0 x1 - 1/2 x2");
        assert!(c.add(&c.scale(&rat_int(-1))).unwrap().is_zero());
        assert_eq!(p("1 + x0").scale(&rat_int(2)), p("2 + 2 x0"));
        assert!(matches!(c.add(&Series::zero(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn catenation() {
        assert_eq!(p("x1").cat_product(&p("x2")).unwrap(), p("x1 x2"));
        assert_eq!(p("1 + x1").cat_product(&p("1 + x1")).unwrap(), p("1 + 2 x1 + x1 x1"));
        let c = p("x0 x1 - 2 x2 + 5");
        assert_eq!(Series::one(1).cat_product(&c).unwrap(), c);
    }

    #[test]
    fn proper_and_order() {
        assert!(p("x0 x1 + x2").is_proper());
        assert_eq!(p("x0 x1 + x2").order(), Some(1));
        assert!(!p("3 + x1").is_proper());
        assert_eq!(p("3 + x1").order(), Some(0));
        assert!(Series::<Rational>::zero(1).is_proper());
        assert_eq!(Series::<Rational>::zero(1).order(), None);
    }

    #[test]
    fn stars() {
        assert_eq!(p("x1").star(3).unwrap().terms, p("1 + x1 + x1 x1 + x1 x1 x1").terms);
        assert_eq!(Series::<Rational>::zero(1).star(5).unwrap().terms, p("1").terms);
        let s = p("x0 + x1").star(2).unwrap();
        assert_eq!(s.terms, p("1 + x0 + x1 + x0 x0 + x0 x1 + x1 x0 + x1 x1").terms);
        assert_eq!(s.truncation(), Truncation::At(2));
        assert!(matches!(p("1 + x1").star(2), Err(Error::NotProper)));
    }

    #[test]
    fn inverses() {
        assert_eq!(p("2").cat_inverse(4).unwrap().terms, p("1/2").terms);
        let inv = p("1 - x1").cat_inverse(3).unwrap();
        assert_eq!(inv.terms, p("1 + x1 + x1 x1 + x1 x1 x1").terms);
        assert!(p("1 - x1").cat_product(&inv).unwrap().agrees_with(&Series::one(1)));
        assert!(matches!(p("x1").cat_inverse(3), Err(Error::NotInvertible)));
        let c = p("3 - x0 + 1/2 x1 x2");
        let ci = c.cat_inverse(5).unwrap();
        assert!(c.cat_product(&ci).unwrap().agrees_with(&Series::one(1)));
        assert!(ci.cat_product(&c).unwrap().agrees_with(&Series::one(1)));
        assert_eq!(ci.coeff1(&Word::empty()).unwrap(), rat(1, 3));
    }

    #[test]
    fn shifts() {
        assert_eq!(p("x1 x2 + x2 x1").left_shift(x(1)), p("x2"));
        let star = p("x1").star(6).unwrap();
        let shifted = star.left_shift(x(1));
        for k in 0..=5 {
            assert_eq!(shifted.coeff1(&Word::power(x(1), k)).unwrap(), rat_int(1));
        }
        assert_eq!(shifted.truncation(), Truncation::At(5));
        assert_eq!(p("x0 x1 x2").shift_series(&"x0 x1".parse().unwrap()), p("x2"));
    }

    #[test]
    fn vector_components_round_trip() {
        let a = p("x1 + 2 x0");
        let b = p("-x2");
        let v = Series::from_components(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(v.ell(), 2);
        assert_eq!(v.component(0), a);
        assert_eq!(v.component(1), b);
    }
}
