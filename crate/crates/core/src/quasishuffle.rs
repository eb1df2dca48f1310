//! Weighted quasi-shuffle product on bracket-extended words.
//!
//! `eta ⊛ xi = a(a^{-1}eta ⊛ xi) + b(eta ⊛ b^{-1}xi) + θ [ab](a^{-1}eta ⊛ b^{-1}xi)`
//! where `a`, `b` are the leading letters. With `θ = 1` this is Hoffman's
//! quasi-shuffle; `θ = -1` is the product of inclusive iterated sums
//! `S_η(N) = Σ_{k ≤ N} û(k) S_η'(k)`. The weight is always passed explicitly.
//!
//! Each bracket merge shortens the output by one letter, so the coefficient of
//! `ν` in `η ⊛ ξ` is `count * θ^{|η| + |ξ| - |ν|}` and only the θ-free counts
//! are memoized.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::error::Result;
use crate::scalar::{binomial, Scalar};
use crate::series::{mul_vec, product_ell, Series, Truncation};
use crate::shuffle::{shuffle_words, WordCounts};
use crate::words::{x, Word};

const MEMO_MAX_LEN: usize = 20;

static MEMO: Lazy<RwLock<HashMap<(Word, Word), WordCounts>>> = Lazy::new(Default::default);

/// Multiplicities of the words in `a ⊛ b`, ignoring the weight.
pub fn qsh_counts(a: &Word, b: &Word) -> WordCounts {
    if a.is_empty() || b.is_empty() {
        let w = if a.is_empty() { b.clone() } else { a.clone() };
        return Arc::new(vec![(w, 1)]);
    }
    let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    if let Some(hit) = MEMO.read().get(&key) {
        return hit.clone();
    }
    let mut acc: BTreeMap<Word, u64> = BTreeMap::new();
    let (xa, ra) = (a.letters()[0], a.tail());
    let (xb, rb) = (b.letters()[0], b.tail());
    for (w, n) in qsh_counts(&ra, b).iter() {
        *acc.entry(w.prepend(xa)).or_default() += n;
    }
    for (w, n) in qsh_counts(a, &rb).iter() {
        *acc.entry(w.prepend(xb)).or_default() += n;
    }
    let merged = xa.bracket(xb);
    for (w, n) in qsh_counts(&ra, &rb).iter() {
        *acc.entry(w.prepend(merged)).or_default() += n;
    }
    let out: WordCounts = Arc::new(acc.into_iter().collect());
    if a.len() + b.len() <= MEMO_MAX_LEN {
        MEMO.write().insert(key, out.clone());
    }
    out
}

fn weighted<C: Scalar>(total_len: usize, w: &Word, n: u64, theta: &C) -> C {
    C::from_i64(n as i64) * theta.powu((total_len - w.len()) as u32)
}

pub fn qsh_words<C: Scalar>(a: &Word, b: &Word, theta: &C) -> Series<C> {
    let total = a.len() + b.len();
    let mut s = Series::zero(1);
    for (w, n) in qsh_counts(a, b).iter() {
        s.add_term(w.clone(), vec![weighted(total, w, *n, theta)]);
    }
    s
}

/// Bilinear extension, truncated to word length `degree`. A pair `(η, ξ)`
/// produces words of lengths `max(|η|,|ξ|)` through `|η| + |ξ|`.
pub fn qsh_series<C: Scalar>(c: &Series<C>, d: &Series<C>, theta: &C, degree: usize) -> Result<Series<C>> {
    let ell = product_ell(c.ell(), d.ell())?;
    let t = c.truncation().min(d.truncation()).min(Truncation::At(degree));
    let mut out = Series::zero(ell).with_truncation(t);
    for (a, va) in c.terms() {
        if !t.allows(a.len()) {
            continue;
        }
        for (b, vb) in d.terms() {
            if !t.allows(b.len()) {
                continue;
            }
            let coeff = mul_vec(va, vb);
            let total = a.len() + b.len();
            for (w, n) in qsh_counts(a, b).iter() {
                if !t.allows(w.len()) {
                    continue;
                }
                let k = weighted(total, w, *n, theta);
                out.add_term(w.clone(), coeff.iter().map(|v| v.clone() * k.clone()).collect());
            }
        }
    }
    Ok(out)
}

/// All `|η| + 1` splittings `η = η' η''`.
pub fn deconcat_coproduct(eta: &Word) -> Vec<(Word, Word)> {
    (0..=eta.len()).map(|k| (eta.prefix(k), eta.suffix_from(k))).collect()
}

/// Antipode of the quasi-shuffle Hopf algebra:
/// `S(w) = -w - Σ_{l=1}^{n-1} S(w_1..w_l) ⊛ w_{l+1}..w_n`, `S(e) = e`.
pub fn qsh_antipode<C: Scalar>(eta: &Word, theta: &C, degree: usize) -> Result<Series<C>> {
    if eta.is_empty() {
        return Ok(Series::one(1).truncate(degree));
    }
    let mut out = Series::word(eta.clone()).neg();
    for l in 1..eta.len() {
        let left = qsh_antipode(&eta.prefix(l), theta, degree)?;
        let right = Series::word(eta.suffix_from(l));
        out = out.sub(&qsh_series(&left, &right, theta, degree)?)?;
    }
    Ok(out.truncate(degree))
}

/// `m_⊛ (S ⊗ id) Δ (η)`, which must equal `ε(η) 1`.
pub fn antipode_convolution<C: Scalar>(eta: &Word, theta: &C) -> Result<Series<C>> {
    let degree = eta.len();
    let mut acc = Series::zero(1);
    for (a, b) in deconcat_coproduct(eta) {
        let s = qsh_antipode(&a, theta, degree)?;
        acc = acc.add(&qsh_series(&s, &Series::word(b), theta, degree)?)?;
    }
    Ok(acc)
}

/// Closed form of `x1^i ⊛ x1^j`:
/// `Σ_k θ^k binom(i+j-2k, min(i,j)-k) x_{1,1}^k ⧢ x1^{i+j-2k}`.
pub fn qsh_power_closed_form<C: Scalar>(i: usize, j: usize, theta: &C) -> Series<C> {
    let lo = i.min(j);
    let x11 = x(1).bracket(x(1));
    let mut out = Series::zero(1);
    for k in 0..=lo {
        let n = binomial((i + j - 2 * k) as u64, (lo - k) as u64);
        let coeff = C::from_rational(&crate::scalar::Rational::from_integer(n)) * theta.powu(k as u32);
        let sh: Series<C> = shuffle_words(&Word::power(x11, k), &Word::power(x(1), i + j - 2 * k));
        out = out.add(&sh.scale(&coeff)).expect("scalar series");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_series;
    use crate::scalar::{rat_int, Rational};
    use crate::shuffle::shuffle_words;
    use crate::words::{words_up_to, Alphabet, Letter};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Series<Rational> {
        parse_series(s).unwrap()
    }

    fn one() -> Rational {
        rat_int(1)
    }

    #[test]
    fn hoffman_examples() {
        assert_eq!(qsh_words(&w("x1"), &w("x2"), &one()), p("x1 x2 + x2 x1 + x[1,2]"));
        assert_eq!(
            qsh_words(&w("x1"), &w("x2 x3"), &one()),
            p("x1 x2 x3 + x2 x1 x3 + x2 x3 x1 + x[1,2] x3 + x2 x[1,3]")
        );
    }

    #[test]
    fn iterated_sum_sign() {
        assert_eq!(qsh_words(&w("x1"), &w("x1"), &rat_int(-1)), p("2 x1 x1 - x[1,1]"));
    }

    #[test]
    fn ferfera_example() {
        let star = p("x1").star(4).unwrap();
        let sq = qsh_series(&star, &star, &one(), 2).unwrap();
        let expected = p("1 + 2 x1 + x[1,1] + 4 x1 x1 + 2 x1 x[1,1] + 2 x[1,1] x1 + x[1,1] x[1,1]");
        assert!(sq.agrees_with(&expected));
        let sq4 = qsh_series(&star, &star, &one(), 4).unwrap();
        let x11 = Letter::from_indices([1, 1]);
        for eta in words_up_to(&[x(1), x11], 4) {
            assert_eq!(sq4.coeff1(&eta).unwrap(), rat_int(1 << eta.letter_count(x(1))));
        }
    }

    #[test]
    fn unit_and_theta_zero() {
        let c = p("x[1,2] x0 - 3 x1 + 2");
        assert!(qsh_series(&Series::one(1), &c, &one(), 6).unwrap().agrees_with(&c));
        let words = Alphabet::new(2).words_up_to(3);
        for a in &words {
            for b in &words {
                if a.len() + b.len() <= 5 {
                    assert_eq!(qsh_words(a, b, &rat_int(0)), shuffle_words(a, b));
                }
            }
        }
    }

    #[test]
    fn commutative_and_associative() {
        let words = Alphabet::new(2).words_up_to(3);
        for theta in [rat_int(1), rat_int(-1)] {
            for a in &words {
                for b in &words {
                    if a.len() + b.len() > 5 {
                        continue;
                    }
                    assert_eq!(qsh_words(a, b, &theta), qsh_words(b, a, &theta));
                }
            }
            let short = Alphabet::new(2).words_up_to(2);
            for a in &short {
                for b in &short {
                    for c in &short {
                        if a.len() + b.len() + c.len() > 5 {
                            continue;
                        }
                        let l = qsh_series(&qsh_words(a, b, &theta), &Series::word(c.clone()), &theta, 9).unwrap();
                        let r = qsh_series(&Series::word(a.clone()), &qsh_words(b, c, &theta), &theta, 9).unwrap();
                        assert!(l.agrees_with(&r), "{a} {b} {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn deconcatenation() {
        assert_eq!(
            deconcat_coproduct(&w("x1 x2")),
            vec![(Word::empty(), w("x1 x2")), (w("x1"), w("x2")), (w("x1 x2"), Word::empty())]
        );
        assert_eq!(deconcat_coproduct(&Word::empty()), vec![(Word::empty(), Word::empty())]);
        assert_eq!(deconcat_coproduct(&w("x1 x2 x3")).len(), 4);
    }

    #[test]
    fn antipodes() {
        assert_eq!(qsh_antipode(&w("x1"), &one(), 4).unwrap(), p("-x1").truncate(4));
        assert!(qsh_antipode(&w("x1 x2"), &one(), 4).unwrap().agrees_with(&p("x2 x1 + x[1,2]")));
        for theta in [rat_int(1), rat_int(-1)] {
            for eta in Alphabet::new(2).words_up_to(4).iter().skip(1) {
                assert!(antipode_convolution(eta, &theta).unwrap().is_zero(), "{eta}");
            }
        }
    }

    #[test]
    fn closed_form_matches_recursion() {
        assert_eq!(qsh_power_closed_form(1, 1, &one()), p("2 x1 x1 + x[1,1]"));
        assert_eq!(qsh_power_closed_form(3, 0, &rat_int(-1)), Series::word(Word::power(x(1), 3)));
        for theta in [rat_int(1), rat_int(-1)] {
            for i in 0..=10 {
                for j in 0..=(10 - i) {
                    let rec = qsh_words(&Word::power(x(1), i), &Word::power(x(1), j), &theta);
                    assert_eq!(qsh_power_closed_form(i, j, &theta), rec, "i={i} j={j}");
                }
            }
        }
    }
}
