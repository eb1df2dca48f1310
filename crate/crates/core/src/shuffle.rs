//! The shuffle product.
//!
//! `(x_i eta) ⧢ (x_j xi) = x_i (eta ⧢ x_j xi) + x_j (x_i eta ⧢ xi)`, with the
//! empty word as unit. Word products are memoized as integer multiplicities on
//! the unordered pair of arguments.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::series::{mul_vec, product_ell, Series, Truncation};
use crate::words::Word;

pub type WordCounts = Arc<Vec<(Word, u64)>>;

const MEMO_MAX_LEN: usize = 24;

static MEMO: Lazy<RwLock<HashMap<(Word, Word), WordCounts>>> = Lazy::new(Default::default);

fn ordered(a: &Word, b: &Word) -> (Word, Word) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Multiplicities of every word in `a ⧢ b`, in canonical word order.
pub fn shuffle_counts(a: &Word, b: &Word) -> WordCounts {
    if a.is_empty() || b.is_empty() {
        let w = if a.is_empty() { b.clone() } else { a.clone() };
        return Arc::new(vec![(w, 1)]);
    }
    let key = ordered(a, b);
    if let Some(hit) = MEMO.read().get(&key) {
        return hit.clone();
    }
    let mut acc: BTreeMap<Word, u64> = BTreeMap::new();
    let (xa, ra) = (a.letters()[0], a.tail());
    let (xb, rb) = (b.letters()[0], b.tail());
    for (w, n) in shuffle_counts(&ra, b).iter() {
        *acc.entry(w.prepend(xa)).or_default() += n;
    }
    for (w, n) in shuffle_counts(a, &rb).iter() {
        *acc.entry(w.prepend(xb)).or_default() += n;
    }
    let out: WordCounts = Arc::new(acc.into_iter().collect());
    if a.len() + b.len() <= MEMO_MAX_LEN {
        MEMO.write().insert(key, out.clone());
    }
    out
}

pub fn shuffle_words<C: Scalar>(a: &Word, b: &Word) -> Series<C> {
    let mut s = Series::zero(1);
    for (w, n) in shuffle_counts(a, b).iter() {
        s.add_term(w.clone(), vec![C::from_i64(*n as i64)]);
    }
    s
}

/// Bilinear extension of the word product, truncated to word length `degree`.
pub fn shuffle_series<C: Scalar>(c: &Series<C>, d: &Series<C>, degree: usize) -> Result<Series<C>> {
    let ell = product_ell(c.ell(), d.ell())?;
    let t = c.truncation().min(d.truncation()).min(Truncation::At(degree));
    let mut out = Series::zero(ell).with_truncation(t);
    for (a, va) in c.terms() {
        if !t.allows(a.len()) {
            continue;
        }
        for (b, vb) in d.terms() {
            if !t.allows(a.len() + b.len()) {
                continue;
            }
            let coeff = mul_vec(va, vb);
            for (w, n) in shuffle_counts(a, b).iter() {
                let k = C::from_i64(*n as i64);
                out.add_term(w.clone(), coeff.iter().map(|v| v.clone() * k.clone()).collect());
            }
        }
    }
    Ok(out)
}

/// `c ⧢ c ⧢ ... ⧢ c` (`k` factors), with the unit for `k = 0`.
pub fn shuffle_power<C: Scalar>(c: &Series<C>, k: usize, degree: usize) -> Result<Series<C>> {
    let mut acc = Series::one(c.ell()).truncate(degree);
    for _ in 0..k {
        acc = shuffle_series(&acc, c, degree)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_series;
    use crate::scalar::{binomial, rat_int, Rational};
    use crate::words::{x, Alphabet};
    use num_traits::ToPrimitive;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Series<Rational> {
        parse_series(s).unwrap()
    }

    #[test]
    fn two_letters() {
        assert_eq!(shuffle_words::<Rational>(&w("x1"), &w("x2")), p("x1 x2 + x2 x1"));
    }

    #[test]
    fn four_letter_expansion() {
        let got = shuffle_words::<Rational>(&w("x1 x2"), &w("x3 x4"));
        let expected = p("x1 x2 x3 x4 + x1 x3 x2 x4 + x1 x3 x4 x2 + x3 x1 x2 x4 + x3 x1 x4 x2 + x3 x4 x1 x2");
        assert_eq!(got, expected);
    }

    #[test]
    fn powers_of_one_letter() {
        assert_eq!(shuffle_words::<Rational>(&w("x1 x1"), &w("x1 x1")), p("6 x1 x1 x1 x1"));
        for i in 0..=10 {
            for j in 0..=(10 - i) {
                let got = shuffle_words::<Rational>(&Word::power(x(1), i), &Word::power(x(1), j));
                let n = binomial((i + j) as u64, i as u64).to_i64().unwrap();
                assert_eq!(got, Series::term(Word::power(x(1), i + j), rat_int(n)));
            }
        }
    }

    #[test]
    fn commutative_associative_and_mass() {
        let words = Alphabet::new(2).words_up_to(3);
        for a in &words {
            for b in &words {
                if a.len() + b.len() > 6 {
                    continue;
                }
                let ab = shuffle_words::<Rational>(a, b);
                assert_eq!(ab, shuffle_words(b, a));
                let mass: u64 = shuffle_counts(a, b).iter().map(|(_, n)| n).sum();
                assert_eq!(mass, binomial((a.len() + b.len()) as u64, a.len() as u64).to_u64().unwrap());
            }
        }
        let short = Alphabet::new(2).words_up_to(2);
        for a in &short {
            for b in &short {
                for c in &short {
                    if a.len() + b.len() + c.len() > 6 {
                        continue;
                    }
                    let left = shuffle_series(&shuffle_words::<Rational>(a, b), &Series::word(c.clone()), 10).unwrap();
                    let right = shuffle_series(&Series::word(a.clone()), &shuffle_words(b, c), 10).unwrap();
                    assert!(left.agrees_with(&right));
                }
            }
        }
    }

    #[test]
    fn series_level() {
        let c = p("2 x0 - x1 x2 + 1/3");
        assert!(shuffle_series(&Series::one(1), &c, 8).unwrap().agrees_with(&c));
        let star = p("x1").star(6).unwrap();
        let sq = shuffle_series(&star, &star, 6).unwrap();
        for eta in crate::words::words_up_to(&[x(1)], 6) {
            assert_eq!(sq.coeff1(&eta).unwrap(), rat_int(1 << eta.len()));
        }
        assert_eq!(shuffle_series(&p("x1 + x2"), &p("x0"), 5).unwrap().terms().count(), 4);
        assert!(shuffle_series(&p("x1 + x2"), &p("x0"), 5)
            .unwrap()
            .agrees_with(&p("x1 x0 + x0 x1 + x2 x0 + x0 x2")));
    }

    #[test]
    fn shuffle_powers() {
        assert!(shuffle_power(&p("x1"), 2, 6).unwrap().agrees_with(&p("2 x1 x1")));
        assert!(shuffle_power(&p("x1 + x0"), 0, 6).unwrap().agrees_with(&p("1")));
        assert!(shuffle_power(&p("x1"), 3, 6).unwrap().agrees_with(&p("6 x1 x1 x1")));
    }
}
