//! Seeded random instances for property checks and verification suites.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{CTSignal, DTSignal};
use crate::matrix::Matrix;
use crate::rational::LinearRepresentation;
use crate::scalar::{rat, Rational};
use crate::series::Series;
use crate::words::{words_up_to, Letter, Word};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n / d` with `|n| <= max_num`, `1 <= d <= max_den`.
pub fn small_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    rat(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

/// Polynomial with `terms` random words of length `<= degree` over
/// `letters`, each coefficient a small nonzero rational.
pub fn random_polynomial(rng: &mut impl Rng, letters: &[Letter], ell: usize, degree: usize, terms: usize) -> Series<Rational> {
    let pool = words_up_to(letters, degree);
    let mut s = Series::zero(ell);
    for _ in 0..terms {
        let w = pool.choose(rng).expect("nonempty alphabet").clone();
        let coeff = (0..ell).map(|_| nonzero(rng)).collect();
        s.add_term(w, coeff);
    }
    s
}

/// Polynomial whose every word has length exactly `1..=degree` (no
/// constant term).
pub fn random_proper_polynomial(rng: &mut impl Rng, letters: &[Letter], ell: usize, degree: usize, terms: usize) -> Series<Rational> {
    let mut s = random_polynomial(rng, letters, ell, degree, terms);
    let constant = s.coefficient(&Word::empty()).expect("exact");
    s.add_term(Word::empty(), constant.into_iter().map(|c| -c).collect());
    s
}

fn nonzero(rng: &mut impl Rng) -> Rational {
    loop {
        let r = small_rational(rng, 3, 3);
        if r != rat(0, 1) {
            return r;
        }
    }
}

/// Representation over `letters` with entries `n/d`, `|n| <= max_num`,
/// `d <= max_den`, and `ℓ = 1`.
pub fn random_rep(rng: &mut impl Rng, letters: &[Letter], dim: usize, max_num: i64, max_den: i64) -> LinearRepresentation<Rational> {
    let entry = |rng: &mut _| small_rational(rng, max_num, max_den);
    let mut mu = BTreeMap::new();
    for &l in letters {
        let rows = (0..dim).map(|_| (0..dim).map(|_| entry(rng)).collect()).collect();
        mu.insert(l, Matrix::from_rows(rows).expect("square"));
    }
    let gamma = Matrix::column((0..dim).map(|_| entry(rng)).collect());
    let lambda = Matrix::row((0..dim).map(|_| entry(rng)).collect());
    LinearRepresentation::new(mu, gamma, lambda).expect("consistent shapes")
}

/// `û(1..=horizon)` with integer components in `[-bound, bound]`.
pub fn random_integer_signal(rng: &mut impl Rng, m: usize, horizon: usize, bound: i64) -> DTSignal<Rational> {
    let samples = (0..horizon).map(|_| (0..=m).map(|_| rat(rng.gen_range(-bound..=bound), 1)).collect()).collect();
    DTSignal::new(samples).expect("nonempty")
}

/// `û(1..=horizon)` with components `n / den`, `|n| <= num_bound`.
pub fn random_rational_signal(rng: &mut impl Rng, m: usize, horizon: usize, num_bound: i64, den: i64) -> DTSignal<Rational> {
    let samples = (0..horizon).map(|_| (0..=m).map(|_| rat(rng.gen_range(-num_bound..=num_bound), den)).collect()).collect();
    DTSignal::new(samples).expect("nonempty")
}

/// Smooth input: random combination of low-frequency sines and cosines.
pub fn random_smooth_signal(rng: &mut impl Rng, m: usize, h: f64, steps: usize) -> CTSignal {
    let params: Vec<(f64, f64, f64)> =
        (0..m).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..3.0))).collect();
    CTSignal::from_fn(0.0, h, steps, |t| params.iter().map(|(a, b, w)| a * (w * t).sin() + b * (w * t).cos()).collect())
        .expect("at least two grid points")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::x;

    #[test]
    fn seeded_instances_repeat() {
        let letters = [x(0), x(1)];
        let a = random_polynomial(&mut rng(7), &letters, 1, 3, 4);
        let b = random_polynomial(&mut rng(7), &letters, 1, 3, 4);
        assert_eq!(a, b);
        let p = random_proper_polynomial(&mut rng(3), &letters, 2, 3, 5);
        assert!(p.is_proper());
        let r = random_rep(&mut rng(1), &letters, 2, 2, 2);
        assert_eq!(r.dim(), 2);
    }
}
