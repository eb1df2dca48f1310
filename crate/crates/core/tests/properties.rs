use fliess_core::composition::{comp_inverse, feedback, group_product, mod_compose, GroupElement};
use fliess_core::eval::{dt_fliess_eval, iterated_sum, sum_bound, DTSignal};
use fliess_core::feedback_hopf::{hopf, AntipodeAlgorithm};
use fliess_core::io::{parse_series, rep_from_json, rep_to_json, series_from_json, series_to_json};
use fliess_core::quasishuffle::qsh_series;
use fliess_core::rational::{rep_qshuffle, rep_shuffle, DEFAULT_DIMENSION_CAP};
use fliess_core::shuffle::shuffle_series;
use fliess_core::testing::{random_polynomial, random_rep, rng};
use fliess_core::{rat, rat_int, x, Letter, Rational, Series, Word};
use proptest::prelude::*;

fn letters(m: u32, bracket: bool) -> Vec<Letter> {
    let mut v: Vec<Letter> = (0..=m).map(x).collect();
    if bracket {
        v.push(x(1).bracket(x(m)));
    }
    v
}

fn poly(seed: u64, letters: &[Letter], ell: usize) -> Series<Rational> {
    random_polynomial(&mut rng(seed), letters, ell, 3, 4)
}

fn small(seed: u64, letters: &[Letter]) -> Series<Rational> {
    random_polynomial(&mut rng(seed), letters, 1, 2, 4)
}

fn theta(plus: bool) -> Rational {
    if plus { rat_int(1) } else { rat_int(-1) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shuffle_commutes_and_associates(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let l = letters(2, false);
        let (p, q, r) = (small(a, &l), small(b, &l), small(c, &l));
        prop_assert!(shuffle_series(&p, &q, 6).unwrap().agrees_with(&shuffle_series(&q, &p, 6).unwrap()));
        let left = shuffle_series(&shuffle_series(&p, &q, 6).unwrap(), &r, 6).unwrap();
        let right = shuffle_series(&p, &shuffle_series(&q, &r, 6).unwrap(), 6).unwrap();
        prop_assert!(left.agrees_with(&right));
    }

    #[test]
    fn quasi_shuffle_commutes_and_associates(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), plus in any::<bool>()) {
        let l = letters(2, true);
        let t = theta(plus);
        let (p, q, r) = (small(a, &l), small(b, &l), small(c, &l));
        prop_assert!(qsh_series(&p, &q, &t, 6).unwrap().agrees_with(&qsh_series(&q, &p, &t, 6).unwrap()));
        let left = qsh_series(&qsh_series(&p, &q, &t, 6).unwrap(), &r, &t, 6).unwrap();
        let right = qsh_series(&p, &qsh_series(&q, &r, &t, 6).unwrap(), &t, 6).unwrap();
        prop_assert!(left.agrees_with(&right));
    }

    #[test]
    fn quasi_shuffle_without_brackets_and_zero_theta_is_shuffle(a in any::<u64>(), b in any::<u64>()) {
        let l = letters(2, false);
        let (p, q) = (poly(a, &l, 1), poly(b, &l, 1));
        prop_assert!(qsh_series(&p, &q, &rat_int(0), 6).unwrap().agrees_with(&shuffle_series(&p, &q, 6).unwrap()));
    }

    #[test]
    fn group_inverse_is_two_sided(a in any::<u64>(), m in 1u32..=2) {
        let c = poly(a, &letters(m, false), m as usize);
        let g = GroupElement::new(c.clone());
        let inv = g.inverse(5).unwrap();
        prop_assert!(group_product(&g, &inv, 5).unwrap().body.is_zero());
        prop_assert!(group_product(&inv, &g, 5).unwrap().body.is_zero());
        prop_assert!(inv.body.agrees_with(&comp_inverse(&c, 5).unwrap()));
    }

    #[test]
    fn feedback_with_zero_loop_is_identity(a in any::<u64>()) {
        let c = poly(a, &letters(1, false), 1);
        prop_assert!(feedback(&c, &Series::zero(1), 5).unwrap().agrees_with(&c.truncate(5)));
        prop_assert!(mod_compose(&c, &Series::zero(1), 5).unwrap().agrees_with(&c.truncate(5)));
    }

    #[test]
    fn representation_products_match_series(a in any::<u64>(), b in any::<u64>(), plus in any::<bool>()) {
        let l = letters(1, false);
        let ra = random_rep(&mut rng(a), &l, 2, 2, 2);
        let rb = random_rep(&mut rng(b), &l, 2, 2, 2);
        let (c, d) = (ra.to_series(4).unwrap(), rb.to_series(4).unwrap());
        let sh = rep_shuffle(&ra, &rb, DEFAULT_DIMENSION_CAP).unwrap();
        prop_assert!(sh.to_series(4).unwrap().agrees_with(&shuffle_series(&c, &d, 4).unwrap()));
        let t = theta(plus);
        let qs = rep_qshuffle(&ra, &rb, &t, DEFAULT_DIMENSION_CAP).unwrap();
        prop_assert!(qs.to_series(4).unwrap().agrees_with(&qsh_series(&c, &d, &t, 4).unwrap()));
    }

    #[test]
    fn representation_json_round_trips(a in any::<u64>()) {
        let r = random_rep(&mut rng(a), &letters(2, false), 3, 5, 7);
        let back = rep_from_json::<Rational>(&rep_to_json(&r).to_string()).unwrap();
        prop_assert_eq!(back.to_series(3).unwrap(), r.to_series(3).unwrap());
    }

    #[test]
    fn series_text_and_json_round_trip(a in any::<u64>()) {
        let c = poly(a, &letters(2, true), 2);
        prop_assert_eq!(parse_series::<Rational>(&c.to_string()).unwrap().truncate(3), c.truncate(3));
        prop_assert_eq!(series_from_json::<Rational>(&series_to_json(&c).to_string()).unwrap(), c);
    }

    #[test]
    fn discrete_product_law(a in any::<u64>(), b in any::<u64>(), n in 1usize..8, samples in prop::collection::vec((-4i64..=4, -4i64..=4, -4i64..=4), 8)) {
        let l = letters(2, true);
        let (c, d) = (poly(a, &l, 1), poly(b, &l, 1));
        let u = DTSignal::new(samples.iter().map(|&(p, q, r)| vec![rat_int(p), rat_int(q), rat_int(r)]).collect()).unwrap();
        let prod = qsh_series(&c, &d, &rat_int(-1), 6).unwrap();
        let lhs = dt_fliess_eval(&c, &u, n, 3).unwrap()[0].clone() * dt_fliess_eval(&d, &u, n, 3).unwrap()[0].clone();
        prop_assert_eq!(lhs, dt_fliess_eval(&prod, &u, n, 6).unwrap()[0].clone());
    }

    #[test]
    fn iterated_sums_respect_the_bound(word in prop::collection::vec(0u32..=2, 0..5), n in 1usize..10, num in 1i64..5, den in 1i64..5, seed in any::<u64>()) {
        let rhat = rat(num, den);
        let eta = Word::from_indices(&word);
        let mut r = rng(seed);
        let samples = (0..n).map(|_| (0..3).map(|_| rhat.clone() * fliess_core::testing::small_rational(&mut r, 6, 6).clamp(rat_int(-1), rat_int(1))).collect()).collect();
        let u = DTSignal::new(samples).unwrap();
        let (sharp, coarse) = sum_bound(&eta, &rhat, n).unwrap();
        let v = iterated_sum(&eta, &u, n).unwrap();
        prop_assert!(v.clone() <= sharp && -v <= sharp.clone() && sharp <= coarse);
    }
}

#[test]
fn antipode_algorithms_agree_on_three_inputs() {
    let h = hopf(3);
    for a in h.generators(3) {
        let reference = h.antipode(AntipodeAlgorithm::CancellationFree, &a).unwrap();
        for algo in [AntipodeAlgorithm::Left, AntipodeAlgorithm::Right] {
            assert_eq!(h.antipode(algo, &a).unwrap(), reference, "{a}");
        }
    }
}
