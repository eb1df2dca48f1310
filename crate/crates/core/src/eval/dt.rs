//! Discrete-time operators: iterated sums `S_η[û](N)`, their Fliess series
//! `F̂_c[û](N) = Σ (c,η) S_η[û](N)` and state-affine recursions.
//!
//! Sums start at `k = 1`; `S_η(0) = 0` for nonempty `η`. A bracket letter
//! `x_{i1,...,in}` weighs step `k` by `û_{i1}(k)⋯û_{in}(k)`.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{binomial, factorial, Rational, Scalar};
use crate::series::Series;
use crate::words::{Letter, Word};

/// `û(1), …, û(N_f)`, each with components `û_0, …, û_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct DTSignal<C> {
    samples: Vec<Vec<C>>,
}

impl<C: Scalar> DTSignal<C> {
    pub fn new(samples: Vec<Vec<C>>) -> Result<Self> {
        let width = samples.first().map(Vec::len).ok_or_else(|| Error::Domain("empty input sequence".into()))?;
        if width == 0 {
            return Err(Error::Domain("input needs at least the u0 component".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != width) {
            return Err(Error::DimensionMismatch { expected: width, found: bad.len() });
        }
        Ok(DTSignal { samples })
    }

    /// Every component equal to `value` for `horizon` steps.
    pub fn constant(m: usize, value: C, horizon: usize) -> Result<Self> {
        DTSignal::new(vec![vec![value; m + 1]; horizon])
    }

    pub fn horizon(&self) -> usize {
        self.samples.len()
    }

    /// Number of input channels `m` (components are `û_0 … û_m`).
    pub fn m(&self) -> usize {
        self.samples[0].len() - 1
    }

    /// `û(k)` for `1 <= k <= horizon`.
    pub fn at(&self, k: usize) -> &[C] {
        &self.samples[k - 1]
    }

    pub fn samples(&self) -> &[Vec<C>] {
        &self.samples
    }

    /// `max_{k,i} |û_i(k)|`.
    pub fn sup_norm(&self) -> C {
        let mut best = C::zero();
        for v in self.samples.iter().flatten() {
            let a = v.abs_value();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Weight of letter `x` at step `k`.
    pub fn weight(&self, x: Letter, k: usize) -> Result<C> {
        let u = self.at(k);
        let mut w = C::one();
        for i in x.indices() {
            w = w * u.get(i as usize).ok_or_else(|| Error::ForeignLetter(x.to_string()))?.clone();
        }
        Ok(w)
    }

    fn check_horizon(&self, n: usize) -> Result<()> {
        if n > self.horizon() {
            return Err(Error::Horizon { requested: n, horizon: self.horizon() });
        }
        Ok(())
    }
}

/// Memo of `S_η(k)`, `k = 0..=N`, keyed by word.
struct SumTable<'a, C> {
    u: &'a DTSignal<C>,
    n: usize,
    memo: HashMap<Word, Vec<C>>,
}

impl<'a, C: Scalar> SumTable<'a, C> {
    fn new(u: &'a DTSignal<C>, n: usize) -> Result<Self> {
        u.check_horizon(n)?;
        Ok(SumTable { u, n, memo: HashMap::new() })
    }

    fn get(&mut self, eta: &Word) -> Result<&Vec<C>> {
        if !self.memo.contains_key(eta) {
            let v = match eta.first() {
                None => vec![C::one(); self.n + 1],
                Some(x) => {
                    let inner = self.get(&eta.tail())?.clone();
                    let mut v = Vec::with_capacity(self.n + 1);
                    let mut acc = C::zero();
                    v.push(acc.clone());
                    for k in 1..=self.n {
                        acc = acc + self.u.weight(x, k)? * inner[k].clone();
                        v.push(acc.clone());
                    }
                    v
                }
            };
            self.memo.insert(eta.clone(), v);
        }
        Ok(&self.memo[eta])
    }
}

/// `S_η[û](N)` with `S_{xη}(N) = Σ_{k=1}^N w_x(û(k)) S_η(k)`.
pub fn iterated_sum<C: Scalar>(eta: &Word, u: &DTSignal<C>, n: usize) -> Result<C> {
    Ok(SumTable::new(u, n)?.get(eta)?[n].clone())
}

/// `S_η[û](k)` for `k = 0..=N`.
pub fn iterated_sum_trajectory<C: Scalar>(eta: &Word, u: &DTSignal<C>, n: usize) -> Result<Vec<C>> {
    Ok(SumTable::new(u, n)?.get(eta)?.clone())
}

fn check_truncation<C: Scalar>(c: &Series<C>, max_len: usize) -> Result<()> {
    if !c.truncation().allows(max_len) {
        return Err(Error::Truncation { requested: max_len, available: c.truncation().limit().unwrap_or(0) });
    }
    Ok(())
}

/// `Σ_{|η| <= max_len} (c,η) S_η[û](N)`.
pub fn dt_fliess_eval<C: Scalar>(c: &Series<C>, u: &DTSignal<C>, n: usize, max_len: usize) -> Result<Vec<C>> {
    check_truncation(c, max_len)?;
    let mut table = SumTable::new(u, n)?;
    let mut y = vec![C::zero(); c.ell()];
    for (w, v) in c.terms() {
        if w.len() > max_len {
            continue;
        }
        let s = table.get(w)?[n].clone();
        for (yk, ck) in y.iter_mut().zip(v) {
            *yk = yk.clone() + ck.clone() * s.clone();
        }
    }
    Ok(y)
}

/// The two bounds on `|S_η[û](N)|` for `‖û‖_∞ <= R̂`: the sharp
/// `R̂^{|η|} C(N-1+|η|, |η|)` (attained by constant input `R̂`) and the
/// coarser `2^{N-1} (2R̂)^{|η|}`. Requires `N >= 1`.
pub fn sum_bound<C: Scalar>(eta: &Word, rhat: &C, n: usize) -> Result<(C, C)> {
    if n == 0 {
        return Err(Error::Domain("sum bounds start at N = 1".into()));
    }
    if *rhat < C::zero() {
        return Err(Error::Domain("the input bound must be nonnegative".into()));
    }
    let k = eta.len();
    let b = C::from_rational(&Rational::from_integer(binomial((n - 1 + k) as u64, k as u64)));
    let sharp = b * rhat.powu(k as u32);
    let two = C::from_i64(2);
    let coarse = two.powu((n - 1) as u32) * (two * rhat.clone()).powu(k as u32);
    Ok((sharp, coarse))
}

/// The summation operator `Z(f)(N) = Σ_{k=1}^N f(k)`, with `f[k-1] = f(k)`.
pub fn summation_operator<C: Scalar>(f: &[C]) -> Vec<C> {
    let mut acc = C::zero();
    f.iter()
        .map(|v| {
            acc = acc.clone() + v.clone();
            acc.clone()
        })
        .collect()
}

/// `Z(f)Z(g) - Z(Z(f)g + fZ(g) - fg)` pointwise; identically zero because
/// `Z` is a Rota–Baxter operator of weight `-1`.
pub fn rota_baxter_defect<C: Scalar>(f: &[C], g: &[C]) -> Result<Vec<C>> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: g.len() });
    }
    let (zf, zg) = (summation_operator(f), summation_operator(g));
    let inner: Vec<C> = (0..f.len())
        .map(|k| zf[k].clone() * g[k].clone() + f[k].clone() * zg[k].clone() - f[k].clone() * g[k].clone())
        .collect();
    let rhs = summation_operator(&inner);
    Ok((0..f.len()).map(|k| zf[k].clone() * zg[k].clone() - rhs[k].clone()).collect())
}

/// Per-step transition of a state-affine system.
#[derive(Clone, PartialEq)]
pub enum Transition<C> {
    /// `(I - Σ_x w_x(û(N)) μ(x)) z(N) = z(N-1)`.
    Implicit(Vec<(Letter, Matrix<C>)>),
    /// `z(N) = Σ w(û(N)) A z(N-1) + Σ w(û(N)) b`; `None` means weight 1.
    Affine { linear: Vec<(Option<Letter>, Matrix<C>)>, drift: Vec<(Option<Letter>, Matrix<C>)> },
}

/// Discrete-time system with transitions rational in the input and affine
/// in the state, output `y(N) = λ z(N)`.
#[derive(Clone, PartialEq)]
pub struct StateAffineSystem<C> {
    transition: Transition<C>,
    initial: Matrix<C>,
    output: Matrix<C>,
}

impl<C: Scalar> StateAffineSystem<C> {
    pub fn implicit(mu: Vec<(Letter, Matrix<C>)>, initial: Matrix<C>, output: Matrix<C>) -> Self {
        StateAffineSystem { transition: Transition::Implicit(mu), initial, output }
    }

    pub fn affine(
        linear: Vec<(Option<Letter>, Matrix<C>)>,
        drift: Vec<(Option<Letter>, Matrix<C>)>,
        initial: Matrix<C>,
        output: Matrix<C>,
    ) -> Self {
        StateAffineSystem { transition: Transition::Affine { linear, drift }, initial, output }
    }

    pub fn dim(&self) -> usize {
        self.initial.rows()
    }

    pub fn transition(&self) -> &Transition<C> {
        &self.transition
    }

    pub fn initial(&self) -> &Matrix<C> {
        &self.initial
    }

    pub fn output(&self) -> &Matrix<C> {
        &self.output
    }

    /// For the implicit form, `(I - Σ_x w_x(u) μ(x))^{-1}` at a single input
    /// value `u = (u_0, …, u_m)`.
    pub fn step_matrix(&self, u: &[C]) -> Result<Matrix<C>> {
        let signal = DTSignal::new(vec![u.to_vec()])?;
        match &self.transition {
            Transition::Implicit(mu) => self.implicit_matrix(mu, &signal, 1)?.inverse().ok_or(Error::SingularTransition { step: 1 }),
            Transition::Affine { .. } => Err(Error::Domain("affine transitions have no single step matrix".into())),
        }
    }

    fn implicit_matrix(&self, mu: &[(Letter, Matrix<C>)], u: &DTSignal<C>, k: usize) -> Result<Matrix<C>> {
        let mut a = Matrix::identity(self.dim());
        for (x, m) in mu {
            a = a.sub(&m.scale(&u.weight(*x, k)?))?;
        }
        Ok(a)
    }

    /// Radius `R*` with `Σ_x R*^{weight(x)} ‖μ(x)‖_1 = 1`; when every input
    /// channel used by a letter with `μ(x) ≠ 0` stays below `R*` in absolute
    /// value, every implicit step is invertible. Infinite when all `μ(x)` vanish.
    pub fn invertibility_radius(&self) -> f64 {
        let Transition::Implicit(mu) = &self.transition else {
            return f64::INFINITY;
        };
        let terms: Vec<(i32, f64)> = mu.iter().map(|(x, m)| (x.weight() as i32, m.norm1())).filter(|t| t.1 > 0.0).collect();
        if terms.is_empty() {
            return f64::INFINITY;
        }
        let f = |r: f64| terms.iter().map(|(w, n)| n * r.powi(*w)).sum::<f64>();
        let (mut lo, mut hi) = (0.0, 1.0);
        while f(hi) < 1.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// `z(0), …, z(N)`.
    pub fn states(&self, u: &DTSignal<C>, n: usize) -> Result<Vec<Matrix<C>>> {
        u.check_horizon(n)?;
        if self.output.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: self.output.cols() });
        }
        if let Transition::Implicit(mu) = &self.transition {
            let radius = self.invertibility_radius();
            // only channels named by a letter with nonzero μ(x) enter the transition
            let channels: std::collections::BTreeSet<usize> =
                mu.iter().filter(|(_, m)| m.norm1() > 0.0).flat_map(|(x, _)| x.indices().into_iter().map(|i| i as usize)).collect();
            let norm = u.samples[..n]
                .iter()
                .flat_map(|s| channels.iter().filter_map(move |&i| s.get(i)))
                .map(|v| v.to_float().abs())
                .fold(0.0, f64::max);
            if norm >= radius {
                return Err(Error::OutsideInvertibilityRegion { norm, bound: radius });
            }
        }
        let mut z = vec![self.initial.clone()];
        for k in 1..=n {
            let prev = z.last().expect("initial state");
            let next = match &self.transition {
                Transition::Implicit(mu) => {
                    self.implicit_matrix(mu, u, k)?.solve(prev).ok_or(Error::SingularTransition { step: k })?
                }
                Transition::Affine { linear, drift } => {
                    let mut next = Matrix::zeros(self.dim(), 1);
                    for (x, a) in linear {
                        let w = match x {
                            Some(x) => u.weight(*x, k)?,
                            None => C::one(),
                        };
                        next = next.add(&a.mul(prev)?.scale(&w))?;
                    }
                    for (x, b) in drift {
                        let w = match x {
                            Some(x) => u.weight(*x, k)?,
                            None => C::one(),
                        };
                        next = next.add(&b.scale(&w))?;
                    }
                    next
                }
            };
            z.push(next);
        }
        Ok(z)
    }

    /// Text form of the transition; scalar systems print plain coefficients.
    pub fn describe(&self) -> String {
        let scalar = self.dim() == 1;
        let mat = |m: &Matrix<C>| if scalar { m[(0, 0)].to_string() } else { format!("{m:?}") };
        let weight = |x: &Letter| x.indices().iter().map(|i| format!("u{i}(N)")).collect::<Vec<_>>().join(" ");
        match &self.transition {
            Transition::Implicit(mu) => {
                let mut s = if scalar { "1".to_string() } else { "I".to_string() };
                for (x, m) in mu.iter().filter(|(_, m)| !m.is_zero()) {
                    let unit = scalar && m[(0, 0)] == C::one();
                    if unit {
                        s.push_str(&format!(" - {}", weight(x)));
                    } else {
                        s.push_str(&format!(" - {} {}", weight(x), mat(m)));
                    }
                }
                format!("z(N) = ({s})^-1 z(N-1)")
            }
            Transition::Affine { linear, drift } => {
                let mut parts = Vec::new();
                for (x, a) in linear {
                    let w = x.as_ref().map(weight).map(|w| format!("{w} ")).unwrap_or_default();
                    parts.push(format!("{w}{} z(N-1)", mat(a)));
                }
                for (x, b) in drift {
                    let w = x.as_ref().map(weight).unwrap_or_else(|| "1".into());
                    parts.push(format!("{w} {}", mat(b)));
                }
                format!("z(N) = {}", parts.join(" + "))
            }
        }
    }
}

impl<C: Scalar> std::fmt::Debug for StateAffineSystem<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}; z(0) = {:?}; y = {:?} z", self.describe(), self.initial, self.output)
    }
}

/// Output trajectory `y(0), …, y(N)`.
pub fn dt_state_affine_simulate<C: Scalar>(sys: &StateAffineSystem<C>, u: &DTSignal<C>, n: usize) -> Result<Vec<Vec<C>>> {
    sys.states(u, n)?
        .iter()
        .map(|z| Ok(sys.output.mul(z)?.entries().to_vec()))
        .collect()
}

/// Bound on `|F̂_c[û](N) - Σ_{|η|<=L} (c,η) S_η[û](N)|` when
/// `|(c,η)| <= K M^{|η|}`, `m + 1` letters and `‖û‖_∞ <= R̂`:
/// `K Σ_{j>L} C(N-1+j, j) (M(m+1)R̂)^j`. Infinite when the ratio reaches 1.
pub fn dt_tail_bound(k: f64, mm: f64, m: usize, rhat: f64, n: usize, l: usize) -> f64 {
    let x = mm * (m as f64 + 1.0) * rhat;
    if x >= 1.0 {
        return f64::INFINITY;
    }
    if n == 0 {
        return 0.0;
    }
    // term_j = C(N-1+j, j) x^j, built up by ratios
    let mut term = 1.0;
    for j in 1..=l + 1 {
        term *= x * (n - 1 + j) as f64 / j as f64;
    }
    let mut sum = 0.0;
    let mut j = l + 1;
    loop {
        sum += term;
        j += 1;
        term *= x * (n - 1 + j) as f64 / j as f64;
        if (j > l + n && term <= 1e-17 * sum) || j > l + 1_000_000 {
            break;
        }
    }
    k * sum
}

/// Coefficient growth classes contrasted by the convergence dichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthClass {
    /// `(c,η) = |η|! M^{|η|}`.
    Local,
    /// `(c,η) = M^{|η|}`.
    Global,
}

impl GrowthClass {
    pub fn coefficient(self, mm: &Rational, len: usize) -> Rational {
        let base = num_traits::pow(mm.clone(), len);
        match self {
            GrowthClass::Local => base * Rational::from_integer(factorial(len as u64)),
            GrowthClass::Global => base,
        }
    }

    /// The series itself on `m + 1` letters up to `degree`.
    pub fn series(self, mm: &Rational, m: usize, degree: usize) -> Series<Rational> {
        let letters: Vec<Letter> = (0..=m as u32).map(Letter::base).collect();
        Series::from_pairs(
            crate::words::words_up_to(&letters, degree)
                .into_iter()
                .map(|w| {
                    let c = self.coefficient(mm, w.len());
                    (w, c)
                }),
        )
        .with_truncation(crate::series::Truncation::At(degree))
    }
}

/// Partial sums `P_L = Σ_{j<=L} Σ_{|η|=j} (c,η) S_η[R̂](N)` for `L = 0..=max_len`
/// at the constant input `û_i ≡ R̂`, exact. Each degree block collapses to
/// `coeff_j (m+1)^j R̂^j C(N-1+j, j)`.
pub fn constant_input_partial_sums(
    class: GrowthClass,
    mm: &Rational,
    m: usize,
    rhat: &Rational,
    n: usize,
    max_len: usize,
) -> Vec<Rational> {
    let mut out = Vec::with_capacity(max_len + 1);
    let mut acc = Rational::from_integer(0.into());
    let width = Rational::from_integer((m as i64 + 1).into());
    for j in 0..=max_len {
        let b = Rational::from_integer(binomial((n + j).saturating_sub(1) as u64, j as u64));
        let b = if n == 0 { Rational::from_integer(((j == 0) as i64).into()) } else { b };
        acc += class.coefficient(mm, j) * num_traits::pow(width.clone() * rhat.clone(), j) * b;
        out.push(acc.clone());
    }
    out
}

/// Limit of the global-class partial sums, `(1 - (m+1) M R̂)^{-N}`, when
/// the ratio is below one.
pub fn global_class_limit(mm: &Rational, m: usize, rhat: &Rational, n: usize) -> Option<Rational> {
    let x = mm.clone() * Rational::from_integer((m as i64 + 1).into()) * rhat.clone();
    let one = Rational::from_integer(1.into());
    if x >= one {
        return None;
    }
    Some(num_traits::pow((one.clone() - x).recip(), n))
}

/// Smallest `L` with `P_L > threshold`, if reached within `max_len`.
pub fn divergence_index(partial: &[Rational], threshold: f64) -> Option<usize> {
    partial.iter().position(|p| p.to_f64().is_some_and(|v| v > threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_series;
    use crate::scalar::{rat, rat_int};
    use crate::words::x;

    fn signal(rows: &[&[i64]]) -> DTSignal<Rational> {
        DTSignal::new(rows.iter().map(|r| r.iter().map(|&v| rat_int(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn basic_sums() {
        let u = DTSignal::constant(2, rat_int(1), 6).unwrap();
        assert_eq!(iterated_sum(&Word::empty(), &u, 4).unwrap(), rat_int(1));
        assert_eq!(iterated_sum(&Word::letter(x(1)), &u, 5).unwrap(), rat_int(5));
        assert!(matches!(iterated_sum(&Word::letter(x(1)), &u, 7), Err(Error::Horizon { .. })));
        assert!(matches!(iterated_sum(&Word::letter(x(3)), &u, 2), Err(Error::ForeignLetter(_))));
        let v = signal(&[&[0, 2, 3], &[0, -1, 5], &[0, 4, 1]]);
        let mut direct = rat_int(0);
        for k2 in 1..=3 {
            for k1 in 1..=k2 {
                direct += v.at(k2)[2].clone() * v.at(k1)[1].clone();
            }
        }
        assert_eq!(iterated_sum(&"x2 x1".parse().unwrap(), &v, 3).unwrap(), direct);
        let b = Word::letter(x(1).bracket(x(2)));
        assert_eq!(iterated_sum(&b, &v, 3).unwrap(), rat_int(6 - 5 + 4));
    }

    #[test]
    fn quasi_shuffle_of_sums() {
        let v = signal(&[&[1, 2, 3], &[1, -1, 5], &[1, 4, 1], &[1, 0, -2]]);
        let s1 = iterated_sum(&Word::letter(x(1)), &v, 4).unwrap();
        let s2 = iterated_sum(&Word::letter(x(2)), &v, 4).unwrap();
        let q: Series<Rational> = parse_series("x1 x2 + x2 x1 - x[1,2]").unwrap();
        assert_eq!(dt_fliess_eval(&q, &v, 4, 2).unwrap()[0], s1 * s2);
    }

    #[test]
    fn bounds() {
        let (sharp, coarse) = sum_bound(&Word::letter(x(1)), &rat_int(1), 3).unwrap();
        assert_eq!(sharp, rat_int(3));
        assert_eq!(coarse, rat_int(8));
        assert_eq!(sum_bound(&Word::empty(), &rat(1, 3), 5).unwrap().0, rat_int(1));
        let u = DTSignal::constant(1, rat(1, 2), 6).unwrap();
        let eta: Word = "x1 x0 x1".parse().unwrap();
        assert_eq!(iterated_sum(&eta, &u, 6).unwrap(), sum_bound(&eta, &rat(1, 2), 6).unwrap().0);
    }

    #[test]
    fn rota_baxter() {
        let f = [rat_int(3), rat_int(-1), rat_int(4), rat_int(1), rat_int(-5)];
        let g = [rat_int(2), rat_int(7), rat_int(-1), rat_int(8), rat_int(2)];
        assert!(rota_baxter_defect(&f, &g).unwrap().iter().all(|v| *v == rat_int(0)));
    }

    #[test]
    fn polynomial_state_affine_example() {
        // z1 accumulates u1, z2 accumulates u2 times the updated z1
        let e = |v: &[i64]| Matrix::column(v.iter().map(|&a| rat_int(a)).collect());
        let shift = Matrix::from_rows(vec![vec![rat_int(0), rat_int(0)], vec![rat_int(1), rat_int(0)]]).unwrap();
        let sys = StateAffineSystem::affine(
            vec![(None, Matrix::identity(2)), (Some(x(2)), shift)],
            vec![(Some(x(1)), e(&[1, 0])), (Some(x(1).bracket(x(2))), e(&[0, 1]))],
            e(&[0, 0]),
            Matrix::row(vec![rat_int(0), rat_int(1)]),
        );
        let v = signal(&[&[0, 2, 3], &[0, -1, 5], &[0, 4, 1], &[0, 3, -3]]);
        let y = dt_state_affine_simulate(&sys, &v, 4).unwrap();
        let c: Series<Rational> = parse_series("x2 x1").unwrap();
        for n in 0..=4 {
            assert_eq!(y[n], dt_fliess_eval(&c, &v, n, 2).unwrap());
        }
    }

    #[test]
    fn euler_system() {
        let sys = StateAffineSystem::implicit(
            vec![(x(0), Matrix::zeros(1, 1)), (x(1), Matrix::identity(1))],
            Matrix::identity(1),
            Matrix::identity(1),
        );
        assert_eq!(sys.describe(), "z(N) = (1 - u1(N))^-1 z(N-1)");
        assert_eq!(sys.step_matrix(&[rat_int(0), rat(1, 4)]).unwrap()[(0, 0)], rat(4, 3));
        let u = DTSignal::constant(1, rat(1, 10), 8).unwrap();
        let y = dt_state_affine_simulate(&sys, &u, 8).unwrap();
        assert_eq!(y[8][0], num_traits::pow(rat(10, 9), 8));
        let big = DTSignal::constant(1, rat_int(1), 2).unwrap();
        assert!(matches!(dt_state_affine_simulate(&sys, &big, 2), Err(Error::OutsideInvertibilityRegion { .. })));
        assert_eq!(dt_state_affine_simulate(&sys, &DTSignal::constant(1, rat_int(0), 3).unwrap(), 3).unwrap()[3], vec![rat_int(1)]);
    }

    #[test]
    fn dichotomy() {
        let mm = rat_int(1);
        let rhat = rat(1, 5);
        let local = constant_input_partial_sums(GrowthClass::Local, &mm, 1, &rhat, 2, 40);
        assert!(local.windows(2).all(|w| w[1] > w[0]));
        assert!(divergence_index(&local, 1e9).is_some());
        let global = constant_input_partial_sums(GrowthClass::Global, &mm, 1, &rhat, 2, 80);
        let limit = global_class_limit(&mm, 1, &rhat, 2).unwrap();
        assert!(global.iter().all(|p| *p < limit));
        assert!((limit.clone() - global[80].clone()).to_f64().unwrap() < 1e-12);
        let u = DTSignal::constant(1, rhat.clone(), 2).unwrap();
        for class in [GrowthClass::Local, GrowthClass::Global] {
            let c = class.series(&mm, 1, 5);
            let direct = dt_fliess_eval(&c, &u, 2, 5).unwrap()[0].clone();
            assert_eq!(direct, constant_input_partial_sums(class, &mm, 1, &rhat, 2, 5)[5]);
        }
    }

    #[test]
    fn tail_bound_is_a_bound() {
        let exact = num_traits::pow(10.0 / 9.0, 5);
        let partial: f64 = (0..=3).map(|j| binomial(4 + j, j).to_f64().unwrap() * 0.1f64.powi(j as i32)).sum();
        let t = dt_tail_bound(1.0, 1.0, 0, 0.1, 5, 3);
        assert!((exact - partial - t).abs() < 1e-12);
    }
}
