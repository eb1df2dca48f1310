//! Continuous-time operators on a uniform grid: iterated integrals by
//! composite trapezoid, `F_c[u](t) = Σ (c,η) E_η[u](t)`, bilinear RK4
//! simulation, and the numeric checks of cascade and feedback identities.

use std::collections::HashMap;

use serde::Serialize;

use crate::composition::{compose, feedback};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rational::LinearRepresentation;
use crate::scalar::Scalar;
use crate::series::Series;
use crate::words::{Letter, Word};

/// Inputs `u_1, …, u_m` sampled at `t0 + k h`; `u_0 ≡ 1` is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct CTSignal {
    t0: f64,
    h: f64,
    samples: Vec<Vec<f64>>,
}

impl CTSignal {
    pub fn new(t0: f64, h: f64, samples: Vec<Vec<f64>>) -> Result<CTSignal> {
        if h.is_nan() || h <= 0.0 || !h.is_finite() {
            return Err(Error::Domain(format!("step must be positive, got {h}")));
        }
        if samples.len() < 2 {
            return Err(Error::Domain("a grid needs at least two points".into()));
        }
        let m = samples[0].len();
        if let Some(bad) = samples.iter().find(|s| s.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, found: bad.len() });
        }
        Ok(CTSignal { t0, h, samples })
    }

    /// Samples `f(t)` on `[t0, t0 + steps h]`.
    pub fn from_fn(t0: f64, h: f64, steps: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<CTSignal> {
        CTSignal::new(t0, h, (0..=steps).map(|k| f(t0 + k as f64 * h)).collect())
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn m(&self) -> usize {
        self.samples[0].len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.h
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// `u_i(t_k)`, with `u_0 = 1`.
    pub fn value(&self, k: usize, i: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            self.samples[k][i - 1]
        }
    }

    /// `max_{k,i>=1} |u_i(t_k)|`.
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().flatten().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Grid index of `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let pos = (t - self.t0) / self.h;
        let k = pos.round();
        if (pos - k).abs() > 1e-6 {
            return Err(Error::Domain(format!("t = {t} is not a grid point")));
        }
        if k < 0.0 || k as usize >= self.len() {
            return Err(Error::OutsideGrid { index: k.max(0.0) as usize, len: self.len() });
        }
        Ok(k as usize)
    }

    /// A signal on the same grid with the given samples.
    pub fn with_samples(&self, samples: Vec<Vec<f64>>) -> Result<CTSignal> {
        if samples.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: samples.len() });
        }
        CTSignal::new(self.t0, self.h, samples)
    }

    fn channel(&self, x: Letter) -> Result<usize> {
        match x.base_index() {
            None => Err(Error::Domain(format!("bracket letter {x} has no continuous-time meaning"))),
            Some(i) if i as usize > self.m() => Err(Error::ForeignLetter(x.to_string())),
            Some(i) => Ok(i as usize),
        }
    }
}

/// `E_η[u](t_k)` for every grid index, memoized by suffix.
struct IntegralTable<'a> {
    u: &'a CTSignal,
    memo: HashMap<Word, Vec<f64>>,
}

impl<'a> IntegralTable<'a> {
    fn new(u: &'a CTSignal) -> Self {
        IntegralTable { u, memo: HashMap::new() }
    }

    fn get(&mut self, eta: &Word) -> Result<&Vec<f64>> {
        if !self.memo.contains_key(eta) {
            let v = match eta.first() {
                None => vec![1.0; self.u.len()],
                Some(x) => {
                    let i = self.u.channel(x)?;
                    let inner = self.get(&eta.tail())?.clone();
                    let half = 0.5 * self.u.h;
                    let mut v = Vec::with_capacity(inner.len());
                    let mut acc = 0.0;
                    v.push(acc);
                    for k in 1..inner.len() {
                        acc += half * (self.u.value(k - 1, i) * inner[k - 1] + self.u.value(k, i) * inner[k]);
                        v.push(acc);
                    }
                    v
                }
            };
            self.memo.insert(eta.clone(), v);
        }
        Ok(&self.memo[eta])
    }
}

/// `E_η[u](t, t0)` by recursive trapezoid quadrature.
pub fn iterated_integral(eta: &Word, u: &CTSignal, t: f64) -> Result<f64> {
    let k = u.index_of(t)?;
    Ok(IntegralTable::new(u).get(eta)?[k])
}

/// `F_c[u](t_k)` for every grid index, summing words up to `max_len`.
pub fn ct_fliess_trajectory<C: Scalar>(c: &Series<C>, u: &CTSignal, max_len: usize) -> Result<Vec<Vec<f64>>> {
    if !c.truncation().allows(max_len) {
        return Err(Error::Truncation { requested: max_len, available: c.truncation().limit().unwrap_or(0) });
    }
    let mut table = IntegralTable::new(u);
    let mut y = vec![vec![0.0; c.ell()]; u.len()];
    for (w, v) in c.terms() {
        if w.len() > max_len {
            continue;
        }
        let e = table.get(w)?;
        for (yk, ek) in y.iter_mut().zip(e) {
            for (yi, ci) in yk.iter_mut().zip(v) {
                *yi += ci.to_float() * ek;
            }
        }
    }
    Ok(y)
}

pub fn ct_fliess_eval<C: Scalar>(c: &Series<C>, u: &CTSignal, t: f64, max_len: usize) -> Result<Vec<f64>> {
    let k = u.index_of(t)?;
    Ok(ct_fliess_trajectory(c, u, max_len)?.swap_remove(k))
}

/// Output of `ż = (μ(x0) + Σ u_i μ(x_i)) z`, `z(t0) = γ`, `y = λ z` by
/// classical RK4 on the signal grid, interpolating `u` linearly at midpoints.
pub fn ct_bilinear_simulate(r: &LinearRepresentation<f64>, u: &CTSignal) -> Result<Vec<Vec<f64>>> {
    let mut mats: Vec<(usize, &Matrix<f64>)> = Vec::new();
    for x in r.alphabet() {
        mats.push((u.channel(x)?, r.mu(x)?));
    }
    let field = |k: usize, frac: f64, z: &Matrix<f64>| -> Result<Matrix<f64>> {
        let mut dz = Matrix::zeros(z.rows(), 1);
        for (i, m) in &mats {
            let ui = if frac == 0.0 {
                u.value(k, *i)
            } else {
                (1.0 - frac) * u.value(k, *i) + frac * u.value(k + 1, *i)
            };
            if ui != 0.0 {
                dz = dz.add(&m.mul(z)?.scale(&ui))?;
            }
        }
        Ok(dz)
    };
    let h = u.h;
    let mut z = r.gamma().clone();
    let mut out = vec![r.lambda().mul(&z)?.entries().to_vec()];
    for k in 0..u.len() - 1 {
        let k1 = field(k, 0.0, &z)?;
        let k2 = field(k, 0.5, &z.add(&k1.scale(&(0.5 * h)))?)?;
        let k3 = field(k, 0.5, &z.add(&k2.scale(&(0.5 * h)))?)?;
        let k4 = field(k + 1, 0.0, &z.add(&k3.scale(&h))?)?;
        let incr = k1.add(&k2.scale(&2.0))?.add(&k3.scale(&2.0))?.add(&k4)?.scale(&(h / 6.0));
        z = z.add(&incr)?;
        out.push(r.lambda().mul(&z)?.entries().to_vec());
    }
    Ok(out)
}

/// `K (x)^{L+1} / (1 - x)` with `x = M (m+1) max(1, R) T`: bounds the
/// words longer than `L` when `|(c,η)| <= K M^{|η|}`, `‖u‖_∞ <= R` on
/// a horizon `T`. Infinite once `x >= 1`.
pub fn ct_tail_bound(k: f64, mm: f64, m: usize, r: f64, t: f64, l: usize) -> f64 {
    let x = mm * (m as f64 + 1.0) * r.max(1.0) * t;
    if x >= 1.0 {
        return f64::INFINITY;
    }
    k * x.powi(l as i32 + 1) / (1.0 - x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CtReport {
    pub max_error: f64,
    pub grid_points: usize,
    pub max_len: usize,
    /// Picard sweeps used by the feedback check; zero for cascades.
    pub iterations: usize,
}

fn max_deviation(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().zip(b).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs())).fold(0.0, f64::max)
}

fn add_signals(u: &CTSignal, y: &[Vec<f64>]) -> Result<CTSignal> {
    let samples = u.samples.iter().zip(y).map(|(a, b)| a.iter().zip(b).map(|(p, q)| p + q).collect()).collect();
    u.with_samples(samples)
}

/// Largest gap between `F_{c∘d}[u]` and `F_c[F_d[u]]` on the grid.
pub fn verify_cascade_ct<C: Scalar>(c: &Series<C>, d: &Series<C>, u: &CTSignal, max_len: usize) -> Result<CtReport> {
    if d.ell() != u.m() {
        return Err(Error::DimensionMismatch { expected: u.m(), found: d.ell() });
    }
    let direct = ct_fliess_trajectory(&compose(c, d, max_len)?, u, max_len)?;
    let v = u.with_samples(ct_fliess_trajectory(d, u, max_len)?)?;
    let cascade = ct_fliess_trajectory(c, &v, max_len)?;
    Ok(CtReport { max_error: max_deviation(&direct, &cascade), grid_points: u.len(), max_len, iterations: 0 })
}

/// Closed loop `y = F_c[u + F_d[y]]` by Picard iteration on
/// `v ← u + F_d[F_c[v]]`, then `y = F_c[v]`. Sequential by nature.
pub fn picard_feedback<C: Scalar>(c: &Series<C>, d: &Series<C>, u: &CTSignal, max_len: usize) -> Result<(Vec<Vec<f64>>, usize)> {
    if c.ell() != u.m() || d.ell() != u.m() {
        return Err(Error::DimensionMismatch { expected: u.m(), found: if c.ell() != u.m() { c.ell() } else { d.ell() } });
    }
    let mut v = u.clone();
    let mut prev = f64::INFINITY;
    for it in 1..=500 {
        let y = ct_fliess_trajectory(c, &v, max_len)?;
        let next = add_signals(u, &ct_fliess_trajectory(d, &u.with_samples(y)?, max_len)?)?;
        let step = max_deviation(&next.samples, &v.samples);
        v = next;
        if step < 1e-13 {
            return Ok((ct_fliess_trajectory(c, &v, max_len)?, it));
        }
        if !step.is_finite() || (it > 10 && step >= prev) {
            return Err(Error::NonContraction { iterations: it, last_update: step });
        }
        prev = step;
    }
    Err(Error::NonContraction { iterations: 500, last_update: prev })
}

/// Largest gap between `F_{c@d}[u]` and the Picard closed-loop output.
pub fn verify_feedback_ct<C: Scalar>(c: &Series<C>, d: &Series<C>, u: &CTSignal, max_len: usize) -> Result<CtReport> {
    let (closed, iterations) = picard_feedback(c, d, u, max_len)?;
    let predicted = ct_fliess_trajectory(&feedback(c, d, max_len)?, u, max_len)?;
    Ok(CtReport { max_error: max_deviation(&predicted, &closed), grid_points: u.len(), max_len, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_series;
    use crate::scalar::Rational;
    use crate::words::x;

    fn ones(steps: usize, h: f64) -> CTSignal {
        CTSignal::from_fn(0.0, h, steps, |_| vec![1.0]).unwrap()
    }

    #[test]
    fn integrals() {
        let u = ones(1000, 1e-3);
        assert_eq!(iterated_integral(&Word::empty(), &u, 0.5).unwrap(), 1.0);
        assert!((iterated_integral(&Word::letter(x(0)), &u, 0.7).unwrap() - 0.7).abs() < 1e-12);
        assert!((iterated_integral(&"x1 x1".parse().unwrap(), &u, 1.0).unwrap() - 0.5).abs() < 1e-6);
        assert!(matches!(iterated_integral(&Word::empty(), &u, 1.5), Err(Error::OutsideGrid { .. })));
        assert!(iterated_integral(&Word::letter(x(1).bracket(x(1))), &u, 0.5).is_err());
    }

    #[test]
    fn exponential() {
        let u = ones(1000, 1e-3);
        let star = Series::<Rational>::word(Word::letter(x(1))).star(12).unwrap();
        let y = ct_fliess_eval(&star, &u, 1.0, 12).unwrap()[0];
        assert!((y - 1f64.exp()).abs() < 1e-6);
        let r = LinearRepresentation::<f64>::letter_star(&[x(0), x(1)], x(1));
        let traj = ct_bilinear_simulate(&r, &u).unwrap();
        assert!((traj[1000][0] - 1f64.exp()).abs() < 1e-6);
        let zero = CTSignal::from_fn(0.0, 1e-2, 10, |_| vec![0.0]).unwrap();
        let r0 = LinearRepresentation::<f64>::letter_star(&[x(1)], x(1));
        assert!(ct_bilinear_simulate(&r0, &zero).unwrap().iter().all(|y| y[0] == 1.0));
    }

    #[test]
    fn unit_feedback_loop() {
        let h = 1e-3;
        let u = CTSignal::from_fn(0.0, h, 100, |t| vec![t.sin()]).unwrap();
        let c: Series<Rational> = parse_series("x1").unwrap();
        let report = verify_feedback_ct(&c, &c, &u, 5).unwrap();
        assert!(report.max_error < 1e-5, "{report:?}");
        // y(t) = ∫ cosh(t - s) sin(s) ds = (cosh t - cos t) / 2
        let (closed, _) = picard_feedback(&c, &c, &u, 5).unwrap();
        let exact = (0.1f64.cosh() - 0.1f64.cos()) / 2.0;
        assert!((closed[100][0] - exact).abs() < 1e-6);
    }

    #[test]
    fn cascade() {
        let u = CTSignal::from_fn(0.0, 1e-3, 100, |t| vec![t.cos()]).unwrap();
        let c: Series<Rational> = parse_series("1 + x1 - 2 x0 x1").unwrap();
        let d: Series<Rational> = parse_series("x1 + 1/2 x1 x1").unwrap();
        assert!(verify_cascade_ct(&c, &d, &u, 12).unwrap().max_error < 1e-6);
        let zero = Series::<Rational>::zero(1);
        let report = verify_cascade_ct(&c, &zero, &u, 4).unwrap();
        assert!(report.max_error < 1e-12);
    }
}
