//! Rational series through linear representations `(c, η) = λ μ(η) γ`.
//!
//! Closure constructions (sum, catenation, star), the shuffle and
//! quasi-shuffle products of representations, a growth-bound certificate and
//! the state-affine realization of the discrete-time operator.
//!
//! Kronecker products always put the left operand's factor first:
//! `μ_e(x) = μ_c(x) ⊗ I + I ⊗ μ_d(x) (+ θ Σ μ_c(a) ⊗ μ_d(b))`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::StateAffineSystem;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::series::{Series, Truncation};
use crate::words::{words_up_to, Letter, Word};

/// Default cap on the dimension of product representations.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Clone, PartialEq)]
pub struct LinearRepresentation<C> {
    mu: BTreeMap<Letter, Matrix<C>>,
    gamma: Matrix<C>,
    lambda: Matrix<C>,
}

impl<C: Scalar> std::fmt::Debug for LinearRepresentation<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearRepresentation")
            .field("mu", &self.mu)
            .field("gamma", &self.gamma)
            .field("lambda", &self.lambda)
            .finish()
    }
}

impl<C: Scalar> LinearRepresentation<C> {
    pub fn new(mu: BTreeMap<Letter, Matrix<C>>, gamma: Matrix<C>, lambda: Matrix<C>) -> Result<Self> {
        let n = gamma.rows();
        if gamma.cols() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: gamma.cols() });
        }
        if lambda.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: lambda.cols() });
        }
        for m in mu.values() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.rows().max(m.cols()) });
            }
        }
        Ok(LinearRepresentation { mu, gamma, lambda })
    }

    /// The one-dimensional representation of `x_k^*` over `alphabet`:
    /// `μ(x_k) = 1`, every other letter zero.
    pub fn letter_star(alphabet: &[Letter], k: Letter) -> Self {
        let mut mu: BTreeMap<Letter, Matrix<C>> = alphabet.iter().map(|&l| (l, Matrix::zeros(1, 1))).collect();
        mu.insert(k, Matrix::identity(1));
        LinearRepresentation { mu, gamma: Matrix::identity(1), lambda: Matrix::identity(1) }
    }

    pub fn dim(&self) -> usize {
        self.gamma.rows()
    }

    pub fn ell(&self) -> usize {
        self.lambda.rows()
    }

    pub fn alphabet(&self) -> Vec<Letter> {
        self.mu.keys().copied().collect()
    }

    pub fn mu(&self, x: Letter) -> Result<&Matrix<C>> {
        self.mu.get(&x).ok_or_else(|| Error::ForeignLetter(x.to_string()))
    }

    pub fn gamma(&self) -> &Matrix<C> {
        &self.gamma
    }

    pub fn lambda(&self) -> &Matrix<C> {
        &self.lambda
    }

    /// `μ(η) γ`, multiplying from the right.
    pub fn state(&self, eta: &Word) -> Result<Matrix<C>> {
        let mut v = self.gamma.clone();
        for &l in eta.letters().iter().rev() {
            v = self.mu(l)?.mul(&v)?;
        }
        Ok(v)
    }

    pub fn coefficient(&self, eta: &Word) -> Result<Vec<C>> {
        let v = self.lambda.mul(&self.state(eta)?)?;
        Ok(v.entries().to_vec())
    }

    /// The represented series on all words up to `degree`.
    pub fn to_series(&self, degree: usize) -> Result<Series<C>> {
        let mut s = Series::zero(self.ell()).with_truncation(Truncation::At(degree));
        // breadth-first over suffixes so each state is one product
        let mut layer = vec![(Word::empty(), self.gamma.clone())];
        for len in 0..=degree {
            let mut next = Vec::new();
            for (w, v) in &layer {
                s.add_term(w.clone(), self.lambda.mul(v)?.entries().to_vec());
                if len < degree {
                    for (&l, m) in &self.mu {
                        next.push((w.prepend(l), m.mul(v)?));
                    }
                }
            }
            layer = next;
        }
        Ok(s)
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D + Copy) -> LinearRepresentation<D> {
        LinearRepresentation {
            mu: self.mu.iter().map(|(l, m)| (*l, m.map(f))).collect(),
            gamma: self.gamma.map(f),
            lambda: self.lambda.map(f),
        }
    }

    pub fn to_f64(&self) -> LinearRepresentation<f64> {
        self.map(|c| c.to_float())
    }

    fn mu_or_zero(&self, x: Letter) -> Matrix<C> {
        self.mu.get(&x).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(), self.dim()))
    }
}

fn union_alphabet(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
    let mut v: Vec<Letter> = a.iter().chain(b).copied().collect();
    v.sort();
    v.dedup();
    v
}

/// Suffix-automaton representation of a polynomial: one state per suffix of
/// a supported word, `γ = e_∅`, `μ(x) e_s = e_{xs}`, `λ e_s = (p, s)`.
pub fn rep_from_polynomial<C: Scalar>(p: &Series<C>, alphabet: &[Letter]) -> Result<LinearRepresentation<C>> {
    if p.truncation() != Truncation::Exact {
        return Err(Error::Domain("only exact polynomials have a finite representation".into()));
    }
    let mut states: Vec<Word> = vec![Word::empty()];
    for w in p.support() {
        for k in 0..w.len() {
            states.push(w.suffix_from(k));
        }
    }
    states.sort();
    states.dedup();
    let index: BTreeMap<&Word, usize> = states.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let n = states.len();
    let letters = union_alphabet(alphabet, &p.letters());
    let mut mu = BTreeMap::new();
    for &l in &letters {
        let mut m = Matrix::zeros(n, n);
        for (s, &j) in &index {
            if let Some(&i) = index.get(&s.prepend(l)) {
                m[(i, j)] = C::one();
            }
        }
        mu.insert(l, m);
    }
    let mut gamma = Matrix::zeros(n, 1);
    gamma[(index[&Word::empty()], 0)] = C::one();
    let mut lambda = Matrix::zeros(p.ell(), n);
    for (w, v) in p.terms() {
        for (k, c) in v.iter().enumerate() {
            lambda[(k, index[w])] = c.clone();
        }
    }
    LinearRepresentation::new(mu, gamma, lambda)
}

pub fn rep_sum<C: Scalar>(a: &LinearRepresentation<C>, b: &LinearRepresentation<C>) -> Result<LinearRepresentation<C>> {
    if a.ell() != b.ell() {
        return Err(Error::DimensionMismatch { expected: a.ell(), found: b.ell() });
    }
    let (na, nb) = (a.dim(), b.dim());
    let mut mu = BTreeMap::new();
    for l in union_alphabet(&a.alphabet(), &b.alphabet()) {
        let (ma, mb) = (a.mu_or_zero(l), b.mu_or_zero(l));
        mu.insert(l, Matrix::block(&[na, nb], &[na, nb], &[vec![Some(&ma), None], vec![None, Some(&mb)]]));
    }
    let gamma = Matrix::block(&[na, nb], &[1], &[vec![Some(&a.gamma)], vec![Some(&b.gamma)]]);
    let lambda = Matrix::block(&[a.ell()], &[na, nb], &[vec![Some(&a.lambda), Some(&b.lambda)]]);
    LinearRepresentation::new(mu, gamma, lambda)
}

pub fn rep_scale<C: Scalar>(k: &C, r: &LinearRepresentation<C>) -> LinearRepresentation<C> {
    LinearRepresentation { mu: r.mu.clone(), gamma: r.gamma.clone(), lambda: r.lambda.scale(k) }
}

fn require_scalar<C: Scalar>(r: &LinearRepresentation<C>) -> Result<()> {
    if r.ell() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: r.ell() });
    }
    Ok(())
}

/// Catenation `cd`: `μ = [[μ_c, γ_c λ_d μ_d], [0, μ_d]]`,
/// `γ = [γ_c λ_d γ_d; γ_d]`, `λ = [λ_c, 0]`.
pub fn rep_cat<C: Scalar>(c: &LinearRepresentation<C>, d: &LinearRepresentation<C>) -> Result<LinearRepresentation<C>> {
    require_scalar(c)?;
    require_scalar(d)?;
    let (nc, nd) = (c.dim(), d.dim());
    let link = c.gamma.mul(&d.lambda)?;
    let mut mu = BTreeMap::new();
    for l in union_alphabet(&c.alphabet(), &d.alphabet()) {
        let (mc, md) = (c.mu_or_zero(l), d.mu_or_zero(l));
        let corner = link.mul(&md)?;
        mu.insert(l, Matrix::block(&[nc, nd], &[nc, nd], &[vec![Some(&mc), Some(&corner)], vec![None, Some(&md)]]));
    }
    let top = link.mul(&d.gamma)?;
    let gamma = Matrix::block(&[nc, nd], &[1], &[vec![Some(&top)], vec![Some(&d.gamma)]]);
    let lambda = Matrix::block(&[1], &[nc, nd], &[vec![Some(&c.lambda), None]]);
    LinearRepresentation::new(mu, gamma, lambda)
}

/// `c^*` for proper `c` (`λγ = 0`): one extra state carries the empty word,
/// `μ'(x) = diag(0, (I + γλ) μ(x))`, `γ' = [1; γ]`, `λ' = [1, λ]`.
pub fn rep_star<C: Scalar>(r: &LinearRepresentation<C>) -> Result<LinearRepresentation<C>> {
    require_scalar(r)?;
    if !r.lambda.mul(&r.gamma)?.is_zero() {
        return Err(Error::NotProper);
    }
    let n = r.dim();
    let feed = Matrix::identity(n).add(&r.gamma.mul(&r.lambda)?)?;
    let mut mu = BTreeMap::new();
    for (&l, m) in &r.mu {
        let inner = feed.mul(m)?;
        mu.insert(l, Matrix::block(&[1, n], &[1, n], &[vec![None, None], vec![None, Some(&inner)]]));
    }
    let one = Matrix::identity(1);
    let gamma = Matrix::block(&[1, n], &[1], &[vec![Some(&one)], vec![Some(&r.gamma)]]);
    let lambda = Matrix::block(&[1], &[1, n], &[vec![Some(&one), Some(&r.lambda)]]);
    LinearRepresentation::new(mu, gamma, lambda)
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(())
}

/// Representation of `c ⧢ d` on the union alphabet.
pub fn rep_shuffle<C: Scalar>(
    c: &LinearRepresentation<C>,
    d: &LinearRepresentation<C>,
    cap: usize,
) -> Result<LinearRepresentation<C>> {
    require_scalar(c)?;
    require_scalar(d)?;
    check_cap(c.dim() * d.dim(), cap)?;
    let (ic, id) = (Matrix::identity(c.dim()), Matrix::identity(d.dim()));
    let mut mu = BTreeMap::new();
    for l in union_alphabet(&c.alphabet(), &d.alphabet()) {
        mu.insert(l, c.mu_or_zero(l).kron(&id).add(&ic.kron(&d.mu_or_zero(l)))?);
    }
    LinearRepresentation::new(mu, c.gamma.kron(&d.gamma), c.lambda.kron(&d.lambda))
}

/// Representation of `c ⊛ d` over `X_c ∪ X_d ∪ [X_c X_d]`.
pub fn rep_qshuffle<C: Scalar>(
    c: &LinearRepresentation<C>,
    d: &LinearRepresentation<C>,
    theta: &C,
    cap: usize,
) -> Result<LinearRepresentation<C>> {
    require_scalar(c)?;
    require_scalar(d)?;
    check_cap(c.dim() * d.dim(), cap)?;
    let (ic, id) = (Matrix::identity(c.dim()), Matrix::identity(d.dim()));
    let mut mu: BTreeMap<Letter, Matrix<C>> = BTreeMap::new();
    for l in union_alphabet(&c.alphabet(), &d.alphabet()) {
        mu.insert(l, c.mu_or_zero(l).kron(&id).add(&ic.kron(&d.mu_or_zero(l)))?);
    }
    for (&a, ma) in &c.mu {
        for (&b, mb) in &d.mu {
            let x = a.bracket(b);
            let term = ma.kron(mb).scale(theta);
            let entry = mu.entry(x).or_insert_with(|| Matrix::zeros(c.dim() * d.dim(), c.dim() * d.dim()));
            *entry = entry.add(&term)?;
        }
    }
    LinearRepresentation::new(mu, c.gamma.kron(&d.gamma), c.lambda.kron(&d.lambda))
}

/// `(K, M)` with `|(c, η)| <= K M^{|η|}` in the induced 1-norm.
pub fn growth_bound<C: Scalar>(r: &LinearRepresentation<C>) -> (C, C) {
    let k = r.lambda.norm1_exact() * r.gamma.norm1_exact();
    let m = r.mu.values().map(Matrix::norm1_exact).fold(C::zero(), |a, b| if b > a { b } else { a });
    (k, m)
}

/// Discrete-time realization over the iterated sums:
/// `(I - Σ_x w_x(û(N)) μ(x)) z(N) = z(N-1)`, `z(0) = γ`, `y = λ z`,
/// where `w_x` is the product of the input components named by `x`.
pub fn state_affine_realize<C: Scalar>(r: &LinearRepresentation<C>) -> StateAffineSystem<C> {
    StateAffineSystem::implicit(
        r.mu.iter().map(|(l, m)| (*l, m.clone())).collect(),
        r.gamma.clone(),
        r.lambda.clone(),
    )
}

/// Checks that the row space spanned by `λ μ(η)`, `|η| <= n`, is closed
/// under right multiplication by every `μ(x)`; returns its rank.
pub fn shift_stable_rank<C: Scalar>(r: &LinearRepresentation<C>) -> Result<(usize, bool)> {
    let mut basis: Vec<Vec<C>> = Vec::new();
    let mut frontier: Vec<Matrix<C>> = (0..r.ell()).map(|k| Matrix::row(r.lambda.to_rows()[k].clone())).collect();
    let reduce = |basis: &Vec<Vec<C>>, v: &[C]| -> Vec<C> {
        let mut v = v.to_vec();
        for b in basis {
            let p = b.iter().position(|c| !c.is_zero()).expect("nonzero basis row");
            if !v[p].is_zero() {
                let f = v[p].clone() / b[p].clone();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = vi.clone() - f.clone() * bi.clone();
                }
            }
        }
        v
    };
    for _ in 0..=r.dim() {
        let mut next = Vec::new();
        for row in frontier {
            let red = reduce(&basis, row.entries());
            if red.iter().any(|c| !c.is_zero()) {
                basis.push(red);
                for m in r.mu.values() {
                    next.push(row.mul(m)?);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let stable = basis.iter().all(|b| {
        r.mu.values().all(|m| {
            let moved = Matrix::row(b.clone()).mul(m).expect("square");
            reduce(&basis, moved.entries()).iter().all(|c| c.is_zero())
        })
    });
    Ok((basis.len(), stable))
}

/// Words over the representation alphabet up to `len`.
pub fn rep_words<C: Scalar>(r: &LinearRepresentation<C>, len: usize) -> Vec<Word> {
    words_up_to(&r.alphabet(), len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_series;
    use crate::quasishuffle::qsh_series;
    use crate::scalar::{rat_int, Rational};
    use crate::shuffle::shuffle_series;
    use crate::words::x;

    fn p(s: &str) -> Series<Rational> {
        parse_series(s).unwrap()
    }

    fn star1() -> LinearRepresentation<Rational> {
        LinearRepresentation::letter_star(&[x(0), x(1)], x(1))
    }

    #[test]
    fn coefficients_of_letter_star() {
        let r = star1();
        assert_eq!(r.coefficient(&Word::power(x(1), 3)).unwrap(), vec![rat_int(1)]);
        assert_eq!(r.coefficient(&Word::letter(x(0))).unwrap(), vec![rat_int(0)]);
        assert_eq!(r.coefficient(&Word::empty()).unwrap(), vec![rat_int(1)]);
        assert!(matches!(r.coefficient(&Word::letter(x(2))), Err(Error::ForeignLetter(_))));
    }

    #[test]
    fn closure_constructions() {
        let px = p("x1");
        let r = rep_from_polynomial(&px, &[x(0), x(1)]).unwrap();
        assert!(r.to_series(3).unwrap().agrees_with(&px));
        let s = rep_star(&r).unwrap();
        assert!(s.to_series(5).unwrap().agrees_with(&star1().to_series(5).unwrap()));
        assert!(s.to_series(5).unwrap().agrees_with(&px.star(5).unwrap()));
        let cat = rep_cat(&star1(), &rep_from_polynomial(&p("x0"), &[x(0), x(1)]).unwrap()).unwrap();
        assert_eq!(cat.coefficient(&"x1 x1 x0".parse().unwrap()).unwrap(), vec![rat_int(1)]);
        assert!(rep_star(&star1()).is_err());
        let c = p("2 - x0 x1 + 1/2 x1 x1 x0");
        let d = p("x1 + 3 x0 x0");
        let rc = rep_from_polynomial(&c, &[]).unwrap();
        let rd = rep_from_polynomial(&d, &[]).unwrap();
        assert!(rep_sum(&rc, &rd).unwrap().to_series(4).unwrap().agrees_with(&c.add(&d).unwrap()));
        assert!(rep_cat(&rc, &rd).unwrap().to_series(6).unwrap().agrees_with(&c.cat_product(&d).unwrap()));
        assert!(rep_scale(&rat_int(3), &rc).to_series(4).unwrap().agrees_with(&c.scale(&rat_int(3))));
        let ds = rep_star(&rd).unwrap().to_series(5).unwrap();
        assert!(ds.agrees_with(&d.star(5).unwrap()));
    }

    #[test]
    fn shuffle_representation() {
        let e = rep_shuffle(&star1(), &star1(), 16).unwrap();
        assert_eq!(e.dim(), 1);
        assert_eq!(e.mu(x(1)).unwrap()[(0, 0)], rat_int(2));
        for w in rep_words(&e, 5) {
            let expect = if w.letter_count(x(0)) == 0 { rat_int(1 << w.len()) } else { rat_int(0) };
            assert_eq!(e.coefficient(&w).unwrap()[0], expect);
        }
        let c = p("x1 x0 - 2 x0 + 1");
        let rc = rep_from_polynomial(&c, &[]).unwrap();
        let one = rep_from_polynomial(&Series::one(1), &[]).unwrap();
        assert!(rep_shuffle(&rc, &one, 16).unwrap().to_series(4).unwrap().agrees_with(&c));
        let both = rep_shuffle(&rc, &star1(), 64).unwrap();
        let expected = shuffle_series(&c, &star1().to_series(5).unwrap(), 5).unwrap();
        assert!(both.to_series(5).unwrap().agrees_with(&expected));
        assert!(matches!(rep_shuffle(&rc, &rc, 4), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn quasi_shuffle_representation() {
        let x11 = x(1).bracket(x(1));
        let e = rep_qshuffle(&star1(), &star1(), &rat_int(1), 16).unwrap();
        assert_eq!(e.mu(x(1)).unwrap()[(0, 0)], rat_int(2));
        assert_eq!(e.mu(x11).unwrap()[(0, 0)], rat_int(1));
        for w in words_up_to(&[x(1), x11], 4) {
            assert_eq!(e.coefficient(&w).unwrap()[0], rat_int(1 << w.letter_count(x(1))));
        }
        let zero = rep_qshuffle(&star1(), &star1(), &rat_int(0), 16).unwrap();
        let sh = rep_shuffle(&star1(), &star1(), 16).unwrap();
        for w in rep_words(&sh, 4) {
            assert_eq!(zero.coefficient(&w).unwrap(), sh.coefficient(&w).unwrap());
        }
        let c = p("x1 x0 - 2 x[1,2] + 1");
        let d = p("3 x2 + x1 x1");
        let rc = rep_from_polynomial(&c, &[]).unwrap();
        let rd = rep_from_polynomial(&d, &[]).unwrap();
        for theta in [rat_int(1), rat_int(-1)] {
            let e = rep_qshuffle(&rc, &rd, &theta, 256).unwrap();
            let expected = qsh_series(&c, &d, &theta, 5).unwrap();
            assert!(e.to_series(5).unwrap().agrees_with(&expected));
        }
    }

    #[test]
    fn growth_bounds() {
        assert_eq!(growth_bound(&star1()), (rat_int(1), rat_int(1)));
        assert_eq!(growth_bound(&rep_scale(&rat_int(3), &star1())).0, rat_int(3));
        let r = rep_from_polynomial(&p("5 x1 x0 - 2 x0 + 1"), &[]).unwrap();
        let (k, m) = growth_bound(&r);
        for w in rep_words(&r, 5) {
            let c = r.coefficient(&w).unwrap()[0].clone();
            assert!(num_traits::Signed::abs(&c) <= k.clone() * num_traits::pow(m.clone(), w.len()));
        }
    }

    #[test]
    fn stability_witness() {
        let r = rep_from_polynomial(&p("x1 x0 - 2 x0 x0 + 1"), &[x(1)]).unwrap();
        let (rank, stable) = shift_stable_rank(&r).unwrap();
        assert!(stable);
        assert!(rank <= r.dim());
    }
}
