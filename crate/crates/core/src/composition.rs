//! Composition products and the output feedback group.
//!
//! For `d` with `m` components:
//!
//! * `c ∘ d = Σ_η (c,η) ψ_d(η)(1)`, `ψ_d(x_i)(e) = x0 (d_i ⧢ e)`, `d_0 = 1`;
//! * `c ∘̃ d = Σ_η (c,η) φ_d(η)(1)`, `φ_d(x_i)(e) = x_i e + x0 (d_i ⧢ e)`, `d_0 = 0`.
//!
//! Both are computed by recursion on the first letter of `c`; the letter-map
//! forms [`psi_apply`] and [`phi_apply`] give an independent route used by the
//! tests. Group elements `δ + c` are stored by their body `c`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{Series, Truncation};
use crate::shuffle::shuffle_series;
use crate::words::{x, Letter, Word};

fn check_letters<C: Scalar>(c: &Series<C>, m: usize) -> Result<()> {
    for l in c.letters() {
        match l.base_index() {
            Some(i) if i as usize <= m => {}
            _ => return Err(Error::ForeignLetter(l.to_string())),
        }
    }
    Ok(())
}

fn base_truncation<C: Scalar>(c: &Series<C>, d: &Series<C>, degree: usize) -> Truncation {
    Truncation::At(degree).min(c.truncation()).min(d.truncation().plus(1))
}

fn constant_part<C: Scalar>(c: &Series<C>, t: Truncation) -> Series<C> {
    let mut out = Series::zero(c.ell()).with_truncation(t);
    out.add_term(Word::empty(), c.coeff_unchecked(&Word::empty()));
    out
}

struct Composer<C> {
    d: Vec<Series<C>>,
    modified: bool,
}

impl<C: Scalar> Composer<C> {
    fn new(c: &Series<C>, d: &Series<C>, modified: bool) -> Result<Composer<C>> {
        check_letters(c, d.ell())?;
        Ok(Composer { d: d.components(), modified })
    }

    fn run(&self, c: &Series<C>, t: Truncation) -> Result<Series<C>> {
        let mut out = constant_part(c, t);
        let degree = t.limit().expect("composition is always truncated");
        if degree == 0 || c.is_zero() {
            return Ok(out);
        }
        for i in 0..=self.d.len() {
            let xi = x(i as u32);
            let ci = c.left_shift(xi);
            if ci.is_zero() {
                continue;
            }
            let inner = self.run(&ci, t.minus(1))?;
            if i == 0 {
                out = out.add(&inner.prefix_letter(xi))?;
                continue;
            }
            if self.modified {
                out = out.add(&inner.prefix_letter(xi))?;
            }
            let fed = shuffle_series(&self.d[i - 1], &inner, degree - 1)?;
            out = out.add(&fed.prefix_letter(x(0)))?;
        }
        Ok(out)
    }
}

/// `c ∘ d`, truncated to word length `degree`.
pub fn compose<C: Scalar>(c: &Series<C>, d: &Series<C>, degree: usize) -> Result<Series<C>> {
    Composer::new(c, d, false)?.run(c, base_truncation(c, d, degree))
}

/// `c ∘̃ d`, truncated to word length `degree`.
pub fn mod_compose<C: Scalar>(c: &Series<C>, d: &Series<C>, degree: usize) -> Result<Series<C>> {
    Composer::new(c, d, true)?.run(c, base_truncation(c, d, degree))
}

fn letter_index(l: Letter, m: usize) -> Result<usize> {
    match l.base_index() {
        Some(i) if i as usize <= m => Ok(i as usize),
        _ => Err(Error::ForeignLetter(l.to_string())),
    }
}

/// `ψ_d(η)(e)`; letters act right to left, `ψ_d(x_i η')= ψ_d(x_i) ψ_d(η')`.
pub fn psi_apply<C: Scalar>(d: &Series<C>, eta: &Word, e: &Series<C>, degree: usize) -> Result<Series<C>> {
    let d = d.components();
    let mut cur = e.truncate(degree);
    for &l in eta.letters().iter().rev() {
        let i = letter_index(l, d.len())?;
        cur = if i == 0 {
            cur.prefix_letter(x(0))
        } else {
            shuffle_series(&d[i - 1], &cur, degree)?.prefix_letter(x(0))
        }
        .truncate(degree);
    }
    Ok(cur)
}

/// `φ_d(η)(e)` with `φ_d(x_i)(e) = x_i e + x0 (d_i ⧢ e)` and `d_0 = 0`.
pub fn phi_apply<C: Scalar>(d: &Series<C>, eta: &Word, e: &Series<C>, degree: usize) -> Result<Series<C>> {
    let d = d.components();
    let mut cur = e.truncate(degree);
    for &l in eta.letters().iter().rev() {
        let i = letter_index(l, d.len())?;
        let direct = cur.prefix_letter(l);
        cur = if i == 0 {
            direct
        } else {
            direct.add(&shuffle_series(&d[i - 1], &cur, degree)?.prefix_letter(x(0)))?
        }
        .truncate(degree);
    }
    Ok(cur)
}

fn sum_letter_maps<C: Scalar>(
    c: &Series<C>,
    d: &Series<C>,
    degree: usize,
    apply: fn(&Series<C>, &Word, &Series<C>, usize) -> Result<Series<C>>,
) -> Result<Series<C>> {
    let t = base_truncation(c, d, degree);
    let one = Series::one(1).with_truncation(t);
    let mut out = Series::zero(c.ell()).with_truncation(t);
    for (eta, v) in c.terms() {
        if !t.allows(eta.len()) {
            continue;
        }
        let image = apply(d, eta, &one, degree)?;
        let coeff = Series::constant(v.clone());
        out = out.add(&image.cat_product(&coeff)?.with_truncation(t))?;
    }
    Ok(out)
}

/// `c ∘ d` summed word by word through [`psi_apply`].
pub fn compose_via_psi<C: Scalar>(c: &Series<C>, d: &Series<C>, degree: usize) -> Result<Series<C>> {
    check_letters(c, d.ell())?;
    sum_letter_maps(c, d, degree, psi_apply)
}

/// `c ∘̃ d` summed word by word through [`phi_apply`].
pub fn mod_compose_via_phi<C: Scalar>(c: &Series<C>, d: &Series<C>, degree: usize) -> Result<Series<C>> {
    check_letters(c, d.ell())?;
    sum_letter_maps(c, d, degree, phi_apply)
}

/// `δ + body`; the zero body is the group unit `δ`.
#[derive(Clone, PartialEq)]
pub struct GroupElement<C> {
    pub body: Series<C>,
}

impl<C: Scalar> std::fmt::Debug for GroupElement<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "δ + {:?}", self.body)
    }
}

impl<C: Scalar> GroupElement<C> {
    pub fn new(body: Series<C>) -> GroupElement<C> {
        GroupElement { body }
    }

    pub fn identity(m: usize) -> GroupElement<C> {
        GroupElement { body: Series::zero(m) }
    }

    pub fn m(&self) -> usize {
        self.body.ell()
    }

    /// `c_δ ∘ d_δ = δ + d + c ∘̃ d`.
    pub fn product(&self, other: &GroupElement<C>, degree: usize) -> Result<GroupElement<C>> {
        group_product(self, other, degree)
    }

    pub fn inverse(&self, degree: usize) -> Result<GroupElement<C>> {
        Ok(GroupElement::new(comp_inverse(&self.body, degree)?))
    }
}

pub fn group_product<C: Scalar>(c: &GroupElement<C>, d: &GroupElement<C>, degree: usize) -> Result<GroupElement<C>> {
    if c.m() != d.m() {
        return Err(Error::DimensionMismatch { expected: c.m(), found: d.m() });
    }
    let body = d.body.truncate(degree).add(&mod_compose(&c.body, &d.body, degree)?)?;
    Ok(GroupElement::new(body))
}

/// `c ∘ d_δ := c ∘̃ d`.
pub fn mixed_compose<C: Scalar>(c: &Series<C>, d: &GroupElement<C>, degree: usize) -> Result<Series<C>> {
    mod_compose(c, &d.body, degree)
}

/// Body of `(c_δ)^{-1}`: the fixed point of `e = (-c) ∘̃ e`, reached after
/// `degree + 1` iterations from `e = -c` because `∘̃` contracts in the
/// second argument.
pub fn comp_inverse<C: Scalar>(c: &Series<C>, degree: usize) -> Result<Series<C>> {
    let neg = c.neg();
    let mut e = neg.truncate(degree);
    for _ in 0..=degree {
        e = mod_compose(&neg, &e, degree)?;
    }
    Ok(e)
}

/// Output feedback product `c @ d = c ∘̃ ((-d) ∘ c)^{-1}`.
pub fn feedback<C: Scalar>(c: &Series<C>, d: &Series<C>, degree: usize) -> Result<Series<C>> {
    if c.ell() != d.ell() {
        return Err(Error::DimensionMismatch { expected: c.ell(), found: d.ell() });
    }
    let loop_body = compose(&d.neg(), c, degree)?;
    let inv = comp_inverse(&loop_body, degree)?;
    mixed_compose(c, &GroupElement::new(inv), degree)
}
