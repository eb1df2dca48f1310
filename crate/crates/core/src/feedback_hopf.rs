//! Hopf algebra of coordinate functions of the output feedback group.
//!
//! `H` is the free commutative algebra on `a^k_η` (`1 ≤ k ≤ m`, `η` a base
//! word) graded by `deg a^k_η = 1 + ||η||`. The coproduct is built from the
//! right shifts `θ̃_j a^k_η = a^k_{η x_j}`, acting as derivations, through
//!
//! `Δ a^k_{η x_i} = Θ̃_i Δ a^k_η`,
//! `Θ̃_i = θ̃_i ⊗ id + id ⊗ θ̃_i + δ_{0i} Σ_j θ̃_j ⊗ a^j_e`,
//!
//! starting from the primitive `a^k_e`. Three antipodes are provided: the two
//! recursions from connectedness and the cancellation-free formula
//! `S a^k_η = (-1)^{|η|+1} Θ̃'_η a^k_e`, `θ̃'_l = -θ̃_l + δ_{0l} Σ_j a^j_e θ̃_j`.
//! Each algorithm has its own memo table so that comparing them is meaningful;
//! all three share the coproduct memo.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Rational};
use crate::series::{Series, Truncation};
use crate::words::{x, Alphabet, Word};

/// `a^k_η`, evaluating to `(c_k, η)`. Ordered by word, then output index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordinateFunction {
    pub word: Word,
    pub out_index: u32,
}

impl CoordinateFunction {
    pub fn new(out_index: u32, word: Word) -> CoordinateFunction {
        CoordinateFunction { word, out_index }
    }

    /// `a^k_e`
    pub fn unit_word(out_index: u32) -> CoordinateFunction {
        CoordinateFunction::new(out_index, Word::empty())
    }

    pub fn degree(&self) -> usize {
        1 + self.word.feedback_degree().expect("coordinate functions use base words")
    }

    fn shifted(&self, j: u32) -> CoordinateFunction {
        CoordinateFunction { word: self.word.append(x(j)), out_index: self.out_index }
    }
}

fn compact_word(w: &Word) -> String {
    if w.is_empty() {
        "e".into()
    } else {
        format!("{{{}}}", w.letters().iter().map(|l| l.to_string()).collect::<String>())
    }
}

impl fmt::Display for CoordinateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{}_{}", self.out_index, compact_word(&self.word))
    }
}

impl fmt::Debug for CoordinateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Commutative monomial; factors kept sorted in descending order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<CoordinateFunction>);

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn from_factors(mut factors: Vec<CoordinateFunction>) -> Monomial {
        factors.sort_by(|a, b| b.cmp(a));
        Monomial(factors)
    }

    pub fn factors(&self) -> &[CoordinateFunction] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(CoordinateFunction::degree).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial::from_factors(v)
    }

    pub fn times(&self, a: &CoordinateFunction) -> Monomial {
        let mut v = self.0.clone();
        v.push(a.clone());
        Monomial::from_factors(v)
    }

    /// `θ̃_j` as a derivation: one monomial per factor.
    fn theta(&self, j: u32) -> impl Iterator<Item = Monomial> + '_ {
        (0..self.0.len()).map(move |k| {
            let mut v = self.0.clone();
            v[k] = v[k].shifted(j);
            Monomial::from_factors(v)
        })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Rational>, key: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct HopfPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl HopfPolynomial {
    pub fn zero() -> HopfPolynomial {
        HopfPolynomial::default()
    }

    pub fn one() -> HopfPolynomial {
        HopfPolynomial::from_monomial(Monomial::unit(), Rational::one())
    }

    pub fn generator(a: CoordinateFunction) -> HopfPolynomial {
        HopfPolynomial::from_monomial(Monomial(vec![a]), Rational::one())
    }

    pub fn from_monomial(m: Monomial, c: Rational) -> HopfPolynomial {
        let mut p = HopfPolynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        accumulate(&mut self.terms, m, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &HopfPolynomial) -> HopfPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> HopfPolynomial {
        let mut out = HopfPolynomial::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn neg(&self) -> HopfPolynomial {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &HopfPolynomial) -> HopfPolynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &HopfPolynomial) -> HopfPolynomial {
        let mut out = HopfPolynomial::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    /// Counit: the coefficient of the unit monomial.
    pub fn counit(&self) -> Rational {
        self.terms.get(&Monomial::unit()).cloned().unwrap_or_else(Rational::zero)
    }

    /// Distinct degrees of the monomials present.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(Monomial::degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Sum of absolute coefficient values.
    pub fn abs_coefficient_sum(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let factors: Vec<Value> = m
                    .factors()
                    .iter()
                    .map(|a| json!({"out_index": a.out_index, "word": a.word.to_string()}))
                    .collect();
                json!({"coeff": c.to_string(), "factors": factors})
            })
            .collect();
        json!({ "terms": terms })
    }
}

/// `θ̃_j` extended as a derivation; `θ̃_j 1 = 0`.
pub fn theta_right(j: u32, p: &HopfPolynomial) -> HopfPolynomial {
    let mut out = HopfPolynomial::zero();
    for (m, c) in &p.terms {
        for mm in m.theta(j) {
            out.add_term(mm, c.clone());
        }
    }
    out
}

/// `θ̃'_l = -θ̃_l + δ_{0l} Σ_{j=1}^m a^j_e θ̃_j`.
pub fn theta_prime(l: u32, m: u32, p: &HopfPolynomial) -> HopfPolynomial {
    let mut out = theta_right(l, p).neg();
    if l == 0 {
        for j in 1..=m {
            let ae = HopfPolynomial::generator(CoordinateFunction::unit_word(j));
            out = out.add(&ae.mul(&theta_right(j, p)));
        }
    }
    out
}

impl fmt::Display for HopfPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            if m.is_unit() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag} {m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HopfPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Element of `H ⊗ H` as a combination of monomial pairs.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TensorPolynomial {
    terms: BTreeMap<(Monomial, Monomial), Rational>,
}

impl TensorPolynomial {
    pub fn zero() -> TensorPolynomial {
        TensorPolynomial::default()
    }

    pub fn unit() -> TensorPolynomial {
        let mut t = TensorPolynomial::zero();
        t.add_term(Monomial::unit(), Monomial::unit(), Rational::one());
        t
    }

    /// `p ⊗ q`
    pub fn pure(p: &HopfPolynomial, q: &HopfPolynomial) -> TensorPolynomial {
        let mut t = TensorPolynomial::zero();
        for (a, ca) in p.terms() {
            for (b, cb) in q.terms() {
                t.add_term(a.clone(), b.clone(), ca * cb);
            }
        }
        t
    }

    pub fn add_term(&mut self, l: Monomial, r: Monomial, c: Rational) {
        accumulate(&mut self.terms, (l, r), c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TensorPolynomial) -> TensorPolynomial {
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorPolynomial) -> TensorPolynomial {
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &TensorPolynomial) -> TensorPolynomial {
        let mut out = TensorPolynomial::zero();
        for ((l1, r1), c1) in &self.terms {
            for ((l2, r2), c2) in &other.terms {
                out.add_term(l1.mul(l2), r1.mul(r2), c1 * c2);
            }
        }
        out
    }

    /// `Θ̃_i` on `H ⊗ H`.
    pub fn big_theta(&self, i: u32, m: u32) -> TensorPolynomial {
        let mut out = TensorPolynomial::zero();
        for ((l, r), c) in &self.terms {
            for ll in l.theta(i) {
                out.add_term(ll, r.clone(), c.clone());
            }
            for rr in r.theta(i) {
                out.add_term(l.clone(), rr, c.clone());
            }
            if i == 0 {
                for j in 1..=m {
                    let rj = r.times(&CoordinateFunction::unit_word(j));
                    for ll in l.theta(j) {
                        out.add_term(ll, rj.clone(), c.clone());
                    }
                }
            }
        }
        out
    }

    /// `(ε ⊗ id)`
    pub fn counit_left(&self) -> HopfPolynomial {
        let mut p = HopfPolynomial::zero();
        for ((l, r), c) in &self.terms {
            if l.is_unit() {
                p.add_term(r.clone(), c.clone());
            }
        }
        p
    }

    /// `(id ⊗ ε)`
    pub fn counit_right(&self) -> HopfPolynomial {
        let mut p = HopfPolynomial::zero();
        for ((l, r), c) in &self.terms {
            if r.is_unit() {
                p.add_term(l.clone(), c.clone());
            }
        }
        p
    }

    /// Multiplication `H ⊗ H -> H` after applying `f ⊗ g`.
    pub fn contract(
        &self,
        mut f: impl FnMut(&Monomial) -> HopfPolynomial,
        mut g: impl FnMut(&Monomial) -> HopfPolynomial,
    ) -> HopfPolynomial {
        let mut out = HopfPolynomial::zero();
        for ((l, r), c) in &self.terms {
            out = out.add(&f(l).mul(&g(r)).scale(c));
        }
        out
    }
}

impl fmt::Display for TensorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((l, r), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            if !mag.is_one() {
                write!(f, "{mag} ")?;
            }
            write!(f, "{l} ⊗ {r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TensorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AntipodeAlgorithm {
    Left,
    Right,
    CancellationFree,
}

impl AntipodeAlgorithm {
    pub const ALL: [AntipodeAlgorithm; 3] =
        [AntipodeAlgorithm::Left, AntipodeAlgorithm::Right, AntipodeAlgorithm::CancellationFree];

    fn slot(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for AntipodeAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<AntipodeAlgorithm> {
        match s {
            "left" => Ok(AntipodeAlgorithm::Left),
            "right" => Ok(AntipodeAlgorithm::Right),
            "cfree" | "cancellation-free" => Ok(AntipodeAlgorithm::CancellationFree),
            _ => Err(Error::Parse(format!("unknown antipode algorithm {s:?}"))),
        }
    }
}

type Memo<T> = RwLock<HashMap<CoordinateFunction, Arc<T>>>;

/// The Hopf algebra for a fixed number of inputs `m`, with memo tables.
pub struct FeedbackHopf {
    m: u32,
    coproducts: Memo<TensorPolynomial>,
    antipodes: [Memo<HopfPolynomial>; 3],
    raw_terms: [RwLock<HashMap<CoordinateFunction, usize>>; 3],
}

static REGISTRY: Lazy<RwLock<HashMap<u32, Arc<FeedbackHopf>>>> = Lazy::new(Default::default);

/// Shared instance for `m` inputs.
pub fn hopf(m: u32) -> Arc<FeedbackHopf> {
    if let Some(h) = REGISTRY.read().get(&m) {
        return h.clone();
    }
    REGISTRY.write().entry(m).or_insert_with(|| Arc::new(FeedbackHopf::new(m))).clone()
}

impl FeedbackHopf {
    pub fn new(m: u32) -> FeedbackHopf {
        FeedbackHopf {
            m,
            coproducts: Default::default(),
            antipodes: Default::default(),
            raw_terms: Default::default(),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn check(&self, a: &CoordinateFunction) -> Result<()> {
        if a.out_index == 0 || a.out_index > self.m {
            return Err(Error::Domain(format!("output index {} outside 1..={}", a.out_index, self.m)));
        }
        for l in a.word.letters() {
            match l.base_index() {
                Some(i) if i <= self.m => {}
                _ => return Err(Error::ForeignLetter(l.to_string())),
            }
        }
        Ok(())
    }

    /// All coordinate functions `a^k_η` with `||η|| <= max_norm`.
    pub fn generators(&self, max_norm: usize) -> Vec<CoordinateFunction> {
        let words = Alphabet::new(self.m).words_up_to(max_norm);
        let mut out = Vec::new();
        for w in words {
            if w.feedback_degree().unwrap() <= max_norm {
                for k in 1..=self.m {
                    out.push(CoordinateFunction::new(k, w.clone()));
                }
            }
        }
        out
    }

    pub fn coproduct(&self, a: &CoordinateFunction) -> Result<Arc<TensorPolynomial>> {
        self.check(a)?;
        Ok(self.coproduct_unchecked(a))
    }

    fn coproduct_unchecked(&self, a: &CoordinateFunction) -> Arc<TensorPolynomial> {
        if let Some(hit) = self.coproducts.read().get(a) {
            return hit.clone();
        }
        let t = match a.word.letters().split_last() {
            None => {
                let g = HopfPolynomial::generator(a.clone());
                TensorPolynomial::pure(&g, &HopfPolynomial::one()).add(&TensorPolynomial::pure(&HopfPolynomial::one(), &g))
            }
            Some((&last, init)) => {
                let prev = CoordinateFunction::new(a.out_index, Word::from_letters(init.to_vec()));
                let i = last.base_index().expect("checked");
                self.coproduct_unchecked(&prev).big_theta(i, self.m)
            }
        };
        let t = Arc::new(t);
        self.coproducts.write().insert(a.clone(), t.clone());
        t
    }

    pub fn coproduct_monomial(&self, m: &Monomial) -> TensorPolynomial {
        let mut acc = TensorPolynomial::unit();
        for a in m.factors() {
            acc = acc.mul(&self.coproduct_unchecked(a));
        }
        acc
    }

    pub fn coproduct_poly(&self, p: &HopfPolynomial) -> Result<TensorPolynomial> {
        let mut out = TensorPolynomial::zero();
        for (m, c) in p.terms() {
            for a in m.factors() {
                self.check(a)?;
            }
            let mut t = self.coproduct_monomial(m);
            t.terms.values_mut().for_each(|v| *v *= c);
            out = out.add(&t);
        }
        Ok(out)
    }

    /// `Δ'(p) = Δ(p) - p ⊗ 1 - 1 ⊗ p`, defined on the augmentation ideal.
    pub fn reduced_coproduct(&self, p: &HopfPolynomial) -> Result<TensorPolynomial> {
        if !p.counit().is_zero() {
            return Err(Error::Domain("reduced coproduct needs a polynomial without constant term".into()));
        }
        let one = HopfPolynomial::one();
        Ok(self
            .coproduct_poly(p)?
            .sub(&TensorPolynomial::pure(p, &one))
            .sub(&TensorPolynomial::pure(&one, p)))
    }

    pub fn antipode(&self, algo: AntipodeAlgorithm, a: &CoordinateFunction) -> Result<Arc<HopfPolynomial>> {
        self.check(a)?;
        Ok(self.antipode_unchecked(algo, a))
    }

    pub fn antipode_left(&self, a: &CoordinateFunction) -> Result<Arc<HopfPolynomial>> {
        self.antipode(AntipodeAlgorithm::Left, a)
    }

    pub fn antipode_right(&self, a: &CoordinateFunction) -> Result<Arc<HopfPolynomial>> {
        self.antipode(AntipodeAlgorithm::Right, a)
    }

    pub fn antipode_cancellation_free(&self, a: &CoordinateFunction) -> Result<Arc<HopfPolynomial>> {
        self.antipode(AntipodeAlgorithm::CancellationFree, a)
    }

    /// Number of products formed (before collecting) by the recursion when
    /// `a` was first evaluated with `algo`.
    pub fn raw_term_count(&self, algo: AntipodeAlgorithm, a: &CoordinateFunction) -> Result<usize> {
        self.antipode(algo, a)?;
        Ok(self.raw_terms[algo.slot()].read().get(a).copied().unwrap_or(0))
    }

    fn antipode_unchecked(&self, algo: AntipodeAlgorithm, a: &CoordinateFunction) -> Arc<HopfPolynomial> {
        if let Some(hit) = self.antipodes[algo.slot()].read().get(a) {
            return hit.clone();
        }
        let (s, raw) = match algo {
            AntipodeAlgorithm::CancellationFree => match a.word.letters().split_last() {
                None => (HopfPolynomial::generator(a.clone()).neg(), 1),
                Some((&last, init)) => {
                    let prev = CoordinateFunction::new(a.out_index, Word::from_letters(init.to_vec()));
                    let sp = self.antipode_unchecked(algo, &prev);
                    let l = last.base_index().expect("checked");
                    let out = theta_prime(l, self.m, &sp).neg();
                    (out, sp.num_terms())
                }
            },
            AntipodeAlgorithm::Left | AntipodeAlgorithm::Right => {
                let g = HopfPolynomial::generator(a.clone());
                let reduced = self.reduced_coproduct(&g).expect("generator has no constant term");
                let mut out = g.neg();
                let mut raw = 1;
                for ((l, r), c) in reduced.terms() {
                    let prod = if algo == AntipodeAlgorithm::Left {
                        self.antipode_monomial(algo, l).mul(&HopfPolynomial::from_monomial(r.clone(), c.clone()))
                    } else {
                        HopfPolynomial::from_monomial(l.clone(), c.clone()).mul(&self.antipode_monomial(algo, r))
                    };
                    raw += prod.num_terms();
                    out = out.sub(&prod);
                }
                (out, raw)
            }
        };
        let s = Arc::new(s);
        self.antipodes[algo.slot()].write().insert(a.clone(), s.clone());
        self.raw_terms[algo.slot()].write().insert(a.clone(), raw);
        s
    }

    /// `S` is an algebra morphism because `H` is commutative.
    pub fn antipode_monomial(&self, algo: AntipodeAlgorithm, m: &Monomial) -> HopfPolynomial {
        let mut acc = HopfPolynomial::one();
        for a in m.factors() {
            acc = acc.mul(&self.antipode_unchecked(algo, a));
        }
        acc
    }

    pub fn antipode_poly(&self, algo: AntipodeAlgorithm, p: &HopfPolynomial) -> Result<HopfPolynomial> {
        let mut out = HopfPolynomial::zero();
        for (m, c) in p.terms() {
            for a in m.factors() {
                self.check(a)?;
            }
            out = out.add(&self.antipode_monomial(algo, m).scale(c));
        }
        Ok(out)
    }

    /// Unreduced expansion of the cancellation-free formula, one entry per
    /// derivation term. Returns `(collected, Σ|raw coefficients|)`.
    pub fn antipode_cfree_expansion(&self, a: &CoordinateFunction) -> Result<(HopfPolynomial, Rational)> {
        self.check(a)?;
        let mut raw: Vec<(Monomial, Rational)> = vec![(Monomial(vec![CoordinateFunction::unit_word(a.out_index)]), -Rational::one())];
        for &l in a.word.letters() {
            let l = l.base_index().unwrap();
            let mut next = Vec::new();
            for (m, c) in &raw {
                for mm in m.theta(l) {
                    next.push((mm, c.clone()));
                }
                if l == 0 {
                    for j in 1..=self.m {
                        for mm in m.theta(j) {
                            next.push((mm.times(&CoordinateFunction::unit_word(j)), -c.clone()));
                        }
                    }
                }
            }
            raw = next;
        }
        let raw_sum: Rational = raw.iter().map(|(_, c)| c.abs()).sum();
        let mut p = HopfPolynomial::zero();
        for (m, c) in raw {
            p.add_term(m, c);
        }
        Ok((p, raw_sum))
    }

    /// `(Φ_c ⋆ Φ_d)(p) = m (Φ_c ⊗ Φ_d) Δ p`.
    pub fn convolve_characters(&self, c: &Series<Rational>, d: &Series<Rational>, p: &HopfPolynomial) -> Result<Rational> {
        let t = self.coproduct_poly(p)?;
        let mut acc = Rational::zero();
        for ((l, r), k) in t.terms() {
            acc += k * monomial_eval(c, l)? * monomial_eval(d, r)?;
        }
        Ok(acc)
    }

    /// Body of `(c_δ)^{-1}` with `((c^{-1})_i, η) = Φ_c(S a^i_η)` for every
    /// word of length at most `degree`.
    pub fn group_inverse_via_antipode(&self, c: &Series<Rational>, degree: usize) -> Result<Series<Rational>> {
        if c.ell() != self.m as usize {
            return Err(Error::DimensionMismatch { expected: self.m as usize, found: c.ell() });
        }
        let t = c.truncation().min(Truncation::At(degree));
        let mut out = Series::zero(c.ell()).with_truncation(t);
        for eta in Alphabet::new(self.m).words_up_to(degree) {
            let mut coeff = Vec::with_capacity(c.ell());
            for i in 1..=self.m {
                let s = self.antipode_unchecked(AntipodeAlgorithm::CancellationFree, &CoordinateFunction::new(i, eta.clone()));
                coeff.push(character_eval(c, &s)?);
            }
            out.add_term(eta, coeff);
        }
        Ok(out)
    }
}

fn monomial_eval(c: &Series<Rational>, m: &Monomial) -> Result<Rational> {
    let mut acc = Rational::one();
    for a in m.factors() {
        let idx = a.out_index as usize;
        if idx == 0 || idx > c.ell() {
            return Err(Error::DimensionMismatch { expected: c.ell(), found: idx });
        }
        acc *= c.coefficient(&a.word)?.swap_remove(idx - 1);
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// Character `Φ_c(a^i_η) = (c_i, η)`, extended multiplicatively.
pub fn character_eval(c: &Series<Rational>, p: &HopfPolynomial) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (m, k) in p.terms() {
        acc += k * monomial_eval(c, m)?;
    }
    Ok(acc)
}

pub fn coproduct(a: &CoordinateFunction, m: u32) -> Result<TensorPolynomial> {
    Ok((*hopf(m).coproduct(a)?).clone())
}

pub fn antipode(algo: AntipodeAlgorithm, a: &CoordinateFunction, m: u32) -> Result<HopfPolynomial> {
    Ok((*hopf(m).antipode(algo, a)?).clone())
}

pub fn group_inverse_via_antipode(c: &Series<Rational>, degree: usize) -> Result<Series<Rational>> {
    hopf(c.ell() as u32).group_inverse_via_antipode(c, degree)
}

/// `Σ_k coefficient * a` helper for building expected polynomials.
pub fn poly(terms: &[(i64, &[(u32, &str)])]) -> HopfPolynomial {
    let mut p = HopfPolynomial::zero();
    for (c, factors) in terms {
        let fs = factors
            .iter()
            .map(|(k, w)| CoordinateFunction::new(*k, w.parse().expect("word literal")))
            .collect();
        p.add_term(Monomial::from_factors(fs), rat_int(*c));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(k: u32, w: &str) -> CoordinateFunction {
        CoordinateFunction::new(k, w.parse().unwrap())
    }

    fn g(k: u32, w: &str) -> HopfPolynomial {
        HopfPolynomial::generator(a(k, w))
    }

    #[test]
    fn right_shift_derivation() {
        assert_eq!(theta_right(1, &g(2, "e")), g(2, "x1"));
        assert!(theta_right(0, &HopfPolynomial::one()).is_zero());
        let prod = g(1, "e").mul(&g(2, "e"));
        assert_eq!(theta_right(1, &prod), g(1, "x1").mul(&g(2, "e")).add(&g(1, "e").mul(&g(2, "x1"))));
    }

    #[test]
    fn low_degree_coproducts() {
        let h = FeedbackHopf::new(2);
        let one = HopfPolynomial::one();
        let prim = |p: &HopfPolynomial| TensorPolynomial::pure(p, &one).add(&TensorPolynomial::pure(&one, p));
        assert_eq!(*h.coproduct(&a(1, "e")).unwrap(), prim(&g(1, "e")));
        let expected = prim(&g(2, "x0"))
            .add(&TensorPolynomial::pure(&g(2, "x1"), &g(1, "e")))
            .add(&TensorPolynomial::pure(&g(2, "x2"), &g(2, "e")));
        assert_eq!(*h.coproduct(&a(2, "x0")).unwrap(), expected);
        for j in 1..=2 {
            let w = format!("x{j}");
            assert!(h.reduced_coproduct(&g(1, &w)).unwrap().is_zero());
        }
        assert!(h.reduced_coproduct(&HopfPolynomial::one()).is_err());
        assert_eq!(h.coproduct_poly(&one).unwrap(), TensorPolynomial::unit());
        assert_eq!(h.coproduct_poly(&g(1, "e").mul(&g(2, "e"))).unwrap().num_terms(), 4);
    }

    #[test]
    fn coproduct_x0x0() {
        let h = FeedbackHopf::new(2);
        let d = h.coproduct(&a(1, "x0 x0")).unwrap();
        let one = HopfPolynomial::one();
        let mut expected = TensorPolynomial::pure(&g(1, "x0 x0"), &one).add(&TensorPolynomial::pure(&one, &g(1, "x0 x0")));
        for j in 1..=2u32 {
            let ej = g(j, "e");
            expected = expected
                .add(&TensorPolynomial::pure(&g(1, &format!("x{j} x0")), &ej))
                .add(&TensorPolynomial::pure(&g(1, &format!("x0 x{j}")), &ej))
                .add(&TensorPolynomial::pure(&g(1, &format!("x{j}")), &g(j, "x0")));
            for n in 1..=2u32 {
                expected = expected.add(&TensorPolynomial::pure(&g(1, &format!("x{j} x{n}")), &ej.mul(&g(n, "e"))));
            }
        }
        assert_eq!(*d, expected);
    }

    #[test]
    fn antipode_displays() {
        let h = FeedbackHopf::new(2);
        for algo in AntipodeAlgorithm::ALL {
            assert_eq!(*h.antipode(algo, &a(1, "x2")).unwrap(), g(1, "x2").neg());
            let s = h.antipode(algo, &a(1, "x0")).unwrap();
            assert_eq!(s.to_string(), "-a^1_{x0} + a^1_{x1} a^1_e + a^1_{x2} a^2_e");
        }
    }

    #[test]
    fn cancellation_free_expansion_has_no_cancellations() {
        let h = FeedbackHopf::new(2);
        for cf in h.generators(6) {
            let (p, raw) = h.antipode_cfree_expansion(&cf).unwrap();
            assert_eq!(p, *h.antipode_cancellation_free(&cf).unwrap());
            assert_eq!(raw, p.abs_coefficient_sum(), "{cf}");
        }
    }

    #[test]
    fn antipodes_agree_low_degree() {
        let h = FeedbackHopf::new(2);
        for cf in h.generators(4) {
            let l = h.antipode_left(&cf).unwrap();
            let r = h.antipode_right(&cf).unwrap();
            let c = h.antipode_cancellation_free(&cf).unwrap();
            assert_eq!(l, r, "{cf}");
            assert_eq!(r, c, "{cf}");
            assert_eq!(l.degrees(), vec![cf.degree()]);
        }
    }

    #[test]
    fn characters() {
        let c = crate::io::parse_series::<Rational>("3 x1").unwrap();
        assert_eq!(character_eval(&c, &HopfPolynomial::one()).unwrap(), rat_int(1));
        assert_eq!(character_eval(&c, &g(1, "x1")).unwrap(), rat_int(3));
        let c = crate::io::parse_series::<Rational>("[2, -1] + [1, 5] x1 + [0, 1/2] x0 x2").unwrap();
        let p = g(1, "e").add(&g(2, "x1").scale(&rat_int(3)));
        let q = g(2, "x0 x2").mul(&g(1, "x1"));
        assert_eq!(
            character_eval(&c, &p.mul(&q)).unwrap(),
            character_eval(&c, &p).unwrap() * character_eval(&c, &q).unwrap()
        );
        assert!(character_eval(&c.truncate(1), &q).is_err());
    }

    #[test]
    fn inverse_of_x1() {
        let c = crate::io::parse_series::<Rational>("x1").unwrap();
        let inv = group_inverse_via_antipode(&c, 4).unwrap();
        for k in 0..=3 {
            let w = Word::power(x(0), k).append(x(1));
            let sign = if k % 2 == 0 { -1 } else { 1 };
            assert_eq!(inv.coeff1(&w).unwrap(), rat_int(sign));
        }
        assert!(group_inverse_via_antipode(&Series::zero(2), 3).unwrap().is_zero());
    }

    #[test]
    fn text_and_json() {
        let p = poly(&[(-2, &[(1, "x0 x1")]), (1, &[(1, "e"), (2, "x1")]), (3, &[])]);
        assert_eq!(p.to_string(), "3 - 2 a^1_{x0x1} + a^2_{x1} a^1_e");
        assert_eq!(p.to_json()["terms"].as_array().unwrap().len(), 3);
    }
}
