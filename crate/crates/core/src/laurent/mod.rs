//! Sparse multivariate Laurent polynomials and the logarithmic form `ω = dlog(f^s x^ν)`.
//!
//! Variables are indexed from 0 in the API; the text grammar names them `x1..xn`
//! (with `x, y, z` accepted when `n ≤ 3`).

mod integrand;
mod json;
mod text;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::coeff::{Coeff, QComplex};
use crate::error::{Error, Result};

pub use integrand::IntegrandSpec;
pub use json::{literal_from_json, literal_to_json};
pub use text::{infer_nvars, parse_literal};

/// Exponent vector of a monomial.
pub type Exponent = Vec<i64>;

/// Graded lexicographic order: total degree first, ties broken lexicographically.
pub fn grlex_cmp(a: &[i64], b: &[i64]) -> Ordering {
    let (da, db): (i64, i64) = (a.iter().sum(), b.iter().sum());
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Sparse Laurent polynomial; no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<C = Complex64> {
    nvars: usize,
    terms: BTreeMap<Exponent, C>,
}

/// Exact-coefficient polynomial.
pub type QPoly = LaurentPoly<QComplex>;

impl<C: Coeff> LaurentPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    /// `c·x^exp`, with `nvars = exp.len()`.
    pub fn monomial(exp: Exponent, c: C) -> Self {
        let mut p = Self::zero(exp.len());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The coordinate function `x_i`.
    pub fn variable(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars });
        }
        let mut exp = vec![0; nvars];
        exp[i] = 1;
        Ok(Self::monomial(exp, C::one()))
    }

    /// Sums the given terms, dropping exact zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, C)>,
    {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: exp.len() });
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: Exponent, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Same as [`is_zero`](Self::is_zero).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// No negative exponents.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&a| a >= 0))
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    /// Terms in descending graded-lex order.
    pub fn terms_grlex_desc(&self) -> Vec<(&Exponent, &C)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| grlex_cmp(b.0, a.0));
        t
    }

    pub fn support(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.keys()
    }

    pub fn coeff(&self, exp: &[i64]) -> Option<&C> {
        self.terms.get(exp)
    }

    /// Largest total degree of a term, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Componentwise minimum of the exponents (zero vector for the zero polynomial).
    pub fn min_exponents(&self) -> Exponent {
        let mut m: Option<Exponent> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(m) => m.iter().zip(e).map(|(a, b)| (*a).min(*b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    fn check_point<T>(&self, x: &[T], is_zero: impl Fn(&T) -> bool) -> Result<()> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        for (i, xi) in x.iter().enumerate() {
            if is_zero(xi) && self.terms.keys().any(|e| e[i] < 0) {
                return Err(Error::ZeroCoordinate { index: i });
            }
        }
        Ok(())
    }

    /// `Σ c_α x^α` in double precision.
    pub fn evaluate(&self, x: &[Complex64]) -> Result<Complex64> {
        self.check_point(x, |v| *v == Complex64::new(0.0, 0.0))?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(e, c)| e.iter().zip(x).fold(c.to_c64(), |acc, (&a, xi)| acc * xi.powi(a as i32))).sum()
    }

    /// Evaluation inside the coefficient ring itself (exact for rational coefficients).
    pub fn evaluate_in(&self, x: &[C]) -> Result<C> {
        self.check_point(x, |v| v.is_zero())?;
        let mut total = C::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (&a, xi) in e.iter().zip(x) {
                term = term * ring_pow(xi, a);
            }
            total = total + term;
        }
        Ok(total)
    }

    /// Formal partial derivative in variable `i`.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        let terms = self.terms.iter().filter(|(e, _)| e[i] != 0).map(|(e, c)| {
            let mut d = e.clone();
            d[i] -= 1;
            (d, c.clone() * C::from_int(e[i]))
        });
        Self::from_terms(self.nvars, terms)
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c.clone() * k.clone())))
            .expect("exponent lengths preserved")
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        assert_eq!(shift.len(), self.nvars, "shift length must equal nvars");
        let terms =
            self.terms.iter().map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone())).collect();
        LaurentPoly { nvars: self.nvars, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, C::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        LaurentPoly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
            .expect("exponent lengths preserved")
    }

    pub fn to_c64(&self) -> LaurentPoly<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }

    /// Exact copy when every coefficient is exact.
    pub fn to_exact(&self) -> Option<QPoly> {
        let terms: Option<Vec<_>> = self.terms.iter().map(|(e, c)| c.as_exact().map(|q| (e.clone(), q))).collect();
        terms.map(|t| QPoly::from_terms(self.nvars, t).expect("exponent lengths preserved"))
    }

    /// Leading term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Exponent, &C)> {
        self.terms.iter().max_by(|a, b| grlex_cmp(a.0, b.0))
    }

    /// Exact quotient `self / divisor` for polynomials, `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Result<Option<Self>> {
        if divisor.nvars != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: divisor.nvars });
        }
        if divisor.is_zero() {
            return Err(Error::InvalidInput("division by the zero polynomial".into()));
        }
        if !self.is_polynomial() || !divisor.is_polynomial() {
            return Err(Error::InvalidInput("exact division requires polynomials".into()));
        }
        let (lead_e, lead_c) = divisor.leading_term().map(|(e, c)| (e.clone(), c.clone())).expect("nonzero");
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((e, c)) = rem.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lead_e).any(|(a, b)| a < b) {
                return Ok(None);
            }
            let shift: Exponent = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
            let q = c / lead_c.clone();
            let step = divisor.shift(&shift).scale(&q);
            quot.add_term(shift, q);
            rem = &rem - &step;
        }
        Ok(Some(quot))
    }

    /// Parses the text grammar in `nvars` variables.
    pub fn parse(text: &str, nvars: usize) -> Result<Self> {
        text::parse(text, nvars)
    }

    /// Canonical text, descending graded-lex.
    pub fn format(&self) -> String {
        text::format(self)
    }

    /// `{"nvars": n, "terms": [{"exp": [..], "re": r, "im": i}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        json::poly_to_json(self)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        json::poly_from_json(v)
    }
}

fn ring_pow<C: Coeff>(x: &C, a: i64) -> C {
    let mut base = if a < 0 { C::one() / x.clone() } else { x.clone() };
    let mut k = a.unsigned_abs();
    let mut acc = C::one();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        k >>= 1;
    }
    acc
}

impl<C: Coeff> std::fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.format())
    }
}

impl<C: Coeff> Add for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;

    fn add(self, rhs: Self) -> LaurentPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "adding polynomials in different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;

    fn sub(self, rhs: Self) -> LaurentPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "subtracting polynomials in different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;

    fn mul(self, rhs: Self) -> LaurentPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "multiplying polynomials in different rings");
        let mut out = LaurentPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;

    fn neg(self) -> LaurentPoly<C> {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect();
        LaurentPoly { nvars: self.nvars, terms }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<C: Coeff> $tr for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $m(self, rhs: Self) -> LaurentPoly<C> {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<C: Coeff> Neg for LaurentPoly<C> {
    type Output = LaurentPoly<C>;

    fn neg(self) -> LaurentPoly<C> {
        -&self
    }
}
