//! Linear relations `Σ C_{a,b}·I_{a,b} = 0` among the integrals `I_{a,b} = ∫ f^{s+a} x^{ν+b} dx/x`.
//!
//! Relations arise from `∇_ω φ = dφ + ω∧φ` for `(n−1)`-forms `φ`, or from the Mellin transform of
//! a first-order operator annihilating `f^s`. The two routes give the same relation when
//! `φ = Σ_i (−1)^{i−1} p_i dx_î/x` and `P = Σ_i p_i ∂_i + q`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::laurent::{literal_from_json, literal_to_json, IntegrandSpec, LaurentPoly};
use crate::twisted::{Cocycle, Integrator, TwistedCycle};

/// Relative tolerance of the annihilation identity for floating-point operators.
const ANNIHILATION_TOL: f64 = 1e-9;

/// Index `(a, b) ∈ ℤ^ℓ × ℤ^n` of an integral `I_{a,b}`.
pub type Shift = (Vec<i64>, Vec<i64>);

/// A finite combination `Σ C_{a,b}·I_{a,b}` asserted to vanish; no zero coefficient is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation<C = Complex64> {
    terms: BTreeMap<Shift, C>,
}

impl<C: Coeff> Default for Relation<C> {
    fn default() -> Self {
        Relation { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Relation<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Shift, C)>) -> Self {
        let mut r = Self::new();
        for (k, c) in terms {
            r.add(k, c);
        }
        r
    }

    /// Adds `c·I_{a,b}`, dropping the entry if it cancels.
    pub fn add(&mut self, key: Shift, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&Shift, &C)> {
        self.terms.iter()
    }

    pub fn get(&self, a: &[i64], b: &[i64]) -> Option<&C> {
        self.terms.get(&(a.to_vec(), b.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<&Shift> {
        self.terms.keys().collect()
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(s, c)| (s.clone(), c.clone() * k.clone())))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add(s.clone(), c.clone());
        }
        out
    }

    /// Scales so that the largest-magnitude coefficient becomes 1.
    pub fn normalize(&self) -> Self {
        let pivot = self.terms.values().fold(None::<&C>, |best, c| match best {
            Some(b) if b.to_c64().norm() >= c.to_c64().norm() => Some(b),
            _ => Some(c),
        });
        match pivot {
            Some(p) => self.scale(&(C::one() / p.clone())),
            None => self.clone(),
        }
    }

    pub fn to_c64(&self) -> Relation<Complex64> {
        Relation::from_terms(self.terms.iter().map(|(s, c)| (s.clone(), c.to_c64())))
    }

    /// `[{"a": [..], "b": [..], "re": .., "im": ..}]`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|((a, b), c)| {
                    let (re, im) = literal_to_json(c);
                    json!({"a": a, "b": b, "re": re, "im": im})
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let items = v.as_array().ok_or_else(|| Error::InvalidInput("a relation is a JSON array".into()))?;
        let mut r = Self::new();
        for item in items {
            let ints = |key: &str| -> Result<Vec<i64>> {
                item.get(key)
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidInput(format!("relation term needs an integer array \"{key}\"")))?
                    .iter()
                    .map(|x| {
                        x.as_i64().ok_or_else(|| Error::InvalidInput(format!("\"{key}\" entries must be integers")))
                    })
                    .collect()
            };
            let part = |key: &str| item.get(key).map(literal_from_json).transpose();
            let re = part("re")?.map(|l| C::from_literal(&l)).unwrap_or_else(C::zero);
            let im = part("im")?.map(|l| C::from_literal(&l)).unwrap_or_else(C::zero);
            let i = C::from_literal(&crate::laurent::parse_literal("i")?);
            r.add((ints("a")?, ints("b")?), re + im * i);
        }
        Ok(r)
    }

    /// Coefficients on the given cocycles (`b` has one entry, `n = 1`).
    pub fn from_cocycles(cocycles: &[Cocycle], coefficients: &[C]) -> Result<Self> {
        if cocycles.len() != coefficients.len() {
            return Err(Error::DimensionMismatch { expected: cocycles.len(), got: coefficients.len() });
        }
        Ok(Self::from_terms(cocycles.iter().zip(coefficients).map(|(c, k)| ((c.a.clone(), vec![c.b]), k.clone()))))
    }
}

/// True iff both relations have the same support and parallel coefficient vectors:
/// every `2×2` minor is at most `tol·max|r1|·max|r2|`.
pub fn relations_agree<C: Coeff, D: Coeff>(r1: &Relation<C>, r2: &Relation<D>, tol: f64) -> bool {
    let k1: Vec<&Shift> = r1.terms.keys().collect();
    let k2: Vec<&Shift> = r2.terms.keys().collect();
    if k1 != k2 {
        return false;
    }
    let v1: Vec<Complex64> = r1.terms.values().map(Coeff::to_c64).collect();
    let v2: Vec<Complex64> = r2.terms.values().map(Coeff::to_c64).collect();
    let scale = v1.iter().map(|z| z.norm()).fold(0.0, f64::max) * v2.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..v1.len() {
        for j in i + 1..v1.len() {
            if (v1[i] * v2[j] - v1[j] * v2[i]).norm() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// One summand `g·f^a x^b dx_k̂/x` of an `(n−1)`-form, where `dx_k̂/x = (Π_{i≠k} dx_i)/(x_1⋯x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormTerm<C = Complex64> {
    /// Omitted differential, 0-based.
    pub k: usize,
    pub g: LaurentPoly<C>,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

/// An `(n−1)`-form `Σ g·f^a x^b dx_k̂/x`; terms sharing `(k, a, b)` are merged.
///
/// For `n = 1`, `dx_1̂/x = 1/x`, so the 0-form `g` is the term `(k = 0, g, a = 0, b = 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogForm<C = Complex64> {
    n: usize,
    ell: usize,
    terms: BTreeMap<(usize, Vec<i64>, Vec<i64>), LaurentPoly<C>>,
}

impl<C: Coeff> LogForm<C> {
    pub fn new(n: usize, ell: usize, terms: Vec<FormTerm<C>>) -> Result<Self> {
        let mut form = LogForm { n, ell, terms: BTreeMap::new() };
        for t in terms {
            form.push(t)?;
        }
        Ok(form)
    }

    pub fn zero(n: usize, ell: usize) -> Self {
        LogForm { n, ell, terms: BTreeMap::new() }
    }

    fn push(&mut self, t: FormTerm<C>) -> Result<()> {
        if t.k >= self.n {
            return Err(Error::IndexOutOfRange { index: t.k, nvars: self.n });
        }
        if t.g.nvars() != self.n || t.b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: t.b.len().min(t.g.nvars()) });
        }
        if t.a.len() != self.ell {
            return Err(Error::DimensionMismatch { expected: self.ell, got: t.a.len() });
        }
        let key = (t.k, t.a, t.b);
        let g = match self.terms.remove(&key) {
            Some(old) => &old + &t.g,
            None => t.g,
        };
        if !g.is_zero() {
            self.terms.insert(key, g);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = FormTerm<C>> + '_ {
        self.terms.iter().map(|((k, a, b), g)| FormTerm { k: *k, g: g.clone(), a: a.clone(), b: b.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for t in other.terms() {
            out.push(t)?;
        }
        Ok(out)
    }

    /// The form `Σ_i (−1)^{i−1} p_i dx_î/x` attached to `P = Σ p_i ∂_i + q`.
    pub fn from_operator(op: &AnnOperator<C>, ell: usize) -> Result<Self> {
        let n = op.p.len();
        let terms = op
            .p
            .iter()
            .enumerate()
            .map(|(i, p)| FormTerm { k: i, g: if i % 2 == 0 { p.clone() } else { -p }, a: vec![0; ell], b: vec![0; n] })
            .collect();
        Self::new(n, ell, terms)
    }

    /// `{"terms": [{"k": 1-based, "g": poly, "a": [..], "b": [..]}]}`; `g` is grammar text or a JSON polynomial.
    pub fn from_json(v: &Value, n: usize, ell: usize) -> Result<Self> {
        let items = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("a form needs a \"terms\" array".into()))?;
        let mut terms = Vec::with_capacity(items.len());
        for item in items {
            let k = item
                .get("k")
                .and_then(Value::as_u64)
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::InvalidInput("form term needs a 1-based index \"k\"".into()))?
                as usize;
            let g = poly_from_value(item.get("g").unwrap_or(&json!("1")), n)?;
            let ints = |key: &str, len: usize| -> Result<Vec<i64>> {
                match item.get(key) {
                    None => Ok(vec![0; len]),
                    Some(x) => x
                        .as_array()
                        .ok_or_else(|| Error::InvalidInput(format!("\"{key}\" must be an integer array")))?
                        .iter()
                        .map(|e| {
                            e.as_i64().ok_or_else(|| Error::InvalidInput(format!("\"{key}\" entries must be integers")))
                        })
                        .collect(),
                }
            };
            terms.push(FormTerm { k: k - 1, g, a: ints("a", ell)?, b: ints("b", n)? });
        }
        Self::new(n, ell, terms)
    }
}

/// Polynomial from grammar text or the JSON object form.
pub fn poly_from_value<C: Coeff>(v: &Value, n: usize) -> Result<LaurentPoly<C>> {
    match v {
        Value::String(s) => LaurentPoly::parse(s, n),
        Value::Object(_) => {
            let p = LaurentPoly::from_json(v)?;
            if p.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.nvars() });
            }
            Ok(p)
        }
        Value::Number(_) => LaurentPoly::parse(&v.to_string(), n),
        other => Err(Error::InvalidInput(format!("expected a polynomial, got {other}"))),
    }
}

/// `P = Σ_i p_i ∂_i + q`, meant to annihilate `f^s` for a single `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnOperator<C = Complex64> {
    pub p: Vec<LaurentPoly<C>>,
    pub q: LaurentPoly<C>,
}

impl<C: Coeff> AnnOperator<C> {
    pub fn new(p: Vec<LaurentPoly<C>>, q: LaurentPoly<C>) -> Result<Self> {
        let n = q.nvars();
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
        if let Some(pi) = p.iter().find(|pi| pi.nvars() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: pi.nvars() });
        }
        Ok(AnnOperator { p, q })
    }

    /// `{"p": [poly, ..], "q": poly}`.
    pub fn from_json(v: &Value, n: usize) -> Result<Self> {
        let p = v
            .get("p")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("an operator needs a \"p\" array".into()))?
            .iter()
            .map(|x| poly_from_value(x, n))
            .collect::<Result<_>>()?;
        let q = match v.get("q") {
            Some(x) => poly_from_value(x, n)?,
            None => LaurentPoly::zero(n),
        };
        Self::new(p, q)
    }
}

fn check_spec_dims<C: Coeff>(n: usize, ell: usize, spec: &IntegrandSpec<C>) -> Result<()> {
    if n != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), got: n });
    }
    if ell != spec.ell() {
        return Err(Error::DimensionMismatch { expected: spec.ell(), got: ell });
    }
    Ok(())
}

/// Adds `poly·I_{a, b + β}` for every monomial `x^β` of `poly`.
fn add_poly<C: Coeff>(rel: &mut Relation<C>, poly: &LaurentPoly<C>, a: &[i64], b: &[i64]) {
    for (beta, c) in poly.terms() {
        let shift = b.iter().zip(beta).map(|(x, y)| x + y).collect();
        rel.add((a.to_vec(), shift), c.clone());
    }
}

/// Expands `∇_ω φ` in the cocycles `f^a x^b dx/x`.
///
/// A term `g f^a x^b dx_k̂/x` contributes `(−1)^{k−1}` times
/// `∂_k g·f^a x^b + Σ_j (a_j + s_j) g ∂_k f_j·f^{a−e_j} x^b + (b_k + ν_k − 1) g·f^a x^{b−e_k}`.
pub fn nabla_apply<C: Coeff>(phi: &LogForm<C>, spec: &IntegrandSpec<C>) -> Result<Relation<C>> {
    check_spec_dims(phi.n, phi.ell, spec)?;
    let mut rel = Relation::new();
    for t in phi.terms() {
        let sign = if t.k % 2 == 0 { C::one() } else { -C::one() };
        add_poly(&mut rel, &t.g.partial(t.k)?.scale(&sign), &t.a, &t.b);
        for (j, fj) in spec.f().iter().enumerate() {
            let weight = (C::from_int(t.a[j]) + spec.s()[j].clone()) * sign.clone();
            let mut a = t.a.clone();
            a[j] -= 1;
            add_poly(&mut rel, &(&t.g * &fj.partial(t.k)?).scale(&weight), &a, &t.b);
        }
        let weight = (C::from_int(t.b[t.k] - 1) + spec.nu()[t.k].clone()) * sign;
        let mut b = t.b.clone();
        b[t.k] -= 1;
        add_poly(&mut rel, &t.g.scale(&weight), &t.a, &b);
    }
    Ok(rel)
}

fn max_coeff<C: Coeff>(p: &LaurentPoly<C>) -> f64 {
    p.terms().map(|(_, c)| c.to_c64().norm()).fold(0.0, f64::max)
}

/// Relation from `M{P}•M{f^s} = 0` for `ℓ = 1`.
///
/// With the shift rule `σ^β ν = (ν + β) σ^β`, a monomial `c x^β` of `p_i` contributes
/// `−c (ν_i + β_i − 1)·I_{0, β−e_i}`, and `q f` contributes `Σ_δ (q f)_δ·I_{−1, δ}` since
/// `s Σ_i p_i ∂_i f = −q f`.
pub fn mellin_relation<C: Coeff>(op: &AnnOperator<C>, spec: &IntegrandSpec<C>) -> Result<Relation<C>> {
    if spec.ell() != 1 {
        return Err(Error::NotImplemented("operator relations need a single polynomial f".into()));
    }
    let n = spec.n();
    check_spec_dims(op.p.len(), 1, spec)?;
    if op.q.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, got: op.q.nvars() });
    }
    let f = &spec.f()[0];
    let s = &spec.s()[0];
    let qf = &op.q * f;
    let mut flow = LaurentPoly::zero(n);
    for (i, pi) in op.p.iter().enumerate() {
        flow = &flow + &(pi * &f.partial(i)?);
    }
    let flow = flow.scale(s);
    let defect = &qf + &flow;
    if !defect.is_zero() {
        let size = max_coeff(&defect);
        let exact = defect.terms().all(|(_, c)| c.as_exact().is_some());
        if exact || size > ANNIHILATION_TOL * max_coeff(&qf).max(max_coeff(&flow)).max(1.0) {
            return Err(Error::NotAnnihilating { defect: size });
        }
    }
    let mut rel = Relation::new();
    for (i, pi) in op.p.iter().enumerate() {
        for (beta, c) in pi.terms() {
            let mut b = beta.clone();
            b[i] -= 1;
            let weight = spec.nu()[i].clone() + C::from_int(beta[i] - 1);
            rel.add((vec![0], b), -(c.clone() * weight));
        }
    }
    add_poly(&mut rel, &qf, &[-1], &vec![0; n]);
    Ok(rel)
}

/// Evaluation of a relation on one cycle.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NumericCheck {
    pub residual: Complex64,
    /// `max |I_{a,b}(Γ)|` over the support.
    pub scale: f64,
    pub integrals: Vec<Complex64>,
}

impl NumericCheck {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual.norm()
        } else {
            self.residual.norm() / self.scale
        }
    }
}

/// `Σ C_{a,b}·I_{a,b}(Γ)` for `n = 1`.
pub fn verify_numeric<C: Coeff>(
    rel: &Relation<C>,
    cycle: &TwistedCycle,
    integrator: &Integrator,
) -> Result<NumericCheck> {
    if rel.is_empty() {
        return Ok(NumericCheck { residual: Complex64::new(0.0, 0.0), scale: 0.0, integrals: Vec::new() });
    }
    let cocycles: Vec<Cocycle> = rel
        .terms()
        .map(|((a, b), _)| {
            if b.len() != 1 {
                return Err(Error::NotImplemented("numerical verification needs n = 1".into()));
            }
            Ok(Cocycle { a: a.clone(), b: b[0] })
        })
        .collect::<Result<_>>()?;
    let l = integrator.integrate_loop(cycle, &cocycles)?;
    let residual = rel.terms().zip(&l.integrals).map(|((_, c), i)| c.to_c64() * i).sum();
    let scale = l.integrals.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(NumericCheck { residual, scale, integrals: l.integrals })
}
