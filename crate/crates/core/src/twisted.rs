//! Numerical pairing of twisted cycles with cocycles `f^a x^b dx/x` for one variable.
//!
//! A cycle is a triangle `ABC` carrying a branch of `φ = f^s x^ν`. The branch is continued along
//! each edge by an Euler step on `dφ/dx = ω φ` followed by Newton corrections onto the curve
//! `y^k = Π f_j^{k s_j} x^{k ν}`, and the integrals are summed with the trapezoidal rule.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{q_from_f64, q_ratio, rationalize, Coeff, QComplex};
use crate::error::{Error, Result};
use crate::laurent::IntegrandSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Largest denominator accepted when rationalizing a floating-point exponent.
const EXPONENT_DENOMINATOR_CAP: u64 = 1_000_000;
const KERNEL_DENOMINATOR_CAP: u64 = 64;
/// Distance to a small-denominator rational below which a kernel entry is reported as exact.
const KERNEL_RATIONAL_TOL: f64 = 1e-4;

/// Triangle `A, B, C` with the branch value `φ_AB(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistedCycle {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub phi: Complex64,
}

/// The cocycle `f^a x^b dx/x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cocycle {
    pub a: Vec<i64>,
    pub b: i64,
}

/// Curve `F(x, y) = y^k − Π f_j(x)^{k s_j} x^{k ν}` through the branches of `f^s x^ν`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchCurve {
    pub k: i64,
    pub ks: Vec<i64>,
    pub knu: i64,
}

fn exact_real_exponent<C: Coeff>(c: &C, what: &str) -> Result<(i64, i64)> {
    let q = match c.as_exact() {
        Some(q) => q,
        None => {
            let z = c.to_c64();
            let tol = 1e-12 * z.re.abs().max(1.0);
            if z.im.abs() > tol {
                return Err(Error::NotRational(format!("{what} = {z} is not real")));
            }
            let (p, d) = rationalize(z.re, EXPONENT_DENOMINATOR_CAP, tol)
                .ok_or_else(|| Error::NotRational(format!("{what} = {} has no small-denominator form", z.re)))?;
            QComplex::new(q_ratio(p, d), q_ratio(0, 1))
        }
    };
    if !num_traits::Zero::is_zero(&q.im) {
        return Err(Error::NotRational(format!("{what} is not real")));
    }
    let to_i64 = |v: &num_bigint::BigInt| {
        i64::try_from(v).map_err(|_| Error::NotRational(format!("{what} has an oversized numerator or denominator")))
    };
    Ok((to_i64(q.re.numer())?, to_i64(q.re.denom())?))
}

impl BranchCurve {
    /// Requires real rational exponents; `k` is the least common denominator.
    pub fn from_spec<C: Coeff>(spec: &IntegrandSpec<C>) -> Result<Self> {
        require_univariate(spec.n())?;
        let mut fracs = Vec::with_capacity(spec.ell() + 1);
        for (j, s) in spec.s().iter().enumerate() {
            fracs.push(exact_real_exponent(s, &format!("s_{}", j + 1))?);
        }
        fracs.push(exact_real_exponent(&spec.nu()[0], "ν")?);
        let k = fracs.iter().fold(1i64, |acc, (_, d)| acc.lcm(d));
        let scaled: Vec<i64> = fracs.iter().map(|(p, d)| p * (k / d)).collect();
        let (ks, knu) = scaled.split_at(spec.ell());
        Ok(BranchCurve { k, ks: ks.to_vec(), knu: knu[0] })
    }

    /// `Π f_j(x)^{k s_j} x^{k ν}`.
    pub fn rhs(&self, spec: &IntegrandSpec<Complex64>, x: Complex64) -> Result<Complex64> {
        let fv = spec.f_values(&[x])?;
        Ok(fv.iter().zip(&self.ks).fold(x.powi(self.knu as i32), |acc, (fx, &e)| acc * fx.powi(e as i32)))
    }

    pub fn residual(&self, spec: &IntegrandSpec<Complex64>, x: Complex64, y: Complex64) -> Result<Complex64> {
        Ok(y.powi(self.k as i32) - self.rhs(spec, x)?)
    }
}

fn require_univariate(n: usize) -> Result<()> {
    if n != 1 {
        return Err(Error::NotImplemented(format!("twisted pairings need n = 1, got n = {n}")));
    }
    Ok(())
}

/// One Euler step on `dy/dx = ω(x) y`.
pub fn euler_step(
    x: Complex64,
    y: Complex64,
    dx: Complex64,
    omega: impl Fn(Complex64) -> Complex64,
) -> (Complex64, Complex64) {
    (x + dx, (1.0 + omega(x) * dx) * y)
}

/// One Newton step on `y ↦ F(x, y)`.
pub fn newton_step(
    y: Complex64,
    x: Complex64,
    curve: &BranchCurve,
    spec: &IntegrandSpec<Complex64>,
) -> Result<Complex64> {
    if curve.k > 1 && y == ZERO {
        return Err(Error::BranchCollapse(x));
    }
    let f = curve.residual(spec, x, y)?;
    Ok(y - f / (curve.k as f64 * y.powi(curve.k as i32 - 1)))
}

/// `h·(y_1/2 + y_2 + … + y_{N−1} + y_N/2)`.
pub fn integrate_trapezoidal(values: &[Complex64], h: Complex64) -> Result<Complex64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("the trapezoidal rule needs at least 2 nodes, got {n}")));
    }
    let inner: Complex64 = values[1..n - 1].iter().sum();
    Ok(h * (values[0] * 0.5 + inner + values[n - 1] * 0.5))
}

/// `x^ν Π f_j(x)^{s_j}` with principal logarithms.
pub fn principal_branch(spec: &IntegrandSpec<Complex64>, x: Complex64) -> Result<Complex64> {
    require_univariate(spec.n())?;
    let fv = spec.f_values(&[x])?;
    Ok(fv.iter().zip(spec.s()).fold(x.powc(spec.nu()[0]), |acc, (fx, s)| acc * fx.powc(*s)))
}

/// Integration parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegrationSettings {
    /// Nodes per segment, `N ≥ 2`.
    pub nodes: usize,
    pub newton_steps: usize,
    /// Minimum distance between a segment and any zero of `x·Π f_j`.
    pub guard_radius: f64,
    /// Largest accepted `|φ_CA(A) − φ_AB(A)|`, relative to `max(1, |φ_AB(A)|)`.
    pub closure_tol: f64,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings { nodes: 1000, newton_steps: 4, guard_radius: 1e-8, closure_tol: 1e-6 }
    }
}

/// Nodes and tracked branch values along one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedSegment {
    pub nodes: Vec<Complex64>,
    pub values: Vec<Complex64>,
    /// `max_i |F(x_i, y_i)|`.
    pub max_residual: f64,
}

/// Segment integrals per cocycle, with the branch values for chaining.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentIntegral {
    pub integrals: Vec<Complex64>,
    pub segment: TrackedSegment,
}

/// Loop integrals per cocycle and the closure residual `|φ_CA(A) − φ_AB(A)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopIntegral {
    pub integrals: Vec<Complex64>,
    pub closure_residual: f64,
    pub max_branch_residual: f64,
}

/// Branch tracker for one family `f^s x^ν` with `n = 1`.
#[derive(Debug, Clone)]
pub struct Integrator {
    spec: IntegrandSpec<Complex64>,
    curve: BranchCurve,
    poles: Vec<Complex64>,
    settings: IntegrationSettings,
}

/// Roots of a univariate Laurent polynomial on `ℂ*`, as eigenvalues of a companion matrix.
fn torus_roots(p: &crate::laurent::LaurentPoly<Complex64>) -> Vec<Complex64> {
    let low = p.min_exponents()[0];
    let high = p.support().map(|e| e[0]).max().unwrap_or(low);
    let d = (high - low) as usize;
    if d == 0 {
        return Vec::new();
    }
    let coef = |k: usize| p.coeff(&[low + k as i64]).copied().unwrap_or(ZERO);
    let lead = coef(d);
    let m = DMatrix::from_fn(d, d, |i, j| {
        if i == 0 {
            -coef(d - 1 - j) / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    m.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
}

fn distance_to_segment(p: Complex64, s: Complex64, t: Complex64) -> f64 {
    let d = t - s;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - s).norm();
    }
    let u = ((p - s) * d.conj()).re / len2;
    (p - (s + d * u.clamp(0.0, 1.0))).norm()
}

impl Integrator {
    pub fn new<C: Coeff>(spec: &IntegrandSpec<C>, settings: IntegrationSettings) -> Result<Self> {
        require_univariate(spec.n())?;
        if settings.nodes < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 nodes per segment, got {}", settings.nodes)));
        }
        let curve = BranchCurve::from_spec(spec)?;
        let spec = spec.to_numeric();
        let mut poles = vec![ZERO];
        for fj in spec.f() {
            poles.extend(torus_roots(fj));
        }
        Ok(Integrator { spec, curve, poles, settings })
    }

    pub fn curve(&self) -> &BranchCurve {
        &self.curve
    }

    pub fn spec(&self) -> &IntegrandSpec<Complex64> {
        &self.spec
    }

    pub fn settings(&self) -> &IntegrationSettings {
        &self.settings
    }

    /// Zeros of `x·Π f_j` guarded against.
    pub fn singularities(&self) -> &[Complex64] {
        &self.poles
    }

    fn guard(&self, s: Complex64, t: Complex64) -> Result<()> {
        for &p in &self.poles {
            let distance = distance_to_segment(p, s, t);
            if distance < self.settings.guard_radius {
                return Err(Error::SegmentHitsSingularity { point: p, distance });
            }
        }
        Ok(())
    }

    fn omega(&self, x: Complex64) -> Complex64 {
        self.spec.omega_components(&[x]).map(|w| w[0]).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    /// Branch values at `N` equidistant nodes from `sx` to `tx`, starting from `sy`.
    pub fn track_line_segment(&self, sx: Complex64, sy: Complex64, tx: Complex64) -> Result<TrackedSegment> {
        self.guard(sx, tx)?;
        let n = self.settings.nodes;
        let dx = (tx - sx) / (n - 1) as f64;
        let nodes: Vec<Complex64> = (0..n).map(|i| sx + dx * i as f64).collect();
        let mut values = Vec::with_capacity(n);
        values.push(sy);
        let mut max_residual: f64 = 0.0;
        if dx == ZERO {
            values.resize(n, sy);
            return Ok(TrackedSegment { nodes, values, max_residual });
        }
        let mut y = sy;
        for &x in &nodes[..n - 1] {
            let (x1, mut y1) = euler_step(x, y, dx, |z| self.omega(z));
            for _ in 0..self.settings.newton_steps {
                y1 = newton_step(y1, x1, &self.curve, &self.spec)?;
            }
            if !y1.is_finite() {
                return Err(Error::BranchCollapse(x1));
            }
            max_residual = max_residual.max(self.curve.residual(&self.spec, x1, y1)?.norm());
            values.push(y1);
            y = y1;
        }
        Ok(TrackedSegment { nodes, values, max_residual })
    }

    /// `∫_A^B φ f^a x^{b−1} dx` per cocycle, by the trapezoidal rule on the tracked branch.
    pub fn integrate_line_segment(
        &self,
        a: Complex64,
        phi_a: Complex64,
        b: Complex64,
        cocycles: &[Cocycle],
    ) -> Result<SegmentIntegral> {
        for c in cocycles {
            if c.a.len() != self.spec.ell() {
                return Err(Error::DimensionMismatch { expected: self.spec.ell(), got: c.a.len() });
            }
        }
        let segment = self.track_line_segment(a, phi_a, b)?;
        let h = (b - a) / (self.settings.nodes - 1) as f64;
        let fvals: Vec<Vec<Complex64>> =
            segment.nodes.iter().map(|&x| self.spec.f_values(&[x])).collect::<Result<_>>()?;
        let integrals = cocycles
            .iter()
            .map(|c| {
                let integrand: Vec<Complex64> = segment
                    .nodes
                    .iter()
                    .zip(&segment.values)
                    .zip(&fvals)
                    .map(|((&x, &y), fx)| {
                        let psi =
                            fx.iter().zip(&c.a).fold(x.powi((c.b - 1) as i32), |acc, (f, &e)| acc * f.powi(e as i32));
                        y * psi
                    })
                    .collect();
                integrate_trapezoidal(&integrand, h)
            })
            .collect::<Result<_>>()?;
        Ok(SegmentIntegral { integrals, segment })
    }

    /// Integrals over `AB + BC + CA` with chained branch values; fails when the branch does not close.
    pub fn integrate_loop(&self, cycle: &TwistedCycle, cocycles: &[Cocycle]) -> Result<LoopIntegral> {
        let mut totals = vec![ZERO; cocycles.len()];
        let mut phi = cycle.phi;
        let mut max_branch_residual: f64 = 0.0;
        for (s, t) in [(cycle.a, cycle.b), (cycle.b, cycle.c), (cycle.c, cycle.a)] {
            let seg = self.integrate_line_segment(s, phi, t, cocycles)?;
            totals.iter_mut().zip(&seg.integrals).for_each(|(acc, v)| *acc += v);
            phi = *seg.segment.values.last().expect("at least two nodes");
            max_branch_residual = max_branch_residual.max(seg.segment.max_residual);
        }
        let closure_residual = (phi - cycle.phi).norm();
        if closure_residual.is_nan() || closure_residual > self.settings.closure_tol * cycle.phi.norm().max(1.0) {
            return Err(Error::NotTwistedCycle { residual: closure_residual });
        }
        Ok(LoopIntegral { integrals: totals, closure_residual, max_branch_residual })
    }
}

/// `M_ij = I_{a(j), b(j)}(Γ_i)` with per-cycle metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingMatrix {
    pub entries: Vec<Vec<Complex64>>,
    pub nodes: usize,
    pub closure_residuals: Vec<f64>,
    pub cocycles: Vec<Cocycle>,
}

/// With no cocycles the loops are still tracked, so every row is empty but closure is checked.
pub fn pairing_matrix(integrator: &Integrator, cycles: &[TwistedCycle], cocycles: &[Cocycle]) -> Result<PairingMatrix> {
    if cycles.is_empty() {
        return Err(Error::InvalidInput("at least one cycle is required".into()));
    }
    let loops: Vec<LoopIntegral> =
        cycles.par_iter().map(|c| integrator.integrate_loop(c, cocycles)).collect::<Result<_>>()?;
    Ok(PairingMatrix {
        entries: loops.iter().map(|l| l.integrals.clone()).collect(),
        nodes: integrator.settings.nodes,
        closure_residuals: loops.iter().map(|l| l.closure_residual).collect(),
        cocycles: cocycles.to_vec(),
    })
}

/// A numerical kernel direction of `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelVector {
    /// Unit-norm right singular vector.
    pub raw: Vec<Complex64>,
    /// `raw` divided by its largest-magnitude entry.
    pub scaled: Vec<Complex64>,
    /// `scaled` as small-denominator rationals, when every entry is close to one.
    pub rational: Option<Vec<String>>,
    #[serde(skip)]
    pub exact: Option<Vec<QComplex>>,
}

fn rational_entry(z: Complex64) -> Option<QComplex> {
    let part = |v: f64| {
        if v.abs() <= KERNEL_RATIONAL_TOL {
            return Some(q_ratio(0, 1));
        }
        rationalize(v, KERNEL_DENOMINATOR_CAP, KERNEL_RATIONAL_TOL).map(|(p, q)| q_ratio(p, q))
    };
    Some(QComplex::new(part(z.re)?, part(z.im)?))
}

/// Text form of a Gaussian rational: `p/q`, `p/q i` or `a+bi`.
pub fn render_exact(q: &QComplex) -> String {
    use num_traits::{Signed, Zero};
    match (q.re.is_zero(), q.im.is_zero()) {
        (_, true) => q.re.to_string(),
        (true, false) => format!("{}i", q.im),
        (false, false) => {
            let sign = if q.im.is_negative() { '-' } else { '+' };
            format!("{}{sign}{}i", q.re, q.im.abs())
        }
    }
}

/// Singular values of `M`, largest first.
pub fn singular_values(m: &[Vec<Complex64>]) -> Vec<f64> {
    if m.first().is_none_or(Vec::is_empty) {
        return Vec::new();
    }
    let (_, sv, _) = svd_padded(m);
    let mut s = sv;
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn svd_padded(m: &[Vec<Complex64>]) -> (usize, Vec<f64>, DMatrix<Complex64>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let size = rows.max(cols);
    let a = DMatrix::from_fn(size, cols, |i, j| if i < rows { m[i][j] } else { ZERO });
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    (cols, svd.singular_values.iter().copied().collect(), v_t)
}

/// Right kernel of `M` from singular directions with `σ ≤ rel_tol·σ_max`.
pub fn nullspace(m: &[Vec<Complex64>], rel_tol: f64) -> Result<Vec<KernelVector>> {
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput("ragged matrix".into()));
    }
    if cols == 0 {
        return Ok(Vec::new());
    }
    let (_, sv, v_t) = svd_padded(m);
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let mut picked: Vec<(f64, usize)> =
        sv.iter().enumerate().filter(|(_, &s)| s <= rel_tol * sigma_max).map(|(i, &s)| (s, i)).collect();
    picked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(picked
        .into_iter()
        .map(|(_, i)| {
            let raw: Vec<Complex64> = (0..cols).map(|j| v_t[(i, j)].conj()).collect();
            let pivot = raw.iter().copied().fold(ZERO, |best, z| if z.norm() > best.norm() { z } else { best });
            let scaled: Vec<Complex64> = raw.iter().map(|z| z / pivot).collect();
            let exact: Option<Vec<QComplex>> = scaled.iter().map(|&z| rational_entry(z)).collect();
            KernelVector { rational: exact.as_ref().map(|v| v.iter().map(render_exact).collect()), raw, scaled, exact }
        })
        .collect())
}

/// Exact value of a finite double as a Gaussian rational.
pub fn exact_of(z: Complex64) -> Option<QComplex> {
    Some(QComplex::new(q_from_f64(z.re)?, q_from_f64(z.im)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_linear_factors() -> IntegrandSpec {
        let f = vec![LaurentPoly::parse("x - 1", 1).unwrap(), LaurentPoly::parse("x - 2", 1).unwrap()];
        IntegrandSpec::new(f, vec![c(0.5, 0.0); 2], vec![c(0.5, 0.0)]).unwrap()
    }

    fn cocycles() -> Vec<Cocycle> {
        vec![Cocycle { a: vec![-1, 0], b: 1 }, Cocycle { a: vec![0, -1], b: 1 }, Cocycle { a: vec![0, 0], b: 0 }]
    }

    fn cycle(spec: &IntegrandSpec, a: Complex64, b: Complex64, cc: Complex64) -> TwistedCycle {
        TwistedCycle { a, b, c: cc, phi: principal_branch(spec, a).unwrap() }
    }

    #[test]
    fn euler_steps() {
        let w = |x: Complex64| two_linear_factors().omega_components(&[x]).unwrap()[0];
        assert_eq!(euler_step(c(3.0, 0.0), c(1.0, 0.0), ZERO, w), (c(3.0, 0.0), c(1.0, 0.0)));
        assert_eq!(euler_step(c(3.0, 0.0), c(2.0, 1.0), c(0.1, 0.0), |_| ZERO), (c(3.1, 0.0), c(2.0, 1.0)));
        let (x, y) = euler_step(c(3.0, 0.0), c(1.0, 0.0), c(0.01, 0.0), w);
        assert!((x - c(3.01, 0.0)).norm() < 1e-15);
        assert!((y - c(1.0 + 11.0 / 1200.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn newton_steps() {
        let spec = two_linear_factors();
        let curve = BranchCurve::from_spec(&spec).unwrap();
        assert_eq!(curve, BranchCurve { k: 2, ks: vec![1, 1], knu: 1 });
        let root = c(6f64.sqrt(), 0.0);
        assert!((newton_step(root, c(3.0, 0.0), &curve, &spec).unwrap() - root).norm() < 1e-15);
        let y = newton_step(c(2.4, 0.0), c(3.0, 0.0), &curve, &spec).unwrap();
        assert!((y - root).norm() < 2e-3);
        assert_eq!(newton_step(ZERO, c(3.0, 0.0), &curve, &spec), Err(Error::BranchCollapse(c(3.0, 0.0))));
        let lin =
            IntegrandSpec::new(vec![LaurentPoly::parse("x - 1", 1).unwrap()], vec![c(1.0, 0.0)], vec![c(2.0, 0.0)])
                .unwrap();
        let k1 = BranchCurve::from_spec(&lin).unwrap();
        assert_eq!(k1.k, 1);
        let y = newton_step(c(7.0, 3.0), c(3.0, 0.0), &k1, &lin).unwrap();
        assert!((y - c(18.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn branch_curve_rejects_irrational_exponents() {
        let spec = two_linear_factors()
            .with_params(vec![c(0.5, 0.0), c(std::f64::consts::SQRT_2, 0.0)], vec![c(0.5, 0.0)])
            .unwrap();
        assert!(matches!(BranchCurve::from_spec(&spec), Err(Error::NotRational(_))));
        let spec = two_linear_factors().with_params(vec![c(0.5, 0.1), c(0.5, 0.0)], vec![c(0.5, 0.0)]).unwrap();
        assert!(matches!(BranchCurve::from_spec(&spec), Err(Error::NotRational(_))));
        let two =
            IntegrandSpec::new(vec![LaurentPoly::parse("x - y", 2).unwrap()], vec![c(0.5, 0.0)], vec![c(0.5, 0.0); 2])
                .unwrap();
        assert!(matches!(BranchCurve::from_spec(&two), Err(Error::NotImplemented(_))));
    }

    #[test]
    fn trapezoid() {
        let h = c(0.5, 0.0);
        assert_eq!(integrate_trapezoidal(&[c(2.0, 1.0); 5], h).unwrap(), c(2.0, 1.0) * h * 4.0);
        assert_eq!(integrate_trapezoidal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], c(1.0, 0.0)).unwrap(), c(4.0, 0.0));
        let xs: Vec<Complex64> = (0..101).map(|i| c(i as f64 / 100.0, 0.0)).collect();
        assert!((integrate_trapezoidal(&xs, c(0.01, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        assert!(integrate_trapezoidal(&[c(1.0, 0.0)], h).is_err());
    }

    #[test]
    fn segments() {
        let flat = IntegrandSpec::new(vec![LaurentPoly::parse("x - 1", 1).unwrap()], vec![ZERO], vec![ZERO]).unwrap();
        let it = Integrator::new(&flat, IntegrationSettings { nodes: 2, ..Default::default() }).unwrap();
        let seg = it.track_line_segment(c(2.0, 0.0), c(1.0, 0.0), c(3.0, 1.0)).unwrap();
        assert_eq!(seg.values, vec![c(1.0, 0.0); 2]);
        let it = Integrator::new(&two_linear_factors(), IntegrationSettings::default()).unwrap();
        let seg = it.track_line_segment(c(3.0, 1.0), c(0.7, 0.2), c(3.0, 1.0)).unwrap();
        assert!(seg.values.iter().all(|&v| v == c(0.7, 0.2)));
        let err = it.track_line_segment(c(0.5, 0.0), c(1.0, 0.0), c(1.5, 0.0));
        assert!(matches!(err, Err(Error::SegmentHitsSingularity { .. })));
    }

    #[test]
    fn segment_integrals() {
        let spec = two_linear_factors();
        let it = Integrator::new(&spec, IntegrationSettings::default()).unwrap();
        let a = c(0.5, 1.0);
        let r = it.integrate_line_segment(a, principal_branch(&spec, a).unwrap(), c(0.5, -1.0), &[]).unwrap();
        assert!(r.integrals.is_empty());
        let r = it.integrate_line_segment(a, c(1.0, 0.0), a, &cocycles()).unwrap();
        assert_eq!(r.integrals, vec![ZERO; 3]);
        let b1 = c(0.5, -1.0);
        let seg = it.track_line_segment(a, principal_branch(&spec, a).unwrap(), b1).unwrap();
        assert!(it.curve().residual(&spec, b1, *seg.values.last().unwrap()).unwrap().norm() <= 1e-10);
        assert!(seg.max_residual <= 1e-9);
    }

    #[test]
    fn elliptic_pairing_matrix_and_kernel() {
        let spec = two_linear_factors();
        let it = Integrator::new(&spec, IntegrationSettings::default()).unwrap();
        let cycles = [
            cycle(&spec, c(0.5, 1.0), c(0.5, -1.0), c(3.0, 0.0)),
            cycle(&spec, c(-1.0, 0.0), c(1.5, 1.0), c(1.5, -1.0)),
        ];
        let m = pairing_matrix(&it, &cycles, &cocycles()).unwrap();
        let expected =
            [[c(0.0, -3.496), c(0.0, 4.144), c(0.0, -0.648)], [c(3.496, 0.0), c(0.648, 0.0), c(-4.144, 0.0)]];
        for (row, exp) in m.entries.iter().zip(&expected) {
            for (v, e) in row.iter().zip(exp) {
                assert!((v - e).norm() < 5e-3, "{v} vs {e}");
            }
        }
        let k = nullspace(&m.entries, 1e-3).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].rational.as_deref(), Some(&["1".to_string(), "1".into(), "1".into()][..]));
    }

    #[test]
    fn phi_at_reference_points() {
        let spec = two_linear_factors();
        let a1 = principal_branch(&spec, c(0.5, 1.0)).unwrap();
        assert!((a1 - c(-1.436744, 0.435011)).norm() < 1e-6);
        let a2 = principal_branch(&spec, c(-1.0, 0.0)).unwrap();
        assert!((a2 - c(0.0, -6f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn open_loops_are_rejected() {
        let spec = two_linear_factors();
        let it = Integrator::new(&spec, IntegrationSettings::default()).unwrap();
        let around_one = cycle(&spec, c(0.5, 0.5), c(0.5, -0.5), c(1.5, 0.0));
        assert!(matches!(it.integrate_loop(&around_one, &cocycles()), Err(Error::NotTwistedCycle { .. })));
    }

    #[test]
    fn nullspace_edge_cases() {
        let zero = vec![vec![ZERO; 3]; 2];
        assert_eq!(nullspace(&zero, 1e-6).unwrap().len(), 3);
        let id = vec![vec![c(1.0, 0.0), ZERO], vec![ZERO, c(1.0, 0.0)]];
        assert!(nullspace(&id, 1e-6).unwrap().is_empty());
        let m = vec![vec![c(1.0, 0.0), c(-2.0, 0.0)]];
        let k = nullspace(&m, 1e-9).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].rational, Some(vec!["1".to_string(), "1/2".to_string()]));
    }
}
