//! Critical points of `log(f^s x^ν)` on `X = (ℂ*)^n ∖ V(f_1⋯f_ℓ)`, counted by total-degree homotopy
//! continuation. Their number is `(−1)^n·χ(X)` for generic `(s, ν)`.

mod tracker;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::laurent::{IntegrandSpec, LaurentPoly};
use tracker::{polish, Homotopy, PathEnd, StartSystem};

/// Paths that stop before this time count as tracking failures.
const FAILURE_HORIZON: f64 = 0.99;
/// Relative size below which a coordinate or an `f_j` value is treated as zero.
const ZERO_LOCUS_TOL: f64 = 1e-8;

/// Homotopy tracking parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerSettings {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Relative size of the last Newton correction accepted by the corrector.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Bound on `max_i |ω_i(x)|` for an accepted critical point.
    pub success_tol: f64,
    /// Max-norm radius within which endpoints are merged.
    pub dedup_distance: f64,
    pub divergence_bound: f64,
    pub seed: u64,
}

impl Default for TrackerSettings {
    fn default() -> Self {
        TrackerSettings {
            initial_step: 0.01,
            min_step: 1e-12,
            max_step: 0.05,
            newton_tol: 1e-10,
            max_newton_iters: 3,
            success_tol: 1e-8,
            dedup_distance: 1e-6,
            divergence_bound: 1e8,
            seed: 0x5eed_e1e1,
        }
    }
}

impl TrackerSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("initial_step", self.initial_step),
            ("min_step", self.min_step),
            ("max_step", self.max_step),
            ("newton_tol", self.newton_tol),
            ("success_tol", self.success_tol),
            ("dedup_distance", self.dedup_distance),
            ("divergence_bound", self.divergence_bound),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput(format!("tracker setting {name} must be positive")));
        }
        if self.max_newton_iters == 0 {
            return Err(Error::InvalidInput("max_newton_iters must be positive".into()));
        }
        if self.dedup_distance <= self.success_tol {
            return Err(Error::InvalidInput("dedup_distance must exceed success_tol".into()));
        }
        if self.min_step > self.initial_step || self.initial_step > self.max_step {
            return Err(Error::InvalidInput("need min_step ≤ initial_step ≤ max_step".into()));
        }
        Ok(())
    }
}

/// Polynomial with exponents and coefficients laid out for fast evaluation.
#[derive(Debug, Clone)]
struct CompiledPoly {
    terms: Vec<(Complex64, Vec<u32>)>,
}

impl CompiledPoly {
    fn new(p: &LaurentPoly<Complex64>) -> Self {
        let terms = p
            .terms()
            .map(|(e, c)| (*c, e.iter().map(|&a| u32::try_from(a).expect("polynomial exponent")).collect()))
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, powers: &[Vec<Complex64>]) -> Complex64 {
        self.terms.iter().map(|(c, e)| e.iter().enumerate().fold(*c, |acc, (i, &a)| acc * powers[i][a as usize])).sum()
    }
}

/// Cleared critical equations with their Jacobian, ready for tracking.
#[derive(Debug, Clone)]
pub(crate) struct CompiledSystem {
    eqs: Vec<CompiledPoly>,
    jac: Vec<Vec<CompiledPoly>>,
    max_deg: Vec<usize>,
}

impl CompiledSystem {
    fn new(eqs: &[LaurentPoly<Complex64>]) -> Self {
        let n = eqs.len();
        let jac = eqs
            .iter()
            .map(|e| (0..n).map(|i| CompiledPoly::new(&e.partial(i).expect("index in range"))).collect())
            .collect();
        let max_deg = (0..n)
            .map(|i| eqs.iter().flat_map(|e| e.support().map(move |a| a[i])).max().unwrap_or(0).max(0) as usize)
            .collect();
        CompiledSystem { eqs: eqs.iter().map(CompiledPoly::new).collect(), jac, max_deg }
    }

    fn powers(&self, x: &[Complex64]) -> Vec<Vec<Complex64>> {
        x.iter()
            .zip(&self.max_deg)
            .map(|(xi, &d)| {
                let mut p = Vec::with_capacity(d + 1);
                p.push(Complex64::new(1.0, 0.0));
                for k in 0..d {
                    p.push(p[k] * xi);
                }
                p
            })
            .collect()
    }

    pub(crate) fn eval_with_jacobian(&self, x: &[Complex64]) -> (Vec<Complex64>, DMatrix<Complex64>) {
        let pw = self.powers(x);
        let n = self.eqs.len();
        let f = self.eqs.iter().map(|e| e.eval(&pw)).collect();
        let j = DMatrix::from_fn(n, n, |i, k| self.jac[i][k].eval(&pw));
        (f, j)
    }
}

/// The critical equations `x_i·Σ_j s_j ∂_i f_j Π_{k≠j} f_k + ν_i Π_k f_k = 0`, each multiplied by the
/// monomial `x^{shift_i}` that makes it a polynomial with no monomial factor.
#[derive(Debug, Clone)]
pub struct PolySystem {
    spec: IntegrandSpec<Complex64>,
    equations: Vec<LaurentPoly<Complex64>>,
    shifts: Vec<Vec<i64>>,
    compiled: CompiledSystem,
}

impl PolySystem {
    pub fn equations(&self) -> &[LaurentPoly<Complex64>] {
        &self.equations
    }

    /// Monomial exponents multiplied into each equation after clearing `x_i·f_1⋯f_ℓ`.
    pub fn shifts(&self) -> &[Vec<i64>] {
        &self.shifts
    }

    /// Total degrees `d_i` of the start system.
    pub fn degrees(&self) -> Vec<u32> {
        self.equations.iter().map(|e| e.total_degree().unwrap_or(0).max(0) as u32).collect()
    }

    pub fn spec(&self) -> &IntegrandSpec<Complex64> {
        &self.spec
    }
}

pub fn build_system<C: Coeff>(spec: &IntegrandSpec<C>) -> PolySystem {
    let spec = spec.to_numeric();
    let (n, ell) = (spec.n(), spec.ell());
    let one = LaurentPoly::constant(n, Complex64::new(1.0, 0.0));
    let prod_all = spec.f().iter().fold(one.clone(), |acc, fj| &acc * fj);
    let prod_except: Vec<_> = (0..ell)
        .map(|j| spec.f().iter().enumerate().filter(|(k, _)| *k != j).fold(one.clone(), |acc, (_, fk)| &acc * fk))
        .collect();
    let mut equations = Vec::with_capacity(n);
    let mut shifts = Vec::with_capacity(n);
    for i in 0..n {
        let xi = LaurentPoly::variable(n, i).expect("index in range");
        let mut sum = LaurentPoly::zero(n);
        for (j, rest) in prod_except.iter().enumerate() {
            sum = &sum + &(&spec.gradient()[j][i] * rest).scale(&spec.s()[j]);
        }
        let e = &(&xi * &sum) + &prod_all.scale(&spec.nu()[i]);
        let shift: Vec<i64> = e.min_exponents().iter().map(|m| -m).collect();
        equations.push(e.shift(&shift));
        shifts.push(shift);
    }
    let compiled = CompiledSystem::new(&equations);
    PolySystem { spec, equations, shifts, compiled }
}

/// A critical point with its residual `max_i |ω_i(x)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub x: Vec<Complex64>,
    pub residual: f64,
}

/// Outcome of tracking all start paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub raw_paths: usize,
    /// Paths reaching `t = 1` whose endpoint polished to a finite root of the cleared system.
    pub converged: usize,
    /// Converged endpoints rejected: on a coordinate hyperplane, on `V(f)`, or not critical for `ω`.
    pub filtered: usize,
    pub distinct: usize,
    /// Paths that stalled or diverged before the end of the homotopy.
    pub failures: usize,
    /// Paths diverging or stalling at the very end (solutions at infinity or singular endpoints).
    pub at_infinity: usize,
    pub certified: bool,
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn in_x(spec: &IntegrandSpec<Complex64>, x: &[Complex64]) -> bool {
    let scale = 1.0 + max_norm(x);
    if x.iter().any(|xi| xi.norm() <= ZERO_LOCUS_TOL * scale) {
        return false;
    }
    spec.f().iter().all(|fj| {
        let size: f64 = fj
            .terms()
            .map(|(e, c)| e.iter().zip(x).fold(c.norm(), |acc, (&a, xi)| acc * xi.norm().powi(a as i32)))
            .sum();
        fj.evaluate(x).is_ok_and(|v| v.norm() > ZERO_LOCUS_TOL * size)
    })
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Tracks every path of the total-degree homotopy and returns the distinct critical points in `X`.
pub fn solve(system: &PolySystem, settings: &TrackerSettings) -> Result<SolutionSet> {
    settings.validate()?;
    if let Some(i) = system.equations.iter().position(LaurentPoly::is_zero) {
        return Err(Error::Degenerate(format!("critical equation {} vanishes identically", i + 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let gamma = random_unit(&mut rng);
    let degrees = system.degrees();
    let start = StartSystem { r: degrees.iter().map(|_| random_unit(&mut rng)).collect(), degrees };
    let homotopy = Homotopy { target: &system.compiled, start: &start, gamma };
    let starts = start.solutions();
    let ends: Vec<(PathEnd, Vec<Complex64>)> = starts.par_iter().map(|x0| homotopy.track(x0, settings)).collect();

    let (mut converged, mut filtered, mut failures, mut at_infinity) = (0, 0, 0, 0);
    let mut accepted = Vec::new();
    for (end, x) in ends {
        match end {
            PathEnd::Diverged { t } | PathEnd::Stalled { t } if t < FAILURE_HORIZON => failures += 1,
            PathEnd::Diverged { .. } | PathEnd::Stalled { .. } => at_infinity += 1,
            PathEnd::Reached => match polish(&system.compiled, &x, 1e-12, 50) {
                None => at_infinity += 1,
                Some(x) if max_norm(&x) > settings.divergence_bound => at_infinity += 1,
                Some(x) => {
                    converged += 1;
                    let residual = in_x(&system.spec, &x)
                        .then(|| system.spec.omega_components(&x).ok())
                        .flatten()
                        .map(|w| max_norm(&w));
                    match residual {
                        Some(r) if r <= settings.success_tol => accepted.push(Solution { x, residual: r }),
                        _ => filtered += 1,
                    }
                }
            },
        }
    }
    let solutions = dedup(accepted, settings.dedup_distance);
    Ok(SolutionSet {
        distinct: solutions.len(),
        solutions,
        raw_paths: starts.len(),
        converged,
        filtered,
        failures,
        at_infinity,
        certified: failures == 0,
    })
}

fn lex_key(x: &[Complex64]) -> Vec<f64> {
    x.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Sorts lexicographically, then merges points within `radius` in the max norm.
fn dedup(mut sols: Vec<Solution>, radius: f64) -> Vec<Solution> {
    sols.sort_by(|a, b| lex_key(&a.x).partial_cmp(&lex_key(&b.x)).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<Solution> = Vec::new();
    for s in sols {
        let dup = out.iter().any(|o| o.x.iter().zip(&s.x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) <= radius);
        if !dup {
            out.push(s);
        }
    }
    out
}

/// One randomized run inside [`euler_characteristic`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawReport {
    pub s: Vec<Complex64>,
    pub nu: Vec<Complex64>,
    pub seed: u64,
    pub result: SolutionSet,
}

/// Signed Euler characteristic `χ = (−1)^n·count` with the per-draw evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiReport {
    pub chi: i64,
    pub count: usize,
    pub certified: bool,
    pub draws: Vec<DrawReport>,
}

/// How [`euler_characteristic`] chooses `(s, ν)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChiOptions {
    /// Number of independent runs that must agree (at least 1).
    pub draws: usize,
    /// Use the integrand's own `(s, ν)` for the first run instead of a random draw.
    pub pin_first: bool,
}

impl Default for ChiOptions {
    fn default() -> Self {
        ChiOptions { draws: 2, pin_first: false }
    }
}

fn draw_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_box(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// Counts critical points for several parameter draws and requires the counts to agree.
pub fn euler_characteristic<C: Coeff>(
    spec: &IntegrandSpec<C>,
    settings: &TrackerSettings,
    options: ChiOptions,
) -> Result<ChiReport> {
    if options.draws == 0 {
        return Err(Error::InvalidInput("at least one draw is required".into()));
    }
    let base = spec.to_numeric();
    let mut draws = Vec::with_capacity(options.draws);
    for k in 0..options.draws {
        let seed = draw_seed(settings.seed, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = if k == 0 && options.pin_first {
            base.clone()
        } else {
            base.with_params(random_box(&mut rng, base.ell()), random_box(&mut rng, base.n()))?
        };
        let track_seed = rng.random();
        let result = solve(&build_system(&params), &TrackerSettings { seed: track_seed, ..settings.clone() })?;
        draws.push(DrawReport { s: params.s().to_vec(), nu: params.nu().to_vec(), seed, result });
    }
    let counts: Vec<usize> = draws.iter().map(|d| d.result.distinct).collect();
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(Error::NonGeneric(format!("critical point counts differ across draws: {counts:?}")));
    }
    let count = counts[0];
    let sign = if base.n().is_multiple_of(2) { 1 } else { -1 };
    Ok(ChiReport { chi: sign * count as i64, count, certified: draws.iter().all(|d| d.result.certified), draws })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(polys: &[&str], n: usize, s: Vec<Complex64>, nu: Vec<Complex64>) -> IntegrandSpec {
        let f = polys.iter().map(|p| LaurentPoly::parse(p, n).unwrap()).collect();
        IntegrandSpec::new(f, s, nu).unwrap()
    }

    const HEXAGON_CURVE: &str = "-x*y^2 + 2*x*y^3 + 3*x^2*y - x^2*y^3 - 2*x^3*y + 3*x^3*y^2";
    const LINE_ARRANGEMENT: &str = "-x*y^2 + x*y^3 + x^2*y - x^2*y^3 - x^3*y + x^3*y^2";

    #[test]
    fn linear_system() {
        let (s, nu) = (c(0.3, 0.2), c(-0.7, 0.4));
        let sys = build_system(&spec(&["x - 1"], 1, vec![s], vec![nu]));
        let expected = LaurentPoly::from_terms(1, [(vec![1], s + nu), (vec![0], -nu)]).unwrap();
        assert_eq!(sys.equations()[0], expected);
        let sol = solve(&sys, &TrackerSettings::default()).unwrap();
        assert_eq!(sol.distinct, 1);
        assert!((sol.solutions[0].x[0] - nu / (s + nu)).norm() < 1e-10);
    }

    #[test]
    fn zero_s_has_no_critical_points() {
        let sys = build_system(&spec(&["x - 1"], 1, vec![c(0.0, 0.0)], vec![c(0.5, 0.1)]));
        let sol = solve(&sys, &TrackerSettings::default()).unwrap();
        assert_eq!(sol.distinct, 0);
    }

    #[test]
    fn hexagon_curve_equations_are_cubics() {
        let sys = build_system(&spec(&[HEXAGON_CURVE], 2, vec![c(0.3, 0.1)], vec![c(0.2, -0.5), c(-0.4, 0.6)]));
        assert_eq!(sys.degrees(), vec![3, 3]);
        assert!(sys.equations().iter().all(LaurentPoly::is_polynomial));
        assert_eq!(sys.shifts(), &[vec![-1, -1], vec![-1, -1]]);
    }

    #[test]
    fn cleared_equation_vanishes_with_omega() {
        let sp = spec(&[HEXAGON_CURVE], 2, vec![c(0.3, 0.1)], vec![c(0.2, -0.5), c(-0.4, 0.6)]);
        let sys = build_system(&sp);
        let x = [c(0.7, 0.2), c(-1.1, 0.4)];
        let w = sp.omega_components(&x).unwrap();
        let fx = sp.f()[0].evaluate(&x).unwrap();
        for i in 0..2 {
            let mono: Complex64 = x.iter().zip(&sys.shifts()[i]).map(|(xi, &a)| xi.powi(a as i32)).product();
            let expect = w[i] * x[i] * fx * mono;
            assert!((sys.equations()[i].evaluate(&x).unwrap() - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn hexagon_curve_has_six() {
        let sp = spec(&[HEXAGON_CURVE], 2, vec![c(0.0, 0.0)], vec![c(0.0, 0.0); 2]);
        let r = euler_characteristic(&sp, &TrackerSettings::default(), ChiOptions::default()).unwrap();
        assert_eq!((r.chi, r.count, r.certified), (6, 6, true));
        for d in &r.draws {
            assert!(d.result.solutions.iter().all(|s| s.residual <= 1e-8));
            assert!(d.result.distinct <= d.result.converged && d.result.converged <= d.result.raw_paths);
        }
    }

    #[test]
    fn line_arrangement_has_two() {
        let sp = spec(&[LINE_ARRANGEMENT], 2, vec![c(0.0, 0.0)], vec![c(0.0, 0.0); 2]);
        let r = euler_characteristic(&sp, &TrackerSettings::default(), ChiOptions::default()).unwrap();
        assert_eq!((r.chi, r.count), (2, 2));
    }

    #[test]
    fn two_linear_factors() {
        let sp = spec(&["x - 1", "x - 2"], 1, vec![c(0.5, 0.0); 2], vec![c(0.5, 0.0)]);
        let r = euler_characteristic(&sp, &TrackerSettings::default(), ChiOptions::default()).unwrap();
        assert_eq!((r.chi, r.count), (-2, 2));
        let one = spec(&["x - 1"], 1, vec![c(0.5, 0.0)], vec![c(0.5, 0.0)]);
        let r = euler_characteristic(&one, &TrackerSettings::default(), ChiOptions::default()).unwrap();
        assert_eq!(r.chi, -1);
    }

    #[test]
    fn settings_validation() {
        let bad = TrackerSettings { dedup_distance: 1e-9, ..TrackerSettings::default() };
        assert!(bad.validate().is_err());
        let bad = TrackerSettings { newton_tol: 0.0, ..TrackerSettings::default() };
        assert!(bad.validate().is_err());
    }
}
