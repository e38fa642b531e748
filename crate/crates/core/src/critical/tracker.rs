//! Predictor-corrector tracking of `H(x,t) = γ(1−t)·G(x) + t·F(x)` from `t = 0` to `t = 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{CompiledSystem, TrackerSettings};

/// Start system `G_i = x_i^{d_i} − r_i`.
#[derive(Debug, Clone)]
pub(crate) struct StartSystem {
    pub degrees: Vec<u32>,
    pub r: Vec<Complex64>,
}

impl StartSystem {
    /// All `Π d_i` roots, placed exactly in polar form.
    pub fn solutions(&self) -> Vec<Vec<Complex64>> {
        let per_var: Vec<Vec<Complex64>> = self
            .degrees
            .iter()
            .zip(&self.r)
            .map(|(&d, r)| {
                let (rho, theta) = r.to_polar();
                (0..d)
                    .map(|k| {
                        let ang = (theta + 2.0 * std::f64::consts::PI * f64::from(k)) / f64::from(d);
                        Complex64::from_polar(rho.powf(1.0 / f64::from(d)), ang)
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![Vec::new()];
        for roots in per_var {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    roots.iter().map(move |z| {
                        let mut p = prefix.clone();
                        p.push(*z);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn eval(&self, x: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let g = x.iter().zip(&self.degrees).zip(&self.r).map(|((xi, &d), r)| xi.powu(d) - r).collect();
        let dg = x
            .iter()
            .zip(&self.degrees)
            .map(|(xi, &d)| if d == 0 { Complex64::new(0.0, 0.0) } else { f64::from(d) * xi.powu(d - 1) })
            .collect();
        (g, dg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PathEnd {
    Reached,
    Diverged { t: f64 },
    Stalled { t: f64 },
}

pub(crate) struct Homotopy<'a> {
    pub target: &'a CompiledSystem,
    pub start: &'a StartSystem,
    pub gamma: Complex64,
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn solve_linear(jac: DMatrix<Complex64>, rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let b = DVector::from_column_slice(rhs);
    let sol = jac.lu().solve(&b)?;
    sol.iter().all(|z| z.is_finite()).then(|| sol.iter().copied().collect())
}

impl Homotopy<'_> {
    /// `(H, ∂H/∂x, ∂H/∂t)` at `(x, t)`.
    fn eval(&self, x: &[Complex64], t: f64) -> (Vec<Complex64>, DMatrix<Complex64>, Vec<Complex64>) {
        let n = x.len();
        let (f, jf) = self.target.eval_with_jacobian(x);
        let (g, dg) = self.start.eval(x);
        let a = self.gamma * (1.0 - t);
        let h = (0..n).map(|i| a * g[i] + t * f[i]).collect();
        let ht = (0..n).map(|i| f[i] - self.gamma * g[i]).collect();
        let hx = DMatrix::from_fn(n, n, |i, j| {
            let start = if i == j { a * dg[i] } else { Complex64::new(0.0, 0.0) };
            start + t * jf[(i, j)]
        });
        (h, hx, ht)
    }

    fn correct(&self, x: &mut [Complex64], t: f64, s: &TrackerSettings) -> bool {
        let mut last = f64::INFINITY;
        for _ in 0..s.max_newton_iters {
            let (h, hx, _) = self.eval(x, t);
            let Some(delta) = solve_linear(hx, &h) else { return false };
            let size = max_norm(&delta);
            x.iter_mut().zip(&delta).for_each(|(xi, d)| *xi -= d);
            if size <= s.newton_tol * (1.0 + max_norm(x)) {
                return true;
            }
            if size > 0.5 * last {
                return false;
            }
            last = size;
        }
        false
    }

    pub fn track(&self, start: &[Complex64], s: &TrackerSettings) -> (PathEnd, Vec<Complex64>) {
        let mut x = start.to_vec();
        let mut t = 0.0;
        let mut dt = s.initial_step;
        let mut streak = 0;
        while t < 1.0 {
            let step = dt.min(1.0 - t);
            let t1 = if 1.0 - t <= dt { 1.0 } else { t + step };
            let (_, hx, ht) = self.eval(&x, t);
            let velocity = solve_linear(hx, &ht);
            let mut trial = x.clone();
            let ok = match velocity {
                Some(v) => {
                    trial.iter_mut().zip(&v).for_each(|(xi, vi)| *xi -= step * vi);
                    self.correct(&mut trial, t1, s)
                }
                None => false,
            };
            if ok {
                x = trial;
                t = t1;
                streak += 1;
                if streak >= 3 {
                    dt = (2.0 * dt).min(s.max_step);
                    streak = 0;
                }
                if max_norm(&x) > s.divergence_bound {
                    return (PathEnd::Diverged { t }, x);
                }
            } else {
                dt *= 0.5;
                streak = 0;
                if dt < s.min_step {
                    return (PathEnd::Stalled { t }, x);
                }
            }
        }
        (PathEnd::Reached, x)
    }
}

/// Newton polish on the target system; `None` if it does not converge.
pub(crate) fn polish(target: &CompiledSystem, x: &[Complex64], tol: f64, iters: usize) -> Option<Vec<Complex64>> {
    let mut x = x.to_vec();
    for _ in 0..iters {
        let (f, jf) = target.eval_with_jacobian(&x);
        let delta = solve_linear(jf, &f)?;
        let size = max_norm(&delta);
        x.iter_mut().zip(&delta).for_each(|(xi, d)| *xi -= d);
        if size <= tol * (1.0 + max_norm(&x)) {
            return Some(x);
        }
    }
    None
}
