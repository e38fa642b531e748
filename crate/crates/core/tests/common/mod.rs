//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use euler_core::coeff::{q_ratio, QComplex};
use euler_core::relations::AnnOperator;
use euler_core::twisted::{principal_branch, Cocycle, TwistedCycle};
use euler_core::{IntegrandSpec, LaurentPoly, QPoly};
use num_complex::Complex64;
use rand::Rng;

pub const HEXAGON_CURVE: &str = "3*x^3*y^2 - x^2*y^3 - 2*x^3*y + 2*x*y^3 + 3*x^2*y - x*y^2";
pub const LINE_ARRANGEMENT: &str = "x^3*y^2 - x^2*y^3 - x^3*y + x*y^3 + x^2*y - x*y^2";
pub const HEXAGON_SUPPORT: [[i64; 2]; 6] = [[3, 2], [2, 3], [3, 1], [1, 3], [2, 1], [1, 2]];

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn q(p: i64, d: u64) -> QComplex {
    QComplex::new(q_ratio(p, d), q_ratio(0, 1))
}

pub fn plane_curve(text: &str) -> IntegrandSpec {
    IntegrandSpec::new(vec![LaurentPoly::parse(text, 2).unwrap()], vec![c(0.3, 0.1)], vec![c(0.2, -0.4), c(-0.5, 0.7)])
        .unwrap()
}

/// `f = (x − 1, x − 2)`, `s = (½, ½)`, `ν = ½`.
pub fn two_linear_factors() -> IntegrandSpec<QComplex> {
    let f = vec![QPoly::parse("x - 1", 1).unwrap(), QPoly::parse("x - 2", 1).unwrap()];
    IntegrandSpec::new(f, vec![q(1, 2), q(1, 2)], vec![q(1, 2)]).unwrap()
}

pub fn cycle(spec: &IntegrandSpec, a: Complex64, b: Complex64, cc: Complex64) -> TwistedCycle {
    TwistedCycle { a, b, c: cc, phi: principal_branch(spec, a).unwrap() }
}

/// The two triangles defining the pairing matrix: around `{1, 2}` and around `{0, 1}`.
pub fn basis_cycles(spec: &IntegrandSpec) -> Vec<TwistedCycle> {
    vec![cycle(spec, c(0.5, 1.0), c(0.5, -1.0), c(3.0, 0.0)), cycle(spec, c(-1.0, 0.0), c(1.5, 1.0), c(1.5, -1.0))]
}

/// Triangles never used to build the pairing matrix.
pub fn held_out_cycles(spec: &IntegrandSpec) -> Vec<TwistedCycle> {
    vec![cycle(spec, c(1.5, 2.0), c(0.5, -0.5), c(3.0, -0.5)), cycle(spec, c(-0.5, 1.5), c(-0.5, -1.5), c(1.6, 0.0))]
}

pub fn pairing_cocycles() -> Vec<Cocycle> {
    vec![Cocycle { a: vec![-1, 0], b: 1 }, Cocycle { a: vec![0, -1], b: 1 }, Cocycle { a: vec![0, 0], b: 0 }]
}

pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Twice the area of the convex hull of plane points (monotone chain and shoelace).
pub fn hull_double_area(points: &[[i64; 2]]) -> i64 {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return 0;
    }
    let cross = |o: [i64; 2], a: [i64; 2], b: [i64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[i64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[i64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    (0..hull.len())
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<i64>()
        .abs()
}

/// gcd of all `2×2` minors of the difference vectors: the index of the affine lattice in `ℤ²`.
pub fn affine_index_2d(points: &[[i64; 2]]) -> i64 {
    let d: Vec<[i64; 2]> = points.iter().map(|p| [p[0] - points[0][0], p[1] - points[0][1]]).collect();
    let mut g = 0i64;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            g = num_integer::gcd(g, d[i][0] * d[j][1] - d[i][1] * d[j][0]);
        }
    }
    g
}

/// Nonzero integer in `[−9, 9]`.
pub fn nonzero_small(rng: &mut impl Rng) -> i64 {
    let v = rng.random_range(1..=9);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Random-coefficient polynomial on the hexagon support.
pub fn random_hexagon_curve(rng: &mut impl Rng) -> String {
    HEXAGON_SUPPORT
        .iter()
        .map(|[a, b]| format!("{}*x^{a}*y^{b}", nonzero_small(rng)))
        .collect::<Vec<_>>()
        .join(" + ")
        .replace("+ -", "- ")
}

pub fn rand_q(rng: &mut impl Rng) -> QComplex {
    let d = rng.random_range(1..=7u64);
    QComplex::new(q_ratio(rng.random_range(-9..=9), d), q_ratio(rng.random_range(-9..=9), d))
}

fn rand_poly(rng: &mut impl Rng, n: usize, max_degree: i64) -> QPoly {
    let mut terms = Vec::new();
    for exp in itertools::Itertools::multi_cartesian_product((0..n).map(|_| 0..=max_degree)) {
        if exp.iter().sum::<i64>() <= max_degree && rng.random_bool(0.7) {
            terms.push((exp, rand_q(rng)));
        }
    }
    QPoly::from_terms(n, terms).unwrap()
}

/// A random operator `Σ p_i ∂_i + q` with `deg p_i ≤ 2` annihilating `f^s` for smooth `f` of degree 1.
///
/// `p_i = r_i f + g·J_i` with `J = (∂_2 f, −∂_1 f)` when `n = 2`, so `Σ p_i ∂_i f = f·Σ r_i ∂_i f`;
/// `q` comes from exact division of `−s Σ p_i ∂_i f` by `f`.
pub fn random_annihilator(rng: &mut impl Rng, f: &QPoly, s: &QComplex) -> AnnOperator<QComplex> {
    let n = f.nvars();
    let grad: Vec<QPoly> = (0..n).map(|i| f.partial(i).unwrap()).collect();
    let g = rand_poly(rng, n, 1);
    let p: Vec<QPoly> = (0..n)
        .map(|i| {
            let r = rand_poly(rng, n, 1);
            let rot = match (n, i) {
                (2, 0) => &g * &grad[1],
                (2, 1) => -(&g * &grad[0]),
                _ => QPoly::zero(n),
            };
            &(&r * f) + &rot
        })
        .collect();
    let flow = p.iter().zip(&grad).fold(QPoly::zero(n), |acc, (pi, gi)| &acc + &(pi * gi));
    let q = flow.scale(&-s.clone()).div_exact(f).unwrap().expect("f divides s·Σ p_i ∂_i f");
    AnnOperator::new(p, q).unwrap()
}
