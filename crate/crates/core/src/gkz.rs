//! Cayley configuration of `f_1, …, f_ℓ`, its integer kernel lattice, the GKZ operators
//! `Aθ − κ` with lattice binomials, the non-resonance test on the facets of `cone(A)`,
//! and the volume bound on the holonomic rank.

use std::ops::Range;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::exact::{hnf, integer_kernel, rank, solve_in_basis, to_big};
use crate::laurent::IntegrandSpec;
use crate::polytope::{facets, normalized_volume, LatticePointSet};

/// Tolerance on the distance of `u_F·κ` to `g·ℤ` for floating-point `κ`.
pub const RESONANCE_TOL: f64 = 1e-9;

pub const BINOMIAL_DISCLAIMER: &str =
    "binomials come from a basis of ker(A) over the integers; they generate a lattice ideal whose saturation is I_A, not I_A itself";

/// Integer matrix `A` of shape `(n+ℓ) × Σ|A_j|` with block structure and parameters `κ = (−ν, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyConfig<C = Complex64> {
    matrix: Vec<Vec<i64>>,
    blocks: Vec<Range<usize>>,
    kappa: Vec<C>,
    /// Number of block-indicator rows at the bottom of `matrix`.
    ell: usize,
}

/// Columns `(α, e_j)` for `α ∈ supp(f_j)`, by block, lexicographically ascending within a block.
pub fn cayley_matrix<C: Coeff>(spec: &IntegrandSpec<C>) -> CayleyConfig<C> {
    let (n, ell) = (spec.n(), spec.ell());
    let mut columns: Vec<Vec<i64>> = Vec::new();
    let mut blocks = Vec::with_capacity(ell);
    for (j, fj) in spec.f().iter().enumerate() {
        let start = columns.len();
        let mut support: Vec<&Vec<i64>> = fj.support().collect();
        support.sort();
        for alpha in support {
            let mut col = alpha.clone();
            col.extend((0..ell).map(|k| i64::from(k == j)));
            columns.push(col);
        }
        blocks.push(start..columns.len());
    }
    let matrix = (0..n + ell).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let kappa = spec.nu().iter().map(|v| -v.clone()).chain(spec.s().iter().cloned()).collect();
    CayleyConfig { matrix, blocks, kappa, ell }
}

impl<C: Coeff> CayleyConfig<C> {
    /// A configuration from explicit rows; the last `ell` rows must be the block-indicator pattern.
    pub fn from_matrix(matrix: Vec<Vec<i64>>, kappa: Vec<C>, ell: usize) -> Result<Self> {
        let rows = matrix.len();
        if rows == 0 {
            return Err(Error::InvalidInput("the matrix has no rows".into()));
        }
        let cols = matrix[0].len();
        if cols == 0 {
            return Err(Error::InvalidInput("the matrix has no columns".into()));
        }
        if let Some(r) = matrix.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
        }
        if kappa.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, got: kappa.len() });
        }
        if ell > rows {
            return Err(Error::InvalidInput(format!("{ell} indicator rows exceed {rows} rows")));
        }
        let indicator = |c: usize| -> Option<usize> {
            let tail: Vec<i64> = matrix[rows - ell..].iter().map(|r| r[c]).collect();
            (tail.iter().filter(|&&v| v == 1).count() == 1 && tail.iter().all(|&v| v == 0 || v == 1))
                .then(|| tail.iter().position(|&v| v == 1).expect("one entry is 1"))
        };
        let blocks = if ell == 0 {
            std::iter::once(0..cols).collect()
        } else {
            let mut blocks = Vec::with_capacity(ell);
            let mut start = 0;
            for j in 0..ell {
                let mut end = start;
                while end < cols && indicator(end) == Some(j) {
                    end += 1;
                }
                if end == start {
                    return Err(Error::InvalidInput(format!("block {} is empty or out of order", j + 1)));
                }
                blocks.push(start..end);
                start = end;
            }
            if start != cols {
                return Err(Error::InvalidInput(format!("column {} is not a block column", start + 1)));
            }
            blocks
        };
        Ok(CayleyConfig { matrix, blocks, kappa, ell })
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn kappa(&self) -> &[C] {
        &self.kappa
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols()).map(|c| self.matrix.iter().map(|r| r[c]).collect()).collect()
    }

    pub fn with_kappa(&self, kappa: Vec<C>) -> Result<Self> {
        if kappa.len() != self.rows() {
            return Err(Error::DimensionMismatch { expected: self.rows(), got: kappa.len() });
        }
        Ok(CayleyConfig { kappa, ..self.clone() })
    }

    /// Rank of `ℤ·A`.
    pub fn rank(&self) -> usize {
        rank(&to_big(&self.matrix))
    }

    fn column_set(&self) -> Result<LatticePointSet> {
        LatticePointSet::new(self.rows(), self.columns())
    }
}

/// Basis of `ker(A) ∩ ℤ^N`; each `u` encodes the binomial `∂^{u⁺} − ∂^{u⁻}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeBasis {
    pub vectors: Vec<Vec<i64>>,
}

impl LatticeBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// True iff `v` is an integer combination of the basis.
    pub fn contains(&self, v: &[i64]) -> bool {
        if self.vectors.is_empty() {
            return v.iter().all(|&x| x == 0);
        }
        solve_in_basis(&hnf(&to_big(&self.vectors)), &to_big(&[v.to_vec()])[0]).is_some()
    }
}

pub fn lattice_kernel<C: Coeff>(cfg: &CayleyConfig<C>) -> Result<LatticeBasis> {
    let vectors = integer_kernel(&to_big(&cfg.matrix), cfg.cols())
        .into_iter()
        .map(|u| {
            u.iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::InvalidInput("kernel entry overflows i64".into())))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(LatticeBasis { vectors })
}

/// Text form of the operators annihilating the integral as a function of the coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GkzOperators {
    /// `(Aθ − κ)_i` with `κ = (−ν, s)` kept as symbols.
    pub euler_symbolic: Vec<String>,
    /// `(Aθ − κ)_i` at the numeric `κ`.
    pub euler: Vec<String>,
    pub binomials: Vec<String>,
    pub disclaimer: String,
}

fn subscript(i: usize) -> String {
    i.to_string()
        .chars()
        .map(|c| char::from_u32(0x2080 + c.to_digit(10).expect("decimal digit")).expect("subscript digit"))
        .collect()
}

fn theta_row(row: &[i64]) -> String {
    let mut out = String::new();
    for (c, &a) in row.iter().enumerate().filter(|(_, a)| **a != 0) {
        let sign = if a < 0 {
            "-"
        } else if out.is_empty() {
            ""
        } else {
            "+"
        };
        let mag = if a.abs() == 1 { String::new() } else { a.abs().to_string() };
        out.push_str(&format!("{sign}{mag}θ{}", subscript(c + 1)));
    }
    out
}

fn append_constant(mut text: String, constant: &str, negative: bool) -> String {
    match (text.is_empty(), negative) {
        (true, true) => format!("-{constant}"),
        (true, false) => constant.to_string(),
        (false, true) => {
            text.push('-');
            text.push_str(constant);
            text
        }
        (false, false) => {
            text.push('+');
            text.push_str(constant);
            text
        }
    }
}

fn monomial_d(u: impl Iterator<Item = (usize, i64)>) -> String {
    let text: String = u
        .filter(|(_, e)| *e > 0)
        .map(|(c, e)| if e == 1 { format!("∂{}", subscript(c + 1)) } else { format!("∂{}^{e}", subscript(c + 1)) })
        .collect();
    if text.is_empty() {
        "1".into()
    } else {
        text
    }
}

pub fn euler_operators<C: Coeff>(cfg: &CayleyConfig<C>) -> Result<GkzOperators> {
    let n = cfg.rows() - cfg.ell;
    let euler_symbolic = cfg
        .matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let base = theta_row(row);
            if i < n {
                append_constant(base, &format!("ν{}", subscript(i + 1)), false)
            } else if cfg.ell == 1 {
                append_constant(base, "s", true)
            } else {
                append_constant(base, &format!("s{}", subscript(i - n + 1)), true)
            }
        })
        .collect();
    let euler = cfg
        .matrix
        .iter()
        .zip(&cfg.kappa)
        .map(|(row, k)| {
            let base = theta_row(row);
            if k.is_zero() {
                if base.is_empty() {
                    "0".into()
                } else {
                    base
                }
            } else {
                let z = k.to_c64();
                if z.im == 0.0 && z.re < 0.0 {
                    append_constant(base, &(-k.clone()).render(), false)
                } else {
                    append_constant(base, &k.render(), true)
                }
            }
        })
        .collect();
    let binomials = lattice_kernel(cfg)?
        .vectors
        .iter()
        .map(|u| {
            let plus = monomial_d(u.iter().copied().enumerate());
            let minus = monomial_d(u.iter().map(|x| -x).enumerate());
            format!("{plus} - {minus}")
        })
        .collect();
    Ok(GkzOperators { euler_symbolic, euler, binomials, disclaimer: BINOMIAL_DISCLAIMER.into() })
}

/// Facet test of `u_F·κ ∈ g·ℤ`, where `g·ℤ = {u_F·α : α ∈ A}·ℤ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetCertificate {
    /// Primitive inner normal `u_F`.
    pub normal: Vec<i64>,
    pub g: i64,
    /// `u_F·κ`.
    pub pairing: String,
    /// `u_F·κ mod g` when the pairing is real; `None` otherwise.
    pub residue: Option<String>,
    pub resonant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resonance {
    pub nonresonant: bool,
    pub lattice_rank: usize,
    pub certificates: Vec<FacetCertificate>,
}

fn exact_residue(p: &BigRational, g: &BigInt) -> BigRational {
    let g = BigRational::from_integer(g.clone());
    p - &g * (p / &g).floor()
}

pub fn is_nonresonant<C: Coeff>(cfg: &CayleyConfig<C>) -> Result<Resonance> {
    let lattice_rank = cfg.rank();
    let columns = cfg.columns();
    let certificates = facets(&cfg.column_set()?)?
        .into_iter()
        .map(|facet| {
            let g = columns
                .iter()
                .map(|a| BigInt::from(a.iter().zip(&facet.normal).map(|(x, y)| x * y).sum::<i64>()))
                .fold(BigInt::zero(), |acc, v| acc.gcd(&v));
            let pairing =
                facet.normal.iter().zip(&cfg.kappa).fold(C::zero(), |acc, (&u, k)| acc + C::from_int(u) * k.clone());
            let (residue, resonant) = match pairing.as_exact() {
                Some(q) if q.im.is_zero() => {
                    let r = exact_residue(&q.re, &g);
                    (Some(r.to_string()), r.is_zero())
                }
                Some(_) => (None, false),
                None => {
                    let z = pairing.to_c64();
                    let gf = g.to_f64().expect("facet gcd is finite");
                    let r = z.re - gf * (z.re / gf).floor();
                    let distance = r.min(gf - r);
                    let real = z.im.abs() <= RESONANCE_TOL;
                    (real.then(|| r.to_string()), real && distance <= RESONANCE_TOL)
                }
            };
            FacetCertificate {
                normal: facet.normal,
                g: g.to_i64().expect("facet gcd fits in i64"),
                pairing: pairing.render(),
                residue,
                resonant,
            }
        })
        .collect::<Vec<_>>();
    Ok(Resonance { nonresonant: certificates.iter().all(|c| !c.resonant), lattice_rank, certificates })
}

/// Normalized volume of the columns: the generic holonomic rank.
pub fn rank_bound<C: Coeff>(cfg: &CayleyConfig<C>) -> Result<u64> {
    Ok(normalized_volume(&cfg.column_set()?)?.normalized_volume)
}

/// Everything `euler gkz` reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GkzReport {
    pub matrix: Vec<Vec<i64>>,
    /// Column ranges (0-based, half-open) of each block.
    pub blocks: Vec<[usize; 2]>,
    pub kappa: Vec<String>,
    pub lattice_rank: usize,
    pub kernel_basis: Vec<Vec<i64>>,
    pub operators: GkzOperators,
    /// `None` when the cone is not full-dimensional.
    pub nonresonant: Option<bool>,
    pub certificates: Vec<FacetCertificate>,
    pub resonance_note: Option<String>,
    pub rank_bound: u64,
}

pub fn gkz_report<C: Coeff>(cfg: &CayleyConfig<C>) -> Result<GkzReport> {
    let (nonresonant, certificates, resonance_note) = match is_nonresonant(cfg) {
        Ok(r) => (Some(r.nonresonant), r.certificates, None),
        Err(Error::Degenerate(msg)) => (None, Vec::new(), Some(msg)),
        Err(e) => return Err(e),
    };
    Ok(GkzReport {
        matrix: cfg.matrix.clone(),
        blocks: cfg.blocks.iter().map(|r| [r.start, r.end]).collect(),
        kappa: cfg.kappa.iter().map(Coeff::render).collect(),
        lattice_rank: cfg.rank(),
        kernel_basis: lattice_kernel(cfg)?.vectors,
        operators: euler_operators(cfg)?,
        nonresonant,
        certificates,
        resonance_note,
        rank_bound: rank_bound(cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q_ratio, QComplex};
    use crate::laurent::{LaurentPoly, QPoly};

    fn q(p: i64, d: u64) -> QComplex {
        QComplex::new(q_ratio(p, d), q_ratio(0, 1))
    }

    fn hexagon_curve() -> CayleyConfig<QComplex> {
        let f = QPoly::parse("3*x^3*y^2 - x^2*y^3 - 2*x^3*y + 2*x*y^3 + 3*x^2*y - x*y^2", 2).unwrap();
        cayley_matrix(&IntegrandSpec::new(vec![f], vec![q(1, 3)], vec![q(1, 5), q(2, 7)]).unwrap())
    }

    fn two_lines(kappa_half: bool) -> CayleyConfig<QComplex> {
        let f = vec![QPoly::parse("x - 1", 1).unwrap(), QPoly::parse("x - 2", 1).unwrap()];
        let h = if kappa_half { q(1, 2) } else { q(1, 3) };
        cayley_matrix(&IntegrandSpec::new(f, vec![h.clone(), h.clone()], vec![h]).unwrap())
    }

    #[test]
    fn hexagon_matrix_operators_and_kernel() {
        let cfg = hexagon_curve();
        assert_eq!(cfg.matrix(), &[vec![1, 1, 2, 2, 3, 3], vec![2, 3, 1, 3, 1, 2], vec![1, 1, 1, 1, 1, 1]]);
        let ops = euler_operators(&cfg).unwrap();
        assert_eq!(ops.euler_symbolic, ["θ₁+θ₂+2θ₃+2θ₄+3θ₅+3θ₆+ν₁", "2θ₁+3θ₂+θ₃+3θ₄+θ₅+2θ₆+ν₂", "θ₁+θ₂+θ₃+θ₄+θ₅+θ₆-s"]);
        assert_eq!(ops.euler[2], "θ₁+θ₂+θ₃+θ₄+θ₅+θ₆-1/3");
        assert_eq!(ops.euler[0], "θ₁+θ₂+2θ₃+2θ₄+3θ₅+3θ₆+1/5");
        let ker = lattice_kernel(&cfg).unwrap();
        assert_eq!(ker.len(), 3);
        assert!(ker.contains(&[-1, 1, 0, 0, 1, -1]));
        assert!(!ker.contains(&[1, 0, 0, 0, 0, 0]));
        assert_eq!(ops.binomials.len(), 3);
        assert_eq!(rank_bound(&cfg).unwrap(), 6);
    }

    #[test]
    fn two_lines_config() {
        let cfg = two_lines(true);
        assert_eq!(cfg.matrix(), &[vec![0, 1, 0, 1], vec![1, 1, 0, 0], vec![0, 0, 1, 1]]);
        assert_eq!(cfg.blocks(), &[0..2, 2..4]);
        assert_eq!(cfg.kappa(), &[q(-1, 2), q(1, 2), q(1, 2)]);
        assert_eq!(cfg.rank(), 3);
        let ker = lattice_kernel(&cfg).unwrap();
        assert_eq!(ker.len(), 1);
        assert!(ker.contains(&[1, -1, -1, 1]));
        assert_eq!(rank_bound(&cfg).unwrap(), 2);
        let ops = euler_operators(&cfg).unwrap();
        assert_eq!(ops.euler_symbolic, ["θ₂+θ₄+ν₁", "θ₁+θ₂-s₁", "θ₃+θ₄-s₂"]);
        assert_eq!(ops.binomials, ["∂₁∂₄ - ∂₂∂₃"]);
    }

    #[test]
    fn two_lines_resonance() {
        let r = is_nonresonant(&two_lines(true)).unwrap();
        let normals: Vec<_> = r.certificates.iter().map(|c| c.normal.clone()).collect();
        assert_eq!(normals, [vec![-1, 1, 1], vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert!(r.certificates.iter().all(|c| c.g == 1));
        let pairings: Vec<_> = r.certificates.iter().map(|c| c.pairing.clone()).collect();
        assert_eq!(pairings, ["3/2", "1/2", "1/2", "-1/2"]);
        assert!(r.nonresonant);
        let lattice_point = two_lines(true).with_kappa(vec![q(1, 1), q(2, 1), q(1, 1)]).unwrap();
        assert!(!is_nonresonant(&lattice_point).unwrap().nonresonant);
    }

    #[test]
    fn float_resonance_and_irrational_kappa() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let f = vec![LaurentPoly::parse("x - 1", 1).unwrap(), LaurentPoly::parse("x - 2", 1).unwrap()];
        let spec = IntegrandSpec::new(f, vec![c(0.5), c(0.5)], vec![c(2f64.sqrt())]).unwrap();
        assert!(is_nonresonant(&cayley_matrix(&spec)).unwrap().nonresonant);
        let integral = cayley_matrix(&spec).with_kappa(vec![c(-1.0), c(3.0), c(1.0 + 1e-12)]).unwrap();
        assert!(!is_nonresonant(&integral).unwrap().nonresonant);
        let complex = cayley_matrix(&spec)
            .with_kappa(vec![Complex64::new(-1.0, 0.1), Complex64::new(3.0, 0.1), Complex64::new(1.0, 0.1)])
            .unwrap();
        assert!(is_nonresonant(&complex).unwrap().nonresonant);
    }

    #[test]
    fn identity_and_single_column() {
        let id = CayleyConfig::from_matrix(vec![vec![1, 0], vec![0, 1]], vec![q(0, 1), q(0, 1)], 0).unwrap();
        assert!(lattice_kernel(&id).unwrap().is_empty());
        assert_eq!(rank_bound(&id).unwrap(), 1);
        assert_eq!(euler_operators(&id).unwrap().euler, ["θ₁", "θ₂"]);
        let single = CayleyConfig::from_matrix(vec![vec![2], vec![1]], vec![q(0, 1), q(0, 1)], 1).unwrap();
        assert_eq!(euler_operators(&single).unwrap().euler, ["2θ₁", "θ₁"]);
        assert!(matches!(is_nonresonant(&single), Err(Error::Degenerate(_))));
        let report = gkz_report(&single).unwrap();
        assert_eq!(report.nonresonant, None);
        assert_eq!(report.lattice_rank, 1);
    }

    #[test]
    fn linear_factor_config() {
        let f = vec![QPoly::parse("x - 1", 1).unwrap()];
        let cfg = cayley_matrix(&IntegrandSpec::new(f, vec![q(1, 2)], vec![q(1, 3)]).unwrap());
        assert_eq!(cfg.matrix(), &[vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn malformed_block_rows() {
        assert!(CayleyConfig::from_matrix(vec![vec![1, 2], vec![1, 2]], vec![q(0, 1), q(0, 1)], 1).is_err());
        assert!(CayleyConfig::from_matrix(vec![vec![1, 2], vec![0, 1], vec![1, 0]], vec![q(0, 1); 3], 2).is_err());
    }
}
