//! Newton polytope of the Cayley polynomial `h = Σ_j y_j f_j` and its lattice-normalized volume.
//!
//! Volumes are exact: points are rewritten in a basis of the lattice they generate, the
//! configuration `{0} ∪ pts` is triangulated by recursive pulling from the lexicographically
//! smallest vertex of every face, and simplex determinants are summed in big integers.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::exact::{cofactor_normal, dot, hnf, primitive, rank, saturation_index, solve_in_basis, to_big, IMatrix};
use crate::laurent::IntegrandSpec;

/// Finite set of lattice points in `ℤ^dim`, sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet")]
pub struct LatticePointSet {
    dim: usize,
    points: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct RawPointSet {
    dim: usize,
    points: Vec<Vec<i64>>,
}

impl TryFrom<RawPointSet> for LatticePointSet {
    type Error = Error;

    fn try_from(raw: RawPointSet) -> Result<Self> {
        LatticePointSet::new(raw.dim, raw.points)
    }
}

impl LatticePointSet {
    pub fn new(dim: usize, mut points: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("lattice dimension must be positive".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        points.sort();
        points.dedup();
        Ok(LatticePointSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Normalized volume of `Conv({0} ∪ pts)` against the lattice generated by the points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VolumeReport {
    pub normalized_volume: u64,
    /// Dimension of the affine span of the points.
    pub affine_dim: usize,
    /// Rank of the lattice `ℤ·pts`.
    pub lattice_rank: usize,
    /// Index of `ℤ·pts` in the integer points of its real span.
    pub lattice_index: u64,
    pub lattice_index_note: String,
}

/// Inner facet inequality `normal·α ≥ offset` of a cone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

/// Support of `h`: the points `(α, e_j)` for `α ∈ supp(f_j)`.
pub fn cayley_support<C: Coeff>(spec: &IntegrandSpec<C>) -> LatticePointSet {
    let (n, ell) = (spec.n(), spec.ell());
    let points = spec
        .f()
        .iter()
        .enumerate()
        .flat_map(|(j, fj)| {
            fj.support().map(move |alpha| {
                let mut p = alpha.clone();
                p.extend((0..ell).map(|k| i64::from(k == j)));
                p
            })
        })
        .collect();
    LatticePointSet::new(n + ell, points).expect("consistent dimensions")
}

pub fn normalized_volume(pts: &LatticePointSet) -> Result<VolumeReport> {
    if pts.is_empty() {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    let big = to_big(pts.points());
    let base = &big[0];
    let diffs: IMatrix = big[1..].iter().map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    let affine_dim = if diffs.is_empty() { 0 } else { rank(&diffs) };
    if affine_dim == 0 {
        return Ok(VolumeReport {
            normalized_volume: 0,
            affine_dim: 0,
            lattice_rank: usize::from(big[0].iter().any(|v| !v.is_zero())),
            lattice_index: 1,
            lattice_index_note: "all points coincide; the polytope is a single point".into(),
        });
    }
    let basis = hnf(&big);
    let r = basis.len();
    let mut coords: IMatrix = vec![vec![BigInt::zero(); r]];
    for p in &big {
        coords.push(solve_in_basis(&basis, p).expect("generators lie in their own lattice"));
    }
    coords.sort();
    coords.dedup();
    let volume = pulling_volume(&coords, r);
    let index = saturation_index(&basis);
    let note = if index.is_one() {
        "the points generate all integer points of their span; lattice and ambient volumes agree".to_string()
    } else {
        format!("the points generate an index-{index} sublattice of the integer points of their span; volume is measured against the generated lattice")
    };
    Ok(VolumeReport {
        normalized_volume: volume.to_u64().ok_or_else(|| Error::InvalidInput("volume overflows u64".into()))?,
        affine_dim,
        lattice_rank: r,
        lattice_index: index.to_u64().unwrap_or(u64::MAX),
        lattice_index_note: note,
    })
}

/// Sum of `|det|` over a pulling triangulation of a full-dimensional configuration in `ℤ^r`.
fn pulling_volume(pts: &IMatrix, r: usize) -> BigInt {
    let mut total = BigInt::zero();
    let all: Vec<usize> = (0..pts.len()).collect();
    let mut apex = Vec::new();
    pull(pts, &all, r, &mut apex, &mut total);
    total
}

fn pull(pts: &IMatrix, face: &[usize], k: usize, apex: &mut Vec<usize>, total: &mut BigInt) {
    let v = *face.iter().min_by(|a, b| pts[**a].cmp(&pts[**b])).expect("nonempty face");
    if k == 0 {
        apex.push(v);
        let origin = &pts[apex[0]];
        let m: IMatrix = apex[1..].iter().map(|&i| pts[i].iter().zip(origin).map(|(a, b)| a - b).collect()).collect();
        *total += crate::exact::det(&m).abs();
        apex.pop();
        return;
    }
    let local = project(pts, face, k);
    apex.push(v);
    for facet in facets_full_dim(&local, k) {
        let sub: Vec<usize> = facet.into_iter().map(|i| face[i]).collect();
        if !sub.contains(&v) {
            pull(pts, &sub, k - 1, apex, total);
        }
    }
    apex.pop();
}

/// Injective integer coordinates `ℤ^k` for a `k`-dimensional face.
fn project(pts: &IMatrix, face: &[usize], k: usize) -> IMatrix {
    let p0 = &pts[face[0]];
    let mut dirs: IMatrix = Vec::with_capacity(k);
    for &q in &face[1..] {
        if dirs.len() == k {
            break;
        }
        let d: Vec<BigInt> = pts[q].iter().zip(p0).map(|(a, b)| a - b).collect();
        dirs.push(d);
        if rank(&dirs) < dirs.len() {
            dirs.pop();
        }
    }
    face.iter()
        .map(|&q| {
            let d: Vec<BigInt> = pts[q].iter().zip(p0).map(|(a, b)| a - b).collect();
            dirs.iter().map(|m| dot(m, &d)).collect()
        })
        .collect()
}

/// Facets of a full-dimensional point configuration in `ℤ^k`, as sorted index sets.
fn facets_full_dim(pts: &IMatrix, k: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for subset in (0..pts.len()).combinations(k) {
        let o = &pts[subset[0]];
        let vs: IMatrix = subset[1..].iter().map(|&i| pts[i].iter().zip(o).map(|(a, b)| a - b).collect()).collect();
        let w = cofactor_normal(&vs);
        if w.iter().all(Zero::is_zero) {
            continue;
        }
        let heights: Vec<BigInt> = pts
            .iter()
            .map(|p| {
                let d: Vec<BigInt> = p.iter().zip(o).map(|(a, b)| a - b).collect();
                dot(&w, &d)
            })
            .collect();
        let pos = heights.iter().any(Signed::is_positive);
        let neg = heights.iter().any(Signed::is_negative);
        if !(pos && neg) {
            out.insert(heights.iter().positions(Zero::is_zero).collect());
        }
    }
    out
}

/// Irredundant inner facet normals of the cone `Σ ℝ_{≥0}·α`, primitive and sorted.
pub fn facets(pts: &LatticePointSet) -> Result<Vec<Facet>> {
    let gens: Vec<Vec<BigInt>> = to_big(pts.points()).into_iter().filter(|p| p.iter().any(|v| !v.is_zero())).collect();
    if gens.is_empty() {
        return Err(Error::Degenerate("the cone is zero-dimensional".into()));
    }
    let d = pts.dim();
    let r = rank(&gens);
    if r < d {
        return Err(Error::Degenerate(format!("the cone spans a rank-{r} subspace of a {d}-dimensional space")));
    }
    let mut found = BTreeSet::new();
    for subset in (0..gens.len()).combinations(d - 1) {
        let vs: IMatrix = subset.iter().map(|&i| gens[i].clone()).collect();
        let w = cofactor_normal(&vs);
        if w.iter().all(Zero::is_zero) {
            continue;
        }
        let vals: Vec<BigInt> = gens.iter().map(|g| dot(&w, g)).collect();
        let pos = vals.iter().any(Signed::is_positive);
        let neg = vals.iter().any(Signed::is_negative);
        if pos && neg {
            continue;
        }
        let w = primitive(&w);
        let w: Vec<BigInt> = if neg { w.iter().map(|x| -x).collect() } else { w };
        found.insert(w);
    }
    Ok(found
        .into_iter()
        .map(|w| Facet {
            normal: w.iter().map(|x| x.to_i64().expect("primitive normal fits in i64")).collect(),
            offset: 0,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;
    use num_complex::Complex64;

    fn set(dim: usize, pts: &[&[i64]]) -> LatticePointSet {
        LatticePointSet::new(dim, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn hexagon_support() -> LatticePointSet {
        set(3, &[&[1, 2, 1], &[1, 3, 1], &[2, 1, 1], &[2, 3, 1], &[3, 1, 1], &[3, 2, 1]])
    }

    #[test]
    fn cayley_support_of_two_linear_factors() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let f = vec![LaurentPoly::parse("x - 1", 1).unwrap(), LaurentPoly::parse("x - 2", 1).unwrap()];
        let spec = IntegrandSpec::new(f, vec![c(0.5), c(0.5)], vec![c(0.5)]).unwrap();
        let s = cayley_support(&spec);
        assert_eq!(s, set(3, &[&[1, 1, 0], &[0, 1, 0], &[1, 0, 1], &[0, 0, 1]]));
        assert_eq!(normalized_volume(&s).unwrap().normalized_volume, 2);
    }

    #[test]
    fn hexagonal_pyramid() {
        let r = normalized_volume(&hexagon_support()).unwrap();
        assert_eq!(r.normalized_volume, 6);
        assert_eq!(r.affine_dim, 2);
        assert_eq!(r.lattice_index, 1);
    }

    #[test]
    fn unit_simplex() {
        for d in 2..6 {
            let pts = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
            let s = LatticePointSet::new(d, pts).unwrap();
            assert_eq!(normalized_volume(&s).unwrap().normalized_volume, 1, "d = {d}");
        }
    }

    #[test]
    fn degenerate_and_duplicate_points() {
        let s = set(2, &[&[1, 1], &[1, 1]]);
        assert_eq!(s.len(), 1);
        let r = normalized_volume(&s).unwrap();
        assert_eq!((r.normalized_volume, r.affine_dim), (0, 0));
        assert!(normalized_volume(&set(2, &[])).is_err());
    }

    #[test]
    fn sublattice_is_reported() {
        let s = set(2, &[&[2, 0], &[0, 2]]);
        let r = normalized_volume(&s).unwrap();
        assert_eq!(r.normalized_volume, 1);
        assert_eq!(r.lattice_index, 4);
        assert!(r.lattice_index_note.contains("index-4"));
    }

    #[test]
    fn segment_with_interior_points() {
        let s = set(2, &[&[0, 1], &[1, 1], &[2, 1], &[3, 1]]);
        assert_eq!(normalized_volume(&s).unwrap().normalized_volume, 3);
    }

    #[test]
    fn facets_of_orthant() {
        let f = facets(&set(2, &[&[1, 0], &[0, 1]])).unwrap();
        let normals: Vec<_> = f.iter().map(|x| x.normal.clone()).collect();
        assert_eq!(normals, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn facets_of_hexagon_cone() {
        assert_eq!(facets(&hexagon_support()).unwrap().len(), 6);
    }

    #[test]
    fn facets_of_square_cone() {
        let s = set(3, &[&[1, 1, 0], &[0, 1, 0], &[1, 0, 1], &[0, 0, 1]]);
        let normals: Vec<_> = facets(&s).unwrap().into_iter().map(|f| f.normal).collect();
        assert_eq!(normals, vec![vec![-1, 1, 1], vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn degenerate_cones() {
        assert!(matches!(facets(&set(2, &[&[0, 0]])), Err(Error::Degenerate(_))));
        assert!(matches!(facets(&set(2, &[&[1, 1], &[2, 2]])), Err(Error::Degenerate(_))));
    }
}
