//! Exact integer linear algebra on big integers: determinants, Hermite normal form, integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major integer matrix.
pub type IMatrix = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> IMatrix {
    m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nonnegative gcd of all entries (zero for an empty or all-zero input).
pub fn gcd_all<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    it.into_iter().fold(BigInt::zero(), |g, v| g.gcd(v))
}

/// Divides out the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = gcd_all(v);
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Determinant of a square matrix by fraction-free (Bareiss) elimination.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Row Hermite normal form `H = U·m` with unimodular `U`.
///
/// `H` keeps all `m.len()` rows; the nonzero rows come first, have positive pivots in strictly
/// increasing columns, and entries above each pivot lie in `[0, pivot)`.
pub fn hnf_with_transform(m: &[Vec<BigInt>]) -> (IMatrix, IMatrix, usize) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut h = m.to_vec();
    let mut u: IMatrix =
        (0..rows).map(|i| (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let pivot = (r..rows).filter(|&i| !h[i][c].is_zero()).min_by_key(|&i| h[i][c].abs());
            let Some(p) = pivot else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                sub_row(&mut h, i, r, &q);
                sub_row(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            h[r].iter_mut().for_each(|v| *v = -&*v);
            u[r].iter_mut().for_each(|v| *v = -&*v);
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            if !q.is_zero() {
                sub_row(&mut h, i, r, &q);
                sub_row(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    (h, u, r)
}

fn sub_row(m: &mut IMatrix, target: usize, src: usize, q: &BigInt) {
    let (t, s) = if target < src {
        let (a, b) = m.split_at_mut(src);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = m.split_at_mut(target);
        (&mut b[0], &a[src])
    };
    for (x, y) in t.iter_mut().zip(s) {
        *x -= q * y;
    }
}

/// Nonzero rows of the row Hermite normal form: a basis of the row lattice.
pub fn hnf(m: &[Vec<BigInt>]) -> IMatrix {
    let (mut h, _, r) = hnf_with_transform(m);
    h.truncate(r);
    h
}

pub fn rank(m: &[Vec<BigInt>]) -> usize {
    hnf_with_transform(m).2
}

/// Lattice basis of `{u ∈ ℤ^cols : a·u = 0}`.
pub fn integer_kernel(a: &[Vec<BigInt>], cols: usize) -> IMatrix {
    let at: IMatrix = (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect();
    let (_, u, r) = hnf_with_transform(&at);
    u.into_iter().skip(r).collect()
}

/// Integer coordinates of `v` in the rows of a Hermite basis, if `v` lies in their span over ℤ.
pub fn solve_in_basis(basis: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for b in basis {
        let c = b.iter().position(|x| !x.is_zero())?;
        if rest[..c].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let (q, r) = rest[c].div_rem(&b[c]);
        if !r.is_zero() {
            return None;
        }
        for (x, y) in rest.iter_mut().zip(b) {
            *x -= &q * y;
        }
        coords.push(q);
    }
    rest.iter().all(Zero::is_zero).then_some(coords)
}

/// Normal `w` to `d − 1` vectors in `ℤ^d` with `w·x = det[v_1; …; v_{d−1}; x]`.
pub fn cofactor_normal(vs: &[Vec<BigInt>]) -> Vec<BigInt> {
    let d = vs.len() + 1;
    (0..d)
        .map(|i| {
            let minor: IMatrix = vs
                .iter()
                .map(|r| r.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect())
                .collect();
            let m = det(&minor);
            if (d - 1 + i).is_multiple_of(2) {
                m
            } else {
                -m
            }
        })
        .collect()
}

/// Maximal-minor gcd of a full-row-rank `r × d` matrix: the index of its row lattice in its saturation.
pub fn saturation_index(basis: &[Vec<BigInt>]) -> BigInt {
    use itertools::Itertools;
    let r = basis.len();
    let d = basis.first().map_or(0, Vec::len);
    let mut g = BigInt::zero();
    for cols in (0..d).combinations(r) {
        let sub: IMatrix = basis.iter().map(|row| cols.iter().map(|&j| row[j].clone()).collect()).collect();
        g = g.gcd(&det(&sub));
        if g.is_one() {
            break;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(m: &[&[i64]]) -> IMatrix {
        to_big(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&b(&[&[2, 1], &[1, 3]])), BigInt::from(5));
        assert_eq!(det(&b(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det(&b(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), BigInt::zero());
        assert_eq!(det(&b(&[&[0, 2, 1], &[3, 0, 0], &[1, 1, 1]])), BigInt::from(-3));
        assert_eq!(det(&[]), BigInt::one());
    }

    #[test]
    fn hermite_form_and_transform() {
        let m = b(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (h, u, r) = hnf_with_transform(&m);
        assert_eq!(r, 3);
        for i in 0..3 {
            for j in 0..3 {
                let v: BigInt = (0..3).map(|k| &u[i][k] * &m[k][j]).sum();
                assert_eq!(v, h[i][j]);
            }
        }
        assert_eq!(det(&u).abs(), BigInt::one());
        assert_eq!(det(&h).abs(), det(&m).abs());
        for (k, row) in h.iter().enumerate() {
            let p = row.iter().position(|x| !x.is_zero()).unwrap();
            assert!(row[p].is_positive());
            for above in &h[..k] {
                assert!(!above[p].is_negative() && above[p] < row[p]);
            }
        }
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let id = b(&[&[1, 0], &[0, 1]]);
        assert!(integer_kernel(&id, 2).is_empty());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = b(&[&[1, 0, 1, 0], &[1, 1, 0, 0], &[0, 0, 1, 1]]);
        let k = integer_kernel(&a, 4);
        assert_eq!(k.len(), 1);
        for row in &a {
            assert!(dot(row, &k[0]).is_zero());
        }
        assert_eq!(primitive(&k[0]).iter().map(|x| x.abs()).collect::<Vec<_>>(), bi(&[1, 1, 1, 1]));
    }

    #[test]
    fn membership() {
        let basis = hnf(&b(&[&[2, 0], &[0, 3]]));
        assert_eq!(solve_in_basis(&basis, &bi(&[4, -3])), Some(bi(&[2, -1])));
        assert_eq!(solve_in_basis(&basis, &bi(&[1, 0])), None);
    }

    #[test]
    fn cofactor_normals() {
        let n = cofactor_normal(&[bi(&[1, 0, 0]), bi(&[0, 1, 0])]);
        assert_eq!(n, bi(&[0, 0, 1]));
        assert_eq!(cofactor_normal(&[]), bi(&[1]));
        let vs = [bi(&[1, 2, 3]), bi(&[-1, 0, 4])];
        let w = cofactor_normal(&vs);
        assert!(dot(&w, &vs[0]).is_zero() && dot(&w, &vs[1]).is_zero());
        let x = bi(&[2, -5, 1]);
        let full = vec![vs[0].clone(), vs[1].clone(), x.clone()];
        assert_eq!(dot(&w, &x), det(&full));
    }

    #[test]
    fn saturation() {
        assert_eq!(saturation_index(&b(&[&[1, 1, 0], &[0, 2, 0]])), BigInt::from(2));
        assert_eq!(saturation_index(&b(&[&[1, 1, 0], &[0, 1, 1]])), BigInt::one());
    }
}
