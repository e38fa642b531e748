//! Coefficient rings: double-precision complex numbers and exact Gaussian rationals.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Exact complex rational `p + q i`.
pub type QComplex = Complex<BigRational>;

/// A parsed numeric literal, kept exactly and as the nearest doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    pub exact: QComplex,
    pub approx: Complex64,
}

impl Literal {
    pub fn from_int(v: i64) -> Self {
        Literal {
            exact: QComplex::new(BigRational::from_integer(v.into()), BigRational::zero()),
            approx: Complex64::new(v as f64, 0.0),
        }
    }
}

/// Coefficient field of a [`LaurentPoly`](crate::laurent::LaurentPoly).
pub trait Coeff: Num + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync + 'static {
    fn from_int(v: i64) -> Self;
    fn from_literal(lit: &Literal) -> Self;
    fn to_c64(&self) -> Complex64;
    /// The exact value, when the ring is exact.
    fn as_exact(&self) -> Option<QComplex>;
    /// Text accepted back by the polynomial parser.
    fn render(&self) -> String;
}

impl Coeff for Complex64 {
    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_literal(lit: &Literal) -> Self {
        lit.approx
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn as_exact(&self) -> Option<QComplex> {
        None
    }

    fn render(&self) -> String {
        render_parts(self.re == 0.0, self.im == 0.0, self.re.to_string(), self.im.abs().to_string(), self.im < 0.0)
    }
}

impl Coeff for QComplex {
    fn from_int(v: i64) -> Self {
        QComplex::new(BigRational::from_integer(v.into()), BigRational::zero())
    }

    fn from_literal(lit: &Literal) -> Self {
        lit.exact.clone()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }

    fn as_exact(&self) -> Option<QComplex> {
        Some(self.clone())
    }

    fn render(&self) -> String {
        render_parts(
            self.re.is_zero(),
            self.im.is_zero(),
            self.re.to_string(),
            self.im.abs().to_string(),
            self.im.is_negative(),
        )
    }
}

fn render_parts(re_zero: bool, im_zero: bool, re: String, im_abs: String, im_neg: bool) -> String {
    if im_zero {
        return re;
    }
    let sign = if im_neg { "-" } else { "+" };
    let im = if im_abs == "1" { String::new() } else { im_abs };
    if re_zero {
        let lead = if im_neg { "-" } else { "" };
        format!("({lead}{im}i)")
    } else {
        format!("({re}{sign}{im}i)")
    }
}

pub fn q_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn q_from_i64(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact rational equal to the double `x`.
pub fn q_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Best rational approximation `p/q` with `q ≤ max_den` within `tol` of `x`, by continued fractions.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i128;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den as i128 {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            return Some((p2 as i64, q2 as u64));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Exact rational `p/q` as a [`BigRational`].
pub fn q_ratio(p: i64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Real part of a Gaussian rational when the imaginary part vanishes.
pub fn real_part(q: &QComplex) -> Option<&BigRational> {
    q.im.is_zero().then_some(&q.re)
}

pub fn q_one() -> QComplex {
    QComplex::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(0.5, 64, 1e-9), Some((1, 2)));
        assert_eq!(rationalize(-0.75, 64, 1e-9), Some((-3, 4)));
        assert_eq!(rationalize(1.0 / 3.0 + 1e-12, 64, 1e-9), Some((1, 3)));
        assert_eq!(rationalize(2.0, 64, 1e-9), Some((2, 1)));
        assert_eq!(rationalize(std::f64::consts::SQRT_2, 64, 1e-9), None);
    }

    #[test]
    fn render_forms() {
        assert_eq!(Complex64::new(2.0, 0.0).render(), "2");
        assert_eq!(Complex64::new(0.5, -1.0).render(), "(0.5-i)");
        assert_eq!(Complex64::new(0.0, 2.5).render(), "(2.5i)");
        let q = QComplex::new(q_ratio(1, 2), q_ratio(-3, 2));
        assert_eq!(q.render(), "(1/2-3/2i)");
        assert_eq!(q.to_c64(), Complex64::new(0.5, -1.5));
    }
}
