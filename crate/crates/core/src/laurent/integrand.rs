use num_complex::Complex64;

use super::LaurentPoly;
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// The family `f^s x^ν` with `f = (f_1..f_ℓ)`, `s ∈ ℂ^ℓ`, `ν ∈ ℂ^n`.
///
/// Every `f_j` is a nonzero non-monomial Laurent polynomial in the same `n ≥ 1` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrandSpec<C = Complex64> {
    f: Vec<LaurentPoly<C>>,
    s: Vec<C>,
    nu: Vec<C>,
    grad: Vec<Vec<LaurentPoly<Complex64>>>,
    f_num: Vec<LaurentPoly<Complex64>>,
}

impl<C: Coeff> IntegrandSpec<C> {
    pub fn new(f: Vec<LaurentPoly<C>>, s: Vec<C>, nu: Vec<C>) -> Result<Self> {
        let first = f.first().ok_or_else(|| Error::InvalidSpec("at least one f_j is required".into()))?;
        let n = first.nvars();
        if n == 0 {
            return Err(Error::InvalidSpec("at least one variable is required".into()));
        }
        for (j, fj) in f.iter().enumerate() {
            if fj.nvars() != n {
                return Err(Error::InvalidSpec(format!("f_{} has {} variables, f_1 has {n}", j + 1, fj.nvars())));
            }
            if fj.is_zero() {
                return Err(Error::InvalidSpec(format!("f_{} is zero", j + 1)));
            }
            if fj.is_monomial() {
                return Err(Error::InvalidSpec(format!("f_{} is a monomial (a unit on the torus)", j + 1)));
            }
        }
        if s.len() != f.len() {
            return Err(Error::InvalidSpec(format!("{} exponents s for {} polynomials", s.len(), f.len())));
        }
        if nu.len() != n {
            return Err(Error::InvalidSpec(format!("{} exponents ν for {n} variables", nu.len())));
        }
        let f_num: Vec<_> = f.iter().map(LaurentPoly::to_c64).collect();
        let grad = f_num.iter().map(|fj| (0..n).map(|i| fj.partial(i).expect("index in range")).collect()).collect();
        Ok(IntegrandSpec { f, s, nu, grad, f_num })
    }

    /// Same polynomials with new exponents.
    pub fn with_params(&self, s: Vec<C>, nu: Vec<C>) -> Result<Self> {
        Self::new(self.f.clone(), s, nu)
    }

    /// Number of variables `n`.
    pub fn n(&self) -> usize {
        self.f[0].nvars()
    }

    /// Number of polynomials `ℓ`.
    pub fn ell(&self) -> usize {
        self.f.len()
    }

    pub fn f(&self) -> &[LaurentPoly<C>] {
        &self.f
    }

    pub fn s(&self) -> &[C] {
        &self.s
    }

    pub fn nu(&self) -> &[C] {
        &self.nu
    }

    pub fn to_numeric(&self) -> IntegrandSpec<Complex64> {
        IntegrandSpec {
            f: self.f_num.clone(),
            s: self.s.iter().map(Coeff::to_c64).collect(),
            nu: self.nu.iter().map(Coeff::to_c64).collect(),
            grad: self.grad.clone(),
            f_num: self.f_num.clone(),
        }
    }

    /// Values `f_j(x)`, failing when `x` leaves the torus or meets some `V(f_j)`.
    pub fn f_values(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        if let Some(i) = x.iter().position(|v| *v == Complex64::new(0.0, 0.0)) {
            return Err(Error::OutsideX(format!("coordinate x{} is zero", i + 1)));
        }
        let vals: Vec<_> = self.f_num.iter().map(|fj| fj.evaluate_unchecked(x)).collect();
        if let Some(j) = vals.iter().position(|v| *v == Complex64::new(0.0, 0.0)) {
            return Err(Error::OutsideX(format!("f_{} vanishes", j + 1)));
        }
        Ok(vals)
    }

    /// Components of `ω = dlog(f^s x^ν)`: `ω_i = Σ_j s_j ∂_i f_j / f_j + ν_i / x_i`.
    pub fn omega_components(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let fv = self.f_values(x)?;
        let s: Vec<Complex64> = self.s.iter().map(Coeff::to_c64).collect();
        Ok((0..self.n())
            .map(|i| {
                let from_f: Complex64 =
                    (0..self.ell()).map(|j| s[j] * self.grad[j][i].evaluate_unchecked(x) / fv[j]).sum();
                from_f + self.nu[i].to_c64() / x[i]
            })
            .collect())
    }

    /// Gradient polynomials `∂_i f_j` in double precision, indexed `[j][i]`.
    pub fn gradient(&self) -> &[Vec<LaurentPoly<Complex64>>] {
        &self.grad
    }
}
