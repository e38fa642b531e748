//! Generalized Euler integrals `∫_Γ f^{s+a} x^{ν+b} dx/x`: the dimension of the space they span,
//! computed by counting critical points, by a lattice polytope volume and by numerical pairing of
//! twisted cycles with cocycles, together with symbolic and numerical linear relations among them.

pub mod coeff;
pub mod critical;
pub mod error;
pub mod exact;
pub mod gkz;
pub mod laurent;
pub mod polytope;
pub mod relations;
pub mod twisted;

pub use coeff::{Coeff, Literal, QComplex};
pub use error::{Error, Result};
pub use laurent::{IntegrandSpec, LaurentPoly, QPoly};
