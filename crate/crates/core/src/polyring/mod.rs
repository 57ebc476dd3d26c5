//! Complex univariate and bivariate polynomials: roots, approximate gcd,
//! resultants and principal subresultant coefficients.

mod bivar;
mod gcd;
mod linalg;
mod poly;
mod roots;
mod sylvester;

pub use bivar::{divide_out_bivar, BivarPoly};
pub use gcd::gcd_approx;
pub use poly::ComplexPoly;
pub use roots::{expand_roots, raw_roots, roots, roots_on_sphere, roots_with, Root, RootOptions};
pub use sylvester::{resultant, subresultant_coeff, subresultant_gcd_degree, subresultant_scale};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("root iteration did not converge (worst backward error {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("subresultant index {j} exceeds {max}")]
    IndexOutOfRange { j: usize, max: usize },
    #[error("division leaves relative remainder {remainder:e}")]
    NotDivisible { remainder: f64 },
}
