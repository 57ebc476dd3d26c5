//! Algebraic correspondences on the Riemann sphere: rational maps and their
//! rescaling limits, trees of spheres, Bowen–Series circle maps and explicit
//! mating families.
//!
//! Numeric types are generic over [`scalar::Real`]; the aliases below fix
//! `f64` (and `f32` where it makes sense).

pub mod expr;
mod extrapolate;
pub mod moebius;
pub mod polyring;
pub mod ratmap;
pub mod correspondence;
pub mod trees;
pub mod fuchsian;
pub mod mating;
pub mod io;
pub mod scalar;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type SpherePoint64 = moebius::SpherePoint<f64>;
pub type SpherePoint32 = moebius::SpherePoint<f32>;
pub type MoebiusMap64 = moebius::MoebiusMap<f64>;
pub type MoebiusMap32 = moebius::MoebiusMap<f32>;
pub type ComplexPoly64 = polyring::ComplexPoly<f64>;
pub type BivarPoly64 = polyring::BivarPoly<f64>;
pub type HomRationalMap64 = ratmap::HomRationalMap<f64>;
pub type Correspondence64 = correspondence::Correspondence<f64>;
pub type TreeOfSpheres64 = trees::TreeOfSpheres<f64>;
