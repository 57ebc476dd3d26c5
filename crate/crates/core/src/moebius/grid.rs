use num_complex::Complex;
use rand::Rng;

use super::SpherePoint;
use crate::scalar::{from_usize, lit, Real};

/// `n` nearly equidistributed points on the sphere (golden-angle spiral),
/// returned via stereographic projection.
pub fn fibonacci_sphere<T: Real>(n: usize) -> Vec<SpherePoint<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let h = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - h * h).max(0.0).sqrt();
            let phi = golden * i as f64;
            let (x, y) = (r * phi.cos(), r * phi.sin());
            // (x, y, h) ↦ (x + iy : 1 − h), or (1 + h : x − iy) near the north pole.
            let p = if h < 0.0 {
                SpherePoint::new(Complex::new(lit(x), lit(y)), Complex::new(lit(1.0 - h), T::zero()))
            } else {
                SpherePoint::new(Complex::new(lit(1.0 + h), T::zero()), Complex::new(lit(x), lit(-y)))
            };
            p.expect("nonzero")
        })
        .collect()
}

/// Typical chordal spacing of an `n`-point Fibonacci grid.
pub fn fibonacci_mesh<T: Real>(n: usize) -> T {
    (lit::<T>(4.0) * T::PI() / from_usize(n.max(1))).sqrt()
}

/// Points uniform with respect to spherical area.
pub fn random_sphere_points<T: Real, R: Rng>(rng: &mut R, n: usize) -> Vec<SpherePoint<T>> {
    (0..n)
        .map(|_| {
            let h: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (1.0 - h * h).sqrt();
            let (x, y) = (r * phi.cos(), r * phi.sin());
            let p = if h < 0.0 {
                SpherePoint::new(Complex::new(lit(x), lit(y)), Complex::new(lit(1.0 - h), T::zero()))
            } else {
                SpherePoint::new(Complex::new(lit(1.0 + h), T::zero()), Complex::new(lit(x), lit(-y)))
            };
            p.unwrap_or_else(SpherePoint::infinity)
        })
        .collect()
}
