//! Riemann sphere points in projective coordinates and Möbius maps.

mod grid;
mod rescaling;

pub use grid::{fibonacci_sphere, fibonacci_mesh, random_sphere_points};
pub use rescaling::{
    classify_rescaling_pair, default_samples, MoebiusFamily, RescalingRelation,
    RescalingSequence, RescalingThresholds,
};

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cone, cplx, czero, lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("matrix is singular (determinant {0:e})")]
    Singular(f64),
    #[error("the three target points are not distinct")]
    DegenerateTriple,
    #[error("sequences sampled on different index grids")]
    SampleMismatch,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sampled data matches no regime: {0}")]
    Inconclusive(String),
}

/// A point `(z : w)` of the Riemann sphere, stored with `max(|z|, |w|) = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint<T> {
    z: Complex<T>,
    w: Complex<T>,
}

impl<T: Real> SpherePoint<T> {
    /// Returns `None` for `(0, 0)` or non-finite input.
    pub fn new(z: Complex<T>, w: Complex<T>) -> Option<Self> {
        let m = z.norm().max(w.norm());
        if !(m > T::zero()) || !m.is_finite() {
            return None;
        }
        Some(Self { z: z / m, w: w / m })
    }

    pub fn finite(z: Complex<T>) -> Self {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Self::infinity();
        }
        Self::new(z, cone()).expect("finite point")
    }

    pub fn real(x: T) -> Self {
        Self::finite(Complex::new(x, T::zero()))
    }

    pub fn infinity() -> Self {
        Self { z: cone(), w: czero() }
    }

    pub fn zero() -> Self {
        Self { z: czero(), w: cone() }
    }

    pub fn z(&self) -> Complex<T> {
        self.z
    }

    pub fn w(&self) -> Complex<T> {
        self.w
    }

    /// Affine coordinate `z/w`, or `None` at infinity.
    pub fn affine(&self) -> Option<Complex<T>> {
        if self.w == czero() {
            None
        } else {
            Some(self.z / self.w)
        }
    }

    /// Affine coordinate with infinity mapped to a non-finite value.
    pub fn affine_or_inf(&self) -> Complex<T> {
        self.affine()
            .unwrap_or_else(|| Complex::new(T::infinity(), T::zero()))
    }

    pub fn is_infinity(&self) -> bool {
        self.w == czero()
    }

    /// The involution `z ↦ 1/z`, realized as a coordinate swap.
    pub fn eta(&self) -> Self {
        Self { z: self.w, w: self.z }
    }

    /// Exact projective equality: `z_p w_q = z_q w_p`.
    pub fn same_point(&self, other: &Self) -> bool {
        self.z * other.w == other.z * self.w
    }

    pub fn distance(&self, other: &Self) -> T {
        spherical_distance(self, other)
    }
}

/// The fixed involution `η(z) = 1/z`.
pub fn eta<T: Real>(p: &SpherePoint<T>) -> SpherePoint<T> {
    p.eta()
}

/// Chordal distance on the unit sphere; bounded by 2.
pub fn spherical_distance<T: Real>(p: &SpherePoint<T>, q: &SpherePoint<T>) -> T {
    let cross = p.z * q.w - q.z * p.w;
    let np = (p.z.norm_sqr() + p.w.norm_sqr()).sqrt();
    let nq = (q.z.norm_sqr() + q.w.norm_sqr()).sqrt();
    let two: T = lit(2.0);
    (two * cross.norm() / (np * nq)).min(two)
}

/// An element of PSL₂(ℂ) with `ad − bc = 1` (up to global sign).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap<T> {
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
}

impl<T: Real> MoebiusMap<T> {
    pub fn new(
        a: Complex<T>,
        b: Complex<T>,
        c: Complex<T>,
        d: Complex<T>,
    ) -> Result<Self, MoebiusError> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(scale > T::zero()) || !(det.norm() > T::epsilon() * scale * scale * lit(1e-3)) {
            return Err(MoebiusError::Singular(det.norm().to_f64().unwrap_or(0.0)));
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        Self { a: cone(), b: czero(), c: czero(), d: cone() }
    }

    /// `z ↦ 1/z` as a Möbius map.
    pub fn eta() -> Self {
        Self::new(czero(), cone(), cone(), czero()).unwrap()
    }

    pub fn translation(t: Complex<T>) -> Self {
        Self { a: cone(), b: t, c: czero(), d: cone() }
    }

    pub fn scaling(lambda: Complex<T>) -> Result<Self, MoebiusError> {
        Self::new(lambda, czero(), czero(), cone())
    }

    /// `z ↦ λz + t`.
    pub fn affine(lambda: Complex<T>, t: Complex<T>) -> Result<Self, MoebiusError> {
        Self::new(lambda, t, czero(), cone())
    }

    /// The map sending `0, 1, ∞` to `p0, p1, p2`.
    ///
    /// Degeneracy is judged against the rounding error of each 2×2
    /// determinant, so nearby points close to ∞ are still resolved.
    pub fn from_points(
        p0: &SpherePoint<T>,
        p1: &SpherePoint<T>,
        p2: &SpherePoint<T>,
    ) -> Result<Self, MoebiusError> {
        let det = |u: &SpherePoint<T>, v: &SpherePoint<T>| {
            let d = u.z * v.w - v.z * u.w;
            let err = (u.z * v.w).norm() + (v.z * u.w).norm();
            if d.norm() <= T::epsilon() * lit(64.0) * err {
                None
            } else {
                Some(d)
            }
        };
        let d20 = det(p2, p0).ok_or(MoebiusError::DegenerateTriple)?;
        let d10 = det(p1, p0).ok_or(MoebiusError::DegenerateTriple)?;
        let d21 = det(p2, p1).ok_or(MoebiusError::DegenerateTriple)?;
        // p1 ∝ λ p2 + μ p0
        let lambda = d10 / d20;
        let mu = d21 / d20;
        Self::new(lambda * p2.z, mu * p0.z, lambda * p2.w, mu * p0.w)
    }

    pub fn entries(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, p: &SpherePoint<T>) -> SpherePoint<T> {
        let z = self.a * p.z + self.b * p.w;
        let w = self.c * p.z + self.d * p.w;
        SpherePoint::new(z, w).unwrap_or_else(SpherePoint::infinity)
    }

    pub fn apply_affine(&self, z: Complex<T>) -> SpherePoint<T> {
        self.apply(&SpherePoint::finite(z))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // Product of determinant-one matrices; renormalize against drift.
        Self::new(a, b, c, d).unwrap_or(Self { a, b, c, d })
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn trace(&self) -> Complex<T> {
        self.a + self.d
    }

    /// Largest singular value of the determinant-one matrix.
    pub fn operator_norm(&self) -> T {
        let f2 = self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr();
        let det = (self.a * self.d - self.b * self.c).norm();
        let two: T = lit(2.0);
        let disc = (f2 * f2 - lit::<T>(4.0) * det * det).max(T::zero()).sqrt();
        ((f2 + disc) / two).sqrt()
    }

    /// Largest entrywise difference.
    pub fn entry_distance(&self, other: &Self) -> T {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .map(|(x, y)| (*x - *y).norm())
            .fold(T::zero(), T::max)
    }

    /// Distance in PSL₂: the smaller of the distances to `±other`.
    pub fn projective_distance(&self, other: &Self) -> T {
        self.entry_distance(other).min(self.entry_distance(&other.neg()))
    }

    /// `±self`, whichever is entrywise closer to `reference`.
    pub fn sign_aligned(&self, reference: &Self) -> Self {
        if self.entry_distance(reference) <= self.neg().entry_distance(reference) {
            *self
        } else {
            self.neg()
        }
    }
}

/// Does `M` commute with `η` on a fixed probe set, to `tol` in chordal distance?
pub fn commutes_with_eta<T: Real>(m: &MoebiusMap<T>, tol: T) -> bool {
    let probes: [(f64, f64); 6] = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (2.0, 1.0), (-0.5, 0.3), (3.0, -2.0)];
    let mut pts: Vec<SpherePoint<T>> = vec![SpherePoint::zero(), SpherePoint::infinity()];
    pts.extend(probes.iter().map(|&(re, im)| SpherePoint::finite(cplx(re, im))));
    pts.iter().all(|p| {
        let lhs = m.apply(&p.eta());
        let rhs = m.apply(p).eta();
        spherical_distance(&lhs, &rhs) <= tol
    })
}
