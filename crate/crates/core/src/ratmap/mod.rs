//! Homogeneous rational maps, holes and reduced maps, critical points,
//! Möbius conjugation, limits of degenerating families and the variety `V_d`.

mod family;
mod limits;
mod vd;

pub use family::{ConjugatedFamily, ExprMapFamily, FnMapFamily, MapFamily};
pub use limits::{
    find_corescaling, limit_of_family, rescaling_limit, verify_rescaling_set, CorescalingResult,
    LimitOptions, LimitReport, LimitStatus, RescalingSetReport,
};
pub use vd::{vd_membership, VdReport};

use num_complex::Complex;
use thiserror::Error;

use crate::moebius::{MoebiusError, MoebiusMap, SpherePoint};
use crate::polyring::{gcd_approx, resultant, roots, subresultant_scale, ComplexPoly, PolyError, Root};
use crate::scalar::{cone, czero, lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RatMapError {
    #[error("numerator and denominator are both zero")]
    BothZero,
    #[error("declared degree {declared} is below polynomial degree {actual}")]
    DegreeExceeded { declared: usize, actual: usize },
    #[error("evaluation point lies on a hole")]
    EvaluationAtHole,
    #[error("reduced map has degree 0")]
    DegreeZero,
    #[error("expected degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("coefficients are not Cauchy (extrapolated drift {drift:e})")]
    NotCauchy { drift: f64 },
    #[error("probe images collide at n = {n}")]
    ProbeCollapse { n: u64 },
    #[error("probes must be pairwise at least {min} apart")]
    InvalidProbes { min: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("family evaluation failed at n = {n}: {msg}")]
    Family { n: u64, msg: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// Relative tolerance below which an evaluation counts as `(0 : 0)`.
const HOLE_EVAL_TOL: f64 = 1e-7;

/// A degree-`d` map `(P(z,w) : Q(z,w))`, stored through the dehomogenized
/// coefficient vectors of `P(z,1)` and `Q(z,1)` with joint sup-norm 1.
#[derive(Clone, Debug, PartialEq)]
pub struct HomRationalMap<T> {
    d: usize,
    p: ComplexPoly<T>,
    q: ComplexPoly<T>,
}

impl<T: Real> HomRationalMap<T> {
    pub fn new(d: usize, p: ComplexPoly<T>, q: ComplexPoly<T>) -> Result<Self, RatMapError> {
        if p.is_zero() && q.is_zero() {
            return Err(RatMapError::BothZero);
        }
        let actual = p.deg().max(q.deg());
        if actual > d {
            return Err(RatMapError::DegreeExceeded { declared: d, actual });
        }
        let m = p.max_abs().max(q.max_abs());
        let s = Complex::new(T::one() / m, T::zero());
        Ok(Self { d, p: p.scale(s), q: q.scale(s) })
    }

    /// Map with real coefficients, ascending.
    pub fn from_real(d: usize, num: &[f64], den: &[f64]) -> Result<Self, RatMapError> {
        Self::new(d, ComplexPoly::from_real(num), ComplexPoly::from_real(den))
    }

    /// `z ↦ z^d` as `(z^d : w^d)`.
    pub fn power(d: usize) -> Self {
        Self::new(d, ComplexPoly::monomial(cone(), d), ComplexPoly::one()).unwrap()
    }

    pub fn identity() -> Self {
        Self::power(1)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn num(&self) -> &ComplexPoly<T> {
        &self.p
    }

    pub fn den(&self) -> &ComplexPoly<T> {
        &self.q
    }

    /// `(P_0, …, P_d, Q_0, …, Q_d)`.
    pub fn coefficient_vector(&self) -> Vec<Complex<T>> {
        let mut v = self.p.padded(self.d + 1);
        v.extend(self.q.padded(self.d + 1));
        v
    }

    pub fn from_coefficient_vector(d: usize, v: &[Complex<T>]) -> Result<Self, RatMapError> {
        assert_eq!(v.len(), 2 * (d + 1), "coefficient vector length");
        Self::new(d, ComplexPoly::exact(v[..=d].to_vec()), ComplexPoly::exact(v[d + 1..].to_vec()))
    }

    /// Raw homogeneous values `(P(z,w), Q(z,w))`, possibly both zero at a hole.
    pub fn eval_pair(&self, x: &SpherePoint<T>) -> (Complex<T>, Complex<T>) {
        (self.p.eval_homogeneous(self.d, x), self.q.eval_homogeneous(self.d, x))
    }

    /// Value at `x`, without the hole check; holes evaluate to ∞.
    pub fn eval_raw(&self, x: &SpherePoint<T>) -> SpherePoint<T> {
        let (a, b) = self.eval_pair(x);
        SpherePoint::new(a, b).unwrap_or_else(SpherePoint::infinity)
    }

    /// Value of the reduced map `φ_f` at `x`.
    pub fn evaluate(&self, x: &SpherePoint<T>) -> Result<SpherePoint<T>, RatMapError> {
        let (a, b) = self.eval_pair(x);
        let scale = self.p.norm_l1() + self.q.norm_l1();
        let tol: T = lit(HOLE_EVAL_TOL);
        if a.norm().max(b.norm()) > tol * scale {
            return Ok(SpherePoint::new(a, b).unwrap());
        }
        self.reduce(lit(1e-8)).evaluate(x)
    }

    /// Affine convenience wrapper around [`evaluate`](Self::evaluate).
    pub fn evaluate_at(&self, z: Complex<T>) -> Result<SpherePoint<T>, RatMapError> {
        self.evaluate(&SpherePoint::finite(z))
    }

    /// `P′Q − PQ′` of the dehomogenized pair, the numerator of `f′`.
    pub fn wronskian(&self) -> ComplexPoly<T> {
        &(&self.p.derivative() * &self.q) - &(&self.p * &self.q.derivative())
    }

    /// Factorization `f = H · φ_f` with holes at the zeros of `H`.
    pub fn reduce(&self, tol: T) -> ReducedForm<T> {
        let affine = self.p.deg().max(self.q.deg());
        let infinite = if self.p.is_zero() || self.q.is_zero() {
            // (0 : Q) or (P : 0): the nonzero form is the common factor.
            let nz = if self.p.is_zero() { &self.q } else { &self.p };
            self.d - nz.deg()
        } else {
            self.d - affine
        };
        let h = gcd_approx(&self.p, &self.q, tol);
        let (pr, _) = self.p.div_rem(&h);
        let (qr, _) = self.q.div_rem(&h);
        let k = self.d - infinite - h.deg();
        let (pr, qr) = if pr.is_zero() && qr.is_zero() { (ComplexPoly::zero(), ComplexPoly::one()) } else { (pr, qr) };
        let phi = HomRationalMap::new(k, pr, qr).expect("reduced degrees are consistent");
        let mut holes = if h.deg() > 0 { roots(&h).unwrap_or_default() } else { Vec::new() };
        if infinite > 0 {
            holes.push(Root { point: SpherePoint::infinity(), multiplicity: infinite });
        }
        let coprimality = phi.coprimality();
        ReducedForm { h, hole_at_infinity: infinite, holes, phi, degree: k, coprimality }
    }

    /// `|Res(p, q)| / scale`, a certificate that `p` and `q` share no root.
    fn coprimality(&self) -> f64 {
        if self.d == 0 || self.p.is_zero() || self.q.is_zero() || self.p.deg() == 0 || self.q.deg() == 0 {
            return 1.0;
        }
        let (pn, qn) = (self.p.normalized(), self.q.normalized());
        let r = resultant(&pn, &qn).norm();
        let s = subresultant_scale(&pn, &qn, 0).unwrap_or(T::one());
        (r / s).to_f64().unwrap_or(f64::NAN)
    }

    /// Critical points of `φ_f`: the `2k − 2` zeros of the homogeneous Wronskian.
    pub fn critical_points(&self, tol: T) -> Result<Vec<Root<T>>, RatMapError> {
        let red = self.reduce(tol);
        let phi = &red.phi;
        if red.degree == 0 {
            return Err(RatMapError::DegreeZero);
        }
        let n = 2 * red.degree - 2;
        // Terms above degree 2k − 2 cancel identically; drop the rounding residue.
        let w = phi.wronskian();
        let w = ComplexPoly::new(w.coeffs().iter().take(n + 1).copied().collect());
        if w.is_zero() {
            return Err(RatMapError::DegreeZero);
        }
        let mut r = roots(&w)?;
        if n > w.deg() {
            r.push(Root { point: SpherePoint::infinity(), multiplicity: n - w.deg() });
        }
        Ok(r)
    }

    /// Critical points whose image is not ∞ (those away from the poles).
    pub fn free_critical_points(&self, tol: T) -> Result<Vec<Root<T>>, RatMapError> {
        let red = self.reduce(tol);
        let all = self.critical_points(tol)?;
        let poles = if red.phi.q.is_zero() { Vec::new() } else { roots(&red.phi.q).unwrap_or_default() };
        let ctol: T = lit(1e-7);
        Ok(all
            .into_iter()
            .filter(|c| {
                if c.point.is_infinity() {
                    return !red.phi.q.is_zero() && red.phi.q.deg() == red.degree;
                }
                let z = c.value();
                !poles.iter().any(|p| (p.value() - z).norm() <= ctol * T::one().max(z.norm()))
            })
            .collect())
    }

    /// Coefficients of `L ∘ f ∘ M`; the declared degree is kept.
    pub fn conjugate(&self, l: &MoebiusMap<T>, m: &MoebiusMap<T>) -> Self {
        let [a, b, c, dd] = m.entries();
        let num_m = ComplexPoly::exact(vec![b, a]);
        let den_m = ComplexPoly::exact(vec![dd, c]);
        let np: Vec<ComplexPoly<T>> = (0..=self.d).map(|i| num_m.pow(i)).collect();
        let dp: Vec<ComplexPoly<T>> = (0..=self.d).map(|i| den_m.pow(i)).collect();
        let compose = |f: &ComplexPoly<T>| {
            (0..=self.d).fold(ComplexPoly::zero(), |acc, i| {
                let c = f.coeff(i);
                if c == czero() {
                    acc
                } else {
                    &acc + &(&np[i] * &dp[self.d - i]).scale(c)
                }
            })
        };
        let (pm, qm) = (compose(&self.p), compose(&self.q));
        let [la, lb, lc, ld] = l.entries();
        let p = &pm.scale(la) + &qm.scale(lb);
        let q = &pm.scale(lc) + &qm.scale(ld);
        Self::new(self.d, p, q).expect("conjugation by invertible maps is nondegenerate")
    }

    /// Sup-norm distance between coefficient vectors, up to a unit scalar.
    pub fn coefficient_distance(&self, other: &Self) -> T {
        if self.d != other.d {
            return T::infinity();
        }
        let (u, v) = (self.coefficient_vector(), other.coefficient_vector());
        let k = (0..u.len()).max_by(|&i, &j| u[i].norm().partial_cmp(&u[j].norm()).unwrap()).unwrap();
        if v[k] == czero() {
            return T::infinity();
        }
        let phase = u[k] / v[k];
        u.iter().zip(&v).map(|(x, y)| (*x - *y * phase).norm()).fold(T::zero(), T::max)
    }
}

/// `f = H · φ_f` together with the hole multiset `ℋ(f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedForm<T> {
    /// Common factor of the dehomogenized pair; holes at ∞ are counted separately.
    pub h: ComplexPoly<T>,
    pub hole_at_infinity: usize,
    pub holes: Vec<Root<T>>,
    pub phi: HomRationalMap<T>,
    pub degree: usize,
    /// `|Res(φ)|/scale`; bounded away from 0 when `φ` is genuinely reduced.
    pub coprimality: f64,
}

impl<T: Real> ReducedForm<T> {
    pub fn hole_count(&self) -> usize {
        self.holes.iter().map(|h| h.multiplicity).sum()
    }

    pub fn evaluate(&self, x: &SpherePoint<T>) -> Result<SpherePoint<T>, RatMapError> {
        let tol: T = lit(1e-7);
        if self.holes.iter().any(|h| h.point.distance(x) <= tol) {
            return Err(RatMapError::EvaluationAtHole);
        }
        let (a, b) = self.phi.eval_pair(x);
        SpherePoint::new(a, b).ok_or(RatMapError::EvaluationAtHole)
    }

    pub fn min_hole_distance(&self, x: &SpherePoint<T>) -> T {
        self.holes.iter().map(|h| h.point.distance(x)).fold(T::infinity(), T::min)
    }
}
