//! Normal-form uniformizers, the explicit degree-6 family `R_c`, the
//! involution `F = R∘η∘(R|_𝔇)⁻¹` by path continuation, and attracted-set
//! classification for the deleted correspondence.

mod render;

pub use render::{
    render_dynamical_plane, render_parameter_plane, sha256_hex, BoundingBox, GridSpec, ImageKind, PixelCode,
    PlaneImage, SymmetryReport,
};

use std::collections::HashSet;

use num_complex::Complex;
use thiserror::Error;

use crate::correspondence::{Correspondence, CorrespondenceError, FixedPointData};
use crate::moebius::SpherePoint;
use crate::polyring::{roots_on_sphere, ComplexPoly};
use crate::ratmap::{HomRationalMap, RatMapError};
use crate::scalar::{cone, creal, czero, from_usize, lit, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatingError {
    #[error("degree {d} template takes {expected} coefficients, got {found}")]
    TemplateMismatch { d: usize, expected: usize, found: usize },
    #[error("map is not of the form λz + O(1) at ∞: {0}")]
    WrongLocalForm(String),
    #[error("continuation passes within {distance:e} of a critical value at step {step}")]
    BranchCollision { step: usize, distance: f64 },
    #[error("point not reachable by continuation: {0}")]
    NotReachable(String),
    #[error("the correspondence has no attracting fixed point")]
    NoAttractor,
    #[error(transparent)]
    Map(#[from] RatMapError),
    #[error(transparent)]
    Correspondence(#[from] CorrespondenceError),
}

/// `z + a₀ + a₁/z + … + a_{d−2}/z^{d−2} + a_d/z^d + … + a_{2d−3}/z^{2d−3} + 1/((2d−1)z^{2d−1})`.
///
/// `coeffs` lists `a₀ … a_{d−2}` followed by `a_d … a_{2d−3}`; the
/// `z^{−(d−1)}` term is absent from the template.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm<T> {
    d: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> NormalForm<T> {
    pub fn new(d: usize, coeffs: Vec<Complex<T>>) -> Result<Self, MatingError> {
        let expected = (2 * d).saturating_sub(3);
        if d < 2 || coeffs.len() != expected {
            return Err(MatingError::TemplateMismatch { d, expected, found: coeffs.len() });
        }
        Ok(Self { d, coeffs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of `z^{−k}` for `k = 0 … 2d − 3`.
    pub fn a(&self, k: usize) -> Complex<T> {
        let d = self.d;
        match k {
            k if k + 2 <= d => self.coeffs[k],
            k if k + 1 == d => czero(),
            k => self.coeffs[k - 1],
        }
    }

    /// The degree-`2d` map: numerator `z^{2d} + Σ a_k z^{2d−1−k} + 1/(2d−1)`
    /// over `z^{2d−1}`.
    pub fn map(&self) -> HomRationalMap<T> {
        let n = 2 * self.d;
        let mut num = vec![czero::<T>(); n + 1];
        num[n] = cone();
        for k in 0..=n - 3 {
            num[n - 1 - k] = self.a(k);
        }
        num[0] = creal(T::one() / from_usize::<T>(n - 1));
        let den = ComplexPoly::monomial(cone(), n - 1);
        HomRationalMap::new(n, ComplexPoly::exact(num), den).expect("normal form has a nonzero numerator")
    }
}

pub fn normal_form<T: Real>(d: usize, coeffs: &[Complex<T>]) -> Result<HomRationalMap<T>, MatingError> {
    Ok(NormalForm::new(d, coeffs.to_vec())?.map())
}

/// Template coefficients `(a₀, a₁, a₃) = (0, c, −c/3)` of `R_c`.
pub fn family_coefficients<T: Real>(c: Complex<T>) -> Vec<Complex<T>> {
    vec![czero(), c, -c / creal(lit(3.0))]
}

/// `R_c(z) = z + c/z − c/(3z³) + 1/(5z⁵)`.
pub fn family_map<T: Real>(c: Complex<T>) -> HomRationalMap<T> {
    NormalForm::new(3, family_coefficients(c)).expect("three template coefficients").map()
}

/// `|R′(∞)|` for a map with a simple pole at ∞, read in the reciprocal chart:
/// `R(z) = λz + O(1)` gives `|λ|`.
pub fn degeneration_indicator<T: Real>(r: &HomRationalMap<T>) -> Result<T, MatingError> {
    let red = r.reduce(lit(1e-8));
    let (p, q) = (red.phi.num(), red.phi.den());
    if p.is_zero() || q.is_zero() || p.deg() != q.deg() + 1 {
        let (dp, dq) = (p.degree(), q.degree());
        return Err(MatingError::WrongLocalForm(format!("numerator degree {dp:?}, denominator degree {dq:?}")));
    }
    Ok((p.leading() / q.leading()).norm())
}

/// The attracting fixed point with the smallest multiplier modulus, if that
/// modulus is below `1 − 1e−9`.
pub fn attracting_fixed_data<T: Real>(c: &Correspondence<T>) -> Result<Option<FixedPointData<T>>, MatingError> {
    let limit = T::one() - lit(1e-9);
    let best = c
        .fixed_points()?
        .into_iter()
        .filter_map(|f| {
            let m = f.branch_multipliers.iter().map(|m| m.norm()).fold(T::infinity(), T::min);
            (m < limit).then_some((m, f))
        })
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite multipliers"));
    Ok(best.map(|(_, f)| f))
}

/// Search budgets for [`MatingModel::classify_point`].
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    pub depth: usize,
    pub width: usize,
    /// Radius of the target ball around the attractor.
    pub eps: f64,
    /// Points closer than this are merged.
    pub cluster_tol: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { depth: 40, width: 2000, eps: 1e-3, cluster_tol: 1e-7 }
    }
}

impl Budget {
    pub fn new(depth: usize, width: usize) -> Self {
        Self { depth, width, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    /// Reached the target ball after `depth` steps; `backward` marks the
    /// backward search toward `η(attractor)`.
    Attracted { depth: usize, backward: bool },
    NotAttracted,
    BudgetExhausted,
}

impl PointClass {
    pub fn is_attracted(&self) -> bool {
        matches!(self, PointClass::Attracted { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            PointClass::Attracted { .. } => "attracted",
            PointClass::NotAttracted => "not_attracted",
            PointClass::BudgetExhausted => "budget_exhausted",
        }
    }
}

/// Value of the involution at a point together with its continuation data.
#[derive(Clone, Copy, Debug)]
pub struct InvolutionValue<T> {
    /// `F(z) = R(η(w))`.
    pub value: SpherePoint<T>,
    /// `w = (R|_𝔇)⁻¹(z)`.
    pub preimage: SpherePoint<T>,
    /// Largest of `d(R(w), z)` and the gap between the forward and reversed
    /// continuations at the first path point.
    pub roundtrip_defect: T,
}

/// A uniformizer with its deleted correspondence and attracting fixed point.
#[derive(Clone, Debug)]
pub struct MatingModel<T> {
    pub map: HomRationalMap<T>,
    pub correspondence: Correspondence<T>,
    pub attractor: Option<FixedPointData<T>>,
    pub budget: Budget,
    critical_values: Vec<SpherePoint<T>>,
}

impl<T: Real> MatingModel<T> {
    pub fn new(map: HomRationalMap<T>, budget: Budget) -> Result<Self, MatingError> {
        let correspondence = Correspondence::from_uniformizer(&map)?;
        let attractor = attracting_fixed_data(&correspondence)?;
        let critical_values = map.free_critical_points(lit(1e-8))?.iter().map(|c| map.eval_raw(&c.point)).collect();
        Ok(Self { map, correspondence, attractor, budget, critical_values })
    }

    pub fn family(c: Complex<T>, budget: Budget) -> Result<Self, MatingError> {
        Self::new(family_map(c), budget)
    }

    /// Critical points other than `±1` and the poles.
    pub fn moving_critical_points(&self) -> Result<Vec<SpherePoint<T>>, MatingError> {
        let tol: T = lit(1e-6);
        let fixed = [SpherePoint::real(T::one()), SpherePoint::real(-T::one())];
        Ok(self
            .map
            .free_critical_points(lit(1e-8))?
            .into_iter()
            .filter(|c| fixed.iter().all(|f| c.point.distance(f) > tol))
            .flat_map(|c| std::iter::repeat(c.point).take(c.multiplicity))
            .collect())
    }

    /// Breadth-first search of forward fans toward the attractor and of
    /// backward fans toward its `η`-image, level by level, keeping the
    /// `width_cap` points nearest the target at each level.
    pub fn classify_point(
        &self,
        z: &SpherePoint<T>,
        depth_cap: usize,
        width_cap: usize,
    ) -> Result<PointClass, MatingError> {
        let a = self.attractor.as_ref().ok_or(MatingError::NoAttractor)?.point;
        let eps: T = lit(self.budget.eps);
        let mut searches = [
            Search::new(*z, a, false, self.budget.cluster_tol),
            Search::new(*z, a.eta(), true, self.budget.cluster_tol),
        ];
        for s in &searches {
            if z.distance(&s.target) <= eps {
                return Ok(PointClass::Attracted { depth: 0, backward: s.backward });
            }
        }
        if depth_cap == 0 || width_cap == 0 {
            return Ok(PointClass::BudgetExhausted);
        }
        for level in 1..=depth_cap {
            for s in searches.iter_mut() {
                if s.step(&self.correspondence, eps, width_cap) {
                    return Ok(PointClass::Attracted { depth: level, backward: s.backward });
                }
            }
            if searches.iter().all(|s| s.frontier.is_empty()) {
                break;
            }
        }
        Ok(PointClass::NotAttracted)
    }

    /// [`classify_point`](Self::classify_point) with the model's budget.
    pub fn classify(&self, z: &SpherePoint<T>) -> Result<PointClass, MatingError> {
        self.classify_point(z, self.budget.depth, self.budget.width)
    }

    /// Evaluates `F(z) = R(η(w))`, where `w = (R|_𝔇)⁻¹(z)` is continued along
    /// `s ↦ (z : s)`, `s ∈ [0, 1]`, from the base pair `(∞, ∞)`.
    pub fn b_involution_eval(&self, z: &SpherePoint<T>, path_steps: usize) -> Result<InvolutionValue<T>, MatingError> {
        let path_steps = path_steps.max(1);
        let tol: T = lit(self.budget.cluster_tol);
        for cv in &self.critical_values {
            let dist = cv.distance(z);
            if dist <= tol {
                return Err(MatingError::BranchCollision { step: path_steps, distance: to_f64(dist) });
            }
        }
        if z.is_infinity() {
            let inf = SpherePoint::infinity();
            return Ok(InvolutionValue { value: self.map.eval_raw(&inf.eta()), preimage: inf, roundtrip_defect: T::zero() });
        }
        let zc = z.affine_or_inf();
        let n: T = from_usize(path_steps);
        let point_at = |s: T| SpherePoint::new(zc, creal(s)).expect("path point");
        let mut w = SpherePoint::infinity();
        let mut s = T::zero();
        let mut first = None;
        for k in 1..=path_steps {
            let target = from_usize::<T>(k) / n;
            w = self.continue_branch(w, s, target, &point_at, k)?;
            if k == 1 {
                first = Some(w);
            }
            s = target;
        }
        // Reverse leg back to the first path point.
        let mut back = w;
        let mut s = T::one();
        for k in (1..path_steps).rev() {
            let target = from_usize::<T>(k) / n;
            back = self.continue_branch(back, s, target, &point_at, k)?;
            s = target;
        }
        let first = first.expect("at least one step");
        let gap = if path_steps == 1 { T::zero() } else { back.distance(&first) };
        let residual = self.map.eval_raw(&w).distance(z);
        Ok(InvolutionValue { value: self.map.eval_raw(&w.eta()), preimage: w, roundtrip_defect: gap.max(residual) })
    }

    /// Tracks the preimage branch through `w` from path parameter `s0` to
    /// `s1`, halving the step while the nearest root is ambiguous.
    fn continue_branch(
        &self,
        w: SpherePoint<T>,
        s0: T,
        s1: T,
        point_at: &impl Fn(T) -> SpherePoint<T>,
        step: usize,
    ) -> Result<SpherePoint<T>, MatingError> {
        const MAX_HALVINGS: u32 = 30;
        let tol: T = lit(self.budget.cluster_tol);
        let mut cur = w;
        let mut s = s0;
        let mut h = s1 - s0;
        let mut halvings = 0;
        while (s1 - s) * h.signum() > T::zero() {
            let next = if (s + h - s1) * h.signum() > T::zero() { s1 } else { s + h };
            let y = point_at(next);
            let near = self.critical_values.iter().map(|cv| cv.distance(&y)).fold(T::infinity(), T::min);
            if near <= tol {
                return Err(MatingError::BranchCollision { step, distance: to_f64(near) });
            }
            let eq: ComplexPoly<T> = &self.map.num().scale(y.w()) - &self.map.den().scale(y.z());
            let rts = roots_on_sphere(&eq, self.map.degree()).map_err(|e| MatingError::NotReachable(e.to_string()))?;
            let mut dists: Vec<(T, usize, SpherePoint<T>)> =
                rts.iter().map(|r| (r.point.distance(&cur), r.multiplicity, r.point)).collect();
            dists.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));
            let (d1, mult, p) = dists[0];
            let d2 = dists.get(1).map_or(T::infinity(), |x| x.0);
            if mult > 1 {
                return Err(MatingError::BranchCollision { step, distance: 0.0 });
            }
            if d1 * lit(2.0) < d2 {
                cur = p;
                s = next;
                continue;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(MatingError::NotReachable(format!("ambiguous branch near path parameter {}", to_f64(s))));
            }
            h = h / lit(2.0);
        }
        Ok(cur)
    }
}

/// One direction of the classification search.
struct Search<T> {
    target: SpherePoint<T>,
    backward: bool,
    frontier: Vec<SpherePoint<T>>,
    seen: HashSet<[i64; 3]>,
    cell: f64,
}

impl<T: Real> Search<T> {
    fn new(start: SpherePoint<T>, target: SpherePoint<T>, backward: bool, cell: f64) -> Self {
        let mut seen = HashSet::new();
        seen.insert(cell_key(&start, cell));
        Self { target, backward, frontier: vec![start], seen, cell }
    }

    /// Expands one level; true when the target ball is entered.
    fn step(&mut self, c: &Correspondence<T>, eps: T, width: usize) -> bool {
        let mut next = Vec::new();
        for p in &self.frontier {
            let fan = if self.backward { c.backward_images(p) } else { c.forward_images(p) };
            // Indeterminate fibers contribute nothing.
            let Ok(fan) = fan else { continue };
            for r in fan.images {
                let d = r.point.distance(&self.target);
                if d <= eps {
                    return true;
                }
                if self.seen.insert(cell_key(&r.point, self.cell)) {
                    next.push((d, r.point));
                }
            }
        }
        next.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));
        next.truncate(width);
        self.frontier = next.into_iter().map(|(_, p)| p).collect();
        false
    }
}

/// Cell of the unit-sphere embedding of `p` on a cubic lattice of side `cell`.
fn cell_key<T: Real>(p: &SpherePoint<T>, cell: f64) -> [i64; 3] {
    let (z, w) = (p.z(), p.w());
    let n = to_f64(z.norm_sqr() + w.norm_sqr());
    let zw = z * w.conj();
    let v = [2.0 * to_f64(zw.re) / n, 2.0 * to_f64(zw.im) / n, to_f64(z.norm_sqr() - w.norm_sqr()) / n];
    v.map(|x| (x / cell).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::FixedKind;
    use crate::scalar::cplx;

    type P = SpherePoint<f64>;

    fn c64(re: f64, im: f64) -> Complex<f64> {
        cplx(re, im)
    }

    #[test]
    fn family_at_zero() {
        let r = family_map(c64(0.0, 0.0));
        for x in [c64(0.7, 0.2), c64(-1.3, 0.4)] {
            let v = r.eval_raw(&P::finite(x)).affine().unwrap();
            let expect = x + c64(1.0, 0.0) / (x.powu(5) * 5.0);
            assert!((v - expect).norm() < 1e-12);
        }
        let mut crit: Vec<_> = r.free_critical_points(1e-8).unwrap();
        assert_eq!(crit.len(), 6);
        crit.retain(|c| (c.value().powu(6) - 1.0).norm() < 1e-10);
        assert_eq!(crit.len(), 6);
    }

    #[test]
    fn plus_minus_one_are_critical() {
        for c in [c64(0.3, -1.1), c64(2.0, 0.5), c64(-3.0, 0.0)] {
            let r = family_map(c);
            for x in [1.0, -1.0] {
                let p = r.num();
                let q = r.den();
                let z = c64(x, 0.0);
                let (pv, pd) = p.eval_with_derivative(z);
                let (qv, qd) = q.eval_with_derivative(z);
                let deriv = (pd * qv - pv * qd) / (qv * qv);
                assert!(deriv.norm() < 1e-12, "c={c} x={x}");
            }
        }
    }

    #[test]
    fn normal_form_templates() {
        let c = c64(0.4, -0.9);
        let a = normal_form(3, &[c64(0.0, 0.0), c, -c / 3.0]).unwrap();
        assert!(a.coefficient_distance(&family_map(c)) < 1e-15);

        let r = normal_form(2, &[c64(0.25, 0.0)]).unwrap();
        assert_eq!(r.degree(), 4);
        assert_eq!(r.num().deg(), 4);
        assert_eq!(r.den().deg(), 3);
        assert!(r.den().coeffs()[..3].iter().all(|v| v.norm() == 0.0));
        assert!(r.num().coeff(0).norm() > 0.0);

        assert_eq!(
            normal_form::<f64>(3, &[c64(0.0, 0.0)]),
            Err(MatingError::TemplateMismatch { d: 3, expected: 3, found: 1 })
        );
    }

    #[test]
    fn indicator() {
        assert!((degeneration_indicator(&family_map(c64(1.5, 0.5))).unwrap() - 1.0).abs() < 1e-12);
        let r = family_map(c64(-0.7, 0.0));
        let doubled = HomRationalMap::new(6, r.num().scale(c64(2.0, 0.0)), r.den().clone()).unwrap();
        assert!((degeneration_indicator(&doubled).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(degeneration_indicator(&HomRationalMap::<f64>::power(2)), Err(MatingError::WrongLocalForm(_))));
    }

    #[test]
    fn no_attractor_for_the_square() {
        let c = Correspondence::from_uniformizer(&HomRationalMap::<f64>::power(2)).unwrap();
        assert!(attracting_fixed_data(&c).unwrap().is_none());
    }

    #[test]
    fn family_attractor_is_superattracting_at_zero() {
        for c in [c64(0.0, 0.0), c64(1.0, 0.0), c64(-0.5, 1.2)] {
            let m = MatingModel::family(c, Budget::default()).unwrap();
            let a = m.attractor.unwrap();
            assert!(a.point.distance(&P::zero()) < 1e-9, "c={c}");
            assert!(a.branch_multipliers[0].norm() < 1e-9);
        }
    }

    #[test]
    fn classify_examples() {
        let m = MatingModel::family(c64(0.0, 0.0), Budget::default()).unwrap();
        let a = m.attractor.as_ref().unwrap().point;
        assert_eq!(m.classify_point(&a, 5, 10).unwrap(), PointClass::Attracted { depth: 0, backward: false });
        assert_eq!(m.classify_point(&P::real(0.2), 0, 10).unwrap(), PointClass::BudgetExhausted);
        let rep = m
            .correspondence
            .fixed_points()
            .unwrap()
            .into_iter()
            .find(|f| f.kind == FixedKind::Repelling)
            .unwrap();
        for depth in [1, 4, 12] {
            assert_eq!(m.classify_point(&rep.point, depth, 64).unwrap(), PointClass::NotAttracted);
        }
        assert!(m.classify_point(&P::real(0.2), 3, 16).unwrap().is_attracted());
        assert!(matches!(m.classify_point(&P::real(5.0), 3, 16).unwrap(), PointClass::Attracted { backward: true, .. }));
    }

    #[test]
    fn involution_at_infinity_and_critical_values() {
        let m = MatingModel::family(c64(0.3, 0.1), Budget::default()).unwrap();
        let v = m.b_involution_eval(&P::infinity(), 32).unwrap();
        assert!(v.value.is_infinity());
        let crit = m.moving_critical_points().unwrap();
        let cv = m.map.eval_raw(&crit[0]);
        assert!(matches!(m.b_involution_eval(&cv, 32), Err(MatingError::BranchCollision { .. })));
    }

    #[test]
    fn involution_round_trip_for_large_points() {
        let m = MatingModel::family(c64(-0.4, 0.6), Budget::default()).unwrap();
        for t in 0..12 {
            let ang = t as f64 * 0.5;
            let z = P::finite(c64(ang.cos(), ang.sin()) * 6.0);
            let v = m.b_involution_eval(&z, 64).unwrap();
            assert!(v.roundtrip_defect < 1e-8, "{}", v.roundtrip_defect);
            // Near ∞ the branch is w ≈ z and F(z) ≈ w⁵/5.
            let w = v.preimage.affine().unwrap();
            assert!((w - z.affine().unwrap()).norm() < 0.1 * 6.0);
        }
    }
}
