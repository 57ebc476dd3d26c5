//! The regular ideal `2d`-gon group, its Bowen–Series circle map and the
//! circle conjugacy with `z ↦ z^{2d−1}`.
//!
//! Vertices are `v_k = e^{iπk/d}`. Arc (and side) `k` runs counterclockwise
//! from `v_k` to `v_{k+1}`; sides `0..d` lie in the upper half plane and side
//! `k` is paired with its mirror image, side `2d − 1 − k`.

mod conjugacy;

pub use conjugacy::{conjugacy, defect_samples, CircleConjugacy};

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::moebius::{MoebiusMap, SpherePoint};
use crate::scalar::{cone, creal, czero, from_usize, lit, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuchsianError {
    #[error("polygon parameter d = {0} must be at least 2")]
    DegreeTooSmall(usize),
    #[error("circle map winds {found} times, expected {expected}")]
    NonCovering { expected: i64, found: i64 },
    #[error("preimage counts differ: {found} under the circle map, {expected} under z^k")]
    CombinatoricsMismatch { expected: usize, found: usize },
    #[error("vertex index {0} out of range")]
    NotAVertex(usize),
}

/// Representative of `t` in `[0, 2π)`.
pub fn wrap_angle<T: Real>(t: T) -> T {
    let tau = T::TAU();
    let r = t % tau;
    let r = if r < T::zero() { r + tau } else { r };
    if r >= tau { T::zero() } else { r }
}

/// Argument of a sphere point on the unit circle, in `[0, 2π)`.
fn angle_of<T: Real>(p: &SpherePoint<T>) -> T {
    let z = p.affine_or_inf();
    wrap_angle(z.im.atan2(z.re))
}

fn on_circle<T: Real>(t: T) -> SpherePoint<T> {
    SpherePoint::finite(Complex::new(t.cos(), t.sin()))
}

/// The regular ideal polygon with vertices at the `2d`-th roots of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdealPolygon {
    pub d: usize,
}

impl IdealPolygon {
    pub fn new(d: usize) -> Result<Self, FuchsianError> {
        if d < 2 {
            return Err(FuchsianError::DegreeTooSmall(d));
        }
        Ok(Self { d })
    }

    pub fn side_count(&self) -> usize {
        2 * self.d
    }

    /// Angle of `v_k`, `k` taken mod `2d`.
    pub fn vertex_angle<T: Real>(&self, k: usize) -> T {
        T::PI() * from_usize::<T>(k % (2 * self.d)) / from_usize(self.d)
    }

    pub fn vertex<T: Real>(&self, k: usize) -> SpherePoint<T> {
        on_circle(self.vertex_angle(k))
    }

    /// Centre and radius of the geodesic circle through side `k`.
    pub fn side_circle<T: Real>(&self, k: usize) -> (Complex<T>, T) {
        let half: T = T::PI() / from_usize(2 * self.d);
        let mid = T::PI() * from_usize::<T>(2 * k + 1) / from_usize(2 * self.d);
        let c = Complex::new(mid.cos(), mid.sin()) / creal(half.cos());
        (c, half.tan())
    }

    /// Index of the mirror-image side.
    pub fn partner(&self, k: usize) -> usize {
        2 * self.d - 1 - k
    }
}

/// Generators `g_1..g_d`; `g_j` pairs side `j − 1` with its mirror image.
#[derive(Clone, Debug, PartialEq)]
pub struct SidePairingSet<T> {
    pub polygon: IdealPolygon,
    pub generators: Vec<MoebiusMap<T>>,
}

/// `g_j = conj ∘ (inversion in the circle of side j − 1)`, which is
/// `z ↦ (c̄z − 1)/(z − c)` since the circle is orthogonal to `S¹`.
pub fn build_group<T: Real>(d: usize) -> Result<SidePairingSet<T>, FuchsianError> {
    let polygon = IdealPolygon::new(d)?;
    let generators = (0..d)
        .map(|k| {
            let (c, _) = polygon.side_circle::<T>(k);
            MoebiusMap::new(c.conj(), -cone::<T>(), cone(), -c).expect("orthogonal circle gives det = −r²")
        })
        .collect();
    Ok(SidePairingSet { polygon, generators })
}

impl<T: Real> SidePairingSet<T> {
    /// Negative control: side `j − 1` is carried onto its mirror side by the
    /// rotation `z ↦ e^{iθ}z`, `θ = (2d − 2j + 1)π/d`. No conjugation is
    /// involved, so vertices do not go to their conjugates.
    pub fn rotational(d: usize) -> Result<Self, FuchsianError> {
        let polygon = IdealPolygon::new(d)?;
        let generators = (1..=d)
            .map(|j| {
                let half = T::PI() * from_usize::<T>(2 * d + 1 - 2 * j) / from_usize(2 * d);
                let e = Complex::new(half.cos(), half.sin());
                MoebiusMap::new(e, czero(), czero(), e.conj()).expect("rotation")
            })
            .collect();
        Ok(Self { polygon, generators })
    }

    /// The map applied on arc `k`: `g_{k+1}` on upper arcs, `g_{2d−k}⁻¹` on lower ones.
    pub fn branch(&self, k: usize) -> MoebiusMap<T> {
        let d = self.polygon.d;
        if k < d {
            self.generators[k]
        } else {
            self.generators[2 * d - 1 - k].inverse()
        }
    }

    /// Where the branch on side `k` sends the vertex `v_k` or `v_{k+1}`.
    fn vertex_image(&self, side: usize, vertex: usize) -> usize {
        let n = self.polygon.side_count();
        // Mirror image: v ↦ v̄, i.e. index ↦ −index mod 2d.
        debug_assert!(vertex == side || vertex == (side + 1) % n);
        (n - vertex) % n
    }
}

/// The Bowen–Series map: on arc `k` apply [`SidePairingSet::branch`].
#[derive(Clone, Debug, PartialEq)]
pub struct BowenSeriesMap<T> {
    pub pairings: SidePairingSet<T>,
}

impl<T: Real> BowenSeriesMap<T> {
    pub fn new(pairings: SidePairingSet<T>) -> Self {
        Self { pairings }
    }

    pub fn standard(d: usize) -> Result<Self, FuchsianError> {
        Ok(Self::new(build_group(d)?))
    }

    pub fn d(&self) -> usize {
        self.pairings.polygon.d
    }

    /// Covering degree `2d − 1`.
    pub fn k(&self) -> usize {
        2 * self.d() - 1
    }

    /// Arc containing `e^{it}`; a vertex belongs to the arc starting there.
    pub fn arc_of(&self, t: T) -> usize {
        let n = self.pairings.polygon.side_count();
        let s = wrap_angle(t) * from_usize(self.d()) / T::PI();
        s.floor().to_usize().unwrap_or(0).min(n - 1)
    }

    /// Increment of the lift across one arc: `2π − π/d`.
    pub(crate) fn arc_increment(&self) -> T {
        T::TAU() - T::PI() / from_usize(self.d())
    }

    /// `|A′(t)|`, the angular derivative of the branch at `t`.
    pub fn derivative(&self, t: T) -> T {
        let m = self.pairings.branch(self.arc_of(t));
        let [_, _, c, d] = m.entries();
        let z = Complex::new(t.cos(), t.sin());
        T::one() / (c * z + d).norm_sqr()
    }

    /// Continuous increasing lift `Â: [0, 2π] → [0, 2πk]` with `Â(0) = 0`.
    pub fn lift(&self, t: T) -> T {
        let t = wrap_angle(t);
        let j = self.arc_of(t);
        let m = self.pairings.branch(j);
        let v = self.pairings.polygon.vertex_angle::<T>(j);
        let start = angle_of(&m.apply(&on_circle(v)));
        let here = angle_of(&m.apply(&on_circle(t)));
        from_usize::<T>(j) * self.arc_increment() + wrap_angle(here - start)
    }

    /// Inverse of [`lift`](Self::lift) on `[0, 2πk)`.
    pub fn lift_inverse(&self, y: T) -> T {
        let n = self.pairings.polygon.side_count();
        let inc = self.arc_increment();
        let j = (y / inc).floor().to_usize().unwrap_or(0).min(n - 1);
        let m = self.pairings.branch(j);
        let v0 = self.pairings.polygon.vertex_angle::<T>(j);
        let start = angle_of(&m.apply(&on_circle(v0)));
        let target = start + (y - from_usize::<T>(j) * inc);
        let x = angle_of(&m.inverse().apply(&on_circle(target)));
        // Pick the representative inside arc j.
        let mid = v0 + T::PI() / from_usize(2 * self.d());
        let mut x = x;
        let tau = T::TAU();
        while x - mid > T::PI() {
            x -= tau;
        }
        while mid - x > T::PI() {
            x += tau;
        }
        x
    }
}

/// `A(t)`, the argument of the image of `e^{it}` in `[0, 2π)`.
pub fn bowen_series_eval<T: Real>(a: &BowenSeriesMap<T>, t: T) -> T {
    let m = a.pairings.branch(a.arc_of(t));
    angle_of(&m.apply(&on_circle(wrap_angle(t))))
}

/// Total winding of `t ↦ A(t)` over one circuit, summed from wrapped
/// increments on a grid of `64` steps per arc. Fails unless it is `2d − 1`.
pub fn winding_degree<T: Real>(a: &BowenSeriesMap<T>) -> Result<i64, FuchsianError> {
    let n = a.pairings.polygon.side_count();
    let per_arc = 64;
    let total_steps = n * per_arc;
    let tau = T::TAU();
    let pi = T::PI();
    let step = tau / from_usize(total_steps);
    let mut sum = T::zero();
    let mut prev = bowen_series_eval(a, T::zero());
    for i in 1..=total_steps {
        let cur = bowen_series_eval(a, step * from_usize(i));
        let mut inc = cur - prev;
        while inc > pi {
            inc -= tau;
        }
        while inc <= -pi {
            inc += tau;
        }
        sum += inc;
        prev = cur;
    }
    let found = to_f64(sum / tau).round() as i64;
    let expected = (2 * a.d() - 1) as i64;
    if found != expected {
        return Err(FuchsianError::NonCovering { expected, found });
    }
    Ok(found)
}

/// Largest distance from the image of a partition endpoint to the nearest
/// partition endpoint, over both one-sided branches at every vertex.
pub fn markov_defect<T: Real>(a: &BowenSeriesMap<T>) -> T {
    let poly = a.pairings.polygon;
    let n = poly.side_count();
    let verts: Vec<SpherePoint<T>> = (0..n).map(|k| poly.vertex(k)).collect();
    (0..n)
        .flat_map(|k| [(k, k), (k, (k + 1) % n)])
        .map(|(arc, v)| {
            let img = a.pairings.branch(arc).apply(&verts[v]);
            verts.iter().map(|w| w.distance(&img)).fold(T::infinity(), T::min)
        })
        .fold(T::zero(), T::max)
}

/// Smallest `|A′|` over `samples` interior angles of a uniform grid.
pub fn min_expansion<T: Real>(a: &BowenSeriesMap<T>, samples: usize) -> T {
    let n = a.pairings.polygon.side_count();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            // Offset grid so no sample sits on a vertex.
            let t = T::TAU() * (from_usize::<T>(i) + lit(0.37)) / from_usize(samples);
            let arc_pos = t * from_usize(a.d()) / T::PI();
            let frac = arc_pos - arc_pos.floor();
            if frac < lit(1e-9) || frac > lit(1.0 - 1e-9) || arc_pos.floor().to_usize() >= Some(n) {
                T::infinity()
            } else {
                a.derivative(t)
            }
        })
        .reduce(T::infinity, T::min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexCycle<T> {
    pub vertex: usize,
    /// Sides whose pairing is applied, in order; each step maps that side to its partner.
    pub sides: Vec<usize>,
    pub element: MoebiusMap<T>,
    pub trace_squared: Complex<T>,
    pub parabolic: bool,
}

/// Composes the pairings around the cycle of `vertex`: starting on the
/// counterclockwise side at the vertex, apply its pairing, move to the other
/// side at the image vertex, and repeat until the starting side recurs.
pub fn vertex_cycle_element<T: Real>(pairings: &SidePairingSet<T>, vertex: usize) -> Result<VertexCycle<T>, FuchsianError> {
    let poly = pairings.polygon;
    let n = poly.side_count();
    if vertex >= n {
        return Err(FuchsianError::NotAVertex(vertex));
    }
    let (mut v, mut side) = (vertex, vertex);
    let mut sides = Vec::new();
    let mut element = MoebiusMap::identity();
    loop {
        sides.push(side);
        element = pairings.branch(side).compose(&element);
        let w = pairings.vertex_image(side, v);
        let partner = poly.partner(side);
        // The two sides at w are w − 1 and w; continue along the one that is not the partner.
        let other = if partner == w { (w + n - 1) % n } else { w };
        v = w;
        side = other;
        if v == vertex && side == vertex {
            break;
        }
        assert!(sides.len() <= n, "vertex cycle does not close");
    }
    let tr = element.trace();
    let trace_squared = tr * tr;
    let parabolic = (trace_squared - creal(lit(4.0))).norm() <= lit(1e-8);
    Ok(VertexCycle { vertex, sides, element, trace_squared, parabolic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = MoebiusMap<f64>;

    #[test]
    fn g1_fixes_one_and_conjugates_the_other_endpoint() {
        let g = build_group::<f64>(3).unwrap();
        let poly = g.polygon;
        let g1 = g.generators[0];
        assert!(g1.apply(&poly.vertex(0)).distance(&poly.vertex(0)) < 1e-14);
        assert!(g1.apply(&poly.vertex(1)).distance(&poly.vertex(5)) < 1e-14);
    }

    #[test]
    fn pairings_send_endpoints_to_conjugates_and_preserve_the_disk() {
        for d in 2..=6 {
            let g = build_group::<f64>(d).unwrap();
            let poly = g.polygon;
            for (j, gj) in g.generators.iter().enumerate() {
                for v in [j, j + 1] {
                    let img = gj.apply(&poly.vertex(v));
                    let conj = SpherePoint::finite(poly.vertex::<f64>(v).affine().unwrap().conj());
                    assert!(img.distance(&conj) < 1e-13, "d={d} j={j}");
                }
                assert!(gj.apply_affine(cplx(0.0, 0.0)).affine().unwrap().norm() < 1.0);
                for i in 0..16 {
                    let t = 0.39 * i as f64;
                    let img = gj.apply(&on_circle(t)).affine().unwrap().norm();
                    assert!((img - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn d2_explicit_matrix() {
        // Side 0 of the square runs from 1 to i; its circle has centre 1 + i and radius 1.
        let g = build_group::<f64>(2).unwrap();
        let expect = M::new(cplx(1.0, -1.0), cplx(-1.0, 0.0), cplx(1.0, 0.0), cplx(-1.0, -1.0)).unwrap();
        assert!(g.generators[0].projective_distance(&expect) < 1e-14);
        assert!(g.generators[0].apply_affine(cplx(0.0, 1.0)).distance(&SpherePoint::finite(cplx(0.0, -1.0))) < 1e-14);
    }

    #[test]
    fn fixed_point_and_vertices() {
        let a = BowenSeriesMap::<f64>::standard(3).unwrap();
        assert!(bowen_series_eval(&a, 0.0).abs() < 1e-14);
        for d in 2..=4 {
            let a = BowenSeriesMap::<f64>::standard(d).unwrap();
            assert!(markov_defect(&a) < 1e-10);
        }
    }

    #[test]
    fn winding_is_2d_minus_1() {
        for d in 2..=6 {
            let a = BowenSeriesMap::<f64>::standard(d).unwrap();
            assert_eq!(winding_degree(&a).unwrap(), (2 * d - 1) as i64);
        }
    }

    #[test]
    fn locally_increasing_and_expanding() {
        for d in 2..=4 {
            let a = BowenSeriesMap::<f64>::standard(d).unwrap();
            assert!(min_expansion(&a, 1000) >= 1.0 + 1e-6);
            for i in 0..50 {
                let t = 0.1237 * i as f64 + 0.01;
                let (x, y) = (a.lift(t), a.lift(t + 1e-7));
                if a.arc_of(t) == a.arc_of(t + 1e-7) {
                    assert!(y > x);
                }
            }
        }
    }

    #[test]
    fn lift_inverse_round_trips() {
        let a = BowenSeriesMap::<f64>::standard(3).unwrap();
        assert!((a.lift(std::f64::consts::TAU - 1e-12) - 5.0 * std::f64::consts::TAU).abs() < 1e-9);
        for i in 0..200 {
            let t = 0.031 * i as f64 + 0.001;
            let back = a.lift_inverse(a.lift(t));
            assert!((wrap_angle(back) - t).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn vertex_cycles_are_parabolic() {
        for d in 2..=6 {
            let g = build_group::<f64>(d).unwrap();
            for v in 0..2 * d {
                let c = vertex_cycle_element(&g, v).unwrap();
                assert!(c.parabolic, "d={d} v={v} tr²={}", c.trace_squared);
            }
        }
        assert_eq!(vertex_cycle_element(&build_group::<f64>(3).unwrap(), 0).unwrap().sides, vec![0]);
    }

    #[test]
    fn rotational_pairing_is_not_parabolic() {
        let g = SidePairingSet::<f64>::rotational(3).unwrap();
        let c = vertex_cycle_element(&g, 0).unwrap();
        assert!(!c.parabolic);
        assert!((c.trace_squared - cplx(3.0, 0.0)).norm() < 1e-12, "tr² = {}", c.trace_squared);
    }
}
