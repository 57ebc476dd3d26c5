//! Algebraic correspondences on `ℂ̂ × ℂ̂`: coincidence loci, the deleted
//! correspondence of a uniformizing map, branch fans, fixed points,
//! reversibility and the sampled Hausdorff metric.

mod hausdorff;

pub use hausdorff::{
    converges_away_from, hausdorff_distance, sample_variety, ConvergenceReport, HausdorffResult,
    VarietySample,
};

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::moebius::{random_sphere_points, SpherePoint};
use crate::polyring::{
    divide_out_bivar, gcd_approx, roots_on_sphere, BivarPoly, ComplexPoly, PolyError, Root,
};
use crate::ratmap::HomRationalMap;
use crate::scalar::{cone, czero, lit, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrespondenceError {
    #[error("input map has holes")]
    DegenerateInput,
    #[error("uniformizer must have even degree at least 2, got {0}")]
    OddOrSmallDegree(usize),
    #[error("expected bidegree {expected:?}, found {found:?}")]
    BidegreeMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("fiber over the base point is indeterminate")]
    IndeterminateFiber,
    #[error("diagonal restriction vanishes identically")]
    DiagonalDegenerate,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Pair,
    Uniformizer,
    Raw,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::Pair => "from_pair",
            Provenance::Uniformizer => "from_uniformizer",
            Provenance::Raw => "raw",
        }
    }
}

/// Zero set of a bihomogeneous form of bidegree `(a, b)`, stored through its
/// dehomogenization `Q(x, y)`.
#[derive(Clone, Debug)]
pub struct Correspondence<T> {
    q: BivarPoly<T>,
    bidegree: (usize, usize),
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug)]
pub struct BranchFan<T> {
    pub base: SpherePoint<T>,
    pub images: Vec<Root<T>>,
    pub direction: Direction,
    /// Leading coefficient collapsed: some images sit at ∞.
    pub exceptional: bool,
}

impl<T: Real> BranchFan<T> {
    pub fn count(&self) -> usize {
        self.images.iter().map(|r| r.multiplicity).sum()
    }

    /// Images with multiplicity expanded.
    pub fn points(&self) -> Vec<SpherePoint<T>> {
        self.images.iter().flat_map(|r| std::iter::repeat(r.point).take(r.multiplicity)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedKind {
    Attracting,
    Repelling,
    Indifferent,
    /// Singular point of the curve; no single branch multiplier.
    Singular,
}

#[derive(Clone, Debug)]
pub struct FixedPointData<T> {
    pub point: SpherePoint<T>,
    pub multiplicity: usize,
    pub branch_multipliers: Vec<Complex<T>>,
    pub kind: FixedKind,
}

/// Degrees of the `x`-content and `y`-content of `Q`, including factors at ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContentReport {
    pub x_content_degree: usize,
    pub y_content_degree: usize,
}

impl ContentReport {
    pub fn is_content_free(&self) -> bool {
        self.x_content_degree == 0 && self.y_content_degree == 0
    }
}

fn hom_powers<T: Real>(p: &SpherePoint<T>, n: usize) -> Vec<Complex<T>> {
    // p.z^i p.w^{n−i}
    let mut zp = vec![cone::<T>(); n + 1];
    let mut wp = vec![cone::<T>(); n + 1];
    for i in 1..=n {
        zp[i] = zp[i - 1] * p.z();
        wp[i] = wp[i - 1] * p.w();
    }
    (0..=n).map(|i| zp[i] * wp[n - i]).collect()
}

impl<T: Real> Correspondence<T> {
    /// Wraps a bivariate polynomial with declared bidegree `(a, b)` at least its extents.
    pub fn new(q: BivarPoly<T>, bidegree: (usize, usize)) -> Result<Self, CorrespondenceError> {
        let ext = q.bidegree();
        if ext.0 > bidegree.0 || ext.1 > bidegree.1 || q.is_zero() {
            return Err(CorrespondenceError::BidegreeMismatch { expected: bidegree, found: ext });
        }
        let m = q.max_abs();
        Ok(Self { q: q.scale(Complex::new(T::one() / m, T::zero())), bidegree, provenance: Provenance::Raw })
    }

    /// Coincidence locus `{f(x) = g(y)}`: `P_f(x) Q_g(y) − Q_f(x) P_g(y)`.
    pub fn from_pair(f: &HomRationalMap<T>, g: &HomRationalMap<T>) -> Result<Self, CorrespondenceError> {
        let tol: T = lit(1e-8);
        for m in [f, g] {
            if m.reduce(tol).hole_count() > 0 {
                return Err(CorrespondenceError::DegenerateInput);
            }
        }
        let a = BivarPoly::from_x(f.num()).mul(&BivarPoly::from_y(g.den()));
        let b = BivarPoly::from_x(f.den()).mul(&BivarPoly::from_y(g.num()));
        let mut c = Self::new(a.sub(&b), (f.degree(), g.degree()))?;
        c.provenance = Provenance::Pair;
        Ok(c)
    }

    /// The deleted correspondence `(R(x) − R(η(y)))/(x − η(y)) = 0`, cleared
    /// of denominators; bidegree `(2d − 1, 2d − 1)` for `deg R = 2d`.
    pub fn from_uniformizer(r: &HomRationalMap<T>) -> Result<Self, CorrespondenceError> {
        let n = r.degree();
        if n < 2 || n % 2 != 0 {
            return Err(CorrespondenceError::OddOrSmallDegree(n));
        }
        let pt = r.num().reversed(n);
        let qt = r.den().reversed(n);
        let big = BivarPoly::from_x(r.num())
            .mul(&BivarPoly::from_y(&qt))
            .sub(&BivarPoly::from_x(r.den()).mul(&BivarPoly::from_y(&pt)));
        // x y − 1 is x − η(y) times y.
        let l = BivarPoly::new(vec![vec![-cone::<T>(), czero()], vec![czero(), cone()]]);
        let k = divide_out_bivar(&big, &l, lit(1e-10))?;
        let k = k.trimmed(T::epsilon() * lit(64.0));
        let expected = (n - 1, n - 1);
        if k.bidegree() != expected {
            return Err(CorrespondenceError::BidegreeMismatch { expected, found: k.bidegree() });
        }
        let mut c = Self::new(k, expected)?;
        c.provenance = Provenance::Uniformizer;
        Ok(c)
    }

    pub fn poly(&self) -> &BivarPoly<T> {
        &self.q
    }

    pub fn bidegree(&self) -> (usize, usize) {
        self.bidegree
    }

    /// Bihomogeneous value at `(x, y)`.
    pub fn eval(&self, x: &SpherePoint<T>, y: &SpherePoint<T>) -> Complex<T> {
        self.q.eval_homogeneous(self.bidegree.0, self.bidegree.1, x, y)
    }

    /// `|Q(x, y)| / Σ|q_ij|`.
    pub fn relative_residual(&self, x: &SpherePoint<T>, y: &SpherePoint<T>) -> T {
        self.q.eval_homogeneous_rel(self.bidegree.0, self.bidegree.1, x, y)
    }

    /// Polynomial in `y` (homogeneous degree `b`) for fixed `x`, plus its scale.
    fn specialize_x(&self, x: &SpherePoint<T>) -> (ComplexPoly<T>, T) {
        let (a, b) = self.bidegree;
        let px = hom_powers(x, a);
        let mut c = vec![czero::<T>(); b + 1];
        let mut scale = T::zero();
        for (i, row) in self.q.coeffs().iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                c[j] += v * px[i];
                scale += v.norm() * px[i].norm();
            }
        }
        (ComplexPoly::exact(c), scale)
    }

    fn specialize_y(&self, y: &SpherePoint<T>) -> (ComplexPoly<T>, T) {
        let (a, b) = self.bidegree;
        let py = hom_powers(y, b);
        let mut c = vec![czero::<T>(); a + 1];
        let mut scale = T::zero();
        for (i, row) in self.q.coeffs().iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                c[i] += v * py[j];
                scale += v.norm() * py[j].norm();
            }
        }
        (ComplexPoly::exact(c), scale)
    }

    fn fan(&self, base: &SpherePoint<T>, dir: Direction) -> Result<BranchFan<T>, CorrespondenceError> {
        let (poly, scale, n) = match dir {
            Direction::Forward => {
                let (p, s) = self.specialize_x(base);
                (p, s, self.bidegree.1)
            }
            Direction::Backward => {
                let (p, s) = self.specialize_y(base);
                (p, s, self.bidegree.0)
            }
        };
        let tiny = T::epsilon() * lit(64.0) * scale;
        let trimmed = ComplexPoly::with_drop_tol(poly.coeffs().to_vec(), T::epsilon() * lit(64.0));
        if poly.max_abs() <= tiny || trimmed.is_zero() {
            return Err(CorrespondenceError::IndeterminateFiber);
        }
        let images = roots_on_sphere(&trimmed, n)?;
        Ok(BranchFan { base: *base, images, direction: dir, exceptional: trimmed.deg() < n })
    }

    /// The `deg_y` images `y` with `Q(x, y) = 0`.
    pub fn forward_images(&self, x: &SpherePoint<T>) -> Result<BranchFan<T>, CorrespondenceError> {
        self.fan(x, Direction::Forward)
    }

    /// The `deg_x` preimages `x` with `Q(x, y) = 0`.
    pub fn backward_images(&self, y: &SpherePoint<T>) -> Result<BranchFan<T>, CorrespondenceError> {
        self.fan(y, Direction::Backward)
    }

    /// Degrees of the common factors of the columns (in `x`) and rows (in `y`).
    pub fn content_check(&self) -> ContentReport {
        let (a, b) = self.bidegree;
        let tol: T = lit(1e-8);
        let coeffs = self.q.coeffs();
        let columns: Vec<ComplexPoly<T>> = (0..=self.q.bidegree().1)
            .map(|j| ComplexPoly::exact(coeffs.iter().map(|r| r[j]).collect()))
            .collect();
        let rows: Vec<ComplexPoly<T>> = coeffs.iter().map(|r| ComplexPoly::exact(r.clone())).collect();
        let content = |ps: &[ComplexPoly<T>], n: usize| {
            let finite = ps.iter().fold(ComplexPoly::zero(), |g, p| if p.is_zero() { g } else { gcd_approx(&g, p, tol) });
            let top = ps.iter().map(|p| p.deg()).max().unwrap_or(0);
            finite.deg() + (n - top.min(n))
        };
        ContentReport { x_content_degree: content(&columns, a), y_content_degree: content(&rows, b) }
    }

    /// Roots of `Q(x, x)` with branch multipliers `dy/dx = −Q_x/Q_y`.
    pub fn fixed_points(&self) -> Result<Vec<FixedPointData<T>>, CorrespondenceError> {
        let (a, b) = self.bidegree;
        let n = a + b;
        let mut diag = vec![czero::<T>(); n + 1];
        for (i, row) in self.q.coeffs().iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                diag[i + j] += v;
            }
        }
        let scale = self.q.norm_l1();
        let dpoly = ComplexPoly::with_drop_tol(diag, T::epsilon() * lit(64.0));
        if dpoly.is_zero() || dpoly.max_abs() <= T::epsilon() * lit(64.0) * scale {
            return Err(CorrespondenceError::DiagonalDegenerate);
        }
        let pts = roots_on_sphere(&dpoly, n)?;
        let (qx, qy) = (self.q.d_dx(), self.q.d_dy());
        // Chart at ∞ × ∞: coefficients reversed in both variables.
        let rev = BivarPoly::new(
            (0..=a)
                .map(|i| (0..=b).map(|j| self.q.coeff(a - i, b - j)).collect())
                .collect(),
        );
        let (rx, ry) = (rev.d_dx(), rev.d_dy());
        let one: T = T::one();
        let tol: T = lit(1e-9);
        Ok(pts
            .into_iter()
            .map(|r| {
                let (gx, gy) = if r.point.is_infinity() {
                    (rx.eval(czero(), czero()), ry.eval(czero(), czero()))
                } else if r.value().norm() > one {
                    // Use the chart at ∞ for large points to keep magnitudes bounded.
                    let u = cone::<T>() / r.value();
                    (rx.eval(u, u), ry.eval(u, u))
                } else {
                    let z = r.value();
                    (qx.eval(z, z), qy.eval(z, z))
                };
                let g = gx.norm().max(gy.norm());
                if g <= T::epsilon() * lit(1e4) * scale || gy == czero() {
                    return FixedPointData { point: r.point, multiplicity: r.multiplicity, branch_multipliers: Vec::new(), kind: FixedKind::Singular };
                }
                let m = -gx / gy;
                let kind = if m.norm() < one - tol {
                    FixedKind::Attracting
                } else if m.norm() > one + tol {
                    FixedKind::Repelling
                } else {
                    FixedKind::Indifferent
                };
                FixedPointData { point: r.point, multiplicity: r.multiplicity, branch_multipliers: vec![m], kind }
            })
            .collect())
    }

    /// For `n_samples` random `x` and every forward image `y`, checks that
    /// `(η(y), η(x))` lies on the curve to `tol` relative to `Σ|q_ij|`.
    pub fn check_reversibility(&self, n_samples: usize, tol: T, seed: u64) -> bool {
        self.reversibility_defect(n_samples, seed) <= to_f64(tol)
    }

    /// Worst relative residual of the reversed pairs; see [`check_reversibility`](Self::check_reversibility).
    pub fn reversibility_defect(&self, n_samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<SpherePoint<T>> = random_sphere_points(&mut rng, n_samples);
        let mut worst = 0.0f64;
        for x in &xs {
            let fan = match self.forward_images(x) {
                Ok(f) => f,
                Err(_) => continue,
            };
            for y in fan.points() {
                let r = to_f64(self.relative_residual(&y.eta(), &x.eta()));
                worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
            }
        }
        worst
    }
}
