use num_complex::Complex;

use super::linalg::hessenberg_eigenvalues;
use super::{ComplexPoly, PolyError};
use crate::moebius::SpherePoint;
use crate::scalar::{cone, czero, from_usize, lit, tol_floor, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root<T> {
    pub point: SpherePoint<T>,
    pub multiplicity: usize,
}

impl<T: Real> Root<T> {
    /// Affine value; non-finite at infinity.
    pub fn value(&self) -> Complex<T> {
        self.point.affine_or_inf()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Relative radius within which approximations merge into one root.
    pub cluster_tol: f64,
    /// Backward-error bound `|p(r)| ≤ residual_tol · Σ|a_i||r|^i`.
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { cluster_tol: 1e-7, residual_tol: 1e-10, max_iter: 500 }
    }
}

/// Finite roots with multiplicity, by Aberth–Ehrlich iteration with a
/// companion-matrix fallback.
pub fn roots<T: Real>(p: &ComplexPoly<T>) -> Result<Vec<Root<T>>, PolyError> {
    roots_with(p, &RootOptions::default())
}

pub fn roots_with<T: Real>(p: &ComplexPoly<T>, opts: &RootOptions) -> Result<Vec<Root<T>>, PolyError> {
    let raw = raw_roots(p, opts)?;
    Ok(cluster(&raw, lit(opts.cluster_tol)))
}

/// Roots of `p` read as a homogeneous form of degree `n ≥ deg p`:
/// the deficit `n − deg p` appears as a root at infinity.
pub fn roots_on_sphere<T: Real>(p: &ComplexPoly<T>, n: usize) -> Result<Vec<Root<T>>, PolyError> {
    let mut r = roots(p)?;
    let d = p.deg();
    if n > d {
        r.push(Root { point: SpherePoint::infinity(), multiplicity: n - d });
    }
    Ok(r)
}

/// Flat list of `deg p` root approximations, no clustering.
pub fn raw_roots<T: Real>(p: &ComplexPoly<T>, opts: &RootOptions) -> Result<Vec<Complex<T>>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let c = p.coeffs();
    let zeros = c.iter().take_while(|a| **a == czero()).count();
    let q = ComplexPoly::exact(c[zeros..].to_vec());
    let mut out = vec![czero(); zeros];
    let n = q.deg();
    if n == 0 {
        return Ok(out);
    }
    if n == 1 {
        out.push(-q.coeff(0) / q.coeff(1));
        return Ok(out);
    }
    let tol: T = tol_floor(opts.residual_tol, 64.0 * n as f64);
    let mut z = aberth(&q, opts.max_iter);
    polish(&q, &mut z);
    if worst_backward_error(&q, &z) > tol {
        if let Some(mut e) = companion_roots(&q) {
            polish(&q, &mut e);
            if worst_backward_error(&q, &e) <= worst_backward_error(&q, &z) {
                z = e;
            }
        }
        let worst = worst_backward_error(&q, &z);
        if worst > tol {
            return Err(PolyError::NonConvergence { residual: worst.to_f64().unwrap_or(f64::NAN) });
        }
    }
    out.extend(z);
    Ok(out)
}

fn backward_error<T: Real>(p: &ComplexPoly<T>, z: Complex<T>) -> T {
    let s = p.eval_abs(z);
    if s > T::zero() {
        p.eval(z).norm() / s
    } else {
        T::zero()
    }
}

fn worst_backward_error<T: Real>(p: &ComplexPoly<T>, z: &[Complex<T>]) -> T {
    z.iter().map(|&r| backward_error(p, r)).fold(T::zero(), |a, b| if b.is_nan() { T::infinity() } else { a.max(b) })
}

fn aberth<T: Real>(p: &ComplexPoly<T>, max_iter: usize) -> Vec<Complex<T>> {
    let n = p.deg();
    let c = p.coeffs();
    // Geometric mean of root moduli as the starting radius.
    let r = (c[0].norm() / c[n].norm()).powf(T::one() / from_usize(n));
    let r = if r.is_finite() && r > T::zero() { r } else { T::one() };
    let tau = T::PI() * lit(2.0) / from_usize(n);
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| Complex::from_polar(r, tau * from_usize(k) + lit(0.4)))
        .collect();
    let mut done = vec![false; n];
    let eps = T::epsilon();
    for _ in 0..max_iter {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (v, d) = p.eval_with_derivative(z[k]);
            if v.norm() <= eps * from_usize::<T>(2 * n) * p.eval_abs(z[k]) {
                done[k] = true;
                continue;
            }
            all = false;
            let ratio = if d == czero() { v / lit::<T>(1e-30).max(T::min_positive_value()) } else { v / d };
            let mut s = czero::<T>();
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff != czero() {
                        s += cone::<T>() / diff;
                    }
                }
            }
            let w = ratio / (cone::<T>() - ratio * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[k] -= w;
            if w.norm() <= eps * z[k].norm() {
                done[k] = true;
            }
        }
        if all {
            break;
        }
    }
    z
}

/// Newton steps kept only while they reduce the residual.
fn polish<T: Real>(p: &ComplexPoly<T>, z: &mut [Complex<T>]) {
    for r in z.iter_mut() {
        for _ in 0..4 {
            let (v, d) = p.eval_with_derivative(*r);
            if d == czero() || v == czero() {
                break;
            }
            let cand = *r - v / d;
            if p.eval(cand).norm() < v.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
}

fn companion_roots<T: Real>(p: &ComplexPoly<T>) -> Option<Vec<Complex<T>>> {
    let n = p.deg();
    let lc = p.leading();
    let mut h = vec![vec![czero::<T>(); n]; n];
    for j in 0..n {
        h[0][j] = -p.coeff(n - 1 - j) / lc;
    }
    for i in 1..n {
        h[i][i - 1] = cone();
    }
    hessenberg_eigenvalues(h, 60)
}

/// Single-linkage clustering within `tol · max(1, |z|)`; each cluster is
/// reported at its centroid.
pub(crate) fn cluster<T: Real>(raw: &[Complex<T>], tol: T) -> Vec<Root<T>> {
    let n = raw.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while l[r] != r {
            r = l[r];
        }
        let mut j = i;
        while l[j] != r {
            let nx = l[j];
            l[j] = r;
            j = nx;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = T::one().max(raw[i].norm()).max(raw[j].norm());
            if (raw[i] - raw[j]).norm() <= tol * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex<T>, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += raw[i];
                g.2 += 1;
            }
            None => groups.push((r, raw[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, s, m)| Root { point: SpherePoint::finite(s / from_usize::<T>(m)), multiplicity: m })
        .collect()
}

/// Expands a root multiset into a flat list of affine values.
pub fn expand_roots<T: Real>(roots: &[Root<T>]) -> Vec<Complex<T>> {
    roots
        .iter()
        .flat_map(|r| std::iter::repeat(r.value()).take(r.multiplicity))
        .collect()
}
