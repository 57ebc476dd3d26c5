use num_complex::Complex;

use super::{ComplexPoly, PolyError};
use crate::moebius::SpherePoint;
use crate::scalar::{cone, czero, from_usize, Real};

/// Bivariate polynomial; `coeffs[i][j]` multiplies `x^i y^j`.
/// The stored extents are the bidegree `(deg_x, deg_y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivarPoly<T> {
    coeffs: Vec<Vec<Complex<T>>>,
}

impl<T: Real> BivarPoly<T> {
    /// Builds from a rectangular matrix, trimming exact-zero outer rows and columns.
    pub fn new(mut coeffs: Vec<Vec<Complex<T>>>) -> Self {
        let w = coeffs.iter().map(|r| r.len()).max().unwrap_or(0);
        for r in coeffs.iter_mut() {
            r.resize(w, czero());
        }
        while coeffs.last().is_some_and(|r| r.iter().all(|c| *c == czero())) {
            coeffs.pop();
        }
        let mut w = w;
        while w > 0 && coeffs.iter().all(|r| r[w - 1] == czero()) {
            w -= 1;
        }
        for r in coeffs.iter_mut() {
            r.truncate(w);
        }
        if w == 0 {
            coeffs.clear();
        }
        Self { coeffs }
    }

    /// Trims rows and columns whose entries are all below `tol · max|c|`.
    pub fn trimmed(&self, tol: T) -> Self {
        let m = self.max_abs();
        let cut = tol * m;
        let c = self
            .coeffs
            .iter()
            .map(|r| r.iter().map(|&v| if v.norm() <= cut { czero() } else { v }).collect())
            .collect();
        Self::new(c)
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![vec![c]])
    }

    /// `Σ a_i x^i`.
    pub fn from_x(p: &ComplexPoly<T>) -> Self {
        Self::new(p.coeffs().iter().map(|&c| vec![c]).collect())
    }

    /// `Σ a_j y^j`.
    pub fn from_y(p: &ComplexPoly<T>) -> Self {
        Self::new(vec![p.coeffs().to_vec()])
    }

    pub fn coeffs(&self) -> &[Vec<Complex<T>>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex<T> {
        self.coeffs.get(i).and_then(|r| r.get(j)).copied().unwrap_or_else(czero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn bidegree(&self) -> (usize, usize) {
        if self.is_zero() {
            return (0, 0);
        }
        (self.coeffs.len() - 1, self.coeffs[0].len() - 1)
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().flatten().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    pub fn norm_l1(&self) -> T {
        self.coeffs.iter().flatten().fold(T::zero(), |s, c| s + c.norm())
    }

    /// Coefficient of `x^i` as a polynomial in `y`.
    pub fn x_coeff(&self, i: usize) -> ComplexPoly<T> {
        ComplexPoly::exact(self.coeffs.get(i).cloned().unwrap_or_default())
    }

    pub fn eval(&self, x: Complex<T>, y: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(czero(), |acc, row| acc * x + row.iter().rev().fold(czero(), |a, &c| a * y + c))
    }

    /// Polynomial in `x` at fixed `y`.
    pub fn at_y(&self, y: Complex<T>) -> ComplexPoly<T> {
        ComplexPoly::exact(
            self.coeffs
                .iter()
                .map(|row| row.iter().rev().fold(czero(), |a, &c| a * y + c))
                .collect(),
        )
    }

    /// Polynomial in `y` at fixed `x`.
    pub fn at_x(&self, x: Complex<T>) -> ComplexPoly<T> {
        let (_, dy) = self.bidegree();
        if self.is_zero() {
            return ComplexPoly::zero();
        }
        ComplexPoly::exact(
            (0..=dy)
                .map(|j| self.coeffs.iter().rev().fold(czero(), |a, row| a * x + row[j]))
                .collect(),
        )
    }

    /// Homogeneous evaluation of bidegree `(a, b)` at `((x₀ : x₁), (y₀ : y₁))`.
    pub fn eval_homogeneous(&self, a: usize, b: usize, x: &SpherePoint<T>, y: &SpherePoint<T>) -> Complex<T> {
        let px = powers(x.z(), a);
        let qx = powers(x.w(), a);
        let py = powers(y.z(), b);
        let qy = powers(y.w(), b);
        let mut s = czero();
        for (i, row) in self.coeffs.iter().enumerate().take(a + 1) {
            let fx = px[i] * qx[a - i];
            for (j, &c) in row.iter().enumerate().take(b + 1) {
                s += c * fx * py[j] * qy[b - j];
            }
        }
        s
    }

    /// Dehomogenized evaluation when the chart at infinity is needed:
    /// same as [`eval_homogeneous`](Self::eval_homogeneous) but scaled so that
    /// the magnitude is comparable with `norm_l1`.
    pub fn eval_homogeneous_rel(&self, a: usize, b: usize, x: &SpherePoint<T>, y: &SpherePoint<T>) -> T {
        let v = self.eval_homogeneous(a, b, x, y).norm();
        let s = self.norm_l1();
        if s > T::zero() {
            v / s
        } else {
            T::zero()
        }
    }

    pub fn d_dx(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, row)| row.iter().map(|&c| c * from_usize::<T>(i)).collect())
                .collect(),
        )
    }

    pub fn d_dy(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|row| row.iter().enumerate().skip(1).map(|(j, &c)| c * from_usize::<T>(j)).collect())
                .collect(),
        )
    }

    /// `(x, y) ↦ (y, x)`.
    pub fn swap_xy(&self) -> Self {
        let (dx, dy) = self.bidegree();
        if self.is_zero() {
            return Self::zero();
        }
        Self::new((0..=dy).map(|j| (0..=dx).map(|i| self.coeffs[i][j]).collect()).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let rows = self.coeffs.len().max(o.coeffs.len());
        let cols = self.coeffs.first().map_or(0, |r| r.len()).max(o.coeffs.first().map_or(0, |r| r.len()));
        Self::new((0..rows).map(|i| (0..cols).map(|j| self.coeff(i, j) + o.coeff(i, j)).collect()).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-cone::<T>()))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|r| r.iter().map(|&c| c * s).collect()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let (a1, b1) = self.bidegree();
        let (a2, b2) = o.bidegree();
        let mut c = vec![vec![czero(); b1 + b2 + 1]; a1 + a2 + 1];
        for i in 0..=a1 {
            for j in 0..=b1 {
                let u = self.coeffs[i][j];
                if u == czero() {
                    continue;
                }
                for k in 0..=a2 {
                    for l in 0..=b2 {
                        c[i + k][j + l] += u * o.coeffs[k][l];
                    }
                }
            }
        }
        Self::new(c)
    }
}

fn powers<T: Real>(z: Complex<T>, n: usize) -> Vec<Complex<T>> {
    let mut v = vec![cone::<T>(); n + 1];
    for i in 1..=n {
        v[i] = v[i - 1] * z;
    }
    v
}

/// Exact long division of `n` by `l` in `x`, with coefficients in `ℂ[y]`.
/// Fails with `NotDivisible` if any remainder exceeds `tol · max|N|`.
pub fn divide_out_bivar<T: Real>(n: &BivarPoly<T>, l: &BivarPoly<T>, tol: T) -> Result<BivarPoly<T>, PolyError> {
    if l.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if n.is_zero() {
        return Ok(BivarPoly::zero());
    }
    let (nx, _) = n.bidegree();
    let (lx, _) = l.bidegree();
    let scale = n.max_abs();
    let bound = tol * scale;
    let not_div = |r: T| PolyError::NotDivisible { remainder: (r / scale).to_f64().unwrap_or(f64::NAN) };
    if nx < lx {
        return Err(not_div(scale));
    }
    let mut rem: Vec<ComplexPoly<T>> = (0..=nx).map(|i| n.x_coeff(i)).collect();
    let lrows: Vec<ComplexPoly<T>> = (0..=lx).map(|i| l.x_coeff(i)).collect();
    let lead = &lrows[lx];
    let mut quot = vec![ComplexPoly::zero(); nx - lx + 1];
    for k in (0..=nx - lx).rev() {
        let top = &rem[k + lx];
        let (qk, r) = if top.is_zero() { (ComplexPoly::zero(), ComplexPoly::zero()) } else { top.div_rem(lead) };
        if r.max_abs() > bound {
            return Err(not_div(r.max_abs()));
        }
        for (i, li) in lrows.iter().enumerate() {
            rem[k + i] = &rem[k + i] - &(&qk * li);
        }
        rem[k + lx] = ComplexPoly::zero();
        quot[k] = qk;
    }
    let worst = rem.iter().map(|r| r.max_abs()).fold(T::zero(), T::max);
    if worst > bound {
        return Err(not_div(worst));
    }
    let w = quot.iter().map(|q| q.coeffs().len()).max().unwrap_or(0);
    Ok(BivarPoly::new(quot.iter().map(|q| q.padded(w)).collect()))
}
