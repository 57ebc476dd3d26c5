use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::moebius::SpherePoint;
use crate::scalar::{cone, czero, from_usize, lit, Real};

/// Univariate complex polynomial, coefficients in ascending degree.
///
/// Trailing coefficients below `drop_tol · max|a_i|` are removed on
/// construction; the empty vector is the zero polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoly<T> {
    coeffs: Vec<Complex<T>>,
}

/// Default relative trimming threshold in units of machine epsilon.
pub(crate) const DROP_EPS: f64 = 8.0;

impl<T: Real> ComplexPoly<T> {
    pub fn new(coeffs: Vec<Complex<T>>) -> Self {
        Self::with_drop_tol(coeffs, T::epsilon() * lit(DROP_EPS))
    }

    pub fn with_drop_tol(mut coeffs: Vec<Complex<T>>, drop_tol: T) -> Self {
        let m = coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max);
        if !(m > T::zero()) {
            coeffs.clear();
        } else {
            while coeffs.last().is_some_and(|c| c.norm() <= drop_tol * m) {
                coeffs.pop();
            }
        }
        Self { coeffs }
    }

    /// No trimming beyond exact zeros.
    pub fn exact(coeffs: Vec<Complex<T>>) -> Self {
        Self::with_drop_tol(coeffs, T::zero())
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::exact(coeffs.iter().map(|&c| Complex::new(lit(c), T::zero())).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![cone()] }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::exact(vec![c])
    }

    /// `z`.
    pub fn x() -> Self {
        Self { coeffs: vec![czero(), cone()] }
    }

    pub fn monomial(c: Complex<T>, k: usize) -> Self {
        let mut v = vec![czero(); k + 1];
        v[k] = c;
        Self::exact(v)
    }

    /// `∏ (z − r)`.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        let mut c = vec![cone()];
        for &r in roots {
            let mut next = vec![czero(); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self::exact(c)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Complex<T> {
        self.coeffs.get(i).copied().unwrap_or_else(czero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial reported as 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs.last().copied().unwrap_or_else(czero)
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    pub fn norm_l1(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, c| s + c.norm())
    }

    pub fn norm2(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt()
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(czero(), |acc, &c| acc * z + c)
    }

    /// `Σ |a_i| |z|^i`, the natural scale of `|p(z)|`.
    pub fn eval_abs(&self, z: Complex<T>) -> T {
        let r = z.norm();
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * r + c.norm())
    }

    /// Value and derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut p = czero();
        let mut dp = czero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Homogeneous evaluation `Σ a_i z^i w^{n−i}` at the projective point `(z : w)`.
    pub fn eval_homogeneous(&self, n: usize, p: &SpherePoint<T>) -> Complex<T> {
        let (z, w) = (p.z(), p.w());
        let mut zp = vec![cone::<T>(); n + 1];
        let mut wp = vec![cone::<T>(); n + 1];
        for i in 1..=n {
            zp[i] = zp[i - 1] * z;
            wp[i] = wp[i - 1] * w;
        }
        (0..=n).fold(czero(), |s, i| s + self.coeff(i) * zp[i] * wp[n - i])
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::exact(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * from_usize::<T>(i))
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::exact(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Divided by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            Some(&lc) => self.scale(cone::<T>() / lc),
            None => Self::zero(),
        }
    }

    /// Divided by its largest coefficient magnitude.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m > T::zero() {
            self.scale(Complex::new(T::one() / m, T::zero()))
        } else {
            Self::zero()
        }
    }

    /// `z^n p(1/z)`, padding so that the result has length `n + 1`.
    pub fn reversed(&self, n: usize) -> Self {
        assert!(self.coeffs.len() <= n + 1, "reversal length below degree");
        Self::exact((0..=n).map(|i| self.coeff(n - i)).collect())
    }

    /// `p(c z)`.
    pub fn scale_arg(&self, c: Complex<T>) -> Self {
        let mut pw = cone::<T>();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &a in &self.coeffs {
            out.push(a * pw);
            pw *= c;
        }
        Self::exact(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Long division; returns `(quotient, remainder)`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let n = self.coeffs.len();
        let m = d.coeffs.len();
        if n < m {
            return (Self::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![czero(); n - m + 1];
        let lc = d.leading();
        for k in (0..=n - m).rev() {
            let c = r[k + m - 1] / lc;
            q[k] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[k + j] -= c * dj;
            }
        }
        r.truncate(m - 1);
        (Self::exact(q), Self::exact(r))
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![czero(); k];
        v.extend_from_slice(&self.coeffs);
        Self::exact(v)
    }

    /// Trims relative to `tol` times the largest coefficient.
    pub fn trimmed(&self, tol: T) -> Self {
        Self::with_drop_tol(self.coeffs.clone(), tol)
    }

    /// Zero-pads (or trims exact zeros) to exactly `len` coefficients.
    pub fn padded(&self, len: usize) -> Vec<Complex<T>> {
        (0..len).map(|i| self.coeff(i)).collect()
    }
}

impl<'a, T: Real> Add for &'a ComplexPoly<T> {
    type Output = ComplexPoly<T>;
    fn add(self, o: Self) -> ComplexPoly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        ComplexPoly::exact((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<'a, T: Real> Sub for &'a ComplexPoly<T> {
    type Output = ComplexPoly<T>;
    fn sub(self, o: Self) -> ComplexPoly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        ComplexPoly::exact((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<'a, T: Real> Mul for &'a ComplexPoly<T> {
    type Output = ComplexPoly<T>;
    fn mul(self, o: Self) -> ComplexPoly<T> {
        if self.is_zero() || o.is_zero() {
            return ComplexPoly::zero();
        }
        let mut v = vec![czero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        ComplexPoly::exact(v)
    }
}

impl<'a, T: Real> Neg for &'a ComplexPoly<T> {
    type Output = ComplexPoly<T>;
    fn neg(self) -> ComplexPoly<T> {
        ComplexPoly::exact(self.coeffs.iter().map(|&c| -c).collect())
    }
}
