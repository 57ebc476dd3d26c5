use std::fmt;
use std::sync::Arc;

use super::{HomRationalMap, RatMapError};
use crate::expr::Expr;
use crate::moebius::MoebiusFamily;
use crate::polyring::ComplexPoly;
use crate::scalar::{lit, Real};

/// A sequence `n ↦ f_n` of rational maps of a fixed declared degree.
pub trait MapFamily<T>: Send + Sync {
    fn degree(&self) -> usize;
    fn at(&self, n: u64) -> Result<HomRationalMap<T>, RatMapError>;
}

/// Coefficients given as expression trees in `n`.
#[derive(Clone, Debug)]
pub struct ExprMapFamily {
    pub degree: usize,
    pub num: Vec<Expr>,
    pub den: Vec<Expr>,
}

impl<T: Real> MapFamily<T> for ExprMapFamily {
    fn degree(&self) -> usize {
        self.degree
    }

    fn at(&self, n: u64) -> Result<HomRationalMap<T>, RatMapError> {
        let x: T = lit(n as f64);
        let p = ComplexPoly::exact(self.num.iter().map(|e| e.eval(x)).collect());
        let q = ComplexPoly::exact(self.den.iter().map(|e| e.eval(x)).collect());
        HomRationalMap::new(self.degree, p, q)
    }
}

type MapFn<T> = dyn Fn(u64) -> Result<HomRationalMap<T>, RatMapError> + Send + Sync;

/// Family given by a closure.
#[derive(Clone)]
pub struct FnMapFamily<T> {
    degree: usize,
    f: Arc<MapFn<T>>,
}

impl<T> fmt::Debug for FnMapFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnMapFamily(degree {})", self.degree)
    }
}

impl<T: Real> FnMapFamily<T> {
    pub fn new<F>(degree: usize, f: F) -> Self
    where
        F: Fn(u64) -> Result<HomRationalMap<T>, RatMapError> + Send + Sync + 'static,
    {
        Self { degree, f: Arc::new(f) }
    }

    pub fn constant(map: HomRationalMap<T>) -> Self {
        Self::new(map.degree(), move |_| Ok(map.clone()))
    }
}

impl<T: Real> MapFamily<T> for FnMapFamily<T> {
    fn degree(&self) -> usize {
        self.degree
    }

    fn at(&self, n: u64) -> Result<HomRationalMap<T>, RatMapError> {
        (self.f)(n)
    }
}

/// `n ↦ B_n⁻¹ ∘ f_n ∘ A_n`.
pub struct ConjugatedFamily<'a, T> {
    pub f: &'a dyn MapFamily<T>,
    pub a: &'a MoebiusFamily<T>,
    pub b: &'a MoebiusFamily<T>,
}

impl<T: Real> MapFamily<T> for ConjugatedFamily<'_, T> {
    fn degree(&self) -> usize {
        self.f.degree()
    }

    fn at(&self, n: u64) -> Result<HomRationalMap<T>, RatMapError> {
        let (a, b) = (self.a.at(n)?, self.b.at(n)?);
        Ok(self.f.at(n)?.conjugate(&b.inverse(), &a))
    }
}
