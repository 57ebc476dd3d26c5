use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::{MoebiusError, MoebiusMap};
use crate::expr::Expr;
use crate::extrapolate::{quadratic_estimates, tail_drift};
use crate::scalar::{lit, Real};

type MoebiusFn<T> = dyn Fn(u64) -> Result<MoebiusMap<T>, MoebiusError> + Send + Sync;

/// A family `n ↦ M_n`, either as four closed-form entry expressions or a closure.
#[derive(Clone)]
pub enum MoebiusFamily<T> {
    Expr(Box<[Expr; 4]>),
    Func(Arc<MoebiusFn<T>>),
}

impl<T> fmt::Debug for MoebiusFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoebiusFamily::Expr(e) => f.debug_tuple("Expr").field(e).finish(),
            MoebiusFamily::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl<T: Real> MoebiusFamily<T> {
    pub fn from_exprs(a: Expr, b: Expr, c: Expr, d: Expr) -> Self {
        MoebiusFamily::Expr(Box::new([a, b, c, d]))
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(u64) -> Result<MoebiusMap<T>, MoebiusError> + Send + Sync + 'static,
    {
        MoebiusFamily::Func(Arc::new(f))
    }

    pub fn constant(m: MoebiusMap<T>) -> Self {
        Self::from_fn(move |_| Ok(m))
    }

    pub fn at(&self, n: u64) -> Result<MoebiusMap<T>, MoebiusError> {
        match self {
            MoebiusFamily::Expr(e) => {
                let x: T = lit(n as f64);
                MoebiusMap::new(e[0].eval(x), e[1].eval(x), e[2].eval(x), e[3].eval(x))
            }
            MoebiusFamily::Func(f) => f(n),
        }
    }

    /// `n ↦ self_n ∘ other_n`.
    pub fn compose(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::from_fn(move |n| Ok(f.at(n)?.compose(&g.at(n)?)))
    }
}

/// Default geometric schedule `10, 100, …, 10⁶`.
pub fn default_samples() -> Vec<u64> {
    (1..=6).map(|k| 10u64.pow(k)).collect()
}

#[derive(Clone, Debug)]
pub struct RescalingSequence<T> {
    pub generator: MoebiusFamily<T>,
    pub sample_indices: Vec<u64>,
}

impl<T: Real> RescalingSequence<T> {
    pub fn new(generator: MoebiusFamily<T>) -> Self {
        Self { generator, sample_indices: default_samples() }
    }

    pub fn with_samples(generator: MoebiusFamily<T>, sample_indices: Vec<u64>) -> Self {
        Self { generator, sample_indices }
    }

    pub fn samples(&self) -> Result<Vec<MoebiusMap<T>>, MoebiusError> {
        self.sample_indices.iter().map(|&n| self.generator.at(n)).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RescalingThresholds {
    pub cauchy_tol: f64,
    pub divergence: f64,
    pub bounded_cap: f64,
}

impl Default for RescalingThresholds {
    fn default() -> Self {
        Self { cauchy_tol: 1e-8, divergence: 1e6, bounded_cap: 1e3 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RescalingRelation<T> {
    Equivalent(MoebiusMap<T>),
    Bounded,
    Independent,
}

impl<T> RescalingRelation<T> {
    pub fn label(&self) -> &'static str {
        match self {
            RescalingRelation::Equivalent(_) => "equivalent",
            RescalingRelation::Bounded => "bounded",
            RescalingRelation::Independent => "independent",
        }
    }
}

/// Classifies `C_n = B_n⁻¹ ∘ A_n` on the shared sample grid.
pub fn classify_rescaling_pair<T: Real>(
    a: &RescalingSequence<T>,
    b: &RescalingSequence<T>,
    th: &RescalingThresholds,
) -> Result<RescalingRelation<T>, MoebiusError> {
    if a.sample_indices != b.sample_indices {
        return Err(MoebiusError::SampleMismatch);
    }
    let idx = &a.sample_indices;
    if idx.len() < 4 {
        return Err(MoebiusError::TooFewSamples { needed: 4, got: idx.len() });
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MoebiusError::Inconclusive("sample indices must ascend strictly".into()));
    }
    let (sa, sb) = (a.samples()?, b.samples()?);
    let mut cs: Vec<MoebiusMap<T>> = Vec::with_capacity(idx.len());
    for (ma, mb) in sa.iter().zip(sb.iter()) {
        let c = mb.inverse().compose(ma);
        let c = match cs.last() {
            Some(prev) => c.sign_aligned(prev),
            None => c,
        };
        cs.push(c);
    }
    let k = cs.len();

    // Quadratic extrapolation in 1/n; the estimates at the last three samples decide.
    let vs: Vec<Vec<Complex<T>>> = cs.iter().map(|c| c.entries().to_vec()).collect();
    let est = quadratic_estimates(idx, &vs);
    if let Some(drift) = tail_drift(&est) {
        if drift < lit(th.cauchy_tol) {
            let e = est.last().unwrap();
            if let Ok(limit) = MoebiusMap::new(e[0], e[1], e[2], e[3]) {
                return Ok(RescalingRelation::Equivalent(limit));
            }
        }
    }

    let norms: Vec<T> = cs.iter().map(|c| c.operator_norm()).collect();
    let tail = &norms[k - 3..];
    let div: T = lit(th.divergence);
    if tail[2] > div && tail.windows(2).all(|w| w[1] > w[0]) {
        return Ok(RescalingRelation::Independent);
    }
    let cap: T = lit(th.bounded_cap);
    if tail.iter().all(|&x| x <= cap) {
        return Ok(RescalingRelation::Bounded);
    }
    Err(MoebiusError::Inconclusive(format!(
        "tail norms {:.3e}, {:.3e}, {:.3e}",
        tail[0].to_f64().unwrap_or(f64::NAN),
        tail[1].to_f64().unwrap_or(f64::NAN),
        tail[2].to_f64().unwrap_or(f64::NAN)
    )))
}
