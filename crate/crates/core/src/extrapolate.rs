//! Sequence extrapolation in `h = 1/n` on sampled coefficient vectors.

use num_complex::Complex;

use crate::scalar::{lit, Real};

/// Lagrange extrapolation to `h = 0` through `points` consecutive samples,
/// for every window. Entry `i` of the result belongs to sample `i + points − 1`.
pub(crate) fn polynomial_estimates<T: Real>(ns: &[u64], vs: &[Vec<Complex<T>>], points: usize) -> Vec<Vec<Complex<T>>> {
    (points - 1..vs.len())
        .map(|k| {
            let h: Vec<T> = (k + 1 - points..=k).map(|i| lit(1.0 / ns[i] as f64)).collect();
            let w: Vec<T> = (0..points)
                .map(|a| {
                    (0..points)
                        .filter(|&b| b != a)
                        .fold(T::one(), |acc, b| acc * h[b] / (h[b] - h[a]))
                })
                .collect();
            (0..vs[k].len())
                .map(|i| (0..points).fold(Complex::new(T::zero(), T::zero()), |acc, a| acc + vs[k + 1 - points + a][i] * w[a]))
                .collect()
        })
        .collect()
}

/// Quadratic extrapolation through samples `k − 2, k − 1, k`.
pub(crate) fn quadratic_estimates<T: Real>(ns: &[u64], vs: &[Vec<Complex<T>>]) -> Vec<Vec<Complex<T>>> {
    polynomial_estimates(ns, vs, 3)
}

/// Largest successive difference among the estimates at the last three
/// samples, relative to `max(1, |estimate|)`; `None` if fewer than two exist.
pub(crate) fn tail_drift<T: Real>(est: &[Vec<Complex<T>>]) -> Option<T> {
    if est.len() < 2 {
        return None;
    }
    let start = est.len().saturating_sub(3);
    let tail = &est[start..];
    Some(
        tail.windows(2)
            .map(|w| {
                let scale = w[1].iter().map(|z| z.norm()).fold(T::one(), T::max);
                w[1].iter().zip(&w[0]).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max) / scale
            })
            .fold(T::zero(), T::max),
    )
}
