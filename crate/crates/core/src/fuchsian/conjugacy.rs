use rayon::prelude::*;

use super::{bowen_series_eval, wrap_angle, BowenSeriesMap, FuchsianError};
use crate::scalar::{from_usize, lit, Real};

/// Approximation `h_D` of the circle homeomorphism `h` with
/// `h(k t) = A(h(t))` and `h(0) = 0`, `k = 2d − 1`.
///
/// `h_D` is the depth-`D` pullback of the identity: for `t` with base-`k`
/// digits `i_1 … i_D`, `h_D(t) = A_{i_1}⁻¹ ∘ … ∘ A_{i_D}⁻¹(k^D t mod 2π)`,
/// where `A_i⁻¹` is the inverse branch onto the `i`-th preimage interval of 0.
/// It matches the table of matched preimages of the fixed point exactly and
/// is monotone between them. Nothing is materialized, so large depths are cheap.
#[derive(Clone, Debug)]
pub struct CircleConjugacy<T> {
    map: BowenSeriesMap<T>,
    depth: u32,
}

/// Builds the depth-`depth` conjugacy after checking that `A` and `z^k` have
/// the same number of preimages of the fixed point.
pub fn conjugacy<T: Real>(a: &BowenSeriesMap<T>, depth: u32) -> Result<CircleConjugacy<T>, FuchsianError> {
    assert!(depth >= 1, "depth must be at least 1");
    let k = a.k();
    let total = a.lift(T::TAU() - lit(1e-12)) / T::TAU();
    let found = total.ceil().to_usize().unwrap_or(0);
    if found != k {
        return Err(FuchsianError::CombinatoricsMismatch { expected: k, found });
    }
    Ok(CircleConjugacy { map: a.clone(), depth })
}

impl<T: Real> CircleConjugacy<T> {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn map(&self) -> &BowenSeriesMap<T> {
        &self.map
    }

    /// Number of table entries, `k^depth`.
    pub fn table_len(&self) -> u128 {
        (self.map.k() as u128).pow(self.depth)
    }

    /// Entry `m`: `(2πm/k^D, h(2πm/k^D))`, computed from the exact digits of `m`.
    pub fn table_entry(&self, m: u128) -> (T, T) {
        let k = self.map.k() as u128;
        let n = self.table_len();
        assert!(m < n);
        let mut digits = Vec::with_capacity(self.depth as usize);
        let mut r = m;
        for _ in 0..self.depth {
            digits.push((r % k) as usize);
            r /= k;
        }
        // digits[0] is the least significant, applied first.
        let x = digits.iter().fold(T::zero(), |x, &i| self.map.lift_inverse(T::TAU() * from_usize(i) + x));
        let t = T::TAU() * lit::<T>(m as f64) / lit(n as f64);
        (t, x)
    }

    /// The full table, or `None` if it would exceed `cap` entries.
    pub fn table(&self, cap: usize) -> Option<Vec<(T, T)>> {
        let n = self.table_len();
        if n > cap as u128 {
            return None;
        }
        Some((0..n).map(|m| self.table_entry(m)).collect())
    }

    /// `h_D(t)` in `[0, 2π)`.
    pub fn eval(&self, t: T) -> T {
        let k = self.map.k();
        let kt: T = from_usize(k);
        let tau = T::TAU();
        let mut s = wrap_angle(t);
        let mut digits = Vec::with_capacity(self.depth as usize);
        for _ in 0..self.depth {
            let y = s * kt;
            let i = (y / tau).floor().to_usize().unwrap_or(0).min(k - 1);
            digits.push(i);
            s = (y - tau * from_usize(i)).max(T::zero()).min(tau);
        }
        let x = digits.iter().rev().fold(s, |x, &i| self.map.lift_inverse(tau * from_usize(i) + x));
        wrap_angle(x)
    }

    /// `max |h(k t) − A(h(t))|` (circular distance) over the given angles.
    pub fn defect(&self, samples: &[T]) -> T {
        let kt: T = from_usize(self.map.k());
        samples
            .par_iter()
            .map(|&t| {
                let lhs = self.eval(kt * t);
                let rhs = bowen_series_eval(&self.map, self.eval(t));
                circular_distance(lhs, rhs)
            })
            .reduce(T::zero, T::max)
    }
}

pub(crate) fn circular_distance<T: Real>(a: T, b: T) -> T {
    let d = wrap_angle(a - b);
    d.min(T::TAU() - d)
}

/// `n` angles `2π(i + 1/2)/n`, off every preimage lattice point.
pub fn defect_samples<T: Real>(n: usize) -> Vec<T> {
    (0..n).map(|i| T::TAU() * (from_usize::<T>(i) + lit(0.5)) / from_usize(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a3() -> BowenSeriesMap<f64> {
        BowenSeriesMap::standard(3).unwrap()
    }

    #[test]
    fn normalized_at_zero() {
        let h = conjugacy(&a3(), 4).unwrap();
        assert_eq!(h.eval(0.0), 0.0);
        assert_eq!(h.table_entry(0), (0.0, 0.0));
    }

    #[test]
    fn depth_one_has_k_entries_that_are_preimages() {
        let a = a3();
        let h = conjugacy(&a, 1).unwrap();
        let table = h.table(100).unwrap();
        assert_eq!(table.len(), 5);
        for &(_, x) in &table {
            assert!(circular_distance(bowen_series_eval(&a, x), 0.0) < 1e-10);
        }
    }

    #[test]
    fn tables_are_strictly_increasing() {
        for d in 2..=4 {
            let a = BowenSeriesMap::<f64>::standard(d).unwrap();
            for depth in 1..=4 {
                let t = conjugacy(&a, depth).unwrap().table(100_000).unwrap();
                assert!(t.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1), "d={d} depth={depth}");
            }
        }
    }

    #[test]
    fn eval_agrees_with_table() {
        let h = conjugacy(&a3(), 3).unwrap();
        for m in [1u128, 7, 42, 124] {
            let (t, x) = h.table_entry(m);
            assert!(circular_distance(h.eval(t), x) < 1e-9, "m={m}");
        }
    }

    #[test]
    fn defect_shrinks_with_depth() {
        let a = a3();
        let s = defect_samples::<f64>(2000);
        let d6 = conjugacy(&a, 6).unwrap().defect(&s);
        let d12 = conjugacy(&a, 12).unwrap().defect(&s);
        assert!(d12 < d6, "{d12} vs {d6}");
    }
}
