use num_complex::Complex;

use super::roots::{raw_roots, RootOptions};
use super::sylvester::subresultant_gcd_degree;
use super::ComplexPoly;
use crate::scalar::{lit, Real};

/// Approximate monic gcd. The degree comes from the vanishing pattern of the
/// principal subresultant coefficients; the factor itself is built from the
/// closest matched root pairs of `p` and `q`.
pub fn gcd_approx<T: Real>(p: &ComplexPoly<T>, q: &ComplexPoly<T>, tol: T) -> ComplexPoly<T> {
    if p.is_zero() {
        return q.monic();
    }
    if q.is_zero() {
        return p.monic();
    }
    let k = subresultant_gcd_degree(p, q, tol);
    if k == 0 {
        return ComplexPoly::one();
    }
    let opts = RootOptions::default();
    let (rp, rq) = match (raw_roots(p, &opts), raw_roots(q, &opts)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return ComplexPoly::one(),
    };
    let common = matched_pairs(&rp, &rq, k, tol.sqrt());
    ComplexPoly::from_roots(&common)
}

/// Greedy nearest pairing of two root lists; keeps at most `k` pairs whose
/// relative distance is below `accept`, returning their midpoints.
pub(crate) fn matched_pairs<T: Real>(a: &[Complex<T>], b: &[Complex<T>], k: usize, accept: T) -> Vec<Complex<T>> {
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let scale = T::one().max(x.norm()).max(y.norm());
            pairs.push(((*x - *y).norm() / scale, i, j));
        }
    }
    pairs.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap_or(std::cmp::Ordering::Equal));
    let (mut ua, mut ub) = (vec![false; a.len()], vec![false; b.len()]);
    let mut out = Vec::with_capacity(k);
    let half: T = lit(0.5);
    for (d, i, j) in pairs {
        if out.len() == k || d > accept {
            break;
        }
        if ua[i] || ub[j] {
            continue;
        }
        ua[i] = true;
        ub[j] = true;
        out.push((a[i] + b[j]) * half);
    }
    out
}
