use num_complex::Complex;

use super::linalg::determinant;
use super::{ComplexPoly, PolyError};
use crate::scalar::{czero, Real};

/// Rows: `n − j` shifts of `p`, then `m − j` shifts of `q` (descending
/// coefficients), truncated to the first `m + n − 2j` columns.
fn subresultant_matrix<T: Real>(p: &ComplexPoly<T>, q: &ComplexPoly<T>, j: usize) -> Vec<Vec<Complex<T>>> {
    let (m, n) = (p.deg(), q.deg());
    let size = m + n - 2 * j;
    let mut rows = Vec::with_capacity(size);
    for (poly, deg, count) in [(p, m, n - j), (q, n, m - j)] {
        for i in 0..count {
            let mut row = vec![czero(); size];
            for k in 0..=deg {
                let col = i + k;
                if col < size {
                    row[col] = poly.coeff(deg - k);
                }
            }
            rows.push(row);
        }
    }
    rows
}

fn check<T: Real>(p: &ComplexPoly<T>, q: &ComplexPoly<T>, j: usize) -> Result<(), PolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let max = p.deg().min(q.deg());
    if j > max {
        return Err(PolyError::IndexOutOfRange { j, max });
    }
    Ok(())
}

/// `Res(p, q) = lc(p)^{deg q} ∏ q(α)` over the roots `α` of `p`; zero if either input is zero.
pub fn resultant<T: Real>(p: &ComplexPoly<T>, q: &ComplexPoly<T>) -> Complex<T> {
    if p.is_zero() || q.is_zero() {
        return czero();
    }
    determinant(subresultant_matrix(p, q, 0))
}

/// The `j`-th principal subresultant coefficient; `sRes_0` is the resultant.
pub fn subresultant_coeff<T: Real>(p: &ComplexPoly<T>, q: &ComplexPoly<T>, j: usize) -> Result<Complex<T>, PolyError> {
    check(p, q, j)?;
    Ok(determinant(subresultant_matrix(p, q, j)))
}

/// Hadamard bound on `|sRes_j|`: the product of the row norms of its matrix.
pub fn subresultant_scale<T: Real>(p: &ComplexPoly<T>, q: &ComplexPoly<T>, j: usize) -> Result<T, PolyError> {
    check(p, q, j)?;
    Ok(subresultant_matrix(p, q, j)
        .iter()
        .map(|r| r.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt())
        .fold(T::one(), |a, b| a * b))
}

/// Largest `k ≤ min(deg p, deg q)` with `|sRes_j| ≤ tol · scale_j` for every `j < k`.
pub fn subresultant_gcd_degree<T: Real>(p: &ComplexPoly<T>, q: &ComplexPoly<T>, tol: T) -> usize {
    if p.is_zero() || q.is_zero() {
        return 0;
    }
    let max = p.deg().min(q.deg());
    let (pn, qn) = (p.normalized(), q.normalized());
    let mut k = 0;
    while k < max {
        let s = subresultant_coeff(&pn, &qn, k).unwrap();
        let sc = subresultant_scale(&pn, &qn, k).unwrap();
        if s.norm() <= tol * sc {
            k += 1;
        } else {
            break;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type P = ComplexPoly<f64>;

    #[test]
    fn resultant_examples() {
        let r = resultant(&P::from_real(&[-1.0, 1.0]), &P::from_real(&[-4.0, 1.0]));
        assert!((r - cplx(-3.0, 0.0)).norm() < 1e-14);
        let z2 = P::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(resultant(&z2, &z2).norm(), 0.0);
        let r = resultant(&P::from_real(&[-1.0, 1.0]), &P::from_real(&[1.0, 1.0]));
        assert!((r - cplx(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn resultant_matches_product_formula() {
        // p = 2(z − 1)(z + 3), q = z³ − 2z + 7: Res = 2³ q(1) q(−3)
        let p = P::from_roots(&[cplx(1.0, 0.0), cplx(-3.0, 0.0)]).scale(cplx(2.0, 0.0));
        let q = P::from_real(&[7.0, -2.0, 0.0, 1.0]);
        let expected: Complex<f64> = cplx::<f64>(8.0, 0.0) * q.eval(cplx(1.0, 0.0)) * q.eval(cplx(-3.0, 0.0));
        assert!((resultant(&p, &q) - expected).norm() < 1e-10 * expected.norm());
    }

    #[test]
    fn subresultant_examples() {
        let (p, q) = (P::from_real(&[-1.0, 1.0]), P::from_real(&[1.0, 1.0]));
        assert!((subresultant_coeff(&p, &q, 0).unwrap() - cplx(2.0, 0.0)).norm() < 1e-14);

        let s = P::from_real(&[2.0, -3.0, 1.0]);
        assert!(subresultant_coeff(&s, &s, 0).unwrap().norm() < 1e-12);
        assert!(subresultant_coeff(&s, &s, 1).unwrap().norm() < 1e-12);

        // z² + 1, z − 5: sRes_1 = lc(q)^{deg p − deg q} = 1
        let (a, b) = (P::from_real(&[1.0, 0.0, 1.0]), P::from_real(&[-5.0, 1.0]));
        assert!((subresultant_coeff(&a, &b, 1).unwrap() - cplx(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(subresultant_coeff(&a, &b, 2), Err(PolyError::IndexOutOfRange { j: 2, max: 1 }));
    }

    #[test]
    fn gcd_degree_from_subresultants() {
        let p = P::from_roots(&[cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(0.0, 1.0)]);
        let q = P::from_roots(&[cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(-3.0, 0.5)]);
        assert_eq!(subresultant_gcd_degree(&p, &q, 1e-10), 2);
    }
}
