//! Small dense complex linear algebra: determinants and Hessenberg QR.

use num_complex::Complex;

use crate::scalar::{cone, czero, lit, Real};

/// Determinant by LU with partial pivoting; the empty matrix has determinant 1.
pub(crate) fn determinant<T: Real>(mut a: Vec<Vec<Complex<T>>>) -> Complex<T> {
    let n = a.len();
    let mut det = cone::<T>();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].norm().partial_cmp(&a[j][k].norm()).unwrap())
            .unwrap();
        if a[piv][k] == czero() {
            return czero();
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        let p = a[k][k];
        det *= p;
        for i in k + 1..n {
            let f = a[i][k] / p;
            if f == czero() {
                continue;
            }
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
        }
    }
    det
}

/// Eigenvalues of an upper Hessenberg matrix by the shifted QR algorithm
/// with Givens rotations, Wilkinson shifts and deflation.
pub(crate) fn hessenberg_eigenvalues<T: Real>(
    mut h: Vec<Vec<Complex<T>>>,
    max_sweeps: usize,
) -> Option<Vec<Complex<T>>> {
    let n = h.len();
    let mut eig = Vec::with_capacity(n);
    if n == 0 {
        return Some(eig);
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iters = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[l][l].norm() + h[l - 1][l - 1].norm();
            let s = if s > T::zero() { s } else { T::one() };
            if h[l][l - 1].norm() <= eps * s {
                h[l][l - 1] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[hi][hi]);
            hi -= 1;
            iters = 0;
            continue;
        }
        iters += 1;
        total += 1;
        if total > max_sweeps * n {
            return None;
        }
        let (a, b, c, d) = (h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
        let mu = if iters % 11 == 10 {
            // exceptional shift to break cycles
            d + Complex::new(c.norm() * lit(0.75), c.norm() * lit(0.4))
        } else {
            let half: T = lit(0.5);
            let tr = (a + d) * half;
            let disc = (tr * tr - (a * d - b * c)).sqrt();
            let (m1, m2) = (tr + disc, tr - disc);
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in l..=hi {
            h[k][k] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (x, y) = (h[k][k], h[k + 1][k]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r > T::zero() { (x / r, y / r) } else { (cone(), czero()) };
            for j in k..=hi {
                let (u, v) = (h[k][j], h[k + 1][j]);
                h[k][j] = cs.conj() * u + sn.conj() * v;
                h[k + 1][j] = -sn * u + cs * v;
            }
            rots.push((cs, sn));
        }
        for (off, &(cs, sn)) in rots.iter().enumerate() {
            let k = l + off;
            for i in l..=(k + 1).min(hi) {
                let (u, v) = (h[i][k], h[i][k + 1]);
                h[i][k] = u * cs + v * sn;
                h[i][k + 1] = -u * sn.conj() + v * cs.conj();
            }
        }
        for k in l..=hi {
            h[k][k] += mu;
        }
    }
    eig.push(h[0][0]);
    Some(eig)
}
