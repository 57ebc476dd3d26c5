use num_complex::Complex;

use super::{HomRationalMap, RatMapError};
use crate::polyring::{gcd_approx, subresultant_coeff, subresultant_scale, ComplexPoly};
use crate::scalar::{cplx, lit, to_f64, Real};

#[derive(Clone, Debug)]
pub struct VdReport {
    pub r_prime_at_1: (f64, f64),
    pub r_prime_at_minus_1: (f64, f64),
    /// `|N(±1)| / ‖N‖₁` for the reduced numerator `N` of `R′`.
    pub relative_critical_defect: [f64; 2],
    /// `|sRes_{2j}| / scale` for `j = 1, …, d − 1`.
    pub sres: Vec<f64>,
    pub verdict: bool,
}

/// Numerator and denominator of `R′ = N/D` in lowest terms.
fn derivative_fraction<T: Real>(r: &HomRationalMap<T>, tol: T) -> (ComplexPoly<T>, ComplexPoly<T>) {
    let w = r.wronskian();
    let q2 = r.den() * r.den();
    let g = gcd_approx(&w, &q2, tol);
    (w.div_rem(&g).0, q2.div_rem(&g).0)
}

/// Membership test for `V_d`: `R′(±1) = 0` and `sRes_{2j}(R′, R′∘η) = 0`.
pub fn vd_membership<T: Real>(r: &HomRationalMap<T>, d: usize, tol: T) -> Result<VdReport, RatMapError> {
    if r.degree() != 2 * d {
        return Err(RatMapError::DegreeMismatch { expected: 2 * d, found: r.degree() });
    }
    let (num, den) = derivative_fraction(r, lit(1e-10));
    let at = |z: Complex<T>| {
        let v = num.eval(z) / den.eval(z);
        (to_f64(v.re), to_f64(v.im))
    };
    let scale = num.norm_l1();
    let rel = |z: Complex<T>| if scale > T::zero() { to_f64(num.eval(z).norm() / scale) } else { 0.0 };
    let (one, minus) = (cplx::<T>(1.0, 0.0), cplx::<T>(-1.0, 0.0));
    let relative_critical_defect = [rel(one), rel(minus)];

    // R′(1/z) = N(1/z)/D(1/z); clear denominators by z^{max(a,b)}.
    let (a, b) = (num.deg(), den.deg());
    let m = a.max(b);
    let num_eta = num.reversed(a).shift(m - a);
    let (pn, qn) = (num.normalized(), num_eta.normalized());
    let mut sres = Vec::with_capacity(d.saturating_sub(1));
    let mut ok = relative_critical_defect.iter().all(|&x| x <= to_f64(tol));
    for j in 1..d {
        let k = 2 * j;
        let v = match (subresultant_coeff(&pn, &qn, k), subresultant_scale(&pn, &qn, k)) {
            (Ok(s), Ok(sc)) => to_f64(s.norm() / sc),
            _ => f64::INFINITY,
        };
        ok &= v <= to_f64(tol);
        sres.push(v);
    }
    Ok(VdReport {
        r_prime_at_1: at(one),
        r_prime_at_minus_1: at(minus),
        relative_critical_defect,
        sres,
        verdict: ok,
    })
}
