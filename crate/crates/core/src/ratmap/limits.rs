use std::sync::Arc;

use num_complex::Complex;

use super::family::ConjugatedFamily;
use super::{HomRationalMap, MapFamily, RatMapError, ReducedForm};
use crate::moebius::{
    classify_rescaling_pair, fibonacci_sphere, spherical_distance, MoebiusError, MoebiusFamily,
    MoebiusMap, RescalingRelation, RescalingSequence, RescalingThresholds, SpherePoint,
};
use crate::extrapolate::{quadratic_estimates, tail_drift};
use crate::scalar::{czero, lit, to_f64, Real};

#[derive(Clone, Copy, Debug)]
pub struct LimitOptions {
    /// Bound on successive differences of the extrapolated coefficients.
    pub cauchy_tol: f64,
    pub gcd_tol: f64,
    /// Probes closer than this (spherical) to a hole are skipped.
    pub hole_radius: f64,
    pub probe_count: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self { cauchy_tol: 1e-8, gcd_tol: 1e-8, hole_radius: 0.1, probe_count: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitStatus {
    /// Reduced limit has degree ≥ 1.
    RescalingLimit,
    DegreeZero,
}

#[derive(Clone, Debug)]
pub struct LimitReport<T> {
    pub limit: ReducedForm<T>,
    pub samples_used: Vec<u64>,
    /// Sup-norm change of the normalized coefficient vector between samples.
    pub drift: Vec<f64>,
    /// Same for the extrapolated vectors; the Cauchy test reads this one.
    pub extrapolated_drift: Vec<f64>,
    /// Per sample: max spherical distance between `f_n` and `φ_f` on probes away from holes.
    pub probe_defect: Vec<f64>,
    pub status: LimitStatus,
}

impl<T> LimitReport<T> {
    pub fn is_rescaling_limit(&self) -> bool {
        self.status == LimitStatus::RescalingLimit
    }
}

fn max_diff<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm()).fold(T::zero(), T::max)
}

/// Limit point in the coefficient space of a degenerating family, certified
/// by a Cauchy test on first-order extrapolants, then reduced.
pub fn limit_of_family<T: Real>(
    f: &dyn MapFamily<T>,
    samples: &[u64],
    opts: &LimitOptions,
) -> Result<LimitReport<T>, RatMapError> {
    if samples.len() < 4 {
        return Err(RatMapError::TooFewSamples { needed: 4, got: samples.len() });
    }
    let d = f.degree();
    let maps: Vec<HomRationalMap<T>> = samples.iter().map(|&n| f.at(n)).collect::<Result<_, _>>()?;
    let raw: Vec<Vec<Complex<T>>> = maps.iter().map(|m| m.coefficient_vector()).collect();
    let last = raw.last().unwrap();
    let pivot = (0..last.len())
        .max_by(|&i, &j| last[i].norm().partial_cmp(&last[j].norm()).unwrap())
        .unwrap();
    let mut vs = Vec::with_capacity(raw.len());
    for v in &raw {
        if v[pivot] == czero() {
            return Err(RatMapError::NotCauchy { drift: f64::INFINITY });
        }
        let s = v[pivot];
        vs.push(v.iter().map(|c| *c / s).collect::<Vec<_>>());
    }
    let drift: Vec<f64> = vs.windows(2).map(|w| to_f64(max_diff(&w[1], &w[0]))).collect();
    let est = quadratic_estimates(samples, &vs);
    let extrapolated_drift: Vec<f64> = est.windows(2).map(|w| to_f64(max_diff(&w[1], &w[0]))).collect();
    let worst = tail_drift(&est).map_or(f64::INFINITY, to_f64);
    if !(worst < opts.cauchy_tol) {
        return Err(RatMapError::NotCauchy { drift: worst });
    }
    let mut limit = est.last().unwrap().clone();
    let m = limit.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    let chop = lit::<T>(opts.cauchy_tol) * m;
    for c in limit.iter_mut() {
        if c.norm() <= chop {
            *c = czero();
        }
    }
    let phi_full = HomRationalMap::from_coefficient_vector(d, &limit)?;
    let reduced = phi_full.reduce(lit(opts.gcd_tol));

    let probes = probes_away_from_holes(&reduced, opts);
    let probe_defect = maps
        .iter()
        .map(|fnm| {
            probes
                .iter()
                .map(|p| match reduced.evaluate(p) {
                    Ok(v) => to_f64(spherical_distance(&fnm.eval_raw(p), &v)),
                    Err(_) => 0.0,
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let status = if reduced.degree >= 1 { LimitStatus::RescalingLimit } else { LimitStatus::DegreeZero };
    Ok(LimitReport {
        limit: reduced,
        samples_used: samples.to_vec(),
        drift,
        extrapolated_drift,
        probe_defect,
        status,
    })
}

fn probes_away_from_holes<T: Real>(red: &ReducedForm<T>, opts: &LimitOptions) -> Vec<SpherePoint<T>> {
    let r: T = lit(opts.hole_radius);
    let mut n = opts.probe_count;
    loop {
        let pts: Vec<SpherePoint<T>> =
            fibonacci_sphere(n).into_iter().filter(|p| red.min_hole_distance(p) >= r).collect();
        if pts.len() >= opts.probe_count || n > 64 * opts.probe_count {
            return pts.into_iter().take(opts.probe_count).collect();
        }
        n += opts.probe_count / 4 + 1;
    }
}

/// Limit of `B_n⁻¹ ∘ f_n ∘ A_n`.
pub fn rescaling_limit<T: Real>(
    f: &dyn MapFamily<T>,
    a: &RescalingSequence<T>,
    b: &RescalingSequence<T>,
    opts: &LimitOptions,
) -> Result<LimitReport<T>, RatMapError> {
    if a.sample_indices != b.sample_indices {
        return Err(MoebiusError::SampleMismatch.into());
    }
    let g = ConjugatedFamily { f, a: &a.generator, b: &b.generator };
    limit_of_family(&g, &a.sample_indices, opts)
}

#[derive(Clone, Debug)]
pub struct CorescalingResult<T> {
    pub b: RescalingSequence<T>,
    pub report: LimitReport<T>,
}

/// Three-probe heuristic: `B_n` sends `0, 1, ∞` to the images of the probes
/// under `f_n ∘ A_n`.
pub fn find_corescaling<T: Real>(
    f: Arc<dyn MapFamily<T>>,
    a: &RescalingSequence<T>,
    probes: &[SpherePoint<T>; 3],
    opts: &LimitOptions,
) -> Result<CorescalingResult<T>, RatMapError> {
    let sep: T = lit(0.5);
    for i in 0..3 {
        for j in i + 1..3 {
            if spherical_distance(&probes[i], &probes[j]) < sep {
                return Err(RatMapError::InvalidProbes { min: 0.5 });
            }
        }
    }
    let gen_a = a.generator.clone();
    let pr = *probes;
    let fam = f.clone();
    let build = move |n: u64| -> Result<MoebiusMap<T>, MoebiusError> {
        let an = gen_a.at(n)?;
        let fnm = fam.at(n).map_err(|e| MoebiusError::Inconclusive(e.to_string()))?;
        let im: Vec<SpherePoint<T>> = pr.iter().map(|p| fnm.eval_raw(&an.apply(p))).collect();
        MoebiusMap::from_points(&im[0], &im[1], &im[2])
    };
    for &n in &a.sample_indices {
        if build(n).is_err() {
            return Err(RatMapError::ProbeCollapse { n });
        }
    }
    let b = RescalingSequence::with_samples(MoebiusFamily::from_fn(build), a.sample_indices.clone());
    let report = rescaling_limit(f.as_ref(), a, &b, opts)?;
    Ok(CorescalingResult { b, report })
}

#[derive(Clone, Debug)]
pub struct RescalingSetReport {
    /// `(i, j, relation)` for every pair of source rescalings.
    pub relations: Vec<(usize, usize, String)>,
    pub degrees: Vec<usize>,
    pub degree_sum: usize,
    pub pairwise_independent: bool,
    /// Pairwise independent and degrees summing to the map degree.
    pub verdict: bool,
}

/// Checks user-supplied pairs `(A_i, B_i)`: the `A_i` pairwise independent,
/// and the rescaling-limit degrees summing to `deg f`.
pub fn verify_rescaling_set<T: Real>(
    f: &dyn MapFamily<T>,
    pairs: &[(RescalingSequence<T>, RescalingSequence<T>)],
    opts: &LimitOptions,
) -> Result<RescalingSetReport, RatMapError> {
    let th = RescalingThresholds::default();
    let mut relations = Vec::new();
    let mut independent = true;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let label = match classify_rescaling_pair(&pairs[i].0, &pairs[j].0, &th) {
                Ok(RescalingRelation::Independent) => "independent".to_string(),
                Ok(r) => {
                    independent = false;
                    r.label().to_string()
                }
                Err(_) => {
                    independent = false;
                    "inconclusive".to_string()
                }
            };
            relations.push((i, j, label));
        }
    }
    let mut degrees = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        degrees.push(rescaling_limit(f, a, b, opts)?.limit.degree);
    }
    let degree_sum = degrees.iter().sum();
    Ok(RescalingSetReport {
        relations,
        degrees,
        degree_sum,
        pairwise_independent: independent,
        verdict: independent && degree_sum == f.degree(),
    })
}
