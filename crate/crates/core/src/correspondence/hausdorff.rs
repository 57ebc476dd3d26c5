use rayon::prelude::*;

use super::Correspondence;
use crate::moebius::{fibonacci_mesh, fibonacci_sphere, spherical_distance, SpherePoint};
use crate::scalar::{to_f64, Real};

/// Points `(x, y)` of a correspondence with the branch index within each fan.
#[derive(Clone, Debug)]
pub struct VarietySample<T> {
    pub points: Vec<(SpherePoint<T>, SpherePoint<T>, usize)>,
    pub grid_size: usize,
}

/// Forward fans over a Fibonacci grid in `x`, then backward fans over the
/// same grid in `y`. Order is deterministic (grid index, then branch).
pub fn sample_variety<T: Real>(c: &Correspondence<T>, grid_size: usize) -> VarietySample<T> {
    let grid: Vec<SpherePoint<T>> = fibonacci_sphere(grid_size);
    let fwd: Vec<Vec<(SpherePoint<T>, SpherePoint<T>, usize)>> = grid
        .par_iter()
        .map(|x| match c.forward_images(x) {
            Ok(f) => f.points().into_iter().enumerate().map(|(k, y)| (*x, y, k)).collect(),
            Err(_) => Vec::new(),
        })
        .collect();
    let bwd: Vec<Vec<(SpherePoint<T>, SpherePoint<T>, usize)>> = grid
        .par_iter()
        .map(|y| match c.backward_images(y) {
            Ok(f) => f.points().into_iter().enumerate().map(|(k, x)| (x, *y, k)).collect(),
            Err(_) => Vec::new(),
        })
        .collect();
    VarietySample { points: fwd.into_iter().chain(bwd).flatten().collect(), grid_size }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffResult {
    pub distance: f64,
    /// Chordal spacing of the sampling grid.
    pub mesh: f64,
}

fn product_distance<T: Real>(a: &(SpherePoint<T>, SpherePoint<T>), b: &(SpherePoint<T>, SpherePoint<T>)) -> T {
    spherical_distance(&a.0, &b.0).max(spherical_distance(&a.1, &b.1))
}

fn directed<T: Real>(a: &[(SpherePoint<T>, SpherePoint<T>)], b: &[(SpherePoint<T>, SpherePoint<T>)]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if b.is_empty() {
        return 2.0;
    }
    a.par_iter()
        .map(|p| to_f64(b.iter().map(|q| product_distance(p, q)).fold(T::infinity(), T::min)))
        .reduce(|| 0.0, f64::max)
}

fn symmetric<T: Real>(a: &[(SpherePoint<T>, SpherePoint<T>)], b: &[(SpherePoint<T>, SpherePoint<T>)]) -> f64 {
    directed(a, b).max(directed(b, a))
}

fn pairs<T: Real>(s: &VarietySample<T>) -> Vec<(SpherePoint<T>, SpherePoint<T>)> {
    s.points.iter().map(|(x, y, _)| (*x, *y)).collect()
}

/// Sampled Hausdorff distance in the max-of-chordal product metric.
pub fn hausdorff_distance<T: Real>(c1: &Correspondence<T>, c2: &Correspondence<T>, grid_size: usize) -> HausdorffResult {
    let (a, b) = (pairs(&sample_variety(c1, grid_size)), pairs(&sample_variety(c2, grid_size)));
    HausdorffResult { distance: symmetric(&a, &b), mesh: to_f64(fibonacci_mesh::<T>(grid_size)) }
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub schedule: Vec<u64>,
    pub distances: Vec<f64>,
    pub mesh: f64,
    /// Distances non-increasing along the schedule and the last below `final_tol`.
    pub verdict: bool,
}

/// Restricted sampled Hausdorff distance between `family(n)` and `limit`,
/// dropping sample points with `x` within `margin` of `s1` or `y` within
/// `margin` of `s2`.
#[allow(clippy::too_many_arguments)]
pub fn converges_away_from<T: Real, F>(
    family: F,
    limit: &Correspondence<T>,
    s1: &[SpherePoint<T>],
    s2: &[SpherePoint<T>],
    margin: T,
    grid_size: usize,
    schedule: &[u64],
    final_tol: f64,
) -> ConvergenceReport
where
    F: Fn(u64) -> Correspondence<T>,
{
    let keep = |p: &(SpherePoint<T>, SpherePoint<T>)| {
        s1.iter().all(|s| spherical_distance(&p.0, s) >= margin) && s2.iter().all(|s| spherical_distance(&p.1, s) >= margin)
    };
    let restrict = |s: VarietySample<T>| pairs(&s).into_iter().filter(|p| keep(p)).collect::<Vec<_>>();
    let target = restrict(sample_variety(limit, grid_size));
    let distances: Vec<f64> = schedule
        .iter()
        .map(|&n| symmetric(&restrict(sample_variety(&family(n), grid_size)), &target))
        .collect();
    let monotone = distances.windows(2).all(|w| w[1] <= w[0]);
    let verdict = monotone && distances.last().is_some_and(|&d| d <= final_tol);
    ConvergenceReport { schedule: schedule.to_vec(), distances, mesh: to_f64(fibonacci_mesh::<T>(grid_size)), verdict }
}
