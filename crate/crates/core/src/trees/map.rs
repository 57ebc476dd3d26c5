use thiserror::Error;

use super::TreeOfSpheres;
use crate::moebius::{fibonacci_sphere, SpherePoint};
use crate::polyring::{roots_on_sphere, ComplexPoly};
use crate::ratmap::HomRationalMap;
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeMapError {
    #[error("malformed tree map: {0}")]
    Shape(String),
    #[error("vertex {vertex}, direction toward {toward}: marked points disagree by {distance:e}")]
    CompatibilityFailure { vertex: usize, toward: usize, distance: f64 },
    #[error("target vertex {vertex}: {found} preimages counted, expected {expected}")]
    PreimageCount { vertex: usize, found: usize, expected: usize },
    #[error("root finding failed on vertex {vertex}: {msg}")]
    Roots { vertex: usize, msg: String },
}

/// A rational map `(F, R)` between trees of spheres.
#[derive(Clone, Debug)]
pub struct TreeRationalMap<T> {
    pub domain: TreeOfSpheres<T>,
    pub target: TreeOfSpheres<T>,
    /// `F` on vertices.
    pub vertex_map: Vec<usize>,
    /// `R_a` for each domain vertex.
    pub maps: Vec<HomRationalMap<T>>,
    pub degree: usize,
}

impl<T: Real> TreeRationalMap<T> {
    pub fn new(
        domain: TreeOfSpheres<T>,
        target: TreeOfSpheres<T>,
        vertex_map: Vec<usize>,
        maps: Vec<HomRationalMap<T>>,
        degree: usize,
    ) -> Result<Self, TreeMapError> {
        let n = domain.tree().vertex_count();
        let m = target.tree().vertex_count();
        if vertex_map.len() != n || maps.len() != n {
            return Err(TreeMapError::Shape(format!("need {n} vertex images and maps")));
        }
        if vertex_map.iter().any(|&c| c >= m) {
            return Err(TreeMapError::Shape("vertex image out of range".into()));
        }
        if (0..n).any(|a| domain.is_auxiliary(a)) || (0..m).any(|c| target.is_auxiliary(c)) {
            return Err(TreeMapError::Shape("auxiliary vertices carry no sphere".into()));
        }
        for &(a, b) in domain.tree().edges() {
            let (fa, fb) = (vertex_map[a], vertex_map[b]);
            if fa != fb && !target.tree().has_edge(fa, fb) {
                return Err(TreeMapError::Shape(format!("edge ({a}, {b}) goes to neither an edge nor a vertex")));
            }
        }
        Ok(Self { domain, target, vertex_map, maps, degree })
    }

    /// One sphere mapping to one sphere.
    pub fn single(r: HomRationalMap<T>) -> Self {
        let degree = r.reduce(lit(1e-8)).degree;
        Self::new(TreeOfSpheres::trivial(), TreeOfSpheres::trivial(), vec![0], vec![r], degree)
            .expect("trivial trees")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeMapReport {
    /// Largest chordal mismatch over all compatibility conditions.
    pub compatibility_defect: f64,
    pub probes_per_vertex: usize,
    /// Preimage counts per target vertex (all equal to the degree on success).
    pub preimage_counts: Vec<usize>,
}

const COMPAT_TOL: f64 = 1e-9;
/// Probe targets keep this chordal distance from marked points.
const SMOOTH_MARGIN: f64 = 1e-3;

/// Checks the marked-point compatibility conditions and certifies the degree
/// by counting preimages of `probes` smooth points on every target sphere.
pub fn validate_tree_rational_map<T: Real>(
    phi: &TreeRationalMap<T>,
    probes: usize,
) -> Result<TreeMapReport, TreeMapError> {
    let reduced: Vec<HomRationalMap<T>> = phi.maps.iter().map(|r| r.reduce(lit(1e-8)).phi).collect();
    let dom = &phi.domain;
    let tgt = &phi.target;
    let mut defect = 0.0f64;
    for &(a, b) in dom.tree().edges() {
        for (u, v) in [(a, b), (b, a)] {
            let here = reduced[u].eval_raw(dom.marking(u, v).expect("validated markings"));
            let (fu, fv) = (phi.vertex_map[u], phi.vertex_map[v]);
            let there = if fu == fv {
                reduced[v].eval_raw(dom.marking(v, u).expect("validated markings"))
            } else {
                *tgt.marking(fu, fv).expect("validated markings")
            };
            let dist = to_f64(here.distance(&there));
            defect = defect.max(dist);
            if dist > COMPAT_TOL || dist.is_nan() {
                return Err(TreeMapError::CompatibilityFailure { vertex: u, toward: v, distance: dist });
            }
        }
    }

    let m = tgt.tree().vertex_count();
    let mut counts = vec![0usize; m];
    let margin: T = lit(SMOOTH_MARGIN);
    for (c, count) in counts.iter_mut().enumerate() {
        let mut pool = fibonacci_sphere::<T>(probes + 4 * tgt.markings(c).len() + 1);
        pool.retain(|y| tgt.is_smooth(c, y, margin));
        let targets = &pool[..probes.min(pool.len())];
        let sources: Vec<usize> = (0..phi.vertex_map.len()).filter(|&a| phi.vertex_map[a] == c).collect();
        for y in targets {
            let mut found = 0;
            for &a in &sources {
                found += preimage_count(&reduced[a], y).map_err(|msg| TreeMapError::Roots { vertex: a, msg })?;
            }
            if found != phi.degree {
                return Err(TreeMapError::PreimageCount { vertex: c, found, expected: phi.degree });
            }
            *count = found;
        }
        if targets.is_empty() {
            *count = sources.iter().map(|&a| reduced[a].degree()).sum();
        }
    }
    Ok(TreeMapReport { compatibility_defect: defect, probes_per_vertex: probes, preimage_counts: counts })
}

/// Zeros of `y_w·P(x) − y_z·Q(x)` on the sphere, with multiplicity.
fn preimage_count<T: Real>(r: &HomRationalMap<T>, y: &SpherePoint<T>) -> Result<usize, String> {
    let eq: ComplexPoly<T> = &r.num().scale(y.w()) - &r.den().scale(y.z());
    if eq.is_zero() {
        return Err("map is constant at this probe".into());
    }
    let rts = roots_on_sphere(&eq, r.degree()).map_err(|e| e.to_string())?;
    let tol: T = lit(1e-6);
    for root in &rts {
        let img = r.eval_raw(&root.point);
        if img.distance(y) > tol {
            return Err(format!("preimage residual {:e}", to_f64(img.distance(y))));
        }
    }
    Ok(rts.iter().map(|x| x.multiplicity).sum())
}
