use std::collections::BTreeMap;

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{Tree, TreeError, TreeOfSpheres};
use crate::extrapolate::{polynomial_estimates, tail_drift};
use crate::moebius::{MoebiusFamily, MoebiusMap, RescalingSequence, SpherePoint};
use crate::scalar::{cplx, creal, lit, to_f64, Real};

/// Sample grid used for tree reconstruction.
///
/// Nested zooms of depth `k` lose about `n^k·ε` of accuracy, so the grid
/// stays moderate and the limits are extrapolated to third order.
pub fn tree_samples() -> Vec<u64> {
    vec![100, 150, 225, 338, 506, 759]
}

#[derive(Clone, Debug)]
pub struct ReconstructOptions {
    /// Two probe points witnessing that `M_p⁻¹ ∘ M_q` tends to a constant.
    pub probes: [(f64, f64); 2],
    /// Largest allowed extrapolated drift for each probe sequence.
    pub convergence_tol: f64,
    /// Largest chordal distance between the two probe limits.
    pub probe_tol: f64,
    /// Projections closer than this count as the same direction.
    pub separation_tol: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            probes: [(0.317, 0.127), (-0.553, 0.741)],
            convergence_tol: 1e-6,
            probe_tol: 1e-7,
            separation_tol: 1e-6,
        }
    }
}

/// The separation graph before clique contraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateGraph {
    adj: Vec<Vec<bool>>,
}

impl CandidateGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        Self { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.adj.len();
        (0..n).flat_map(|a| (a + 1..n).filter(move |&b| self.adj[a][b]).map(move |b| (a, b))).collect()
    }

    /// Maximal cliques (Bron–Kerbosch with pivoting), each sorted, in
    /// lexicographic order.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let all: Vec<usize> = (0..self.adj.len()).collect();
        self.bron_kerbosch(&mut Vec::new(), all, Vec::new(), &mut out);
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn bron_kerbosch(&self, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let pivot = *p.iter().chain(&x).max_by_key(|&&u| p.iter().filter(|&&v| self.adj[u][v]).count()).unwrap();
        let (mut p, mut x) = (p, x);
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !self.adj[pivot][v]).collect();
        for v in candidates {
            r.push(v);
            let np = p.iter().copied().filter(|&w| self.adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| self.adj[v][w]).collect();
            self.bron_kerbosch(r, np, nx, out);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
}

#[derive(Clone, Debug)]
pub struct Reconstruction<T> {
    /// Vertices `0..k` are the input rescalings; auxiliary star centres follow.
    pub tree: TreeOfSpheres<T>,
    pub candidate: CandidateGraph,
    /// `projections[p][q] = x_{q→p}`, the limit of `M_p⁻¹ ∘ M_q`; `None` on the diagonal.
    pub projections: Vec<Vec<Option<SpherePoint<T>>>>,
}

/// Reconstructs the tree of spheres on which the given rescalings live.
pub fn reconstruct_tree<T: Real>(
    family: &[RescalingSequence<T>],
    opts: &ReconstructOptions,
) -> Result<Reconstruction<T>, TreeError> {
    let k = family.len();
    if k == 0 {
        return Err(TreeError::Empty);
    }
    let ns = family[0].sample_indices.clone();
    if family.iter().any(|f| f.sample_indices != ns) {
        return Err(TreeError::SampleMismatch);
    }
    let samples: Vec<Vec<MoebiusMap<T>>> = family.iter().map(|f| f.samples()).collect::<Result<_, _>>()?;
    let inverses: Vec<Vec<MoebiusMap<T>>> =
        samples.iter().map(|s| s.iter().map(|m| m.inverse()).collect()).collect();

    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|p| (0..k).filter(move |&q| q != p).map(move |q| (p, q))).collect();
    let limits: Vec<Result<SpherePoint<T>, TreeError>> = pairs
        .par_iter()
        .map(|&(p, q)| {
            let maps: Vec<MoebiusMap<T>> =
                inverses[p].iter().zip(&samples[q]).map(|(ip, mq)| ip.compose(mq)).collect();
            constant_limit(&ns, &maps, opts).map_err(|detail| TreeError::NotConstantLimit { p, q, detail })
        })
        .collect();
    let mut proj: Vec<Vec<Option<SpherePoint<T>>>> = vec![vec![None; k]; k];
    for (&(p, q), l) in pairs.iter().zip(limits) {
        proj[p][q] = Some(l?);
    }

    let sep: T = lit(opts.separation_tol);
    let same = |r: usize, a: usize, b: usize| proj[r][a].unwrap().distance(&proj[r][b].unwrap()) <= sep;
    let mut edges = Vec::new();
    for p in 0..k {
        for q in p + 1..k {
            if (0..k).filter(|&r| r != p && r != q).all(|r| same(r, p, q)) {
                edges.push((p, q));
            }
        }
    }
    let candidate = CandidateGraph::new(k, &edges);

    // Contract cliques of size ≥ 3 into star centres.
    let cliques = candidate.maximal_cliques();
    let mut tree_edges = Vec::new();
    let mut star_of: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); k];
    let mut next = k;
    for c in cliques.iter().filter(|c| c.len() >= 2) {
        if c.len() == 2 {
            tree_edges.push((c[0], c[1]));
        } else {
            for &v in c {
                tree_edges.push((v, next));
                for &w in c.iter().filter(|&&w| w != v) {
                    star_of[v].insert(w, next);
                }
            }
            next += 1;
        }
    }
    let tree = Tree::new(next, &tree_edges).map_err(|_| TreeError::NotTreeLike)?;

    let mut markings: Vec<BTreeMap<usize, SpherePoint<T>>> = vec![BTreeMap::new(); next];
    for (p, m) in markings.iter_mut().enumerate().take(k) {
        for &nb in tree.neighbors(p) {
            let q = if nb < k {
                nb
            } else {
                *star_of[p].iter().find(|(_, s)| **s == nb).expect("star member").0
            };
            m.insert(nb, proj[p][q].unwrap());
        }
    }
    let aux: Vec<bool> = (0..next).map(|v| v >= k).collect();
    let tree = TreeOfSpheres::with_auxiliary(tree, aux, markings)?;
    Ok(Reconstruction { tree, candidate, projections: proj })
}

/// Limit of `maps` applied to both probes; fails unless both converge to the same point.
fn constant_limit<T: Real>(ns: &[u64], maps: &[MoebiusMap<T>], opts: &ReconstructOptions) -> Result<SpherePoint<T>, String> {
    let mut limits = Vec::with_capacity(2);
    for &(re, im) in &opts.probes {
        let z = SpherePoint::finite(cplx(re, im));
        let pts: Vec<SpherePoint<T>> = maps.iter().map(|m| m.apply(&z)).collect();
        let (lim, drift) = sphere_limit(ns, &pts).ok_or("fewer than five samples")?;
        if !(drift <= opts.convergence_tol) {
            return Err(format!("probe ({re}, {im}) drifts by {drift:e}"));
        }
        limits.push(lim);
    }
    let gap = to_f64(limits[0].distance(&limits[1]));
    if !(gap <= opts.probe_tol) {
        return Err(format!("probe limits differ by {gap:e}"));
    }
    Ok(limits[0])
}

/// Extrapolated limit of a point sequence in the chart (`z/w` or `w/z`)
/// where the last sample is bounded, with the tail drift of the estimates.
fn sphere_limit<T: Real>(ns: &[u64], pts: &[SpherePoint<T>]) -> Option<(SpherePoint<T>, f64)> {
    let last = pts.last()?;
    let flip = last.z().norm() > last.w().norm();
    let vals: Vec<Vec<Complex<T>>> = pts
        .iter()
        .map(|p| {
            let (a, b) = if flip { (p.w(), p.z()) } else { (p.z(), p.w()) };
            vec![a / b]
        })
        .collect();
    let est = polynomial_estimates(ns, &vals, 4);
    let drift = to_f64(tail_drift(&est)?);
    let u = est.last()?[0];
    let one = creal(T::one());
    let p = if flip { SpherePoint::new(one, u) } else { SpherePoint::new(u, one) }?;
    Some((p, drift))
}

/// Checks the necessary condition for a separation graph coming from an
/// external-fiber limit: every maximal clique is a single edge and the local
/// degrees `(a, b) ↦ δ̄_a(b)` attached to its ends equal 1.
pub fn clique_bound_check(candidate: &CandidateGraph, local_degrees: &BTreeMap<(usize, usize), u32>) -> bool {
    candidate.maximal_cliques().iter().filter(|c| candidate.vertex_count() > 1 || c.len() > 1).all(|c| {
        c.len() == 2 && local_degrees.get(&(c[0], c[1])) == Some(&1) && local_degrees.get(&(c[1], c[0])) == Some(&1)
    })
}

/// Rescalings realizing `tree`: rooted at a centre with base map `base`, each
/// child sphere is `M_child = M_parent ∘ (z ↦ m + z/n)` with `m` drawn from a
/// palette of well-separated points. Also returns the parent of each vertex
/// and its marking `m` on the parent sphere (the root maps to itself).
pub fn synthetic_rescalings<T: Real, R: Rng>(
    tree: &Tree,
    base: MoebiusMap<T>,
    rng: &mut R,
) -> (Vec<MoebiusFamily<T>>, Vec<(usize, Complex<f64>)>) {
    let palette: [(f64, f64); 9] =
        [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
    let root = tree.centers()[0];
    let (parent, order) = tree.rooted(root);
    let n = tree.vertex_count();
    let mut mark = vec![(root, Complex::new(0.0, 0.0)); n];
    for &v in &order {
        let mut slots = palette.to_vec();
        slots.shuffle(rng);
        let kids = tree.neighbors(v).iter().filter(|&&w| parent[w] == v && w != root);
        for (&w, &(re, im)) in kids.zip(&slots) {
            mark[w] = (v, Complex::new(re, im));
        }
    }
    let chains: Vec<Vec<Complex<f64>>> = (0..n)
        .map(|v| {
            let mut chain = Vec::new();
            let mut u = v;
            while u != root {
                chain.push(mark[u].1);
                u = parent[u];
            }
            chain.reverse();
            chain
        })
        .collect();
    let families = chains
        .into_iter()
        .map(|chain| {
            MoebiusFamily::from_fn(move |k| {
                let s = creal(T::one() / lit::<T>(k as f64));
                chain.iter().try_fold(base, |acc, m| {
                    Ok(acc.compose(&MoebiusMap::affine(s, cplx(m.re, m.im))?))
                })
            })
        })
        .collect();
    (families, mark)
}
