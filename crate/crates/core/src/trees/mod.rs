//! Trees of Riemann spheres, signatures and their domination order, rational
//! maps between trees, and reconstruction of a tree from rescalings.
//!
//! A tangent direction at a vertex is identified with the neighbour it points
//! to, which for a tree is the same as naming the incident edge.

mod map;
mod reconstruct;
mod signature;

pub use map::{validate_tree_rational_map, TreeMapError, TreeMapReport, TreeRationalMap};
pub use reconstruct::{
    clique_bound_check, reconstruct_tree, synthetic_rescalings, tree_samples, CandidateGraph,
    ReconstructOptions, Reconstruction,
};
pub use signature::{
    check_domination, is_simple, signature_degree, Domination, DominationClass, InvalidReason,
    Signature,
};

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use thiserror::Error;

use crate::moebius::{MoebiusError, SpherePoint};
use crate::scalar::{lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("edge ({0}, {1}) is out of range or a loop")]
    BadEdge(usize, usize),
    #[error("edges do not form a tree")]
    NotATree,
    #[error("vertex {vertex} has a marking toward non-neighbour {toward}")]
    MarkingNotIncident { vertex: usize, toward: usize },
    #[error("vertex {vertex} has no marking toward {toward}")]
    MissingMarking { vertex: usize, toward: usize },
    #[error("markings at vertex {vertex} toward {a} and {b} coincide")]
    MarkingCollision { vertex: usize, a: usize, b: usize },
    #[error("rescalings {p} and {q} do not converge to a constant: {detail}")]
    NotConstantLimit { p: usize, q: usize, detail: String },
    #[error("separation graph is not a tree of cliques")]
    NotTreeLike,
    #[error("rescalings use different sample grids")]
    SampleMismatch,
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// A finite combinatorial tree on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Tree {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(TreeError::BadEdge(a, b));
            }
            if adj[a].contains(&b) {
                return Err(TreeError::NotATree);
            }
            adj[a].push(b);
            adj[b].push(a);
            norm.push((a.min(b), a.max(b)));
        }
        if norm.len() != n - 1 {
            return Err(TreeError::NotATree);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        norm.sort_unstable();
        let t = Self { edges: norm, adj };
        if !t.is_connected_subset(&vec![true; n]) {
            return Err(TreeError::NotATree);
        }
        Ok(t)
    }

    pub fn trivial() -> Self {
        Self { edges: Vec::new(), adj: vec![Vec::new()] }
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &e).expect("path is a tree")
    }

    pub fn star(leaves: usize) -> Self {
        let e: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, &e).expect("star is a tree")
    }

    /// Uniform random labelled tree on `n` vertices via a Prüfer sequence.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1);
        if n <= 2 {
            return Self::path(n);
        }
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        let mut deg = vec![1usize; n];
        for &s in &seq {
            deg[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (0..n).find(|&v| deg[v] == 1).unwrap();
            edges.push((leaf, s));
            deg[leaf] -= 1;
            deg[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        Self::new(n, &edges).expect("Prüfer decoding yields a tree")
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// Whether the vertices flagged in `set` span a nonempty connected subtree.
    pub fn is_connected_subset(&self, set: &[bool]) -> bool {
        let Some(start) = set.iter().position(|&s| s) else { return false };
        let mut seen = vec![false; set.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if set[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        set.iter().zip(&seen).all(|(s, r)| !s || *r)
    }

    /// The one or two vertices minimizing eccentricity.
    pub fn centers(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut deg: Vec<usize> = self.adj.iter().map(|l| l.len()).collect();
        let mut left = n;
        let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
        let mut removed = vec![false; n];
        while left > 2 {
            let mut next = Vec::new();
            for &v in &layer {
                removed[v] = true;
                left -= 1;
                for &w in &self.adj[v] {
                    if !removed[w] {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            next.push(w);
                        }
                    }
                }
            }
            layer = next;
        }
        (0..n).filter(|&v| !removed[v]).collect()
    }

    fn rooted_code(&self, v: usize, parent: Option<usize>) -> String {
        let mut kids: Vec<String> =
            self.adj[v].iter().filter(|&&w| Some(w) != parent).map(|&w| self.rooted_code(w, Some(v))).collect();
        kids.sort();
        format!("({})", kids.concat())
    }

    /// Canonical string of the unlabelled tree (AHU encoding at a center).
    pub fn canonical_form(&self) -> String {
        self.centers().into_iter().map(|c| self.rooted_code(c, None)).min().unwrap()
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.vertex_count() == other.vertex_count() && self.canonical_form() == other.canonical_form()
    }

    /// Parent of every vertex when rooted at `root` (the root maps to itself),
    /// together with a breadth-first order.
    pub fn rooted(&self, root: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.vertex_count();
        let mut parent = vec![usize::MAX; n];
        parent[root] = root;
        let mut order = vec![root];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &w in &self.adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    order.push(w);
                }
            }
            i += 1;
        }
        (parent, order)
    }
}

/// Marked points below this chordal distance count as the same point.
const MARKING_TOL: f64 = 1e-9;

/// A tree with a sphere at every non-auxiliary vertex and markings
/// `ξ_a(b)` of the direction from `a` toward each neighbour `b`.
///
/// Auxiliary vertices are centres of contracted cliques: they carry no
/// sphere and no markings.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeOfSpheres<T> {
    tree: Tree,
    auxiliary: Vec<bool>,
    markings: Vec<BTreeMap<usize, SpherePoint<T>>>,
}

impl<T: Real> TreeOfSpheres<T> {
    pub fn new(tree: Tree, markings: Vec<BTreeMap<usize, SpherePoint<T>>>) -> Result<Self, TreeError> {
        let n = tree.vertex_count();
        Self::with_auxiliary(tree, vec![false; n], markings)
    }

    pub fn with_auxiliary(
        tree: Tree,
        auxiliary: Vec<bool>,
        markings: Vec<BTreeMap<usize, SpherePoint<T>>>,
    ) -> Result<Self, TreeError> {
        let n = tree.vertex_count();
        assert_eq!(auxiliary.len(), n, "auxiliary flags per vertex");
        assert_eq!(markings.len(), n, "marking table per vertex");
        let tol: T = lit(MARKING_TOL);
        for a in 0..n {
            if let Some(&b) = markings[a].keys().find(|b| !tree.has_edge(a, **b)) {
                return Err(TreeError::MarkingNotIncident { vertex: a, toward: b });
            }
            if auxiliary[a] {
                continue;
            }
            if let Some(&b) = tree.neighbors(a).iter().find(|b| !markings[a].contains_key(b)) {
                return Err(TreeError::MissingMarking { vertex: a, toward: b });
            }
            let m: Vec<_> = markings[a].iter().collect();
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    if m[i].1.distance(m[j].1) <= tol {
                        return Err(TreeError::MarkingCollision { vertex: a, a: *m[i].0, b: *m[j].0 });
                    }
                }
            }
        }
        Ok(Self { tree, auxiliary, markings })
    }

    /// One sphere, no markings.
    pub fn trivial() -> Self {
        Self { tree: Tree::trivial(), auxiliary: vec![false], markings: vec![BTreeMap::new()] }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn is_auxiliary(&self, a: usize) -> bool {
        self.auxiliary[a]
    }

    pub fn sphere_count(&self) -> usize {
        self.auxiliary.iter().filter(|a| !**a).count()
    }

    /// `ξ_a` of the direction toward `b`.
    pub fn marking(&self, a: usize, toward: usize) -> Option<&SpherePoint<T>> {
        self.markings[a].get(&toward)
    }

    pub fn markings(&self, a: usize) -> &BTreeMap<usize, SpherePoint<T>> {
        &self.markings[a]
    }

    /// The singular set `Ξ_a`.
    pub fn singular_set(&self, a: usize) -> Vec<SpherePoint<T>> {
        self.markings[a].values().copied().collect()
    }

    /// Whether `x` on sphere `a` is at least `tol` away from every marked point.
    pub fn is_smooth(&self, a: usize, x: &SpherePoint<T>, tol: T) -> bool {
        self.markings[a].values().all(|m| m.distance(x) > tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_cycles_and_forests() {
        assert_eq!(Tree::new(3, &[(0, 1), (1, 2), (2, 0)]), Err(TreeError::NotATree));
        assert_eq!(Tree::new(4, &[(0, 1), (2, 3)]), Err(TreeError::NotATree));
        assert_eq!(Tree::new(2, &[(0, 0)]), Err(TreeError::BadEdge(0, 0)));
        assert!(Tree::new(1, &[]).is_ok());
    }

    #[test]
    fn isomorphism_ignores_labels() {
        let a = Tree::new(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let b = Tree::new(5, &[(4, 2), (2, 0), (2, 1), (0, 3)]).unwrap();
        assert!(a.is_isomorphic(&b));
        assert!(!a.is_isomorphic(&Tree::path(5)));
        assert!(!Tree::star(4).is_isomorphic(&Tree::path(5)));
        assert_eq!(Tree::path(4).centers(), vec![1, 2]);
        assert_eq!(Tree::star(3).centers(), vec![0]);
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..9 {
            let t = Tree::random(n, &mut rng);
            assert_eq!(t.vertex_count(), n);
            assert_eq!(t.edges().len(), n - 1);
        }
    }

    #[test]
    fn markings_must_be_injective_and_complete() {
        let t = Tree::path(2);
        let inf = SpherePoint::<f64>::infinity();
        let ok = vec![BTreeMap::from([(1, inf)]), BTreeMap::from([(0, inf)])];
        assert!(TreeOfSpheres::new(t.clone(), ok).is_ok());
        let missing = vec![BTreeMap::from([(1, inf)]), BTreeMap::new()];
        assert_eq!(
            TreeOfSpheres::new(t, missing),
            Err(TreeError::MissingMarking { vertex: 1, toward: 0 })
        );
        let star = Tree::star(2);
        let clash = vec![
            BTreeMap::from([(1, SpherePoint::zero()), (2, SpherePoint::zero())]),
            BTreeMap::from([(0, inf)]),
            BTreeMap::from([(0, inf)]),
        ];
        assert!(matches!(TreeOfSpheres::new(star, clash), Err(TreeError::MarkingCollision { vertex: 0, .. })));
    }
}
