use std::collections::BTreeMap;

use super::{Tree, TreeError};

/// A signature: a tree with a vertex involution `τ` (the sphere maps are
/// `z ↦ 1/z` and carry no data), degrees `δ(a) ≥ 1` and local degrees
/// `δ̄_a(b)` on the direction from `a` toward each neighbour `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    tree: Tree,
    tau: Vec<usize>,
    delta: Vec<u32>,
    local: Vec<BTreeMap<usize, u32>>,
}

impl Signature {
    pub fn new(
        tree: Tree,
        tau: Vec<usize>,
        delta: Vec<u32>,
        local: Vec<BTreeMap<usize, u32>>,
    ) -> Result<Self, String> {
        let n = tree.vertex_count();
        if tau.len() != n || delta.len() != n || local.len() != n {
            return Err(format!("tables must have one entry per vertex ({n})"));
        }
        for a in 0..n {
            if tau[a] >= n || tau[tau[a]] != a {
                return Err(format!("tau is not an involution at {a}"));
            }
        }
        if tree.edges().iter().any(|&(a, b)| !tree.has_edge(tau[a], tau[b])) {
            return Err("tau does not preserve edges".into());
        }
        for a in 0..n {
            if delta[a] == 0 {
                return Err(format!("delta({a}) = 0"));
            }
            let dirs: Vec<usize> = local[a].keys().copied().collect();
            if dirs != tree.neighbors(a) {
                return Err(format!("local degrees at {a} must cover exactly its neighbours"));
            }
            if let Some((b, v)) = local[a].iter().find(|(_, v)| **v == 0 || **v > delta[a]) {
                return Err(format!("local degree {v} toward {b} at {a} outside 1..={}", delta[a]));
            }
        }
        Ok(Self { tree, tau, delta, local })
    }

    /// Every local degree equal to 1.
    pub fn with_unit_local(tree: Tree, tau: Vec<usize>, delta: Vec<u32>) -> Result<Self, String> {
        let local = (0..tree.vertex_count()).map(|a| tree.neighbors(a).iter().map(|&b| (b, 1)).collect()).collect();
        Self::new(tree, tau, delta, local)
    }

    /// The unique signature of degree `d` on the trivial tree.
    pub fn trivial(d: u32) -> Self {
        Self::new(Tree::trivial(), vec![0], vec![d], vec![BTreeMap::new()]).expect("trivial signature")
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn delta(&self) -> &[u32] {
        &self.delta
    }

    /// `δ̄_a` of the direction toward `b`.
    pub fn local_degree(&self, a: usize, toward: usize) -> Option<u32> {
        self.local[a].get(&toward).copied()
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self, TreeError> {
        let n = self.tree.vertex_count();
        let edges: Vec<_> = self.tree.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let tree = Tree::new(n, &edges)?;
        let mut tau = vec![0; n];
        let mut delta = vec![0; n];
        let mut local = vec![BTreeMap::new(); n];
        for v in 0..n {
            tau[perm[v]] = perm[self.tau[v]];
            delta[perm[v]] = self.delta[v];
            local[perm[v]] = self.local[v].iter().map(|(b, d)| (perm[*b], *d)).collect();
        }
        Ok(Self::new(tree, tau, delta, local).expect("relabeling preserves validity"))
    }
}

/// `Σ_a δ(a)`.
pub fn signature_degree(k: &Signature) -> u64 {
    k.delta.iter().map(|&d| d as u64).sum()
}

/// All local degrees equal 1.
pub fn is_simple(k: &Signature) -> bool {
    k.local.iter().all(|m| m.values().all(|&v| v == 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvalidReason {
    DegreeMismatch { source: u64, target: u64 },
    ProjectionShape,
    NotSurjective { missing: usize },
    NotEquivariant { vertex: usize },
    FiberNotSubtree { fiber: usize },
    FiberDegree { fiber: usize, expected: u32, found: u32 },
    EdgeNotPreserved { a: usize, b: usize },
    EdgeNotCovered { a: usize, b: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominationClass {
    Regular,
    /// The fiber over `fiber` has two vertices with saturated local degrees.
    Exceptional { fiber: usize },
    Invalid(InvalidReason),
}

impl DominationClass {
    pub fn label(&self) -> &'static str {
        match self {
            DominationClass::Regular => "regular",
            DominationClass::Exceptional { .. } => "exceptional",
            DominationClass::Invalid(_) => "invalid",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domination {
    /// `π(b)` for each vertex `b` of the dominating tree.
    pub projection: Vec<usize>,
    pub class: DominationClass,
}

/// Checks whether `k1` is dominated by `k2` under `π: V₂ → V₁` and classifies
/// the domination as regular or exceptional.
pub fn check_domination(k1: &Signature, k2: &Signature, pi: &[usize]) -> Domination {
    let class = classify(k1, k2, pi);
    Domination { projection: pi.to_vec(), class }
}

fn classify(k1: &Signature, k2: &Signature, pi: &[usize]) -> DominationClass {
    use DominationClass::Invalid;
    let (n1, n2) = (k1.tree.vertex_count(), k2.tree.vertex_count());
    let (d1, d2) = (signature_degree(k1), signature_degree(k2));
    if d1 != d2 {
        return Invalid(InvalidReason::DegreeMismatch { source: d1, target: d2 });
    }
    if pi.len() != n2 || pi.iter().any(|&c| c >= n1) {
        return Invalid(InvalidReason::ProjectionShape);
    }
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); n1];
    for (b, &c) in pi.iter().enumerate() {
        fibers[c].push(b);
    }
    if let Some(c) = fibers.iter().position(|f| f.is_empty()) {
        return Invalid(InvalidReason::NotSurjective { missing: c });
    }
    if let Some(b) = (0..n2).find(|&b| k1.tau[pi[b]] != pi[k2.tau[b]]) {
        return Invalid(InvalidReason::NotEquivariant { vertex: b });
    }
    for (c, f) in fibers.iter().enumerate() {
        let mut set = vec![false; n2];
        for &b in f {
            set[b] = true;
        }
        if !k2.tree.is_connected_subset(&set) {
            return Invalid(InvalidReason::FiberNotSubtree { fiber: c });
        }
        let found: u32 = f.iter().map(|&b| k2.delta[b]).sum();
        if found != k1.delta[c] {
            return Invalid(InvalidReason::FiberDegree { fiber: c, expected: k1.delta[c], found });
        }
    }
    let mut covered = vec![false; k1.tree.edges().len()];
    for &(a, b) in k2.tree.edges() {
        let (pa, pb) = (pi[a], pi[b]);
        if pa == pb {
            continue;
        }
        match k1.tree.edges().binary_search(&(pa.min(pb), pa.max(pb))) {
            Ok(i) => covered[i] = true,
            Err(_) => return Invalid(InvalidReason::EdgeNotPreserved { a, b }),
        }
    }
    if let Some(i) = covered.iter().position(|c| !c) {
        let (a, b) = k1.tree.edges()[i];
        return Invalid(InvalidReason::EdgeNotCovered { a, b });
    }

    for (c, f) in fibers.iter().enumerate() {
        if let [a, b] = f[..] {
            let sat_a = k2.local_degree(a, b) == Some(k2.delta[a]);
            let sat_b = k2.local_degree(b, a) == Some(k2.delta[b]);
            if sat_a && sat_b {
                return DominationClass::Exceptional { fiber: c };
            }
        }
    }
    DominationClass::Regular
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(delta: [u32; 2], local: [u32; 2]) -> Signature {
        Signature::new(
            Tree::path(2),
            vec![0, 1],
            delta.to_vec(),
            vec![BTreeMap::from([(1, local[0])]), BTreeMap::from([(0, local[1])])],
        )
        .unwrap()
    }

    #[test]
    fn degrees_and_simplicity() {
        assert_eq!(signature_degree(&Signature::trivial(6)), 6);
        assert_eq!(signature_degree(&two([3, 3], [1, 1])), 6);
        assert!(is_simple(&Signature::trivial(6)));
        assert!(is_simple(&two([3, 3], [1, 1])));
        assert!(!is_simple(&two([3, 3], [2, 1])));
    }

    #[test]
    fn rejects_bad_tables() {
        let t = Tree::path(2);
        let loc = vec![BTreeMap::from([(1, 3)]), BTreeMap::from([(0, 1)])];
        assert!(Signature::new(t.clone(), vec![0, 1], vec![2, 1], loc).is_err());
        assert!(Signature::with_unit_local(t.clone(), vec![1, 1], vec![1, 1]).is_err());
        assert!(Signature::with_unit_local(t.clone(), vec![1, 0], vec![1, 1]).is_ok());
        assert!(Signature::with_unit_local(t, vec![0, 1], vec![0, 1]).is_err());
    }

    #[test]
    fn saturated_pair_is_exceptional() {
        let d = check_domination(&Signature::trivial(2), &two([1, 1], [1, 1]), &[0, 0]);
        assert_eq!(d.class, DominationClass::Exceptional { fiber: 0 });
    }

    #[test]
    fn unsaturated_pair_is_regular() {
        let d = check_domination(&Signature::trivial(3), &two([2, 1], [1, 1]), &[0, 0]);
        assert_eq!(d.class, DominationClass::Regular);
    }

    #[test]
    fn degree_mismatch_is_invalid() {
        let d = check_domination(&Signature::trivial(4), &two([2, 1], [1, 1]), &[0, 0]);
        assert_eq!(d.class, DominationClass::Invalid(InvalidReason::DegreeMismatch { source: 4, target: 3 }));
    }

    #[test]
    fn structural_failures_are_invalid() {
        // Path 0-1-2 onto a two-vertex tree with a disconnected fiber.
        let k2 = Signature::with_unit_local(Tree::path(3), vec![0, 1, 2], vec![1, 1, 1]).unwrap();
        let k1 = Signature::with_unit_local(Tree::path(2), vec![0, 1], vec![2, 1]).unwrap();
        let d = check_domination(&k1, &k2, &[0, 1, 0]);
        assert_eq!(d.class, DominationClass::Invalid(InvalidReason::FiberNotSubtree { fiber: 0 }));
        assert_eq!(check_domination(&k1, &k2, &[0, 0, 1]).class, DominationClass::Exceptional { fiber: 0 });
        assert_eq!(check_domination(&Signature::trivial(3), &k2, &[0, 0, 0]).class, DominationClass::Regular);
        let swapped = Signature::with_unit_local(Tree::path(2), vec![1, 0], vec![2, 1]).unwrap();
        assert!(matches!(
            check_domination(&swapped, &k2, &[0, 0, 1]).class,
            DominationClass::Invalid(InvalidReason::NotEquivariant { .. })
        ));
    }
}
