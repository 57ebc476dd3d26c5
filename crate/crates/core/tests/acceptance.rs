//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p corrlab --test acceptance` (add `--release` for
//! timings comparable to the budgets below).

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use corrlab::correspondence::{hausdorff_distance, Correspondence};
use corrlab::expr::Expr;
use corrlab::fuchsian::{
    conjugacy, defect_samples, markov_defect, vertex_cycle_element, winding_degree, BowenSeriesMap,
};
use corrlab::mating::{
    family_map, normal_form, render_dynamical_plane, render_parameter_plane, Budget, GridSpec, PixelCode,
};
use corrlab::moebius::{
    classify_rescaling_pair, default_samples, MoebiusFamily, MoebiusMap, RescalingRelation, RescalingSequence,
    SpherePoint,
};
use corrlab::polyring::ComplexPoly;
use corrlab::ratmap::{
    find_corescaling, limit_of_family, rescaling_limit, vd_membership, ExprMapFamily, HomRationalMap, MapFamily,
};
use corrlab::trees::{
    check_domination, clique_bound_check, reconstruct_tree, synthetic_rescalings, tree_samples, CandidateGraph,
    DominationClass, Signature, Tree,
};
use corrlab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn uniformizer(r: &HomRationalMap<f64>) -> Result<Correspondence<f64>, String> {
    Correspondence::from_uniformizer(r).map_err(|e| e.to_string())
}

fn normal_form_draws(seed: u64) -> Vec<(usize, HomRationalMap<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for d in 2..=4 {
        for _ in 0..20 {
            let coeffs: Vec<C64> = (0..2 * d - 3).map(|_| rand_c(&mut rng, 1.0)).collect();
            out.push((d, normal_form(d, &coeffs).expect("template length")));
        }
    }
    out
}

fn bidegree() -> Outcome {
    for (d, r) in normal_form_draws(1) {
        let c = uniformizer(&r)?;
        ensure(c.bidegree() == (2 * d - 1, 2 * d - 1), || format!("d = {d}: bidegree {:?}", c.bidegree()))?;
    }
    Ok("60 normal forms, d = 2, 3, 4".into())
}

fn reversibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut maps: Vec<HomRationalMap<f64>> = normal_form_draws(2).into_iter().map(|(_, r)| r).collect();
    maps.extend((0..10).map(|_| family_map(rand_c(&mut rng, 2.0))));
    let mut worst = 0.0f64;
    for (i, r) in maps.iter().enumerate() {
        let c = uniformizer(r)?;
        worst = worst.max(c.reversibility_defect(200, i as u64));
        ensure(c.check_reversibility(200, 1e-8, i as u64), || format!("map {i} fails reversibility"))?;
    }
    Ok(format!("{} correspondences, worst defect {worst:.1e}", maps.len()))
}

/// Hand expansion of the x-derivative numerator of R_c, times the x⁴ that the
/// pole at 0 contributes: x⁴(x⁶ − c x⁴ + c x² − 1).
fn diagonal_oracle(c: C64, x: C64) -> C64 {
    x.powu(4) * (x.powu(6) - c * x.powu(4) + c * x.powu(2) - 1.0)
}

/// Q at the representatives `((x : 1), (1 : x))` of `(x, η(x))`.
fn anti_diagonal(corr: &Correspondence<f64>, x: C64) -> C64 {
    let b = corr.bidegree().1;
    let mut sum = C64::new(0.0, 0.0);
    for (i, row) in corr.poly().coeffs().iter().enumerate() {
        for (j, q) in row.iter().enumerate() {
            sum += q * x.powu((i + b - j) as u32);
        }
    }
    sum
}

fn diagonal_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let c = rand_c(&mut rng, 2.0);
        let corr = uniformizer(&family_map(c))?;
        let mut ratios = Vec::new();
        for _ in 0..50 {
            let x = C64::from_polar(rng.gen_range(0.3..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            ratios.push(anti_diagonal(&corr, x) / diagonal_oracle(c, x));
        }
        let r0 = ratios[0];
        let spread = ratios.iter().map(|r| (r - r0).norm() / r0.norm()).fold(0.0, f64::max);
        worst = worst.max(spread);
        ensure(spread <= 1e-8, || format!("c = {c}: ratio spread {spread:.2e}"))?;
    }
    Ok(format!("10 maps x 50 probes, worst relative spread {worst:.1e}"))
}

fn eta_closed(points: &[SpherePoint<f64>], tol: f64) -> bool {
    let mut used = vec![false; points.len()];
    points.iter().all(|p| {
        let q = p.eta();
        let hit = (0..points.len()).find(|&j| !used[j] && points[j].distance(&q) <= tol);
        hit.map(|j| used[j] = true).is_some()
    })
}

fn critical_sets_and_vd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let c = rand_c(&mut rng, 3.0);
        let r = family_map(c);
        let crit = r.free_critical_points(1e-8).map_err(|e| e.to_string())?;
        let pts: Vec<SpherePoint<f64>> =
            crit.iter().flat_map(|x| std::iter::repeat(x.point).take(x.multiplicity)).collect();
        ensure(pts.len() == 6, || format!("c = {c}: {} free critical points", pts.len()))?;
        ensure(eta_closed(&pts, 1e-8), || format!("c = {c}: critical set not closed under inversion"))?;
        let rep = vd_membership(&r, 3, 1e-8).map_err(|e| e.to_string())?;
        ensure(rep.verdict, || format!("c = {c}: vd_membership false ({rep:?})"))?;
    }
    for k in 0..20 {
        let num: Vec<C64> = (0..7).map(|_| rand_c(&mut rng, 1.0)).collect();
        let den: Vec<C64> = (0..7).map(|_| rand_c(&mut rng, 1.0)).collect();
        let r = HomRationalMap::new(6, ComplexPoly::new(num), ComplexPoly::new(den)).map_err(|e| e.to_string())?;
        let rep = vd_membership(&r, 3, 1e-8).map_err(|e| e.to_string())?;
        ensure(!rep.verdict, || format!("random map {k} accepted"))?;
    }
    Ok("100 family maps accepted, 20 random maps rejected".into())
}

fn hole_recovery() -> Outcome {
    // z(z − 1 − 1/n)/(z − 1)
    let f = ExprMapFamily {
        degree: 2,
        num: vec![Expr::zero(), -(Expr::one() + Expr::one() / Expr::n()), Expr::one()],
        den: vec![-Expr::one(), Expr::one()],
    };
    let samples = default_samples();
    ensure(samples.last() == Some(&1_000_000), || format!("sample schedule {samples:?}"))?;
    let r = limit_of_family::<f64>(&f, &samples, &Default::default()).map_err(|e| e.to_string())?;
    let lim = &r.limit;
    ensure(lim.holes.len() == 1 && lim.holes[0].multiplicity == 1 && lim.hole_at_infinity == 0, || {
        format!("holes {:?}, at infinity {}", lim.holes, lim.hole_at_infinity)
    })?;
    let hole = lim.holes[0].point.distance(&SpherePoint::real(1.0));
    ensure(hole <= 1e-6, || format!("hole off by {hole:.2e}"))?;
    let phi = lim.phi.coefficient_distance(&HomRationalMap::identity());
    ensure(lim.degree == 1 && phi <= 1e-6, || format!("phi differs from identity by {phi:.2e}"))?;
    let defect = *r.probe_defect.last().unwrap();
    ensure(defect < 1e-3, || format!("probe defect {defect:.2e} at n = 1e6"))?;
    Ok(format!("hole error {hole:.1e}, phi error {phi:.1e}, probe defect {defect:.1e}"))
}

fn rescaling_limits() -> Outcome {
    // z² + n
    let family = ExprMapFamily { degree: 2, num: vec![Expr::n(), Expr::zero(), Expr::one()], den: vec![Expr::one()] };
    let id = RescalingSequence::new(MoebiusFamily::constant(MoebiusMap::<f64>::identity()));
    let translation = RescalingSequence::new(MoebiusFamily::from_exprs(Expr::one(), Expr::n(), Expr::zero(), Expr::one()));
    let opts = Default::default();
    let given = rescaling_limit::<f64>(&family, &id, &translation, &opts).map_err(|e| e.to_string())?;
    let err = given.limit.phi.coefficient_distance(&HomRationalMap::power(2));
    ensure(given.limit.degree == 2 && err <= 1e-8, || format!("translation limit degree {}, error {err:.2e}", given.limit.degree))?;

    let f: Arc<dyn MapFamily<f64>> = Arc::new(family.clone());
    let probe_sets = [
        [SpherePoint::zero(), SpherePoint::real(1.0), SpherePoint::infinity()],
        [SpherePoint::real(-1.0), SpherePoint::finite(C64::new(0.0, 2.0)), SpherePoint::infinity()],
    ];
    let mut found = Vec::new();
    for probes in &probe_sets {
        let r = find_corescaling(f.clone(), &id, probes, &opts).map_err(|e| e.to_string())?;
        ensure(r.report.limit.degree == 2, || format!("co-rescaling limit degree {}", r.report.limit.degree))?;
        found.push(r.b);
    }
    let bounded = |a: &RescalingSequence<f64>, b: &RescalingSequence<f64>| {
        matches!(
            classify_rescaling_pair(a, b, &Default::default()),
            Ok(RescalingRelation::Equivalent(_) | RescalingRelation::Bounded)
        )
    };
    ensure(bounded(&found[0], &found[1]), || "returned co-rescalings are not equivalent".into())?;
    ensure(found.iter().all(|b| bounded(b, &translation)), || "co-rescaling not equivalent to the translation".into())?;
    let trivial = rescaling_limit::<f64>(&family, &id, &id, &opts).map_err(|e| e.to_string())?;
    ensure(trivial.limit.degree == 0, || format!("identity co-rescaling gives degree {}", trivial.limit.degree))?;
    Ok(format!("limit z^2 (error {err:.1e}), two co-rescalings equivalent, identity gives degree 0"))
}

fn tree_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sizes = Vec::new();
    for k in 0..10 {
        let n = rng.gen_range(1..=6);
        let t = Tree::random(n, &mut rng);
        let base = MoebiusMap::<f64>::new(rand_c(&mut rng, 1.0) + 1.5, rand_c(&mut rng, 1.0), rand_c(&mut rng, 1.0), C64::new(1.0, 0.0))
            .map_err(|e| e.to_string())?;
        let (fams, _) = synthetic_rescalings(&t, base, &mut rng);
        let seqs: Vec<_> = fams.into_iter().map(|f| RescalingSequence::with_samples(f, tree_samples())).collect();
        let rec = reconstruct_tree(&seqs, &Default::default()).map_err(|e| format!("tree {k}: {e}"))?;
        ensure(rec.tree.tree().is_isomorphic(&t), || format!("tree {k} ({n} vertices) not recovered"))?;
        sizes.push(n);
    }
    let ones = BTreeMap::from([((0, 1), 1), ((1, 0), 1)]);
    let edge = CandidateGraph::new(2, &[(0, 1)]);
    ensure(clique_bound_check(&edge, &ones), || "two-vertex fixture rejected".into())?;
    let id = RescalingSequence::with_samples(MoebiusFamily::constant(MoebiusMap::<f64>::identity()), tree_samples());
    let shift = |s: f64| {
        RescalingSequence::with_samples(
            MoebiusFamily::from_exprs(Expr::one(), Expr::n() * Expr::real(s), Expr::zero(), Expr::one()),
            tree_samples(),
        )
    };
    let pair = reconstruct_tree(&[id.clone(), shift(1.0)], &Default::default()).map_err(|e| e.to_string())?;
    ensure(clique_bound_check(&pair.candidate, &ones), || "reconstructed two-vertex fixture rejected".into())?;

    let twos = BTreeMap::from([((0, 1), 2), ((1, 0), 1)]);
    ensure(!clique_bound_check(&edge, &twos), || "local degree 2 accepted".into())?;
    let star = reconstruct_tree(&[id, shift(1.0), shift(-1.0)], &Default::default()).map_err(|e| e.to_string())?;
    let all_ones: BTreeMap<(usize, usize), u32> =
        star.candidate.edges().iter().flat_map(|&(a, b)| [((a, b), 1), ((b, a), 1)]).collect();
    ensure(!clique_bound_check(&star.candidate, &all_ones), || "three-clique accepted".into())?;
    Ok(format!("tree sizes {sizes:?} recovered; fixtures true, planted violations false"))
}

fn two_vertex(delta: [u32; 2]) -> Signature {
    Signature::new(
        Tree::path(2),
        vec![0, 1],
        delta.to_vec(),
        vec![BTreeMap::from([(1, 1)]), BTreeMap::from([(0, 1)])],
    )
    .expect("valid signature")
}

fn domination() -> Outcome {
    let exceptional = check_domination(&Signature::trivial(2), &two_vertex([1, 1]), &[0, 0]);
    ensure(exceptional.class.label() == "exceptional", || format!("{:?}", exceptional.class))?;
    let regular = check_domination(&Signature::trivial(3), &two_vertex([2, 1]), &[0, 0]);
    ensure(regular.class == DominationClass::Regular, || format!("{:?}", regular.class))?;
    for d in [2, 4, 5] {
        let bad = check_domination(&Signature::trivial(d), &two_vertex([2, 1]), &[0, 0]);
        ensure(bad.class.label() == "invalid", || format!("degree {d}: {:?}", bad.class))?;
    }
    Ok("exceptional / regular / invalid as expected".into())
}

fn bowen_series() -> Outcome {
    let mut worst_markov = 0.0f64;
    let mut worst_trace = 0.0f64;
    for d in 2..=6 {
        let map = BowenSeriesMap::<f64>::standard(d).map_err(|e| e.to_string())?;
        let w = winding_degree(&map).map_err(|e| e.to_string())?;
        ensure(w == 2 * d as i64 - 1, || format!("d = {d}: winding {w}"))?;
        let m = markov_defect(&map);
        worst_markov = worst_markov.max(m);
        ensure(m <= 1e-10, || format!("d = {d}: Markov defect {m:.2e}"))?;
        for v in 0..2 * d {
            let cyc = vertex_cycle_element(&map.pairings, v).map_err(|e| e.to_string())?;
            let dev = (cyc.trace_squared - 4.0).norm();
            worst_trace = worst_trace.max(dev);
            ensure(dev <= 1e-8, || format!("d = {d}, vertex {v}: trace^2 off by {dev:.2e}"))?;
        }
    }
    let map = BowenSeriesMap::<f64>::standard(3).map_err(|e| e.to_string())?;
    let samples = defect_samples(10_000);
    let d6 = conjugacy(&map, 6).map_err(|e| e.to_string())?.defect(&samples);
    let d12 = conjugacy(&map, 12).map_err(|e| e.to_string())?.defect(&samples);
    ensure(d12 < d6 && d12 < 1e-3, || format!("defects: depth 6 {d6:.2e}, depth 12 {d12:.2e}"))?;
    Ok(format!(
        "Markov {worst_markov:.1e}, trace^2 dev {worst_trace:.1e}, conjugacy defect {d6:.1e} -> {d12:.1e}"
    ))
}

fn hausdorff() -> Outcome {
    let cs = [C64::new(0.3, 0.2), C64::new(-0.5, 0.4), C64::new(1.1, -0.3)];
    let corr: Vec<_> = cs.iter().map(|&c| uniformizer(&family_map(c))).collect::<Result<_, _>>()?;
    let h = |i: usize, j: usize| hausdorff_distance(&corr[i], &corr[j], 64);
    let self_d = h(0, 0).distance;
    ensure(self_d == 0.0, || format!("d(C, C) = {self_d:e}"))?;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        ensure(h(i, j).distance == h(j, i).distance, || format!("asymmetric on ({i}, {j})"))?;
    }
    let mesh = h(0, 1).mesh;
    for (a, b, c) in [(0, 1, 2), (1, 0, 2), (0, 2, 1)] {
        let lhs = h(a, c).distance;
        let rhs = h(a, b).distance + h(b, c).distance;
        ensure(lhs <= rhs + 2.0 * mesh, || format!("triangle fails: {lhs} > {rhs} + 2 * {mesh}"))?;
    }
    let c = cs[0];
    let base = &corr[0];
    let mut ds = Vec::new();
    for n in [10.0, 100.0, 1000.0] {
        let cn = uniformizer(&family_map(c + 1.0 / n))?;
        ds.push(hausdorff_distance(&cn, base, 64).distance);
    }
    ensure(ds.windows(2).all(|w| w[1] < w[0]), || format!("not decreasing: {ds:?}"))?;
    ensure(ds[2] < 1e-2, || format!("d at n = 1000 is {:.2e}", ds[2]))?;
    Ok(format!("mesh {mesh:.3}, distances along n: {:.1e}, {:.1e}, {:.1e}", ds[0], ds[1], ds[2]))
}

fn renderer() -> Outcome {
    let budget = Budget::new(24, 48);
    let grid = GridSpec::new(C64::new(0.0, 0.0), 2.0, 64);
    let a = render_dynamical_plane(C64::new(0.0, 0.0), grid.clone(), budget);
    let b = render_dynamical_plane(C64::new(0.0, 0.0), grid, budget);
    ensure(a.content_hash() == b.content_hash(), || "content hash differs between runs".into())?;
    let sym = a.symmetry_defect().ok_or("grid is not eta-symmetric")?;
    ensure(sym.fraction <= 0.01, || format!("symmetry defect {:.3}", sym.fraction))?;
    ensure(a.count(PixelCode::NoAttractor) == 0, || "no attractor found at c = 0".into())?;

    let params = render_parameter_plane(GridSpec::new(C64::new(0.0, 0.0), 4.0, 64), budget);
    let bbox = params.bounding_box(PixelCode::Structured).ok_or("structured set is empty")?;
    let inside = !bbox.touches_border && [bbox.re_min, bbox.re_max, bbox.im_min, bbox.im_max].iter().all(|v| v.abs() < 4.0);
    ensure(inside, || format!("structured set reaches the window edge: {bbox:?}"))?;
    Ok(format!(
        "hash {}, symmetry defect {}/{}, structured box re [{:.2}, {:.2}] im [{:.2}, {:.2}]",
        &a.content_hash()[..12],
        sym.defective,
        sym.compared,
        bbox.re_min,
        bbox.re_max,
        bbox.im_min,
        bbox.im_max
    ))
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, u64); 11] = [
        ("bidegree of normal forms", bidegree, 10),
        ("reversibility", reversibility, 30),
        ("diagonal-derivative identity", diagonal_identity, 10),
        ("inversion-closed critical sets and V_d", critical_sets_and_vd, 60),
        ("hole and gcd recovery", hole_recovery, 5),
        ("rescaling limits", rescaling_limits, 5),
        ("tree reconstruction", tree_round_trip, 20),
        ("domination classes", domination, 1),
        ("Bowen-Series map", bowen_series, 60),
        ("Hausdorff metric", hausdorff, 60),
        ("renderer", renderer, 300),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= Duration::from_secs(*limit) {
                Ok(msg)
            } else {
                Err(format!("took {:.1} s, budget {limit} s ({msg})", elapsed.as_secs_f64()))
            }
        });
        match result {
            Ok(msg) => println!("PASS {:>2} {name} [{:.2} s]: {msg}", k + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{:.2} s]: {msg}", k + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
