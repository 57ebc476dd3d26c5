use std::sync::Arc;

use corrlab::correspondence::hausdorff_distance;
use corrlab::fuchsian::{
    bowen_series_eval, conjugacy, defect_samples, markov_defect, vertex_cycle_element, winding_degree,
    BowenSeriesMap,
};
use corrlab::io;
use corrlab::mating::{render_dynamical_plane, render_parameter_plane, Budget, GridSpec, PixelCode, PlaneImage};
use corrlab::moebius::SpherePoint;
use corrlab::ratmap::{find_corescaling, limit_of_family, rescaling_limit, vd_membership, LimitOptions, LimitReport, MapFamily};
use corrlab::trees::{reconstruct_tree, tree_samples, ReconstructOptions};
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{domain, load, read_json, sidecar, CliError, Emitter};
use crate::plot::graph_ppm;

fn limit_json(r: &LimitReport<f64>) -> Value {
    json!({
        "status": if r.is_rescaling_limit() { "rescaling_limit" } else { "degree_zero" },
        "degree": r.limit.degree,
        "reduced": io::reduced_form_json(&r.limit),
        "samples": r.samples_used,
        "drift": r.drift,
        "extrapolated_drift": r.extrapolated_drift,
        "probe_defect": r.probe_defect,
    })
}

fn emit_optional(out: &Option<std::path::PathBuf>, v: &Value, emit: &mut Emitter) -> Result<(), CliError> {
    match out {
        Some(path) => emit.write_json(path, v),
        None => Ok(()),
    }
}

pub fn limits(a: &LimitsArgs, emit: &mut Emitter) -> Result<Value, CliError> {
    let family = load(&a.family, io::parse_family)?;
    let opts = LimitOptions { cauchy_tol: a.cauchy_tol, gcd_tol: a.gcd_tol, ..LimitOptions::default() };
    let report = limit_of_family::<f64>(&family, &a.samples, &opts).map_err(domain)?;
    let v = limit_json(&report);
    emit_optional(&a.out, &v, emit)?;
    Ok(v)
}

pub fn rescale(a: &RescaleArgs, emit: &mut Emitter) -> Result<Value, CliError> {
    let family = load(&a.family, io::parse_family)?;
    let src = load(&a.a, io::parse_rescaling)?;
    let opts = LimitOptions { cauchy_tol: a.cauchy_tol, ..LimitOptions::default() };
    let v = match &a.b {
        Some(b) => {
            let tgt = load(b, io::parse_rescaling)?;
            let r = rescaling_limit::<f64>(&family, &src, &tgt, &opts).map_err(domain)?;
            json!({ "corescaling": "given", "limit": limit_json(&r) })
        }
        None => {
            let f: Arc<dyn MapFamily<f64>> = Arc::new(family);
            let probes = [SpherePoint::zero(), SpherePoint::real(1.0), SpherePoint::infinity()];
            let r = find_corescaling(f, &src, &probes, &opts).map_err(domain)?;
            let samples: Vec<Value> = r
                .b
                .samples()
                .map_err(domain)?
                .iter()
                .map(io::moebius_json)
                .collect();
            json!({ "corescaling": "three_probe", "corescaling_samples": samples, "limit": limit_json(&r.report) })
        }
    };
    emit_optional(&a.out, &v, emit)?;
    Ok(v)
}

pub fn hausdorff(a: &HausdorffArgs) -> Result<Value, CliError> {
    if a.grid == 0 {
        return Err(domain("grid size must be positive"));
    }
    let c1 = load(&a.first, io::parse_correspondence)?;
    let c2 = load(&a.second, io::parse_correspondence)?;
    let r = hausdorff_distance(&c1, &c2, a.grid);
    Ok(json!({ "distance": r.distance, "mesh": r.mesh, "grid": a.grid }))
}

pub fn tree_reconstruct(a: &TreeArgs, emit: &mut Emitter) -> Result<Value, CliError> {
    let v = read_json(&a.family)?;
    let parse = |v: &Value| -> Result<Vec<_>, corrlab::io::FormatError> {
        let samples = v.get("samples").cloned();
        let list = v
            .get("rescalings")
            .and_then(Value::as_array)
            .ok_or_else(|| corrlab::io::FormatError::Malformed("missing array \"rescalings\"".into()))?;
        list.iter()
            .map(|r| {
                let mut r = r.clone();
                if r.get("samples").is_none() {
                    r["samples"] = samples.clone().unwrap_or_else(|| json!(tree_samples()));
                }
                io::parse_rescaling(&r)
            })
            .collect()
    };
    let family = parse(&v).map_err(|source| CliError::Format { path: a.family.clone(), source })?;
    let rec = reconstruct_tree(&family, &ReconstructOptions::default()).map_err(domain)?;
    let tree = io::tree_of_spheres_json(&rec.tree);
    emit.write_json(&a.out, &tree)?;
    if let Some(dot) = &a.dot {
        emit.write(dot, io::tree_dot(&rec.tree).as_bytes())?;
    }
    Ok(json!({
        "vertices": rec.tree.tree().vertex_count(),
        "spheres": rec.tree.sphere_count(),
        "candidate_edges": rec.candidate.edges(),
        "tree": tree,
    }))
}

pub fn bowen(a: &BowenArgs, emit: &mut Emitter) -> Result<Value, CliError> {
    if a.samples == 0 || a.depth == 0 {
        return Err(domain("samples and depth must be positive"));
    }
    let map = BowenSeriesMap::<f64>::standard(a.d).map_err(domain)?;
    let winding = winding_degree(&map).map_err(domain)?;
    let h = conjugacy(&map, a.depth).map_err(domain)?;
    let ts: Vec<f64> = (0..a.samples).map(|i| std::f64::consts::TAU * i as f64 / a.samples as f64).collect();
    let at: Vec<f64> = ts.iter().map(|&t| bowen_series_eval(&map, t)).collect();
    let ht: Vec<f64> = ts.iter().map(|&t| h.eval(t)).collect();

    let mut csv = csv::Writer::from_writer(Vec::new());
    let write_err = |e: csv::Error| domain(format!("CSV encoding failed: {e}"));
    csv.write_record(["t", "a_t", "h_t"]).map_err(write_err)?;
    for i in 0..ts.len() {
        csv.write_record([ts[i], at[i], ht[i]].map(|x| format!("{x:.17e}"))).map_err(write_err)?;
    }
    let bytes = csv.into_inner().map_err(|e| domain(e.to_string()))?;
    let stem = format!("bowen_d{}", a.d);
    emit.write(&a.out_dir.join(format!("{stem}.csv")), &bytes)?;
    emit.write_json(&a.out_dir.join(format!("{stem}_generators.json")), &io::generators_json(&map.pairings))?;
    if a.plot {
        emit.write(&a.out_dir.join(format!("{stem}_map.ppm")), &graph_ppm(&ts, &at, a.px))?;
        emit.write(&a.out_dir.join(format!("{stem}_h.ppm")), &graph_ppm(&ts, &ht, a.px))?;
    }
    let traces: Vec<Value> = (0..2 * a.d)
        .map(|v| {
            vertex_cycle_element(&map.pairings, v)
                .map(|c| json!({ "vertex": v, "trace_squared": [c.trace_squared.re, c.trace_squared.im], "parabolic": c.parabolic }))
                .map_err(domain)
        })
        .collect::<Result<_, _>>()?;
    Ok(json!({
        "d": a.d,
        "winding_degree": winding,
        "markov_defect": markov_defect(&map),
        "conjugacy_depth": a.depth,
        "conjugacy_defect": h.defect(&defect_samples(a.samples)),
        "vertex_cycles": traces,
    }))
}

pub fn vd_check(a: &VdArgs) -> Result<Value, CliError> {
    let r = load(&a.map, io::parse_map)?;
    let d = a.d.unwrap_or(r.degree() / 2);
    let rep = vd_membership(&r, d, a.tol).map_err(domain)?;
    Ok(json!({
        "d": d,
        "verdict": rep.verdict,
        "r_prime_at_1": [rep.r_prime_at_1.0, rep.r_prime_at_1.1],
        "r_prime_at_minus_1": [rep.r_prime_at_minus_1.0, rep.r_prime_at_minus_1.1],
        "relative_critical_defect": rep.relative_critical_defect,
        "sres": rep.sres,
    }))
}

fn budget(b: &BudgetArgs) -> Budget {
    Budget { depth: b.depth, width: b.width, eps: b.eps, cluster_tol: b.cluster_tol }
}

fn counts(img: &PlaneImage) -> Value {
    let all = [
        PixelCode::NotAttracted,
        PixelCode::Attracted,
        PixelCode::AttractedBackward,
        PixelCode::BudgetExhausted,
        PixelCode::NoAttractor,
        PixelCode::Structured,
        PixelCode::CriticalAttracted,
    ];
    Value::Object(
        all.iter()
            .filter_map(|&c| {
                let n = img.count(c);
                (n > 0).then(|| (format!("{c:?}"), json!(n)))
            })
            .collect(),
    )
}

/// Writes the PPM and its metadata sidecar; the sidecar carries no timings,
/// so repeated runs give identical files.
fn emit_image(img: &PlaneImage, out: &std::path::Path, extra: Value, emit: &mut Emitter) -> Result<Value, CliError> {
    let ppm = img.to_ppm();
    emit.write(out, &ppm)?;
    let mut meta = json!({
        "grid": img.grid,
        "kind": img.kind,
        "budget": img.budget,
        "seed": img.seed,
        "image_sha256": img.content_hash(),
        "counts": counts(img),
    });
    if let (Value::Object(m), Value::Object(x)) = (&mut meta, extra) {
        m.extend(x);
    }
    emit.write_json(&sidecar(out, ".json"), &meta)?;
    Ok(meta)
}

pub fn render_dyn(a: &RenderDynArgs, seed: u64, emit: &mut Emitter) -> Result<Value, CliError> {
    let grid = GridSpec::new(a.center, a.radius, a.px);
    let mut img = render_dynamical_plane(a.c, grid, budget(&a.budget));
    img.seed = seed;
    let extra = json!({ "symmetry": img.symmetry_defect() });
    emit_image(&img, &a.out, extra, emit)
}

pub fn render_bers(a: &RenderBersArgs, seed: u64, emit: &mut Emitter) -> Result<Value, CliError> {
    let grid = GridSpec::new(a.center, a.radius, a.px);
    let mut img = render_parameter_plane(grid, budget(&a.budget));
    img.seed = seed;
    let extra = json!({ "structured_bounding_box": img.bounding_box(PixelCode::Structured) });
    emit_image(&img, &a.out, extra, emit)
}
