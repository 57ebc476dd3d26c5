//! JSON encodings of the library's objects, plus a DOT rendering of trees.
//!
//! * complex numbers are `[re, im]`;
//! * sphere points are `[re_z, im_z, re_w, im_w]` (an affine `[re, im]` or the
//!   string `"inf"` is accepted on input);
//! * Möbius maps are four complex entries, row-major;
//! * maps are `{"degree": d, "num": [...], "den": [...]}` with ascending
//!   coefficients; families replace each coefficient by an expression in `n`
//!   (see [`crate::expr`]);
//! * correspondences are `{"bidegree": [a, b], "coeffs": [[...]], "provenance": tag}`,
//!   where `coeffs[i][j]` multiplies `x^i y^j`. On input `{"uniformizer": map}`
//!   and `{"pair": [f, g]}` are also accepted.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

use crate::correspondence::{Correspondence, CorrespondenceError};
use crate::expr::Expr;
use crate::fuchsian::SidePairingSet;
use crate::moebius::{MoebiusError, MoebiusFamily, MoebiusMap, RescalingSequence, SpherePoint};
use crate::polyring::{BivarPoly, ComplexPoly};
use crate::ratmap::{ExprMapFamily, HomRationalMap, RatMapError, ReducedForm};
use crate::trees::{Signature, Tree, TreeError, TreeOfSpheres};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("{0}")]
    Malformed(String),
    #[error(transparent)]
    Map(#[from] RatMapError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Correspondence(#[from] CorrespondenceError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

fn bad(msg: impl Into<String>) -> FormatError {
    FormatError::Malformed(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, FormatError> {
    v.get(key).ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, FormatError> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn number(v: &Value) -> Result<f64, FormatError> {
    v.as_f64().ok_or_else(|| bad(format!("expected a number, got {v}")))
}

fn index(v: &Value) -> Result<usize, FormatError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("expected a non-negative integer, got {v}")))
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

/// `[re, im]` or a bare real number.
pub fn parse_complex(v: &Value) -> Result<C64, FormatError> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    match array(v, "complex number")?.as_slice() {
        [re, im] => Ok(C64::new(number(re)?, number(im)?)),
        _ => Err(bad(format!("complex number must be [re, im], got {v}"))),
    }
}

fn complex_list(v: &Value, what: &str) -> Result<Vec<C64>, FormatError> {
    array(v, what)?.iter().map(parse_complex).collect()
}

pub fn sphere_point_json(p: &SpherePoint<f64>) -> Value {
    json!([p.z().re, p.z().im, p.w().re, p.w().im])
}

pub fn parse_sphere_point(v: &Value) -> Result<SpherePoint<f64>, FormatError> {
    if v.as_str() == Some("inf") {
        return Ok(SpherePoint::infinity());
    }
    let a = array(v, "sphere point")?;
    match a.len() {
        2 => Ok(SpherePoint::finite(parse_complex(v)?)),
        4 => {
            let x: Vec<f64> = a.iter().map(number).collect::<Result<_, _>>()?;
            SpherePoint::new(C64::new(x[0], x[1]), C64::new(x[2], x[3])).ok_or_else(|| bad("sphere point (0 : 0)"))
        }
        _ => Err(bad(format!("sphere point must have 2 or 4 entries, got {v}"))),
    }
}

pub fn moebius_json(m: &MoebiusMap<f64>) -> Value {
    Value::Array(m.entries().iter().map(|&z| complex_json(z)).collect())
}

pub fn parse_moebius(v: &Value) -> Result<MoebiusMap<f64>, FormatError> {
    match complex_list(v, "Möbius map")?.as_slice() {
        &[a, b, c, d] => Ok(MoebiusMap::new(a, b, c, d)?),
        _ => Err(bad("Möbius map needs four entries")),
    }
}

pub fn map_json(r: &HomRationalMap<f64>) -> Value {
    let list = |p: &ComplexPoly<f64>| Value::Array(p.coeffs().iter().map(|&z| complex_json(z)).collect());
    json!({ "degree": r.degree(), "num": list(r.num()), "den": list(r.den()) })
}

pub fn parse_map(v: &Value) -> Result<HomRationalMap<f64>, FormatError> {
    let d = index(field(v, "degree")?)?;
    let num = complex_list(field(v, "num")?, "num")?;
    let den = complex_list(field(v, "den")?, "den")?;
    Ok(HomRationalMap::new(d, ComplexPoly::exact(num), ComplexPoly::exact(den))?)
}

pub fn reduced_form_json(r: &ReducedForm<f64>) -> Value {
    let holes: Vec<Value> = r
        .holes
        .iter()
        .map(|h| json!({ "point": sphere_point_json(&h.point), "multiplicity": h.multiplicity }))
        .collect();
    json!({
        "degree": r.degree,
        "phi": map_json(&r.phi),
        "holes": holes,
        "hole_at_infinity": r.hole_at_infinity,
        "coprimality": r.coprimality,
    })
}

fn expr_list(v: &Value, what: &str) -> Result<Vec<Expr>, FormatError> {
    array(v, what)?.iter().map(|e| Expr::from_json(e).map_err(|e| bad(e.to_string()))).collect()
}

pub fn parse_family(v: &Value) -> Result<ExprMapFamily, FormatError> {
    Ok(ExprMapFamily {
        degree: index(field(v, "degree")?)?,
        num: expr_list(field(v, "num")?, "num")?,
        den: expr_list(field(v, "den")?, "den")?,
    })
}

pub fn family_json(f: &ExprMapFamily) -> Value {
    let list = |es: &[Expr]| Value::Array(es.iter().map(Expr::to_json).collect());
    json!({ "degree": f.degree, "num": list(&f.num), "den": list(&f.den) })
}

/// `{"entries": [a, b, c, d], "samples": [...]}`; `samples` is optional.
pub fn parse_rescaling(v: &Value) -> Result<RescalingSequence<f64>, FormatError> {
    let e = expr_list(field(v, "entries")?, "entries")?;
    let [a, b, c, d]: [Expr; 4] = e.try_into().map_err(|_| bad("a rescaling needs four entries"))?;
    let generator = MoebiusFamily::from_exprs(a, b, c, d);
    match v.get("samples") {
        Some(s) => {
            let samples = array(s, "samples")?
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| bad("samples must be positive integers")))
                .collect::<Result<_, _>>()?;
            Ok(RescalingSequence::with_samples(generator, samples))
        }
        None => Ok(RescalingSequence::new(generator)),
    }
}

pub fn rescaling_json(entries: &[Expr; 4], samples: Option<&[u64]>) -> Value {
    let mut v = json!({ "entries": entries.iter().map(Expr::to_json).collect::<Vec<_>>() });
    if let Some(s) = samples {
        v["samples"] = json!(s);
    }
    v
}

pub fn correspondence_json(c: &Correspondence<f64>) -> Value {
    let (a, b) = c.bidegree();
    let rows: Vec<Value> =
        (0..=a).map(|i| Value::Array((0..=b).map(|j| complex_json(c.poly().coeff(i, j))).collect())).collect();
    json!({ "bidegree": [a, b], "coeffs": rows, "provenance": c.provenance.tag() })
}

pub fn parse_correspondence(v: &Value) -> Result<Correspondence<f64>, FormatError> {
    if let Some(r) = v.get("uniformizer") {
        return Ok(Correspondence::from_uniformizer(&parse_map(r)?)?);
    }
    if let Some(p) = v.get("pair") {
        return match array(p, "pair")?.as_slice() {
            [f, g] => Ok(Correspondence::from_pair(&parse_map(f)?, &parse_map(g)?)?),
            _ => Err(bad("pair needs two maps")),
        };
    }
    let bd = array(field(v, "bidegree")?, "bidegree")?;
    let [a, b] = bd.as_slice() else { return Err(bad("bidegree must be [a, b]")) };
    let rows = array(field(v, "coeffs")?, "coeffs")?
        .iter()
        .map(|r| complex_list(r, "coefficient row"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Correspondence::new(BivarPoly::new(rows), (index(a)?, index(b)?))?)
}

/// `{"vertices": n, "edges": [[a, b]], "auxiliary": [..],
///   "markings": [[{"toward": b, "point": p}, ...], ...]}`.
pub fn tree_of_spheres_json(t: &TreeOfSpheres<f64>) -> Value {
    let n = t.tree().vertex_count();
    let markings: Vec<Value> = (0..n)
        .map(|a| {
            Value::Array(
                t.markings(a)
                    .iter()
                    .map(|(b, p)| json!({ "toward": b, "point": sphere_point_json(p) }))
                    .collect(),
            )
        })
        .collect();
    json!({
        "vertices": n,
        "edges": t.tree().edges(),
        "auxiliary": (0..n).map(|a| t.is_auxiliary(a)).collect::<Vec<_>>(),
        "markings": markings,
    })
}

fn parse_tree(v: &Value) -> Result<Tree, FormatError> {
    let n = index(field(v, "vertices")?)?;
    let edges = array(field(v, "edges")?, "edges")?
        .iter()
        .map(|e| match array(e, "edge")?.as_slice() {
            [a, b] => Ok((index(a)?, index(b)?)),
            _ => Err(bad("edge must be [a, b]")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Tree::new(n, &edges)?)
}

pub fn parse_tree_of_spheres(v: &Value) -> Result<TreeOfSpheres<f64>, FormatError> {
    let tree = parse_tree(v)?;
    let n = tree.vertex_count();
    let auxiliary = match v.get("auxiliary") {
        Some(a) => array(a, "auxiliary")?.iter().map(|x| x.as_bool().ok_or_else(|| bad("auxiliary flags are booleans"))).collect::<Result<Vec<_>, _>>()?,
        None => vec![false; n],
    };
    let markings = array(field(v, "markings")?, "markings")?
        .iter()
        .map(|per| {
            array(per, "vertex markings")?
                .iter()
                .map(|m| Ok((index(field(m, "toward")?)?, parse_sphere_point(field(m, "point")?)?)))
                .collect::<Result<BTreeMap<_, _>, FormatError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    if auxiliary.len() != n || markings.len() != n {
        return Err(bad(format!("need {n} auxiliary flags and marking tables")));
    }
    Ok(TreeOfSpheres::with_auxiliary(tree, auxiliary, markings)?)
}

/// Tree fields plus `"tau"`, `"delta"` and `"local"` (`[[{"toward": b, "degree": k}]]`).
pub fn signature_json(s: &Signature) -> Value {
    let t = s.tree();
    let local: Vec<Value> = (0..t.vertex_count())
        .map(|a| {
            Value::Array(
                t.neighbors(a)
                    .iter()
                    .map(|&b| json!({ "toward": b, "degree": s.local_degree(a, b) }))
                    .collect(),
            )
        })
        .collect();
    json!({
        "vertices": t.vertex_count(),
        "edges": t.edges(),
        "tau": s.tau(),
        "delta": s.delta(),
        "local": local,
    })
}

pub fn parse_signature(v: &Value) -> Result<Signature, FormatError> {
    let tree = parse_tree(v)?;
    let list = |key: &str| -> Result<Vec<usize>, FormatError> { array(field(v, key)?, key)?.iter().map(index).collect() };
    let tau = list("tau")?;
    let delta = list("delta")?.into_iter().map(|d| d as u32).collect();
    let local = array(field(v, "local")?, "local")?
        .iter()
        .map(|per| {
            array(per, "local degrees")?
                .iter()
                .map(|m| Ok((index(field(m, "toward")?)?, index(field(m, "degree")?)? as u32)))
                .collect::<Result<BTreeMap<_, _>, FormatError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Signature::new(tree, tau, delta, local).map_err(bad)
}

/// Undirected DOT graph; edges are labelled with the two marked points.
pub fn tree_dot(t: &TreeOfSpheres<f64>) -> String {
    // Points within 1e-9 (relative) of ∞ print as "inf".
    let fmt = |p: Option<&SpherePoint<f64>>| match p {
        Some(p) if p.w().norm() <= 1e-9 * p.z().norm() => "inf".to_string(),
        Some(p) => {
            let z = p.z() / p.w();
            format!("{:.4}{:+.4}i", z.re, z.im)
        }
        None => "-".to_string(),
    };
    let mut out = String::from("graph tree {\n");
    for a in 0..t.tree().vertex_count() {
        let shape = if t.is_auxiliary(a) { "point" } else { "circle" };
        let _ = writeln!(out, "  {a} [shape={shape}];");
    }
    for &(a, b) in t.tree().edges() {
        let _ = writeln!(out, "  {a} -- {b} [label=\"{} / {}\"];", fmt(t.marking(a, b)), fmt(t.marking(b, a)));
    }
    out.push_str("}\n");
    out
}

pub fn generators_json(s: &SidePairingSet<f64>) -> Value {
    json!({ "d": s.polygon.d, "generators": s.generators.iter().map(moebius_json).collect::<Vec<_>>() })
}
