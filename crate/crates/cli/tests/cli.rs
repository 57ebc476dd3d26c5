use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const HOLE_FAMILY: &str = r#"{"degree": 2, "num": [0, {"-": [-1, {"/": [1, "n"]}]}, 1], "den": [-1, 1]}"#;
const SQUARE_PLUS_N: &str = r#"{"degree": 2, "num": ["n", 0, 1], "den": [1]}"#;
const TRANSLATION: &str = r#"{"entries": [1, "n", 0, 1]}"#;
const R0: &str = r#"{"degree": 6, "num": [0.2, 0, 0, 0, 0, 0, 1], "den": [0, 0, 0, 0, 0, 1]}"#;
const SQUARE: &str = r#"{"degree": 2, "num": [0, 0, 1], "den": [1]}"#;
const THREE_RESCALINGS: &str =
    r#"{"rescalings": [{"entries": [1, 0, 0, 1]}, {"entries": [1, "n", 0, 1]}, {"entries": ["n", 0, 0, 1]}]}"#;

fn corrlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrlab"))
        .current_dir(dir)
        .env("CORRLAB_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

fn workspace(files: &[(&str, &str)]) -> TempDir {
    let dir = TempDir::new().unwrap();
    for (name, body) in files {
        fs::write(dir.path().join(name), body).unwrap();
    }
    dir
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn error(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error is JSON")
}

#[test]
fn limits_reports_the_hole() {
    let dir = workspace(&[("fam.json", HOLE_FAMILY)]);
    let r = report(&corrlab(dir.path(), &["limits", "--family", "fam.json", "--out", "lim.json"]));
    assert_eq!(r["subcommand"], "limits");
    assert_eq!(r["result"]["degree"], 1);
    assert_eq!(r["result"]["status"], "rescaling_limit");
    let hole = &r["result"]["reduced"]["holes"][0]["point"];
    let (re, w) = (hole[0].as_f64().unwrap(), hole[2].as_f64().unwrap());
    assert!((re / w - 1.0).abs() < 1e-6);
    let written: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("lim.json")).unwrap()).unwrap();
    assert_eq!(written, r["result"]);
}

#[test]
fn rescale_with_and_without_target() {
    let dir = workspace(&[("f.json", SQUARE_PLUS_N), ("a.json", r#"{"entries": [1, 0, 0, 1]}"#), ("b.json", TRANSLATION)]);
    let r = report(&corrlab(dir.path(), &["rescale", "--family", "f.json", "--a", "a.json", "--b", "b.json"]));
    assert_eq!(r["result"]["limit"]["degree"], 2);
    let r = report(&corrlab(dir.path(), &["rescale", "--family", "f.json", "--a", "a.json"]));
    assert_eq!(r["result"]["corescaling"], "three_probe");
    assert_eq!(r["result"]["limit"]["degree"], 2);
}

#[test]
fn hausdorff_of_a_correspondence_with_itself() {
    let dir = workspace(&[("c.json", &format!(r#"{{"uniformizer": {R0}}}"#))]);
    let r = report(&corrlab(dir.path(), &["hausdorff", "c.json", "c.json", "--grid", "16"]));
    assert_eq!(r["result"]["distance"], 0.0);
}

#[test]
fn tree_reconstruct_writes_json_and_dot() {
    let dir = workspace(&[("r.json", THREE_RESCALINGS)]);
    let r = report(&corrlab(dir.path(), &["tree-reconstruct", "--family", "r.json", "--out", "t.json", "--dot", "t.dot"]));
    assert_eq!(r["result"]["vertices"], 3);
    let dot = fs::read_to_string(dir.path().join("t.dot")).unwrap();
    assert!(dot.starts_with("graph tree {") && dot.contains("inf"));
    assert_eq!(r["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn bowen_outputs() {
    let dir = TempDir::new().unwrap();
    let r = report(&corrlab(
        dir.path(),
        &["bowen", "--d", "3", "--plot", "--samples", "64", "--depth", "6", "--px", "32", "--out-dir", "."],
    ));
    assert_eq!(r["result"]["winding_degree"], 5);
    assert!(r["result"]["markov_defect"].as_f64().unwrap() < 1e-10);
    let csv = fs::read_to_string(dir.path().join("bowen_d3.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,a_t,h_t"));
    assert_eq!(lines.count(), 64);
    for name in ["bowen_d3_generators.json", "bowen_d3_map.ppm", "bowen_d3_h.ppm"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    assert!(fs::read(dir.path().join("bowen_d3_map.ppm")).unwrap().starts_with(b"P6\n32 32\n255\n"));
}

#[test]
fn vd_check_verdicts() {
    let dir = workspace(&[("r0.json", R0), ("sq.json", SQUARE)]);
    let r = report(&corrlab(dir.path(), &["vd-check", "--map", "r0.json"]));
    assert_eq!(r["result"]["verdict"], true);
    let r = report(&corrlab(dir.path(), &["vd-check", "--map", "sq.json"]));
    assert_eq!(r["result"]["verdict"], false);
}

#[test]
fn render_is_deterministic_and_leaves_no_temporaries() {
    let dir = TempDir::new().unwrap();
    let args = ["render-dyn", "--c", "0+0i", "--px", "16", "--depth", "8", "--width", "16", "--out", "a.ppm"];
    let first = report(&corrlab(dir.path(), &args));
    let bytes = fs::read(dir.path().join("a.ppm")).unwrap();
    let meta = fs::read(dir.path().join("a.ppm.json")).unwrap();
    let second = report(&corrlab(dir.path(), &args));
    assert_eq!(bytes, fs::read(dir.path().join("a.ppm")).unwrap());
    assert_eq!(meta, fs::read(dir.path().join("a.ppm.json")).unwrap());
    assert_eq!(first["result"]["image_sha256"], second["result"]["image_sha256"]);
    assert_eq!(first["result"]["symmetry"]["defective"], 0);

    let mut names: Vec<String> =
        fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["a.ppm", "a.ppm.json"]);
}

#[test]
fn render_bers_reports_a_bounding_box() {
    let dir = TempDir::new().unwrap();
    let r = report(&corrlab(dir.path(), &["render-bers", "--px", "16", "--depth", "8", "--width", "16", "--out", "b.ppm"]));
    let bbox = &r["result"]["structured_bounding_box"];
    assert_eq!(bbox["touches_border"], false);
}

#[test]
fn report_file_matches_stdout() {
    let dir = workspace(&[("r0.json", R0)]);
    let out = corrlab(dir.path(), &["--report", "rep.json", "--seed", "7", "vd-check", "--map", "r0.json"]);
    let r = report(&out);
    assert_eq!(r["seed"], 7);
    let file: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    assert_eq!(file, r);
}

#[test]
fn exit_codes_and_error_classes() {
    let dir = workspace(&[("bad.json", "{ not json"), ("shape.json", r#"{"degree": 2}"#), ("sq.json", SQUARE)]);

    let out = corrlab(dir.path(), &["render-bers", "--px", "10", "--out", "x.ppm"]);
    assert_eq!(out.status.code(), Some(2));

    let out = corrlab(dir.path(), &["vd-check", "--map", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error(&out)["error"]["kind"], "io");
    assert_eq!(error(&out)["error"]["command"], "vd-check");

    let out = corrlab(dir.path(), &["vd-check", "--map", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error(&out)["error"]["kind"], "format");

    let out = corrlab(dir.path(), &["limits", "--family", "shape.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error(&out)["error"]["kind"], "format");

    let out = corrlab(dir.path(), &["vd-check", "--map", "sq.json", "--d", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error(&out)["error"]["kind"], "domain");

    let out = Command::new(env!("CARGO_BIN_EXE_corrlab"))
        .current_dir(dir.path())
        .env("CORRLAB_THREADS", "zero")
        .args(["vd-check", "--map", "sq.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error(&out)["error"]["kind"], "usage");
}
