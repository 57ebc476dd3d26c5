use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use corrlab::C64;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "corrlab", version, about = "Batch front end for the corrlab library")]
pub struct Cli {
    /// Seed recorded in reports and image metadata.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the run report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Limit in coefficient space of a degenerating family, with holes.
    Limits(LimitsArgs),
    /// Rescaling limit of a family under `A_n` (and `B_n`, or a found co-rescaling).
    Rescale(RescaleArgs),
    /// Sampled Hausdorff distance between two correspondences.
    Hausdorff(HausdorffArgs),
    /// Tree of spheres from a list of rescalings.
    TreeReconstruct(TreeArgs),
    /// Bowen–Series map of the regular ideal 2d-gon group.
    Bowen(BowenArgs),
    /// Membership test for the variety V_d.
    VdCheck(VdArgs),
    /// Dynamical plane of R_c.
    RenderDyn(RenderDynArgs),
    /// Parameter plane of the family R_c.
    RenderBers(RenderBersArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Limits(_) => "limits",
            Command::Rescale(_) => "rescale",
            Command::Hausdorff(_) => "hausdorff",
            Command::TreeReconstruct(_) => "tree-reconstruct",
            Command::Bowen(_) => "bowen",
            Command::VdCheck(_) => "vd-check",
            Command::RenderDyn(_) => "render-dyn",
            Command::RenderBers(_) => "render-bers",
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s} is not a positive number"))
    }
}

fn pixels(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if (16..=8192).contains(&n) {
        Ok(n)
    } else {
        Err(format!("pixel count {n} outside 16..=8192"))
    }
}

/// `a+bi`, `a-bi`, `bi`, `a`, or `a,b`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || format!("cannot read {s:?} as a complex number");
    if let Some((a, b)) = t.split_once(',') {
        return Ok(C64::new(a.parse().map_err(|_| err())?, b.parse().map_err(|_| err())?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| err());
    };
    // Split at the last sign that is not an exponent sign or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| err()),
        }
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse().map_err(|_| err())?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct LimitsArgs {
    /// Family JSON: {"degree", "num", "den"} with expressions in n.
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000,100000,1000000")]
    pub samples: Vec<u64>,
    #[arg(long, value_parser = positive, default_value_t = 1e-8)]
    pub cauchy_tol: f64,
    #[arg(long, value_parser = positive, default_value_t = 1e-8)]
    pub gcd_tol: f64,
    /// Write the reduced limit here instead of only reporting it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RescaleArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// Source rescaling JSON: {"entries": [a, b, c, d], "samples"?}.
    #[arg(long)]
    pub a: PathBuf,
    /// Target rescaling; found by the three-probe heuristic when absent.
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long, value_parser = positive, default_value_t = 1e-8)]
    pub cauchy_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct HausdorffArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct TreeArgs {
    /// JSON {"rescalings": [...], "samples"?: [...]}.
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BowenArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Also draw the graphs of A and h.
    #[arg(long)]
    pub plot: bool,
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// Depth of the conjugacy approximation.
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
    #[arg(long, value_parser = pixels, default_value_t = 512)]
    pub px: usize,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct VdArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Half the map degree by default.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_parser = positive, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 40)]
    pub depth: usize,
    #[arg(long, default_value_t = 2000)]
    pub width: usize,
    /// Target ball radius around the attractor.
    #[arg(long, value_parser = positive, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, value_parser = positive, default_value_t = 1e-7)]
    pub cluster_tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct RenderDynArgs {
    #[arg(long, value_parser = parse_complex)]
    pub c: C64,
    #[arg(long, value_parser = parse_complex, default_value = "0+0i")]
    pub center: C64,
    #[arg(long, value_parser = positive, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long, value_parser = pixels, default_value_t = 256)]
    pub px: usize,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RenderBersArgs {
    #[arg(long, value_parser = parse_complex, default_value = "0+0i")]
    pub center: C64,
    #[arg(long, value_parser = positive, default_value_t = 4.0)]
    pub radius: f64,
    #[arg(long, value_parser = pixels, default_value_t = 512)]
    pub px: usize,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0+0i").unwrap(), C64::new(0.0, 0.0));
        assert_eq!(parse_complex("1.5-2i").unwrap(), C64::new(1.5, -2.0));
        assert_eq!(parse_complex("-0.5,0.25").unwrap(), C64::new(-0.5, 0.25));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("1e-3+2e-2i").unwrap(), C64::new(1e-3, 2e-2));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn parse_examples() {
        let cli = Cli::try_parse_from(["corrlab", "vd-check", "--map", "m.json"]).unwrap();
        match cli.command {
            Command::VdCheck(a) => assert_eq!((a.d, a.tol), (None, 1e-8)),
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["corrlab", "render-bers", "--px", "10", "--out", "b.ppm"]).is_err());
        let cli = Cli::try_parse_from(["corrlab", "hausdorff", "a.json", "b.json", "--grid", "64"]).unwrap();
        assert!(matches!(cli.command, Command::Hausdorff(HausdorffArgs { grid: 64, .. })));
    }
}
