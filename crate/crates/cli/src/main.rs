mod args;
mod commands;
mod output;
mod plot;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use output::{CliError, Emitter};

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CORRLAB_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| format!("CORRLAB_THREADS={v:?} is not a positive integer"))?;
    if n == 0 {
        return Err("CORRLAB_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn run(cli: &Cli, emit: &mut Emitter) -> Result<serde_json::Value, CliError> {
    match &cli.command {
        Command::Limits(a) => commands::limits(a, emit),
        Command::Rescale(a) => commands::rescale(a, emit),
        Command::Hausdorff(a) => commands::hausdorff(a),
        Command::TreeReconstruct(a) => commands::tree_reconstruct(a, emit),
        Command::Bowen(a) => commands::bowen(a, emit),
        Command::VdCheck(a) => commands::vd_check(a),
        Command::RenderDyn(a) => commands::render_dyn(a, cli.seed, emit),
        Command::RenderBers(a) => commands::render_bers(a, cli.seed, emit),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("{}", json!({ "error": { "kind": "usage", "message": msg } }));
        return ExitCode::from(2);
    }
    let name = cli.command.name();
    let start = Instant::now();
    let mut emit = Emitter::default();
    let result = match run(&cli, &mut emit) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", e.to_json(name));
            return ExitCode::from(1);
        }
    };
    let report = json!({
        "subcommand": name,
        "config": &cli,
        "seed": cli.seed,
        "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
        "result": result,
        "outputs": emit.artifacts,
    });
    if let Some(path) = &cli.report {
        let mut side = Emitter::default();
        if let Err(e) = side.write_json(path, &report) {
            eprintln!("{}", e.to_json(name));
            return ExitCode::from(1);
        }
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("JSON values serialize"));
    ExitCode::SUCCESS
}
