//! Command-line front end for the adiabatic-spectra library.
//!
//! A run is described by a JSON config (file or stdin) whose
//! top-level scalar fields can be overridden with `--set key=value`;
//! results are written atomically as CSV or JSON with a sidecar
//! metadata file. Identical configs produce byte-identical data
//! files: fixed summation order, fixed float formatting, and no
//! timestamps inside the data.

use clap::Parser;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

mod config;
mod output;
mod run;

use config::RunConfig;

/// Exact adiabatic-limit spectra and asymptotics experiments.
///
/// Commands: torus-spectrum, torus-count, torus-audit, heis-spectrum,
/// heat-trace, trace-ratio, branch-audit, weyl-check.
///
/// CSV schemas: spectra use `value,multiplicity`; heat-trace and
/// trace-ratio use `t,h,trace,tail_bound,ratio`; torus-count and
/// torus-audit use `h,count,predicted,ratio`; branch-audit uses
/// `branch_index,kind,slope,constant`; weyl-check uses
/// `lambda,predicted,weyl,rel_diff`. Floats carry 17 significant
/// digits.
#[derive(Parser, Debug)]
#[command(name = "adiaspec", version, about)]
struct Cli {
    /// Command to run; may also be given as "command" in the config.
    command: Option<String>,

    /// JSON config: a file path, or `-` for standard input.
    #[arg(long)]
    config: Option<String>,

    /// Override a top-level config field, e.g. `--set h=0.01` or
    /// `--set slope={"rational":[1,2]}`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Output file; without it the data goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Worker threads for internal enumeration (0 = auto).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<adiabatic_spectra::Error> for CliError {
    fn from(e: adiabatic_spectra::Error) -> Self {
        CliError {
            code: if e.is_ambiguity() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn run_cli(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    let mut cfg = config::load(cli.config.as_deref(), &cli.sets)?;
    if let Some(cmd) = cli.command {
        cfg.command = Some(cmd);
    }
    if let Some(out) = cli.out {
        cfg.out = Some(out);
    }
    if let Some(format) = cli.format {
        cfg.format = Some(format);
    }
    let command = cfg
        .command
        .clone()
        .ok_or_else(|| CliError::config("missing field: command"))?;

    let started = Instant::now();
    let outcome = run::dispatch(&command, &cfg)?;
    let wall_time_ms = started.elapsed().as_millis() as u64;

    let format = cfg.format.as_deref().unwrap_or("csv");
    let data = match format {
        "csv" => outcome.csv,
        "json" => outcome.json.to_string(),
        other => return Err(CliError::config(format!("unknown format: {other}"))),
    };

    match &cfg.out {
        Some(path) => {
            output::write_atomic(path, data.as_bytes())
                .map_err(|e| CliError::config(format!("write {}: {e}", path.display())))?;
            let sidecar = sidecar_json(&command, &cfg, wall_time_ms, &outcome.provenance);
            let meta_path = sidecar_path(path);
            output::write_atomic(&meta_path, sidecar.to_string().as_bytes())
                .map_err(|e| CliError::config(format!("write {}: {e}", meta_path.display())))?;
        }
        None => print!("{data}"),
    }
    println!("{}", outcome.headline);
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn sidecar_json(
    command: &str,
    cfg: &RunConfig,
    wall_time_ms: u64,
    provenance: &[String],
) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "config": serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null),
        "wall_time_ms": wall_time_ms,
        "completeness_provenance": provenance,
    })
}
