//! `sphdisp`: command-line front end for the spherical dispersion toolkit.
//!
//! Exit codes: 0 success, 1 a verdict or verification failed, 2 usage or
//! precondition error, 3 I/O or parse error. Errors are reported on stderr
//! as a one-line JSON object.

mod commands;
mod error;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use sphdisp_core::io::{write_atomic, RunRecord};

use commands::*;
use error::{CliError, CliResult, EXIT_USAGE, EXIT_VERDICT};

const TOOL: &str = "sphdisp";
const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Base directory for relative output paths.
const OUT_DIR_ENV: &str = "SPHDISP_OUT_DIR";

#[derive(Parser)]
#[command(name = "sphdisp", version, about = "Dispersion of point sets on spheres")]
struct Cli {
    /// Worker threads for parallel replications (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the full JSON run record instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a uniform random point set as CSV.
    Gen(GenArgs),
    /// Dispersion of a point set (exact, grid oracle or search).
    Disp(DispArgs),
    /// Construct and verify an empty-slice certificate.
    Cert(CertArgs),
    /// Table of every closed-form bound at (n, d).
    Bounds(BoundsArgs),
    /// Monte Carlo estimate of the expected dispersion.
    Expdisp(ExpdispArgs),
    /// Coupon-collector tail probability.
    Coupon(CouponArgs),
    /// Probability that a lune partition has an empty piece.
    Partition(PartitionArgs),
    /// Cap-dispersion exceedance against the VC tail bound.
    Envelope(EnvelopeArgs),
    /// Shattering census for caps.
    Vc(VcArgs),
    /// CSV of bounds (and optional estimates) along a sweep of n.
    Plotdata(PlotdataArgs),
    /// Recompute a run record from its config and compare.
    Replay(ReplayArgs),
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn execute<C: Command>(args: &C, json: bool) -> CliResult<i32> {
    let config = serde_json::to_value(args).expect("configs serialize");
    let record = RunRecord::start(TOOL, VERSION, C::NAME, config, None);
    let outcome = args.compute()?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let mut record = record.finish(outcome.payload, outcome.verdicts);
    record.seed = outcome.seed;
    if let Some((path, contents)) = &outcome.artifact {
        write_atomic(&resolve_out(path), contents.as_bytes())?;
    }
    if let Some(path) = args.record_path() {
        record.save(&resolve_out(path))?;
    }
    if json {
        println!("{}", record.to_json());
    } else {
        print!("{}", outcome.text);
    }
    Ok(if record.passed() { 0 } else { EXIT_VERDICT })
}

fn recompute<C: Command>(config: &Value) -> CliResult<commands::Outcome> {
    let args: C = serde_json::from_value(config.clone())
        .map_err(|e| CliError::Io(format!("config does not match '{}': {e}", C::NAME)))?;
    args.compute()
}

/// Top-level payload keys whose values differ.
fn differing_keys(a: &Value, b: &Value) -> Vec<String> {
    match (a.as_object(), b.as_object()) {
        (Some(x), Some(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            keys.into_iter().filter(|k| x.get(*k) != y.get(*k)).map(|k| format!("payload.{k}")).collect()
        }
        _ if a != b => vec!["payload".into()],
        _ => Vec::new(),
    }
}

fn replay(args: &ReplayArgs, json: bool) -> CliResult<i32> {
    let record = RunRecord::load(&args.input)?;
    let c = &record.config;
    let fresh = match record.subcommand.as_str() {
        GenArgs::NAME => recompute::<GenArgs>(c),
        DispArgs::NAME => recompute::<DispArgs>(c),
        CertArgs::NAME => recompute::<CertArgs>(c),
        BoundsArgs::NAME => recompute::<BoundsArgs>(c),
        ExpdispArgs::NAME => recompute::<ExpdispArgs>(c),
        CouponArgs::NAME => recompute::<CouponArgs>(c),
        PartitionArgs::NAME => recompute::<PartitionArgs>(c),
        EnvelopeArgs::NAME => recompute::<EnvelopeArgs>(c),
        VcArgs::NAME => recompute::<VcArgs>(c),
        PlotdataArgs::NAME => recompute::<PlotdataArgs>(c),
        other => return Err(CliError::Usage(format!("cannot replay subcommand '{other}'"))),
    }?;
    let mut mismatches = differing_keys(&fresh.payload, &record.payload);
    if fresh.verdicts != record.verdicts {
        mismatches.push("verdicts".into());
    }
    if fresh.seed != record.seed {
        mismatches.push("seed".into());
    }
    let identical = mismatches.is_empty();
    if json {
        let report = json!({
            "subcommand": record.subcommand,
            "identical": identical,
            "mismatches": mismatches,
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else if identical {
        println!("replay of {}: identical", record.subcommand);
    } else {
        println!("replay of {}: differs in {}", record.subcommand, mismatches.join(", "));
    }
    Ok(if identical { 0 } else { EXIT_VERDICT })
}

fn run(cli: Cli) -> CliResult<i32> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let json = cli.json;
    match &cli.command {
        Cmd::Gen(a) => execute(a, json),
        Cmd::Disp(a) => execute(a, json),
        Cmd::Cert(a) => execute(a, json),
        Cmd::Bounds(a) => execute(a, json),
        Cmd::Expdisp(a) => execute(a, json),
        Cmd::Coupon(a) => execute(a, json),
        Cmd::Partition(a) => execute(a, json),
        Cmd::Envelope(a) => execute(a, json),
        Cmd::Vc(a) => execute(a, json),
        Cmd::Plotdata(a) => execute(a, json),
        Cmd::Replay(a) => replay(a, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
