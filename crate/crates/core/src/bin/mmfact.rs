//! Command-line front end: synthetic data generation, solving, region
//! enumeration, and per-component timing profiles.
//!
//! Exit codes: 0 on success/convergence, 2 on input errors, 3 when an
//! iteration or wall-clock limit stopped the solve.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use mmfact_core::arrangement::{enumerate_regions, preprocess, Hyperplane};
use mmfact_core::gop::{self, SolveStatus};
use mmfact_core::io;
use mmfact_core::problem::{generate_instance, ProblemInstance, SolverConfig};

#[derive(Parser)]
#[command(name = "mmfact", version, about = "Sparse mixed-membership factorization solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance (y CSV) and its ground truth (JSON).
    Generate(GenerateArgs),
    /// Solve an instance from a y CSV and write a report JSON.
    Solve(SolveArgs),
    /// Enumerate the sign regions of a hyperplane arrangement CSV.
    Enumerate(EnumerateArgs),
    /// Time one solver iteration across instance sizes and emit a CSV table.
    Profile(ProfileArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of features (rows of y); must be at least 4.
    #[arg(long)]
    m: usize,
    /// Number of samples (columns of y).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the observation CSV.
    #[arg(long = "out-y")]
    out_y: PathBuf,
    /// Output path for the ground-truth factor pair JSON.
    #[arg(long = "out-truth")]
    out_truth: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Input y CSV (features × samples, no header).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Subtype count K.
    #[arg(long)]
    k: Option<usize>,
    /// ℓ1 budget P on x.
    #[arg(long)]
    sparsity: Option<f64>,
    /// Convergence tolerance ε.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Seed for the initial point.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the relaxed dual solves.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "max-iters")]
    max_iters: Option<u64>,
    #[arg(long = "max-seconds")]
    max_seconds: Option<f64>,
    /// Report JSON path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// CSV of hyperplane rows: coefficients then the offset, one per line.
    #[arg(long)]
    hyperplanes: PathBuf,
    /// Half-width of the feasibility box used by the interior-point checks.
    #[arg(long = "box-bound", default_value_t = 1.0)]
    box_bound: f64,
}

#[derive(Args)]
struct ProfileArgs {
    /// Feature counts, comma separated.
    #[arg(long = "m-list", value_delimiter = ',', required = true)]
    m_list: Vec<usize>,
    /// Sample counts, comma separated.
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// On-disk mirror of [`SolverConfig`] plus run metadata. Unknown keys are
/// rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    epsilon: Option<f64>,
    max_iterations: Option<u64>,
    max_wall_seconds: Option<f64>,
    workers: Option<usize>,
    dedup_tau: Option<f64>,
    zero_tau: Option<f64>,
    interior_tau: Option<f64>,
    lp_tol: Option<f64>,
    qp_tol: Option<f64>,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    k: Option<usize>,
    p: Option<f64>,
}

fn fail(msg: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Profile(args) => cmd_profile(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> ExitCode {
    let (instance, truth) = match generate_instance(args.m, args.n, args.seed) {
        Ok(pair) => pair,
        Err(e) => return fail(e, 2),
    };
    if let Err(e) = io::write_matrix_csv(&args.out_y, &instance.y) {
        return fail(format!("cannot write {}: {e}", args.out_y.display()), 2);
    }
    if let Err(e) = io::write_factor_pair_json(&args.out_truth, &truth) {
        return fail(format!("cannot write {}: {e}", args.out_truth.display()), 2);
    }
    ExitCode::SUCCESS
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let file_cfg = match &args.config {
        Some(path) => match load_config_file(path) {
            Ok(cfg) => cfg,
            Err(e) => return fail(e, 2),
        },
        None => RunConfigFile::default(),
    };

    let Some(input) = args.input.clone().or(file_cfg.input.clone()) else {
        return fail("no input file given (use --input or the config file)", 2);
    };
    let y = match io::read_matrix_csv(&input) {
        Ok(y) => y,
        Err(e) => return fail(format!("cannot read {}: {e}", input.display()), 2),
    };

    let k = args.k.or(file_cfg.k).unwrap_or(2);
    let p = args.sparsity.or(file_cfg.p).unwrap_or(1.0);
    let defaults = SolverConfig::default();
    let config = SolverConfig {
        epsilon: args.epsilon.or(file_cfg.epsilon).unwrap_or(defaults.epsilon),
        max_iterations: args.max_iters.or(file_cfg.max_iterations).unwrap_or(defaults.max_iterations),
        max_wall_seconds: args
            .max_seconds
            .or(file_cfg.max_wall_seconds)
            .unwrap_or(defaults.max_wall_seconds),
        workers: args.threads.or(file_cfg.workers).unwrap_or(defaults.workers),
        dedup_tau: file_cfg.dedup_tau.unwrap_or(defaults.dedup_tau),
        zero_tau: file_cfg.zero_tau.unwrap_or(defaults.zero_tau),
        interior_tau: file_cfg.interior_tau.unwrap_or(defaults.interior_tau),
        lp_tol: file_cfg.lp_tol.unwrap_or(defaults.lp_tol),
        qp_tol: file_cfg.qp_tol.unwrap_or(defaults.qp_tol),
    };
    let seed = args.seed.unwrap_or(0);

    let instance = match ProblemInstance::new(y, k, p, config.epsilon, seed) {
        Ok(inst) => inst,
        Err(e) => return fail(e, 2),
    };

    let report = match gop::run_with_progress(&instance, &config, |entry, open| {
        eprintln!(
            "t={} pubd={:.6} rlbd={:.6} gap={:.6} open={}",
            entry.t,
            entry.pubd,
            entry.rlbd,
            entry.pubd - entry.rlbd,
            open
        );
    }) {
        Ok(report) => report,
        Err(e) => return fail(e, 2),
    };

    let json = serde_json::to_string_pretty(&report.to_json_value())
        .expect("report JSON serialization cannot fail");
    let out = args.out.clone().or(file_cfg.output);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, json + "\n") {
                return fail(format!("cannot write {}: {e}", path.display()), 2);
            }
        }
        None => println!("{json}"),
    }
    match report.status {
        SolveStatus::Converged => ExitCode::SUCCESS,
        SolveStatus::IterationLimit | SolveStatus::TimeLimit => ExitCode::from(3),
    }
}

fn load_config_file(path: &Path) -> Result<RunConfigFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

fn cmd_enumerate(args: EnumerateArgs) -> ExitCode {
    let rows = match io::read_matrix_csv(&args.hyperplanes) {
        Ok(m) => m,
        Err(e) => return fail(format!("cannot read {}: {e}", args.hyperplanes.display()), 2),
    };
    if rows.ncols() < 2 {
        return fail("hyperplane rows need at least one coefficient and an offset", 2);
    }
    let planes: Vec<Hyperplane> = rows
        .rows()
        .into_iter()
        .map(|r| {
            let v = r.to_vec();
            let (coeffs, offset) = v.split_at(v.len() - 1);
            Hyperplane { a: coeffs.to_vec(), b: offset[0] }
        })
        .collect();
    let defaults = SolverConfig::default();
    let arrangement = preprocess(&planes, defaults.dedup_tau, defaults.zero_tau);
    let dim = rows.ncols() - 1;
    let center = vec![0.0; dim];
    let regions = match enumerate_regions(
        &arrangement.planes,
        &center,
        args.box_bound,
        defaults.interior_tau,
        0,
    ) {
        Ok(r) => r,
        Err(e) => return fail(e, 2),
    };
    for region in &regions {
        println!("{}", region.to_bit_string());
    }
    println!("count: {}", regions.len());
    ExitCode::SUCCESS
}

fn cmd_profile(args: ProfileArgs) -> ExitCode {
    if args.m_list.is_empty() || args.n_list.is_empty() {
        return fail("m-list and n-list must be nonempty", 2);
    }
    let mut lines = String::new();
    for &m in &args.m_list {
        for &n in &args.n_list {
            let (instance, _) = match generate_instance(m, n, args.seed) {
                Ok(pair) => pair,
                Err(e) => return fail(e, 2),
            };
            let config = SolverConfig {
                max_iterations: 1,
                workers: 1,
                ..SolverConfig::default()
            };
            let report = match gop::run(&instance, &config) {
                Ok(r) => r,
                Err(e) => return fail(e, 2),
            };
            let num = report.history.first().map_or(0, |h| h.regions);
            lines.push_str(&format!(
                "{},{},{:.4},{:.4},{:.4},{},{:.4},{:.4}\n",
                m,
                n,
                report.timings.primal.as_secs_f64(),
                report.timings.pre.as_secs_f64(),
                report.timings.uri.as_secs_f64(),
                num,
                report.timings.dual.as_secs_f64(),
                report.timings.total.as_secs_f64(),
            ));
        }
    }
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &lines) {
                return fail(format!("cannot write {}: {e}", path.display()), 2);
            }
        }
        None => print!("{lines}"),
    }
    ExitCode::SUCCESS
}
