//! `ginibre`: densities, survival functions, hole and overcrowding
//! probabilities, samples and validation runs for products of complex
//! Gaussian matrices.

mod commands;
mod params;
mod report;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ginibre_core::Size;
use serde::Deserialize;

use commands::{execute, UsageError, EXIT_USAGE};
use params::{Grid, Method, Params};

#[derive(Debug, Parser)]
#[command(name = "ginibre", version, about = "Eigenvalue statistics of products of complex Gaussian matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for Monte Carlo (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density of the squared radius (R_k)² at x = r².
    Density(DensityArgs),
    /// P{(R_k)² > r²}.
    Survival(SurvivalArgs),
    /// Probability that the disk |z| < r holds no eigenvalue.
    Hole(HoleArgs),
    /// Probability that the disk |z| < r holds at least m eigenvalues (N = ∞).
    Overcrowd(OvercrowdArgs),
    /// Draw squared radii or squared eigenvalue moduli.
    Sample(SampleArgs),
    /// Statistical validation runs.
    Validate {
        #[command(subcommand)]
        which: Validate,
    },
    /// Re-run the command recorded in a JSON report (`-` for stdin).
    Replay { report: PathBuf },
}

#[derive(Debug, Subcommand)]
enum Validate {
    /// KS test of squared eigenvalue moduli against Gamma-product radii.
    Theorem1(ValidateArgs),
}

#[derive(Debug, Args)]
struct Radius {
    /// Disk radius.
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Squared disk radius.
    #[arg(long, allow_negative_numbers = true)]
    r2: Option<f64>,
    /// Evaluation grid start:stop:steps (inclusive, evenly spaced).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<Grid>,
}

#[derive(Debug, Args)]
struct DensityArgs {
    /// Number of factor matrices.
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Rank.
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[command(flatten)]
    at: Radius,
}

#[derive(Debug, Args)]
struct SurvivalArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[command(flatten)]
    at: Radius,
}

#[derive(Debug, Args)]
struct HoleArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Matrix size, or "inf".
    #[arg(long = "N")]
    size: Size,
    #[command(flatten)]
    at: Radius,
    /// Monte Carlo samples (finite N only).
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Truncation tolerance for N = inf.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct OvercrowdArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Minimum number of eigenvalues in the disk.
    #[arg(long)]
    m: u32,
    #[command(flatten)]
    at: Radius,
    /// Monte Carlo samples (m <= 6).
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long = "N")]
    size: Size,
    #[arg(long, value_enum, default_value_t = Method::Radii)]
    method: Method,
    #[arg(long, default_value_t = 1)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long = "N")]
    size: Size,
    #[arg(long, default_value_t = 2000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Factor count for the radii side (defaults to --n); a mismatch gives a
    /// negative control.
    #[arg(long)]
    n_radii: Option<u32>,
}

/// Which variable the evaluation points measure.
#[derive(Clone, Copy)]
enum Axis {
    R,
    R2,
}

fn resolve_points(at: &Radius, axis: Axis, params: &mut Params) -> Result<(), UsageError> {
    let given = [at.r.is_some(), at.r2.is_some(), at.grid.is_some()];
    if given.iter().filter(|&&g| g).count() > 1 {
        return Err(UsageError::new("--r", "give only one of --r, --r2, --grid"));
    }
    let points = match (at.r, at.r2, at.grid, axis) {
        (Some(r), _, _, Axis::R) => vec![r],
        (Some(r), _, _, Axis::R2) => vec![r * r],
        (_, Some(r2), _, Axis::R) => vec![r2.sqrt()],
        (_, Some(r2), _, Axis::R2) => vec![r2],
        (_, _, Some(g), _) => g.points(),
        _ => Vec::new(),
    };
    params.points = points;
    params.axis = Some(match axis {
        Axis::R => "r".into(),
        Axis::R2 => "r2".into(),
    });
    Ok(())
}

fn resolve(command: Command) -> Result<(String, Params), UsageError> {
    Ok(match command {
        Command::Density(a) => {
            let mut p = Params::new(a.n);
            p.k = Some(a.k);
            if a.at.r.is_some() {
                return Err(UsageError::new("--r", "density is evaluated at x = r², use --r2 or --grid"));
            }
            resolve_points(&a.at, Axis::R2, &mut p)?;
            p.axis = Some("x".into());
            ("density".into(), p)
        }
        Command::Survival(a) => {
            let mut p = Params::new(a.n);
            p.k = Some(a.k);
            resolve_points(&a.at, Axis::R2, &mut p)?;
            ("survival".into(), p)
        }
        Command::Hole(a) => {
            let mut p = Params::new(a.n);
            p.size = Some(a.size);
            resolve_points(&a.at, Axis::R, &mut p)?;
            p.mc_samples = a.mc_samples;
            p.seed = a.seed.or(a.mc_samples.map(|_| 0));
            p.tol = a.tol;
            ("hole".into(), p)
        }
        Command::Overcrowd(a) => {
            let mut p = Params::new(a.n);
            p.size = Some(Size::Infinite);
            p.m = Some(a.m);
            resolve_points(&a.at, Axis::R, &mut p)?;
            p.mc_samples = a.mc_samples;
            p.seed = a.seed.or(a.mc_samples.map(|_| 0));
            ("overcrowd".into(), p)
        }
        Command::Sample(a) => {
            let mut p = Params::new(a.n);
            p.size = Some(a.size);
            p.method = Some(a.method);
            p.draws = Some(a.draws);
            p.seed = Some(a.seed);
            ("sample".into(), p)
        }
        Command::Validate {
            which: Validate::Theorem1(a),
        } => {
            let mut p = Params::new(a.n);
            p.size = Some(a.size);
            p.draws = Some(a.draws);
            p.seed = Some(a.seed);
            p.n_radii = a.n_radii;
            ("validate theorem1".into(), p)
        }
        Command::Replay { report } => read_replay(&report)?,
    })
}

#[derive(Deserialize)]
struct Recorded {
    command: String,
    params: Params,
}

fn read_replay(path: &PathBuf) -> Result<(String, Params), UsageError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| UsageError::new("report", e.to_string()))?;
    let rec: Recorded = serde_json::from_str(&text).map_err(|e| UsageError::new("report", e.to_string()))?;
    Ok((rec.command, rec.params))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: invalid value for '--threads': must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: could not start thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = resolve(cli.command).and_then(|(command, params)| execute(&command, &params));
    let (report, code) = match outcome {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut out = io::stdout().lock();
    let written = match cli.format {
        Format::Json => report.write_json(&mut out),
        Format::Csv => {
            for e in &report.errors {
                eprintln!("{}: {}", e.kind, e.message);
            }
            report.write_csv(&mut out)
        }
    };
    if written.and_then(|_| out.flush()).is_err() {
        return ExitCode::FAILURE;
    }
    ExitCode::from(code)
}
