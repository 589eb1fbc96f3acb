//! `polywell`: well-posedness checks for least squares with convex piecewise linear
//! regularizers.
//!
//! Exit codes: 0 success / well-posed, 1 usage or input error, 2 ill-posed,
//! 3 hypothesis violated, 4 budget exceeded, 5 solver failure.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "polywell", version, about = "Exact well-posedness analysis for CPWL-regularized least squares")]
pub struct Cli {
    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    emit_json: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide well-posedness; ill-posed instances come with a certificate.
    Check { file: PathBuf },
    /// Ill-posedness number, minimal accessible face and the implied rank bound.
    Diagnose { file: PathBuf },
    /// Minimize ½‖Ax − b‖²_Σ + f(x).
    #[command(group(ArgGroup::new("mode").args(["exact", "numeric"])))]
    Solve {
        file: PathBuf,
        /// Data vector, comma separated rationals ("1,2/3").
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Exact rational solve (default).
        #[arg(long)]
        exact: bool,
        /// Floating-point primal-dual solve.
        #[arg(long)]
        numeric: bool,
        /// Stopping tolerance for --numeric.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Total variation polytope vertices and the CT axis-sum construction.
    #[command(group(ArgGroup::new("what").required(true).args(["vertices", "nn", "ct"])))]
    Tv {
        /// Edge-list file (required for --vertices and --nn).
        graph: Option<PathBuf>,
        #[arg(long)]
        vertices: bool,
        /// Vertices of the nonnegative variant, compared with the plain ones.
        #[arg(long)]
        nn: bool,
        /// Grid size of the CT construction.
        #[arg(long, value_name = "N")]
        ct: Option<usize>,
        /// Residual for --ct (2N comma separated rationals) instead of the default.
        #[arg(long, allow_hyphen_values = true, requires = "ct")]
        z: Option<String>,
    },
    /// Emit a problem file from an l0 or partition instance.
    #[command(group(ArgGroup::new("source").required(true).args(["l0", "partition"])))]
    Reduce {
        #[arg(long, value_name = "FILE")]
        l0: Option<PathBuf>,
        /// Positive integer weights, comma separated.
        #[arg(long, value_name = "W1,W2,...")]
        partition: Option<String>,
        /// Use finite differences on a path instead of ‖x‖₁ (partition only).
        #[arg(long, requires = "partition")]
        tv: bool,
        /// Add the nonnegativity constraint (with --tv).
        #[arg(long, requires = "tv")]
        nonneg: bool,
        #[arg(short, long, value_name = "OUT")]
        output: PathBuf,
    },
    /// Fraction of well-posed random matrices for the regularizer in FILE.
    Montecarlo {
        file: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where ill-posed samples are written (only if there are any).
        #[arg(long, value_name = "PATH", default_value = "polywell-montecarlo-replay.toml")]
        replay: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(&cli))
}
