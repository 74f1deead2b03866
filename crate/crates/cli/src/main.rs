mod commands;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use svt_core::Error;

#[derive(Parser)]
#[command(name = "svt", version, about = "Sparse singular value transformation toolkit")]
struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add wall-clock time to the report (makes reports run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormArg {
    Exact,
    Triangle,
}

#[derive(Subcommand)]
pub enum Command {
    /// Estimate v^† P(sqrt(A^†A)) u by sampling v.
    Estimate {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.01)]
        fail_prob: f64,
        /// Distortion of the sampler for v (seeded pattern).
        #[arg(long, default_value_t = 0.0)]
        zeta: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Decide whether A has a singular value in [t1, t2].
    Sve {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        #[arg(long)]
        theta1: f64,
        #[arg(long)]
        theta2: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.01)]
        fail_prob: f64,
        #[arg(long, default_value_t = 0.0)]
        zeta: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Decide lambda_H <= a (LOW) versus lambda_H >= b (HIGH).
    GlhDecide {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.01)]
        fail_prob: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Estimate lambda_H to additive precision eps.
    GlhEstimate {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.01)]
        fail_prob: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Build the accepting/rejecting guided Hamiltonian pair of a circuit.
    GenKitaev {
        #[arg(long)]
        circuit: PathBuf,
        /// Input bits of the accepting instance, e.g. `01`.
        #[arg(long)]
        x_yes: String,
        #[arg(long)]
        x_no: String,
        /// Idle steps before the gates (power of two).
        #[arg(long, default_value_t = 2)]
        idle: usize,
        #[arg(long)]
        penalty: Option<f64>,
        #[arg(long, value_enum, default_value_t = NormArg::Exact)]
        normalization: NormArg,
        /// Output directory for yes.ham, yes.u, no.ham, no.u and thresholds.
        #[arg(long)]
        dir: PathBuf,
    },
    /// Cross-check the fast routines against the dense oracle on a fixture
    /// directory of `<name>.matrix` (+ `.u`, `.poly`) and `<name>.ham` files.
    OracleCheck {
        #[arg(long)]
        fixtures: PathBuf,
    },
    /// Query-count sweep over sparsity, degree and dimension.
    Bench {
        /// Grid such as `s=2..4,d=1..3,n=16..256`.
        #[arg(long, default_value = "")]
        sweep: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the CSV here instead of after the report.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

pub enum Outcome {
    Clean,
    Warnings,
    Inconsistent,
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Inconsistency(_) | Error::Construction(_) | Error::InvalidSampler(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global() {
        eprintln!("error: cannot start worker pool: {e}");
        return ExitCode::from(2);
    }
    match commands::run(cli.command, cli.timing) {
        Ok((text, outcome)) => {
            print!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(match outcome {
                Outcome::Clean => 0,
                Outcome::Warnings => 1,
                Outcome::Inconsistent => 3,
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
