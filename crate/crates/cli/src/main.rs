use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sass_cli::bench::BenchPath;
use sass_cli::commands;
use sass_cli::error::CliError;

/// Spectral adaptive state-space models: train, evaluate, verify, and
/// benchmark. Exit codes: 0 success, 1 suite failure, 2 usage or I/O error.
#[derive(Parser)]
#[command(name = "sass", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train a model from a `key = value` config file; writes a metrics CSV
    /// and a checkpoint, streaming the CSV to stdout.
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a checkpoint on a dataset file: accuracy and confusion
    /// counts as CSV.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Finite-difference gradient checks for every differentiable op and
    /// the full one-block model.
    Gradcheck {
        /// Random instances per op.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
    },
    /// Oracle equivalences: FFT vs direct DFT, convolution theorem, scan vs
    /// kernel convolution, saturated-gate parity, gate invariants.
    Oracle {
        /// Random cases per equivalence suite.
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// Fit a learned complex kernel to the unrolled kernel of a random
    /// stable (A, B, C, Δ) system; reports the L2 error before and after.
    KernelFit {
        /// State dimension N of the target system.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Kernel length L.
        #[arg(long, default_value_t = 128)]
        l: usize,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Time the spectral path against the direct O(L²) convolution and the
    /// recurrent scan; emits CSV records and fitted log-log slopes.
    Bench {
        /// Comma-separated: spectral,direct,scan.
        #[arg(long, value_delimiter = ',', default_value = "spectral,direct,scan")]
        paths: Vec<BenchPath>,
        /// Comma-separated sequence lengths.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "256,512,1024,2048,4096,8192"
        )]
        ls: Vec<usize>,
        #[arg(long, default_value_t = 9)]
        repeats: usize,
        /// Also write the CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Generate the dataset described by a config file and write it in the
    /// dataset file format.
    GenData {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Train { config } => commands::cmd_train(&config),
        Cmd::Eval {
            checkpoint,
            dataset,
        } => commands::cmd_eval(&checkpoint, &dataset),
        Cmd::Gradcheck { seeds } => commands::cmd_gradcheck(seeds),
        Cmd::Oracle { cases } => commands::cmd_oracle(cases),
        Cmd::KernelFit {
            n,
            l,
            steps,
            lr,
            seed,
        } => commands::cmd_kernel_fit(n, l, steps, lr, seed),
        Cmd::Bench {
            paths,
            ls,
            repeats,
            out,
            seed,
        } => commands::cmd_bench(&paths, &ls, repeats, out.as_deref(), seed),
        Cmd::GenData { config, out } => commands::cmd_gen_data(&config, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
