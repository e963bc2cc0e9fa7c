//! Command-line surface: one subcommand per capability, delegating to the
//! library. Exit status 0 on success, 1 with a one-line diagnostic on
//! stderr otherwise. Runs are reproducible from flags and seeds alone; no
//! environment variables are consulted.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::completion::{tcam_tt, SolverConfig};
use crate::error::{Error, Result};
use crate::experiments::{bernoulli_mask, random_tt_tensor, reme, run_sweep};
use crate::io;
use crate::tensor::ObservationMask;
use crate::tmm::{tmm_complete, TmmConfig};
use crate::tt_svd::tt_approximate;

#[derive(Parser)]
#[command(
    name = "ttc",
    version,
    about = "Tensor completion in the tensor-train format",
    long_about = "Generate synthetic exact-TT-rank tensors, mask them, approximate or \
                  complete them under the TT model, score recoveries, and run full \
                  recovery sweeps."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic tensor of exact TT-rank from standard-normal cores
    Synth(SynthArgs),
    /// Generate a Bernoulli observation mask
    Mask(MaskArgs),
    /// Fixed-rank TT approximation of a dense tensor
    Approx(ApproxArgs),
    /// Complete a partially observed tensor
    Complete(CompleteArgs),
    /// Recovery error at missing entries of a recovered tensor
    Reme(RemeArgs),
    /// Run a sweep plan and write one CSV row per (method, ratio, trial)
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Mode sizes, e.g. 8,8,8,8
    #[arg(long, value_delimiter = ',', required = true)]
    shape: Vec<usize>,
    /// TT-rank vector including the boundary 1s, e.g. 1,2,4,2,1
    #[arg(long, value_delimiter = ',', required = true)]
    rank: Vec<usize>,
    #[arg(long)]
    seed: u64,
    /// Output tensor file
    #[arg(long)]
    out: PathBuf,
    /// Write the binary format instead of text
    #[arg(long)]
    binary: bool,
}

#[derive(Args)]
struct MaskArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    shape: Vec<usize>,
    /// Observation probability in [0, 1] (fraction of entries kept)
    #[arg(long)]
    obs_ratio: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    binary: bool,
}

#[derive(Args)]
struct ApproxArgs {
    /// Input tensor file
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    rank: Vec<usize>,
    /// Write the reconstructed approximation here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the relative reconstruction error here ('-' for stdout)
    #[arg(long)]
    out_reme: Option<String>,
}

#[derive(Args)]
struct CompleteArgs {
    /// Input tensor file (unobserved entries are ignored per the mask)
    #[arg(long = "in")]
    input: PathBuf,
    /// Observation mask file; omitted means fully observed
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    rank: Vec<usize>,
    /// Solver: tcam-tt or tmm
    #[arg(long, default_value = "tcam-tt")]
    method: String,
    /// Matricization split for --method tmm (1-based)
    #[arg(long)]
    split: Option<usize>,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,
    /// Write the recovered tensor here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ground-truth tensor; adds the recovery error to the report
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct RemeArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    recovered: PathBuf,
    #[arg(long)]
    mask: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep plan file (key = value lines)
    #[arg(long)]
    plan: PathBuf,
    /// Output CSV
    #[arg(long)]
    out: PathBuf,
}

/// Entry point for the `ttc` binary; returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version output and exit codes.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth(args) => synth(args),
        Command::Mask(args) => mask(args),
        Command::Approx(args) => approx(args),
        Command::Complete(args) => complete(args),
        Command::Reme(args) => reme_cmd(args),
        Command::Sweep(args) => sweep(args),
    }
}

fn synth(args: SynthArgs) -> Result<()> {
    let t = random_tt_tensor(&args.shape, &args.rank, args.seed)?;
    if args.binary {
        io::write_tensor_binary(&args.out, &t)
    } else {
        io::write_tensor(&args.out, &t)
    }
}

fn mask(args: MaskArgs) -> Result<()> {
    let m = bernoulli_mask(&args.shape, args.obs_ratio, args.seed)?;
    if args.binary {
        io::write_mask_binary(&args.out, &m)
    } else {
        io::write_mask(&args.out, &m)
    }
}

fn approx(args: ApproxArgs) -> Result<()> {
    let t = io::read_tensor(&args.input)?;
    let chain = tt_approximate(&t, &args.rank)?;
    let recon = chain.reconstruct();
    if let Some(out) = &args.out {
        io::write_tensor(out, &recon)?;
    }
    if let Some(target) = &args.out_reme {
        let norm = t.frobenius_norm();
        let err: f64 = t
            .data()
            .iter()
            .zip(recon.data())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let rel = if norm == 0.0 { 0.0 } else { err / norm };
        write_value(target, &format!("{rel:e}\n"))?;
    }
    Ok(())
}

fn complete(args: CompleteArgs) -> Result<()> {
    let data = io::read_tensor(&args.input)?;
    let mask = match &args.mask {
        Some(path) => io::read_mask(path)?,
        None => ObservationMask::all_observed(data.shape().to_vec())?,
    };
    let report = match args.method.as_str() {
        "tcam-tt" => {
            let cfg = SolverConfig {
                tol: args.tol,
                max_iter: args.max_iter,
                ridge: args.ridge,
                seed: None,
            };
            tcam_tt(&data, &mask, &args.rank, &cfg)?
        }
        "tmm" => {
            let split = args.split.ok_or_else(|| {
                Error::InvalidConfig("--method tmm requires --split".into())
            })?;
            if args.ridge != 0.0 {
                return Err(Error::InvalidConfig(
                    "--ridge applies to tcam-tt only".into(),
                ));
            }
            if split == 0 || split >= args.rank.len().saturating_sub(1) {
                return Err(Error::InvalidSplit {
                    split,
                    order: data.order(),
                });
            }
            let cfg = TmmConfig {
                split,
                rank: args.rank[split],
                tol: args.tol,
                max_iter: args.max_iter,
            };
            tmm_complete(&data, &mask, &cfg)?
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected tcam-tt or tmm)"
            )))
        }
    };

    println!("iterations: {}", report.iterations);
    println!("converged: {}", report.converged);
    if let Some(eps) = report.epsilon_trace.last() {
        println!("epsilon: {eps:e}");
    }
    if let Some(obj) = report.objective_trace.last() {
        println!("objective: {obj:e}");
    }
    if let Some(truth_path) = &args.truth {
        let truth = io::read_tensor(truth_path)?;
        let err = reme(&truth, &report.recovered, &mask)?;
        println!("reme: {err:e}");
    }
    if let Some(out) = &args.out {
        io::write_tensor(out, &report.recovered)?;
    }
    Ok(())
}

fn reme_cmd(args: RemeArgs) -> Result<()> {
    let truth = io::read_tensor(&args.truth)?;
    let recovered = io::read_tensor(&args.recovered)?;
    let mask = io::read_mask(&args.mask)?;
    let err = reme(&truth, &recovered, &mask)?;
    println!("{err:e}");
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let plan = io::read_plan(&args.plan)?;
    let result = run_sweep(&plan)?;
    io::write_sweep_csv(&args.out, &result)
}

fn write_value(target: &str, content: &str) -> Result<()> {
    if target == "-" {
        print!("{content}");
        std::io::stdout().flush().map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        })
    } else {
        io::write_atomic(Path::new(target), content.as_bytes())
    }
}
