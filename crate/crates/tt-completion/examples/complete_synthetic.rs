//! Tensor completion from partial observations with the TT alternating
//! least-squares solver.
//!
//! Generates an exact-TT-rank tensor, hides half of its entries, recovers
//! it, and prints the per-sweep convergence trace.
//!
//! ```bash
//! cargo run --release --example complete_synthetic
//! ```

use tt_completion::experiments::{bernoulli_mask, random_tt_tensor, reme};
use tt_completion::{tcam_tt, Result, SolverConfig};

fn main() -> Result<()> {
    println!("{}", "=".repeat(72));
    println!("TT completion on a synthetic instance");
    println!("{}", "=".repeat(72));

    let shape = [8usize, 8, 8, 8];
    let rank = [1usize, 2, 4, 2, 1];
    let truth = random_tt_tensor(&shape, &rank, 42)?;
    let mask = bernoulli_mask(&shape, 0.5, 43)?;
    println!(
        "shape {:?}, TT-rank {:?}, observed {}/{} entries ({:.1}%)",
        shape,
        rank,
        mask.observed_count(),
        mask.len(),
        100.0 * mask.observation_ratio()
    );

    let cfg = SolverConfig::default();
    let report = tcam_tt(&truth, &mask, &rank, &cfg)?;

    println!("\nsweep | relative core change | masked residual^2");
    for (i, (eps, obj)) in report
        .epsilon_trace
        .iter()
        .zip(&report.objective_trace)
        .enumerate()
    {
        println!("{:>5} | {:>20.6e} | {:>17.6e}", i + 1, eps, obj);
    }

    let err = reme(&truth, &report.recovered, &mask)?;
    println!("\nconverged: {} after {} sweeps", report.converged, report.iterations);
    println!("recovery error at missing entries: {err:.3e}");

    // The same instance with only a fifth of the entries observed is harder.
    let sparse_mask = bernoulli_mask(&shape, 0.2, 44)?;
    let sparse = tcam_tt(&truth, &sparse_mask, &rank, &cfg)?;
    let sparse_err = reme(&truth, &sparse.recovered, &sparse_mask)?;
    println!(
        "\nat 20% observation: {} sweeps, recovery error {:.3e}",
        sparse.iterations, sparse_err
    );

    // Per-sweep cost grows like n * P * r^4: quartic in the uniform rank,
    // linear in the observed count.
    println!("\nper-sweep cost at 50% observation (uniform rank r):");
    println!("{:>3} | {:>12}", "r", "ms per sweep");
    for r in [2usize, 4, 6, 8] {
        let rank = [1, r, r, r, 1];
        let truth = random_tt_tensor(&shape, &rank, 50 + r as u64)?;
        let started = std::time::Instant::now();
        let report = tcam_tt(&truth, &mask, &rank, &cfg)?;
        let per_sweep = started.elapsed().as_secs_f64() * 1e3 / report.iterations.max(1) as f64;
        println!("{r:>3} | {per_sweep:>12.2}");
    }
    Ok(())
}
