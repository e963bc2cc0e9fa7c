//! Tensor completion in the tensor-train (matrix product state) format.
//!
//! The crate recovers a partially observed tensor under a fixed TT-rank by
//! alternating least squares over the cores of its MPS representation:
//!
//! 1. a truncated-SVD sweep builds a TT approximation of the zero-filled
//!    observations ([`tt_approximate`]),
//! 2. cyclic Gauss–Seidel sweeps re-solve one core at a time, where each core
//!    splits into independent per-slice least-squares problems over the
//!    observed entries ([`tcam_tt`]),
//! 3. the recovered tensor is the reconstruction of the final chain.
//!
//! A matricization baseline ([`tmm_complete`]) completes one tensor-mode
//! matricization by matrix-factor alternating minimization, and the
//! [`experiments`] module generates synthetic instances, Bernoulli masks and
//! recovery-error sweeps reproducibly.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --release --example tt_approximate
//! cargo run --release --example complete_synthetic
//! cargo run --release --example tmm_baseline
//! cargo run --release --example recovery_sweep
//! cargo run --release --example tensor_files
//! ```
//!
//! A thin CLI (`ttc`) exposes the same capabilities as subcommands; see the
//! README for the file formats it reads and writes.

pub mod cli;
pub mod completion;
mod error;
pub mod experiments;
mod linalg;
pub mod io;
pub mod tensor;
pub mod tmm;
pub mod tt;
pub mod tt_svd;

pub use completion::{
    environment_slices, epsilon, masked_objective, solve_slice, tcam_tt, update_core,
    CompletionReport, SolverConfig, SolverState,
};
pub use error::{ChainViolation, Error, Result};
pub use experiments::{
    bernoulli_mask, random_tt_chain, random_tt_tensor, reme, run_sweep, Method, SweepPlan,
    SweepResult, SweepRow,
};
pub use tensor::{DenseTensor, Matrix, ObservationMask};
pub use tmm::{tmm_complete, TmmConfig};
pub use tt::{connect_product, RotatedChain, TTCore, TTTensor};
pub use tt_svd::{truncated_svd, tt_approximate, SVDResult};
