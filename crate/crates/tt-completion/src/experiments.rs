//! Synthetic instance generation, Bernoulli masking, the recovery-error
//! metric, and deterministic sweep orchestration.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`; chain cores
//! are sampled entry by entry in storage order from the standard normal
//! distribution, mask bits in lexicographic entry order. A sweep derives one
//! instance seed per (ratio, trial) cell from the plan's base seed, so every
//! method sees the same instances and replays are bit-identical.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::completion::{tcam_tt, SolverConfig};
use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, ObservationMask};
use crate::tmm::{tmm_complete, TmmConfig};
use crate::tt::{TTCore, TTTensor};
use crate::tt_svd::check_rank_vector;

/// Random TT chain with independent standard-normal core entries.
pub fn random_tt_chain(shape: &[usize], rank: &[usize], seed: u64) -> Result<TTTensor> {
    check_rank_vector(shape.len(), rank)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cores = shape
        .iter()
        .enumerate()
        .map(|(k, &i_dim)| {
            let len = rank[k] * i_dim * rank[k + 1];
            let data: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
            TTCore::new(rank[k], i_dim, rank[k + 1], data)
        })
        .collect::<Result<Vec<_>>>()?;
    TTTensor::new(cores)
}

/// Dense tensor of exact TT-rank `rank`, reconstructed from a random chain.
pub fn random_tt_tensor(shape: &[usize], rank: &[usize], seed: u64) -> Result<DenseTensor> {
    Ok(random_tt_chain(shape, rank, seed)?.reconstruct())
}

/// Mask with i.i.d. observation probability `p` per entry.
pub fn bernoulli_mask(shape: &[usize], p: f64, seed: u64) -> Result<ObservationMask> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!(
            "observation probability must be in [0, 1], got {p}"
        )));
    }
    let len: usize = shape.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = (0..len).map(|_| rng.gen::<f64>() < p).collect();
    ObservationMask::new(shape.to_vec(), bits)
}

/// Recovery error at missing entries: the relative Frobenius error of the
/// recovered tensor restricted to unobserved positions. Returns 0 when
/// nothing is missing; a missing part of the reference that is identically
/// zero has no meaningful scale and is reported as an error.
pub fn reme(
    original: &DenseTensor,
    recovered: &DenseTensor,
    mask: &ObservationMask,
) -> Result<f64> {
    if original.shape() != recovered.shape() || mask.shape() != original.shape() {
        return Err(Error::ShapeMismatch(
            "original, recovered, and mask shapes must agree".into(),
        ));
    }
    if mask.observed_count() == mask.len() {
        return Ok(0.0);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for flat in 0..original.len() {
        if !mask.is_observed(flat) {
            let o = original.data()[flat];
            let r = recovered.data()[flat];
            num += (o - r) * (o - r);
            den += o * o;
        }
    }
    if den == 0.0 {
        return Err(Error::DegenerateReme);
    }
    Ok(num.sqrt() / den.sqrt())
}

/// A completion method a sweep can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    TcamTt,
    /// Matricization baseline at the given split (1-based, `1..order`).
    Tmm(usize),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::TcamTt => "tcam-tt".to_string(),
            Method::Tmm(split) => format!("tmm{split}"),
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        let s = s.trim();
        if s == "tcam-tt" {
            return Ok(Method::TcamTt);
        }
        if let Some(rest) = s.strip_prefix("tmm") {
            if let Ok(split) = rest.parse::<usize>() {
                if split >= 1 {
                    return Ok(Method::Tmm(split));
                }
            }
        }
        Err(Error::InvalidConfig(format!(
            "unknown method '{s}' (expected tcam-tt or tmm<split>)"
        )))
    }
}

/// Everything a (method x ratio x trial) sweep needs.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub shape: Vec<usize>,
    pub rank: Vec<usize>,
    /// Observation ratios, each in (0, 1].
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed_base: u64,
    pub config: SolverConfig,
    /// Iteration cap for the matricization baseline, which typically needs
    /// far more sweeps than the TT solver to settle.
    pub tmm_max_iter: usize,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        check_rank_vector(self.shape.len(), &self.rank)?;
        if self.ratios.is_empty()
            || self.ratios.iter().any(|&p| p.is_nan() || p <= 0.0 || p > 1.0)
        {
            return Err(Error::InvalidConfig(
                "ratios must be nonempty with every value in (0, 1]".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("methods must be nonempty".into()));
        }
        for m in &self.methods {
            if let Method::Tmm(split) = m {
                if *split == 0 || *split >= self.shape.len() {
                    return Err(Error::InvalidSplit {
                        split: *split,
                        order: self.shape.len(),
                    });
                }
            }
        }
        self.config.validate()?;
        if self.tmm_max_iter == 0 {
            return Err(Error::InvalidConfig("tmm_max_iter must be >= 1".into()));
        }
        Ok(())
    }

    /// Instance seeds for a (ratio, trial) cell, independent of the method
    /// so all methods complete the same instances.
    fn instance_seeds(&self, ratio_index: usize, trial: usize) -> (u64, u64) {
        let instance = (ratio_index * self.trials + trial) as u64;
        (self.seed_base ^ (2 * instance), self.seed_base ^ (2 * instance + 1))
    }
}

/// One completed sweep cell.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub method: String,
    pub obs_ratio: f64,
    pub trial: usize,
    pub iterations: usize,
    /// Recovery error at missing entries; +inf records a failed run.
    pub reme: f64,
    pub seconds: f64,
}

/// All rows of a sweep, ordered by (method, ratio, trial).
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Run every (method, ratio, trial) cell of the plan. Individual failures
/// do not abort the sweep; they are recorded with `reme = +inf`.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let mut rows =
        Vec::with_capacity(plan.methods.len() * plan.ratios.len() * plan.trials);
    for method in &plan.methods {
        for (ratio_index, &ratio) in plan.ratios.iter().enumerate() {
            for trial in 0..plan.trials {
                let (tensor_seed, mask_seed) = plan.instance_seeds(ratio_index, trial);
                let start = Instant::now();
                let outcome = run_cell(plan, *method, ratio, tensor_seed, mask_seed);
                let seconds = start.elapsed().as_secs_f64();
                let (iterations, reme_value) = outcome.unwrap_or((0, f64::INFINITY));
                rows.push(SweepRow {
                    method: method.label(),
                    obs_ratio: ratio,
                    trial,
                    iterations,
                    reme: reme_value,
                    seconds,
                });
            }
        }
    }
    Ok(SweepResult { rows })
}

fn run_cell(
    plan: &SweepPlan,
    method: Method,
    ratio: f64,
    tensor_seed: u64,
    mask_seed: u64,
) -> Result<(usize, f64)> {
    let truth = random_tt_tensor(&plan.shape, &plan.rank, tensor_seed)?;
    let mask = bernoulli_mask(&plan.shape, ratio, mask_seed)?;
    let report = match method {
        Method::TcamTt => tcam_tt(&truth, &mask, &plan.rank, &plan.config)?,
        Method::Tmm(split) => tmm_complete(
            &truth,
            &mask,
            &TmmConfig {
                split,
                rank: plan.rank[split],
                tol: plan.config.tol,
                max_iter: plan.tmm_max_iter,
            },
        )?,
    };
    let err = reme(&truth, &report.recovered, &mask)?;
    Ok((report.iterations, err))
}
