//! Matrix-completion baseline: alternating minimization on one tensor mode
//! matricization.
//!
//! The tensor is flattened at a single split position, completed as a
//! rank-`r` matrix factorization `U * V^T` by exact row-wise least squares,
//! and folded back. It shares the spectral initialization, the pseudo-inverse
//! cutoff, and the empty-row rule with the TT solver so the two are directly
//! comparable; for order-2 tensors the two solvers coincide.

use crate::completion::CompletionReport;
use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::{DenseTensor, Matrix, ObservationMask};
use crate::tt_svd::{truncated_svd, SINGULAR_VALUE_CUTOFF};

/// Parameters of the matricization baseline.
#[derive(Debug, Clone)]
pub struct TmmConfig {
    /// Split position of the matricization: the number of leading modes
    /// flattened into rows, `1..=order-1`.
    pub split: usize,
    /// Factorization rank, normally the TT-rank entry at the split.
    pub rank: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl TmmConfig {
    pub fn new(split: usize, rank: usize) -> Self {
        Self {
            split,
            rank,
            tol: 1e-4,
            max_iter: 100,
        }
    }

    fn validate(&self, order: usize) -> Result<()> {
        if self.split == 0 || self.split >= order {
            return Err(Error::InvalidSplit {
                split: self.split,
                order,
            });
        }
        if self.rank == 0 {
            return Err(Error::InvalidRank("factorization rank must be >= 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_iter == 0 {
            return Err(Error::InvalidConfig(
                "tol must be > 0 and max_iter >= 1".into(),
            ));
        }
        Ok(())
    }
}

fn relative_change(prev: &Matrix, next: &Matrix) -> f64 {
    let num = prev
        .data()
        .iter()
        .zip(next.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den = prev.frobenius_norm();
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            num
        }
    } else {
        num / den
    }
}

/// Complete a masked tensor through one mode matricization.
pub fn tmm_complete(
    data: &DenseTensor,
    mask: &ObservationMask,
    cfg: &TmmConfig,
) -> Result<CompletionReport> {
    if mask.shape() != data.shape() {
        return Err(Error::ShapeMismatch(format!(
            "mask shape {:?} does not match data shape {:?}",
            mask.shape(),
            data.shape()
        )));
    }
    cfg.validate(data.order())?;

    let zero_filled = mask.apply(data)?;
    let m = zero_filled.matricize(cfg.split)?;
    let (rows, cols) = (m.rows(), m.cols());
    // The matricization is a bijection on entries: (r, c) <-> flat r + c*rows.
    let observed = |r: usize, c: usize| mask.is_observed(r + c * rows);

    // Spectral initialization from the zero-filled matricization, with the
    // same U-orthonormal / V-carries-the-scale convention as the TT sweep.
    let svd = truncated_svd(&m, cfg.rank)?;
    let eff = svd.effective_rank().min(cfg.rank);
    let mut u = Matrix::zeros(rows, cfg.rank);
    let mut v = Matrix::zeros(cols, cfg.rank);
    for j in 0..eff {
        for r in 0..rows {
            u.set(r, j, svd.u.get(r, j));
        }
        for c in 0..cols {
            v.set(c, j, svd.s[j] * svd.v.get(c, j));
        }
    }

    let masked_objective = |u: &Matrix, v: &Matrix| -> f64 {
        let mut total = 0.0;
        for c in 0..cols {
            for r in 0..rows {
                if observed(r, c) {
                    let fit: f64 = (0..cfg.rank).map(|j| u.get(r, j) * v.get(c, j)).sum();
                    total += (fit - m.get(r, c)) * (fit - m.get(r, c));
                }
            }
        }
        total
    };

    let mut epsilon_trace = Vec::new();
    let mut objective_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        let u_prev = u.clone();
        let v_prev = v.clone();

        // Row update: each row of U from its observed columns.
        for r in 0..rows {
            let mut design = Vec::new();
            let mut rhs = Vec::new();
            for c in 0..cols {
                if observed(r, c) {
                    for j in 0..cfg.rank {
                        design.push(v.get(c, j));
                    }
                    rhs.push(m.get(r, c));
                }
            }
            if rhs.is_empty() {
                continue;
            }
            let a = Matrix::new(rhs.len(), cfg.rank, design)?;
            let row = linalg::solve_min_norm(&a, &rhs, SINGULAR_VALUE_CUTOFF)?;
            for j in 0..cfg.rank {
                u.set(r, j, row[j]);
            }
        }

        // Column update: each row of V from its observed rows.
        for c in 0..cols {
            let mut design = Vec::new();
            let mut rhs = Vec::new();
            for r in 0..rows {
                if observed(r, c) {
                    for j in 0..cfg.rank {
                        design.push(u.get(r, j));
                    }
                    rhs.push(m.get(r, c));
                }
            }
            if rhs.is_empty() {
                continue;
            }
            let a = Matrix::new(rhs.len(), cfg.rank, design)?;
            let row = linalg::solve_min_norm(&a, &rhs, SINGULAR_VALUE_CUTOFF)?;
            for j in 0..cfg.rank {
                v.set(c, j, row[j]);
            }
        }

        iterations += 1;
        let eps = relative_change(&u_prev, &u) + relative_change(&v_prev, &v);
        epsilon_trace.push(eps);
        objective_trace.push(masked_objective(&u, &v));
        if eps <= cfg.tol {
            converged = true;
            break;
        }
    }

    let product = Matrix::from_fn(rows, cols, |r, c| {
        (0..cfg.rank).map(|j| u.get(r, j) * v.get(c, j)).sum()
    });
    let recovered = DenseTensor::from_matricized(&product, data.shape().to_vec(), cfg.split)?;

    Ok(CompletionReport {
        recovered,
        iterations,
        epsilon_trace,
        objective_trace,
        converged,
        reme: None,
    })
}
