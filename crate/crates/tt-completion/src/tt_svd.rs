//! Rank-truncated SVD and the sequential-SVD sweep that builds a TT
//! approximation of a dense tensor. The sweep is the spectral initializer
//! for the completion solver.

use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::{DenseTensor, Matrix};
use crate::tt::{TTCore, TTTensor};

/// Relative cutoff below which singular values are treated as zero, both for
/// the numerical rank here and for the minimum-norm least-squares solves in
/// the completion solver.
pub const SINGULAR_VALUE_CUTOFF: f64 = 1e-12;

/// A rank-truncated singular value decomposition `m ~ u * diag(s) * v^T`.
///
/// `u` is `rows x k` with orthonormal columns, `v` is `cols x k`, and `s`
/// holds the `k` kept singular values in nonincreasing order. `k` is
/// `min(requested, rows, cols, numerical rank)`, except that a single zero
/// component is kept for an identically zero matrix so the factorization
/// stays well-formed.
#[derive(Debug, Clone)]
pub struct SVDResult {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl SVDResult {
    /// Number of kept components.
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// Kept components whose singular value clears the relative cutoff;
    /// 0 for a zero matrix. Callers pad cores with zeros beyond this.
    pub fn effective_rank(&self) -> usize {
        let sigma_max = self.s.first().copied().unwrap_or(0.0);
        self.s
            .iter()
            .filter(|&&s| s > SINGULAR_VALUE_CUTOFF * sigma_max && s > 0.0)
            .count()
    }

    /// `u * diag(s) * v^T`, the rank-`k` approximation itself.
    pub fn reconstruct(&self) -> Matrix {
        let k = self.rank();
        Matrix::from_fn(self.u.rows(), self.v.rows(), |r, c| {
            (0..k)
                .map(|j| self.u.get(r, j) * self.s[j] * self.v.get(c, j))
                .sum()
        })
    }
}

/// Truncated SVD keeping at most `r` components.
pub fn truncated_svd(m: &Matrix, r: usize) -> Result<SVDResult> {
    if r == 0 {
        return Err(Error::InvalidRank("requested SVD rank must be >= 1".into()));
    }
    let full = linalg::thin_svd(m)?;

    let sigma_max = full.s.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        // Identically zero matrix: one zero component on deterministic axes.
        let mut u = Matrix::zeros(m.rows(), 1);
        u.set(0, 0, 1.0);
        let mut v = Matrix::zeros(m.cols(), 1);
        v.set(0, 0, 1.0);
        return Ok(SVDResult { u, s: vec![0.0], v });
    }

    let numerical_rank = full
        .s
        .iter()
        .filter(|&&s| s > SINGULAR_VALUE_CUTOFF * sigma_max)
        .count();
    let keep = r.min(m.rows()).min(m.cols()).min(numerical_rank.max(1));

    let mut u = Matrix::zeros(m.rows(), keep);
    let mut v = Matrix::zeros(m.cols(), keep);
    let mut s = Vec::with_capacity(keep);
    for j in 0..keep {
        s.push(full.s[j]);
        // Sign convention: the largest-magnitude component of each left
        // vector is made positive (first such component wins ties).
        let mut arg = 0;
        let mut best = 0.0f64;
        for i in 0..m.rows() {
            let a = full.u.get(i, j).abs();
            if a > best {
                best = a;
                arg = i;
            }
        }
        let flip = if full.u.get(arg, j) < 0.0 { -1.0 } else { 1.0 };
        for i in 0..m.rows() {
            u.set(i, j, flip * full.u.get(i, j));
        }
        for c in 0..m.cols() {
            v.set(c, j, flip * full.v.get(c, j));
        }
    }
    Ok(SVDResult { u, s, v })
}

/// Reshape that carries the rank index into the row block of the next mode:
/// the `r x (i_dim * rest)` matrix `m` becomes `(r * i_dim) x rest` with
/// `out(a + i*r, j) = m(a, i + j*i_dim)`.
fn reshape_carry(m: &Matrix, r: usize, i_dim: usize) -> Matrix {
    debug_assert_eq!(m.rows(), r);
    debug_assert_eq!(m.cols() % i_dim, 0);
    let rest = m.cols() / i_dim;
    Matrix::from_fn(r * i_dim, rest, |row, j| {
        let a = row % r;
        let i = row / r;
        m.get(a, i + j * i_dim)
    })
}

pub(crate) fn check_rank_vector(order: usize, rank: &[usize]) -> Result<()> {
    if rank.len() != order + 1 {
        return Err(Error::InvalidRank(format!(
            "rank vector must have length {} for an order-{} tensor, got {}",
            order + 1,
            order,
            rank.len()
        )));
    }
    if rank[0] != 1 || rank[order] != 1 {
        return Err(Error::InvalidRank(format!(
            "boundary ranks must be 1, got r_0 = {} and r_n = {}",
            rank[0], rank[order]
        )));
    }
    if rank.contains(&0) {
        return Err(Error::InvalidRank("all ranks must be >= 1".into()));
    }
    Ok(())
}

/// Sequential-SVD tensor train approximation at a fixed TT-rank.
///
/// Matricizes along mode 1, truncates the SVD at `rank[1]`, folds the left
/// factor into the first core, carries `diag(s) * v^T` forward, and repeats
/// through the modes. Cores are zero-padded wherever the working matrix has
/// smaller numerical rank than requested, so the returned chain always has
/// exactly the requested TT-rank.
pub fn tt_approximate(t: &DenseTensor, rank: &[usize]) -> Result<TTTensor> {
    let n = t.order();
    check_rank_vector(n, rank)?;

    if n == 1 {
        let core = TTCore::new(1, t.shape()[0], 1, t.data().to_vec())?;
        return TTTensor::new(vec![core]);
    }

    let mut cores: Vec<TTCore> = Vec::with_capacity(n);
    let mut work = t.matricize(1)?;
    for k in 1..n {
        let i_dim = t.shape()[k - 1];
        debug_assert_eq!(work.rows(), rank[k - 1] * i_dim);
        let svd = truncated_svd(&work, rank[k])?;
        let eff = svd.effective_rank().min(rank[k]);

        // Left factor, zero-padded to the requested rank.
        let mut u_pad = Matrix::zeros(work.rows(), rank[k]);
        for j in 0..eff {
            for i in 0..work.rows() {
                u_pad.set(i, j, svd.u.get(i, j));
            }
        }
        cores.push(TTCore::left_fold(&u_pad, rank[k - 1], i_dim, rank[k])?);

        // Carry matrix diag(s) * v^T, zero-padded to the requested rank.
        let mut carry = Matrix::zeros(rank[k], work.cols());
        for j in 0..eff {
            for c in 0..work.cols() {
                carry.set(j, c, svd.s[j] * svd.v.get(c, j));
            }
        }

        work = if k < n - 1 {
            reshape_carry(&carry, rank[k], t.shape()[k])
        } else {
            carry
        };
    }
    cores.push(TTCore::right_fold(&work, rank[n - 1], t.shape()[n - 1], 1)?);
    TTTensor::new(cores)
}
