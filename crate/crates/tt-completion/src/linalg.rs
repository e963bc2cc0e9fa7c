//! Dense SVD and minimum-norm least-squares kernels.
//!
//! The SVD is a one-sided Jacobi iteration: columns of the working matrix
//! are pairwise orthogonalized by plane rotations until every pair is
//! numerically orthogonal. Unlike bidiagonalization-based routines it keeps
//! high relative accuracy on exactly rank-deficient inputs, which the TT
//! sweep and the per-slice solvers depend on, and it is deterministic.

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Hard cap on Jacobi sweeps; convergence is quadratic and random desk-scale
/// matrices settle in well under ten.
const MAX_SWEEPS: usize = 64;

/// Thin singular value decomposition `a = u * diag(s) * v^T` with
/// `k = min(rows, cols)` components, `s` sorted nonincreasing.
///
/// Columns of `u` for zero singular values are zero vectors; callers that
/// need an orthonormal basis clamp at the numerical rank first.
pub(crate) struct ThinSvd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

pub(crate) fn thin_svd(a: &Matrix) -> Result<ThinSvd> {
    if a.rows() >= a.cols() {
        thin_svd_tall(a)
    } else {
        let t = thin_svd_tall(&a.transpose())?;
        Ok(ThinSvd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

fn thin_svd_tall(a: &Matrix) -> Result<ThinSvd> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);

    // Column-major working copies: w holds the rotated columns of `a`,
    // v accumulates the right rotations starting from the identity.
    let mut w = vec![0.0f64; m * n];
    for r in 0..m {
        for c in 0..n {
            w[c * m + r] = a.get(r, c);
        }
    }
    let mut v = vec![0.0f64; n * n];
    for d in 0..n {
        v[d * n + d] = 1.0;
    }

    let tol2 = 4.0 * f64::EPSILON * f64::EPSILON;
    // Columns whose norm falls below the roundoff floor of the whole matrix
    // are numerically zero; rotating against them only chases noise and
    // stalls convergence on exactly rank-deficient inputs.
    let norm2: f64 = w.iter().map(|x| x * x).sum();
    let floor2 = f64::EPSILON * f64::EPSILON * norm2;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let wp = &w[p * m..(p + 1) * m];
                    let wq = &w[q * m..(q + 1) * m];
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for i in 0..m {
                        alpha += wp[i] * wp[i];
                        beta += wq[i] * wq[i];
                        gamma += wp[i] * wq[i];
                    }
                    (alpha, beta, gamma)
                };
                if alpha <= floor2 || beta <= floor2 {
                    continue;
                }
                if gamma == 0.0 || gamma * gamma <= tol2 * alpha * beta {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, m, p, q, c, s);
                rotate_pair(&mut v, n, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdFailure);
    }

    // Singular values are the column norms; normalize to get u.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|c| w[c * m..(c + 1) * m].iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap().then(x.cmp(&y)));

    let mut u = Matrix::zeros(m, n);
    let mut vv = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (j, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        if sigma > 0.0 {
            for i in 0..m {
                u.set(i, j, w[src * m + i] / sigma);
            }
        }
        for i in 0..n {
            vv.set(i, j, v[src * n + i]);
        }
    }
    Ok(ThinSvd { u, s, v: vv })
}

#[inline]
fn rotate_pair(cols: &mut [f64], len: usize, p: usize, q: usize, c: f64, s: f64) {
    debug_assert!(p < q);
    let (head, tail) = cols.split_at_mut(q * len);
    let cp = &mut head[p * len..(p + 1) * len];
    let cq = &mut tail[..len];
    for i in 0..len {
        let xp = cp[i];
        let xq = cq[i];
        cp[i] = c * xp - s * xq;
        cq[i] = s * xp + c * xq;
    }
}

/// Minimum-norm least-squares solution of `a x ~ b` through the
/// pseudo-inverse, treating singular values at or below
/// `rel_cutoff * sigma_max` as zero.
pub(crate) fn solve_min_norm(a: &Matrix, b: &[f64], rel_cutoff: f64) -> Result<Vec<f64>> {
    debug_assert_eq!(b.len(), a.rows());
    let svd = thin_svd(a)?;
    let sigma_max = svd.s.first().copied().unwrap_or(0.0);
    let mut x = vec![0.0; a.cols()];
    for (j, &sigma) in svd.s.iter().enumerate() {
        if sigma <= rel_cutoff * sigma_max || sigma == 0.0 {
            continue;
        }
        let mut coeff = 0.0;
        for (i, &bi) in b.iter().enumerate() {
            coeff += svd.u.get(i, j) * bi;
        }
        coeff /= sigma;
        for (r, xr) in x.iter_mut().enumerate() {
            *xr += coeff * svd.v.get(r, j);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruction_residual(a: &Matrix, svd: &ThinSvd) -> f64 {
        let k = svd.s.len();
        let mut res = 0.0f64;
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                let approx: f64 = (0..k)
                    .map(|j| svd.u.get(r, j) * svd.s[j] * svd.v.get(c, j))
                    .sum();
                res += (a.get(r, c) - approx).powi(2);
            }
        }
        res.sqrt()
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (rows, cols) in [(5, 5), (8, 3), (3, 8), (12, 7), (1, 6), (6, 1)] {
            let a = Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0));
            let svd = thin_svd(&a).unwrap();
            let norm = a.frobenius_norm();
            assert!(
                reconstruction_residual(&a, &svd) <= 1e-13 * norm.max(1.0),
                "{rows}x{cols}"
            );
            for j in 1..svd.s.len() {
                assert!(svd.s[j - 1] >= svd.s[j]);
            }
        }
    }

    #[test]
    fn svd_is_accurate_on_rank_deficient_matrices() {
        // The case that motivates the Jacobi kernel: products of thin random
        // factors must factor back with tiny residual and a clean rank gap.
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let left = Matrix::from_fn(6, 2, |_, _| rng.gen_range(-1.0..1.0));
            let right = Matrix::from_fn(2, 4, |_, _| rng.gen_range(-1.0..1.0));
            let a = left.matmul(&right).unwrap();
            let svd = thin_svd(&a).unwrap();
            assert!(reconstruction_residual(&a, &svd) <= 1e-13 * a.frobenius_norm());
            assert!(svd.s[2] <= 1e-13 * svd.s[0], "rank gap: {:?}", svd.s);
        }
    }

    #[test]
    fn svd_orthonormal_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = Matrix::from_fn(9, 4, |_, _| rng.gen_range(-1.0..1.0));
        let svd = thin_svd(&a).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let du: f64 = (0..9).map(|i| svd.u.get(i, x) * svd.u.get(i, y)).sum();
                let dv: f64 = (0..4).map(|i| svd.v.get(i, x) * svd.v.get(i, y)).sum();
                let want = if x == y { 1.0 } else { 0.0 };
                assert!((du - want).abs() < 1e-12);
                assert!((dv - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn svd_of_zero_matrix() {
        let a = Matrix::zeros(3, 2);
        let svd = thin_svd(&a).unwrap();
        assert_eq!(svd.s, vec![0.0, 0.0]);
    }

    #[test]
    fn min_norm_solves_determined_system() {
        // x = [2, -1] from an exactly determined tall system.
        let a = Matrix::new(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let b = [2.0, -1.0, 1.0];
        let x = solve_min_norm(&a, &b, 1e-12).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_norm_picks_shortest_solution() {
        // One equation, two unknowns: x0 + x1 = 2. Minimum-norm solution is
        // (1, 1).
        let a = Matrix::new(1, 2, vec![1.0, 1.0]).unwrap();
        let x = solve_min_norm(&a, &[2.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_norm_zeroes_tiny_directions() {
        // Second column is a 1e-14-scaled copy of the first; the cutoff must
        // suppress the wild pseudo-inverse direction.
        let a = Matrix::from_fn(4, 2, |r, c| {
            let base = (r + 1) as f64;
            if c == 0 {
                base
            } else {
                base * (1.0 + 1e-15)
            }
        });
        let b = [1.0, 2.0, 3.0, 4.0];
        let x = solve_min_norm(&a, &b, 1e-12).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e3), "cutoff failed: {x:?}");
    }
}
