//! The tensor-train / matrix product state representation: order-3 cores,
//! left/right unfoldings, the connect product, and dense reconstruction.

use crate::error::{ChainViolation, Error, Result};
use crate::tensor::{decode_index, DenseTensor, Matrix};

/// One factor of an MPS chain: an order-3 array of shape
/// `(r_prev, i_dim, r_next)` whose slice at mode index `i` is the
/// `r_prev x r_next` matrix entering the entry product.
///
/// Entries are stored with the first index fastest, matching the tensor
/// vectorization convention.
#[derive(Debug, Clone, PartialEq)]
pub struct TTCore {
    r_prev: usize,
    i_dim: usize,
    r_next: usize,
    data: Vec<f64>,
}

impl TTCore {
    pub fn new(r_prev: usize, i_dim: usize, r_next: usize, data: Vec<f64>) -> Result<Self> {
        if r_prev == 0 || i_dim == 0 || r_next == 0 {
            return Err(Error::ShapeMismatch(format!(
                "core dimensions must be positive, got ({r_prev}, {i_dim}, {r_next})"
            )));
        }
        if data.len() != r_prev * i_dim * r_next {
            return Err(Error::ShapeMismatch(format!(
                "core ({r_prev}, {i_dim}, {r_next}) needs {} entries, got {}",
                r_prev * i_dim * r_next,
                data.len()
            )));
        }
        Ok(Self {
            r_prev,
            i_dim,
            r_next,
            data,
        })
    }

    pub fn zeros(r_prev: usize, i_dim: usize, r_next: usize) -> Self {
        Self {
            r_prev,
            i_dim,
            r_next,
            data: vec![0.0; r_prev * i_dim * r_next],
        }
    }

    pub fn from_fn(
        r_prev: usize,
        i_dim: usize,
        r_next: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut core = Self::zeros(r_prev, i_dim, r_next);
        for b in 0..r_next {
            for i in 0..i_dim {
                for a in 0..r_prev {
                    core.set(a, i, b, f(a, i, b));
                }
            }
        }
        core
    }

    pub fn r_prev(&self) -> usize {
        self.r_prev
    }

    pub fn i_dim(&self) -> usize {
        self.i_dim
    }

    pub fn r_next(&self) -> usize {
        self.r_next
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn offset(&self, a: usize, i: usize, b: usize) -> usize {
        debug_assert!(a < self.r_prev && i < self.i_dim && b < self.r_next);
        a + i * self.r_prev + b * self.r_prev * self.i_dim
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, b: usize) -> f64 {
        self.data[self.offset(a, i, b)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, i: usize, b: usize, v: f64) {
        let o = self.offset(a, i, b);
        self.data[o] = v;
    }

    /// The `r_prev x r_next` matrix slice at mode index `i`.
    pub fn slice(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.r_prev, self.r_next, |a, b| self.get(a, i, b))
    }

    /// Overwrite the slice at mode index `i`.
    pub fn set_slice(&mut self, i: usize, m: &Matrix) -> Result<()> {
        if m.rows() != self.r_prev || m.cols() != self.r_next {
            return Err(Error::ShapeMismatch(format!(
                "slice must be {}x{}, got {}x{}",
                self.r_prev,
                self.r_next,
                m.rows(),
                m.cols()
            )));
        }
        for b in 0..self.r_next {
            for a in 0..self.r_prev {
                self.set(a, i, b, m.get(a, b));
            }
        }
        Ok(())
    }

    /// Left unfolding: `L(U)(a + i*r_prev, b) = U(a, i, b)`, shape
    /// `(r_prev * i_dim) x r_next`.
    pub fn left_unfold(&self) -> Matrix {
        Matrix::from_fn(self.r_prev * self.i_dim, self.r_next, |row, b| {
            let a = row % self.r_prev;
            let i = row / self.r_prev;
            self.get(a, i, b)
        })
    }

    /// Inverse of [`left_unfold`](Self::left_unfold).
    pub fn left_fold(m: &Matrix, r_prev: usize, i_dim: usize, r_next: usize) -> Result<Self> {
        if m.rows() != r_prev * i_dim || m.cols() != r_next {
            return Err(Error::ShapeMismatch(format!(
                "left fold of a {}x{} matrix into a core ({r_prev}, {i_dim}, {r_next})",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Self::from_fn(r_prev, i_dim, r_next, |a, i, b| {
            m.get(a + i * r_prev, b)
        }))
    }

    /// Right unfolding: `R(U)(a, i + b*i_dim) = U(a, i, b)`, shape
    /// `r_prev x (i_dim * r_next)`.
    pub fn right_unfold(&self) -> Matrix {
        Matrix::from_fn(self.r_prev, self.i_dim * self.r_next, |a, col| {
            let i = col % self.i_dim;
            let b = col / self.i_dim;
            self.get(a, i, b)
        })
    }

    /// Inverse of [`right_unfold`](Self::right_unfold).
    pub fn right_fold(m: &Matrix, r_prev: usize, i_dim: usize, r_next: usize) -> Result<Self> {
        if m.rows() != r_prev || m.cols() != i_dim * r_next {
            return Err(Error::ShapeMismatch(format!(
                "right fold of a {}x{} matrix into a core ({r_prev}, {i_dim}, {r_next})",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Self::from_fn(r_prev, i_dim, r_next, |a, i, b| {
            m.get(a, i + b * i_dim)
        }))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Row-vector product with the slice at `i`:
    /// `out[b] = sum_a v[a] * U(a, i, b)`.
    #[inline]
    pub(crate) fn apply_slice_left(&self, i: usize, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.r_prev);
        debug_assert_eq!(out.len(), self.r_next);
        let base = i * self.r_prev;
        let plane = self.r_prev * self.i_dim;
        for (b, o) in out.iter_mut().enumerate() {
            let col = &self.data[base + b * plane..base + b * plane + self.r_prev];
            *o = col.iter().zip(v).map(|(c, x)| c * x).sum();
        }
    }

    /// Column-vector product with the slice at `i`:
    /// `out[a] = sum_b U(a, i, b) * v[b]`.
    #[inline]
    pub(crate) fn apply_slice_right(&self, i: usize, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.r_next);
        debug_assert_eq!(out.len(), self.r_prev);
        let base = i * self.r_prev;
        let plane = self.r_prev * self.i_dim;
        out.fill(0.0);
        for (b, x) in v.iter().enumerate() {
            let col = &self.data[base + b * plane..base + b * plane + self.r_prev];
            for (o, c) in out.iter_mut().zip(col) {
                *o += c * x;
            }
        }
    }
}

/// Tensor connect product: merges two chained cores into one core over the
/// combined mode, whose slice at `(i_a, i_b)` (with `i_a` fastest) is the
/// matrix product of the constituent slices.
pub fn connect_product(a: &TTCore, b: &TTCore) -> Result<TTCore> {
    if a.r_next != b.r_prev {
        return Err(Error::InvalidRank(format!(
            "connect product rank chain mismatch: left core ends at {}, right core starts at {}",
            a.r_next, b.r_prev
        )));
    }
    let mut out = TTCore::zeros(a.r_prev, a.i_dim * b.i_dim, b.r_next);
    for ib in 0..b.i_dim {
        for ia in 0..a.i_dim {
            let merged = ia + ib * a.i_dim;
            for q in 0..b.r_next {
                for p in 0..a.r_prev {
                    let mut acc = 0.0;
                    for s in 0..a.r_next {
                        acc += a.get(p, ia, s) * b.get(s, ib, q);
                    }
                    out.set(p, merged, q, acc);
                }
            }
        }
    }
    Ok(out)
}

/// A tensor in TT format: an ordered chain of cores with boundary ranks 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TTTensor {
    cores: Vec<TTCore>,
}

impl TTTensor {
    pub fn new(cores: Vec<TTCore>) -> Result<Self> {
        validate_cores(&cores, true)?;
        Ok(Self { cores })
    }

    pub fn cores(&self) -> &[TTCore] {
        &self.cores
    }

    pub fn core(&self, k: usize) -> &TTCore {
        &self.cores[k]
    }

    pub fn core_mut(&mut self, k: usize) -> &mut TTCore {
        &mut self.cores[k]
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.i_dim).collect()
    }

    /// The TT-rank vector `[r_0, ..., r_n]` with `r_0 = r_n = 1`.
    pub fn rank(&self) -> Vec<usize> {
        let mut r = Vec::with_capacity(self.cores.len() + 1);
        r.push(self.cores[0].r_prev);
        r.extend(self.cores.iter().map(|c| c.r_next));
        r
    }

    /// Check the chain invariants without mutating anything.
    pub fn validate(&self) -> std::result::Result<(), ChainViolation> {
        validate_cores(&self.cores, true)
    }

    /// Evaluate a single entry as the product of one slice per core.
    pub fn entry(&self, idx: &[usize]) -> Result<f64> {
        let shape = self.shape();
        if idx.len() != shape.len() || idx.iter().zip(&shape).any(|(&i, &s)| i >= s) {
            return Err(Error::IndexOutOfRange {
                index: idx.to_vec(),
                shape,
            });
        }
        let max_rank = self.rank().into_iter().max().unwrap();
        let mut v = vec![0.0; max_rank];
        let mut w = vec![0.0; max_rank];
        v[0] = 1.0;
        let mut width = 1;
        for (core, &i) in self.cores.iter().zip(idx) {
            core.apply_slice_left(i, &v[..width], &mut w[..core.r_next]);
            width = core.r_next;
            std::mem::swap(&mut v, &mut w);
        }
        Ok(v[0])
    }

    /// Reconstruct the dense tensor by folding the chain left to right.
    pub fn reconstruct(&self) -> DenseTensor {
        // acc holds the partial contraction over the processed modes: entry
        // (m, a) lives at acc[m + a*m_total], m lexicographic over processed
        // mode indices (first fastest), a the current right rank.
        let mut acc = vec![1.0];
        let mut m_total = 1usize;
        for core in &self.cores {
            let mut next = vec![0.0; m_total * core.i_dim * core.r_next];
            for b in 0..core.r_next {
                for i in 0..core.i_dim {
                    let out_base = m_total * (i + b * core.i_dim);
                    for a in 0..core.r_prev {
                        let c = core.get(a, i, b);
                        if c == 0.0 {
                            continue;
                        }
                        let in_base = a * m_total;
                        for m in 0..m_total {
                            next[out_base + m] += acc[in_base + m] * c;
                        }
                    }
                }
            }
            m_total *= core.i_dim;
            acc = next;
        }
        DenseTensor::new(self.shape(), acc).expect("chain shape is valid by construction")
    }

    /// Rotate the chain so that core `start` leads. The rotated chain's
    /// boundary ranks are interior ranks of the original, so reconstruction
    /// goes through the trace form; see [`RotatedChain`].
    pub fn rotate(&self, start: usize) -> Result<RotatedChain> {
        let n = self.order();
        if start >= n {
            return Err(Error::InvalidMode {
                mode: start,
                order: n,
            });
        }
        let cores: Vec<TTCore> = (0..n)
            .map(|t| self.cores[(start + t) % n].clone())
            .collect();
        RotatedChain::new(cores)
    }
}

fn validate_cores(
    cores: &[TTCore],
    require_unit_boundary: bool,
) -> std::result::Result<(), ChainViolation> {
    if cores.is_empty() {
        return Err(ChainViolation::Empty);
    }
    for (k, pair) in cores.windows(2).enumerate() {
        if pair[0].r_next != pair[1].r_prev {
            return Err(ChainViolation::Adjacency {
                junction: k,
                r_next: pair[0].r_next,
                r_prev_next: pair[1].r_prev,
            });
        }
    }
    let left = cores[0].r_prev;
    let right = cores[cores.len() - 1].r_next;
    if require_unit_boundary && (left != 1 || right != 1) {
        return Err(ChainViolation::BoundaryRank { left, right });
    }
    if !require_unit_boundary && left != right {
        return Err(ChainViolation::BoundaryRank { left, right });
    }
    Ok(())
}

/// A cyclically rotated core chain. Its boundary ranks agree but need not be
/// 1, so entries are traces of slice products rather than scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedChain {
    cores: Vec<TTCore>,
}

impl RotatedChain {
    pub fn new(cores: Vec<TTCore>) -> Result<Self> {
        validate_cores(&cores, false)?;
        Ok(Self { cores })
    }

    pub fn cores(&self) -> &[TTCore] {
        &self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.i_dim).collect()
    }

    /// Boundary rank shared by both ends of the rotated chain.
    pub fn boundary_rank(&self) -> usize {
        self.cores[0].r_prev
    }

    /// Evaluate one entry as the trace of the product of core slices.
    pub fn entry_traced(&self, idx: &[usize]) -> Result<f64> {
        let shape = self.shape();
        if idx.len() != shape.len() || idx.iter().zip(&shape).any(|(&i, &s)| i >= s) {
            return Err(Error::IndexOutOfRange {
                index: idx.to_vec(),
                shape,
            });
        }
        let mut m = self.cores[0].slice(idx[0]);
        for (core, &i) in self.cores.iter().zip(idx).skip(1) {
            m = m.matmul(&core.slice(i))?;
        }
        debug_assert_eq!(m.rows(), m.cols());
        Ok((0..m.rows()).map(|d| m.get(d, d)).sum())
    }

    /// Dense reconstruction via the trace form.
    pub fn reconstruct_traced(&self) -> Result<DenseTensor> {
        let shape = self.shape();
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        for flat in 0..len {
            decode_index(flat, &shape, &mut idx);
            data.push(self.entry_traced(&idx)?);
        }
        DenseTensor::new(shape, data)
    }
}
