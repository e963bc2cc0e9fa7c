//! Dense n-mode tensors, observation masks, and the unfolding operations
//! that turn tensors into matrices.
//!
//! Entries are stored lexicographically with the *first* index varying
//! fastest, so `data` is exactly the vectorization of the tensor. All mode
//! indices in this API are 0-based; the 1-based index arithmetic of the
//! unfolding definitions is translated once, here, and pinned by tests.

use crate::error::{Error, Result};

/// Practical cap on tensor order; higher orders are rejected at construction.
pub const MAX_ORDER: usize = 16;

/// Dense real tensor with an explicit shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Build a tensor from its shape and vectorized entries (first index fastest).
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        check_shape(&shape)?;
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "shape {:?} needs {} entries, got {}",
                shape,
                len,
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        check_shape(&shape)?;
        let len = shape.iter().product();
        Ok(Self {
            shape,
            data: vec![0.0; len],
        })
    }

    /// Build entrywise from a function of the (0-based) multi-index.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_shape(&shape)?;
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        for flat in 0..len {
            decode_index(flat, &shape, &mut idx);
            data.push(f(&idx));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    /// Total number of entries.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Vectorized entries, first index fastest.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// The lexicographic vectorization vec(X). Identical to `data()` by
    /// construction of the storage order.
    pub fn vectorize(&self) -> Vec<f64> {
        self.data.clone()
    }

    /// Flat position of a multi-index. Panics on out-of-range indices.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order());
        let mut flat = 0;
        let mut stride = 1;
        for (t, &i) in idx.iter().enumerate() {
            assert!(i < self.shape[t], "index {i} out of range for mode {t}");
            flat += i * stride;
            stride *= self.shape[t];
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let flat = self.flat_index(idx);
        self.data[flat] = value;
    }

    /// Mode-k unfolding: rows index mode `k`, columns cycle through the
    /// remaining modes starting at `k + 1` (first in the cycle fastest).
    pub fn mode_unfold(&self, k: usize) -> Result<Matrix> {
        let n = self.order();
        if k >= n {
            return Err(Error::InvalidMode { mode: k, order: n });
        }
        let rows = self.shape[k];
        let cols = self.data.len() / rows;
        let mut m = Matrix::zeros(rows, cols);
        let mut idx = vec![0usize; n];
        for (flat, &v) in self.data.iter().enumerate() {
            decode_index(flat, &self.shape, &mut idx);
            let col = cycled_column(&idx, &self.shape, k);
            m.set(idx[k], col, v);
        }
        Ok(m)
    }

    /// Tensor mode matricization: the first `split` modes become rows, the
    /// remaining modes become columns (both lexicographic, first fastest).
    /// `split` ranges over `1..order`.
    pub fn matricize(&self, split: usize) -> Result<Matrix> {
        let n = self.order();
        if split == 0 || split >= n {
            return Err(Error::InvalidSplit { split, order: n });
        }
        let rows: usize = self.shape[..split].iter().product();
        let cols = self.data.len() / rows;
        let mut m = Matrix::zeros(rows, cols);
        // Storage is first-index-fastest, so column c of the matricization is
        // the contiguous block data[c*rows .. (c+1)*rows].
        for c in 0..cols {
            for r in 0..rows {
                m.set(r, c, self.data[r + c * rows]);
            }
        }
        Ok(m)
    }

    /// Inverse of [`matricize`](Self::matricize): fold a matrix back into a
    /// tensor of the given shape, splitting rows over the first `split` modes.
    pub fn from_matricized(m: &Matrix, shape: Vec<usize>, split: usize) -> Result<Self> {
        check_shape(&shape)?;
        let n = shape.len();
        if split == 0 || split >= n {
            return Err(Error::InvalidSplit { split, order: n });
        }
        let rows: usize = shape[..split].iter().product();
        let cols: usize = shape[split..].iter().product();
        if m.rows() != rows || m.cols() != cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, expected {}x{} for shape {:?} split {}",
                m.rows(),
                m.cols(),
                rows,
                cols,
                shape,
                split
            )));
        }
        let mut data = vec![0.0; rows * cols];
        for c in 0..cols {
            for r in 0..rows {
                data[r + c * rows] = m.get(r, c);
            }
        }
        Ok(Self { shape, data })
    }

    /// Cyclic mode rotation: the result has shape
    /// `(I_start, …, I_{n-1}, I_0, …, I_{start-1})` and
    /// `result(j_start, …, j_{start-1}) = self(j_0, …, j_{n-1})`.
    /// `start = 0` is the identity.
    pub fn permute_cyclic(&self, start: usize) -> Result<DenseTensor> {
        let n = self.order();
        if start >= n {
            return Err(Error::InvalidMode {
                mode: start,
                order: n,
            });
        }
        if start == 0 {
            return Ok(self.clone());
        }
        let new_shape: Vec<usize> = (0..n).map(|t| self.shape[(start + t) % n]).collect();
        let mut out = vec![0.0; self.data.len()];
        let mut idx = vec![0usize; n];
        let mut rotated = vec![0usize; n];
        for (flat, &v) in self.data.iter().enumerate() {
            decode_index(flat, &self.shape, &mut idx);
            for t in 0..n {
                rotated[t] = idx[(start + t) % n];
            }
            out[encode_index(&rotated, &new_shape)] = v;
        }
        DenseTensor::new(new_shape, out)
    }

    /// Entry-wise product. Shapes must match.
    pub fn hadamard(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "hadamard of {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .collect();
        Ok(DenseTensor {
            shape: self.shape.clone(),
            data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() {
        return Err(Error::ShapeMismatch("tensor order must be at least 1".into()));
    }
    if shape.len() > MAX_ORDER {
        return Err(Error::ShapeMismatch(format!(
            "tensor order {} exceeds the supported maximum {}",
            shape.len(),
            MAX_ORDER
        )));
    }
    if shape.contains(&0) {
        return Err(Error::ShapeMismatch(format!(
            "all mode sizes must be positive, got {shape:?}"
        )));
    }
    Ok(())
}

/// Decode a flat position into `idx` (first index fastest).
pub(crate) fn decode_index(flat: usize, shape: &[usize], idx: &mut [usize]) {
    let mut rem = flat;
    for (t, &s) in shape.iter().enumerate() {
        idx[t] = rem % s;
        rem /= s;
    }
}

/// Encode a multi-index into its flat position (first index fastest).
pub(crate) fn encode_index(idx: &[usize], shape: &[usize]) -> usize {
    let mut flat = 0;
    let mut stride = 1;
    for (t, &i) in idx.iter().enumerate() {
        flat += i * stride;
        stride *= shape[t];
    }
    flat
}

/// Column position of a multi-index in the mode-k unfolding: the remaining
/// modes are cycled to the order (k+1, …, n-1, 0, …, k-1) with the first in
/// the cycle varying fastest.
pub(crate) fn cycled_column(idx: &[usize], shape: &[usize], k: usize) -> usize {
    let n = shape.len();
    let mut col = 0;
    let mut stride = 1;
    for off in 1..n {
        let t = (k + off) % n;
        col += idx[t] * stride;
        stride *= shape[t];
    }
    col
}

/// Binary observation pattern over a tensor of matching shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    shape: Vec<usize>,
    bits: Vec<bool>,
    observed_count: usize,
}

impl ObservationMask {
    pub fn new(shape: Vec<usize>, bits: Vec<bool>) -> Result<Self> {
        check_shape(&shape)?;
        let len: usize = shape.iter().product();
        if bits.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "mask shape {:?} needs {} bits, got {}",
                shape,
                len,
                bits.len()
            )));
        }
        let observed_count = bits.iter().filter(|&&b| b).count();
        Ok(Self {
            shape,
            bits,
            observed_count,
        })
    }

    pub fn all_observed(shape: Vec<usize>) -> Result<Self> {
        check_shape(&shape)?;
        let len: usize = shape.iter().product();
        Ok(Self {
            shape,
            bits: vec![true; len],
            observed_count: len,
        })
    }

    pub fn none_observed(shape: Vec<usize>) -> Result<Self> {
        check_shape(&shape)?;
        let len: usize = shape.iter().product();
        Ok(Self {
            shape,
            bits: vec![false; len],
            observed_count: 0,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of observed entries.
    pub fn observed_count(&self) -> usize {
        self.observed_count
    }

    pub fn observation_ratio(&self) -> f64 {
        self.observed_count as f64 / self.bits.len() as f64
    }

    pub fn is_observed(&self, flat: usize) -> bool {
        self.bits[flat]
    }

    /// Flat positions of the observed entries, ascending.
    pub fn observed_flat_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    /// The mask as a 0/1 tensor, e.g. for Hadamard products.
    pub fn to_tensor(&self) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }

    /// Zero out the unobserved entries of a matching tensor.
    pub fn apply(&self, t: &DenseTensor) -> Result<DenseTensor> {
        if t.shape() != self.shape.as_slice() {
            return Err(Error::ShapeMismatch(format!(
                "mask shape {:?} does not match tensor shape {:?}",
                self.shape,
                t.shape()
            )));
        }
        let data = t
            .data()
            .iter()
            .zip(&self.bits)
            .map(|(&v, &b)| if b { v } else { 0.0 })
            .collect();
        DenseTensor::new(self.shape.clone(), data)
    }
}

/// Dense matrix, row-major. The fixed project-wide carrier for unfoldings.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Column-major vectorization (first index, the row, varying fastest),
    /// the same convention as tensor vectorization.
    pub fn vectorize(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                v.push(self.get(r, c));
            }
        }
        v
    }
}
