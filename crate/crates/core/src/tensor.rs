//! Dense tensors and the multilinear algebra used by the regression solvers.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! - Storage is row-major: the linear index of entry `(i_1, ..., i_D)` is
//!   `((i_1 * p_2 + i_2) * p_3 + ...) + i_D`, i.e. the last index varies
//!   fastest.
//! - `vec` of a rank-1 tensor `b_1 ∘ ... ∘ b_D` equals the Kronecker product
//!   `b_1 ⊗ ... ⊗ b_D` (first factor slowest).
//! - Mode-`d` unfolding is `p_d × ∏_{e≠d} p_e`, columns ordered row-major
//!   over the remaining modes in increasing index order. With this ordering,
//!   `unfold(cp_reconstruct(θ), d) = B_d · khatri_rao(B_e for e≠d)ᵀ`.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("data length {len} does not match dims {dims:?} (expected {expected})")]
    DataLength {
        len: usize,
        dims: Vec<usize>,
        expected: usize,
    },
    #[error("dims must be non-empty with every entry >= 1, got {dims:?}")]
    InvalidDims { dims: Vec<usize> },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("mode index {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("factor matrices must share one column count, got {cols:?}")]
    RankMismatch { cols: Vec<usize> },
    #[error("factor matrices must be non-empty with rank >= 1")]
    EmptyFactors,
    #[error("Khatri-Rao product needs at least one matrix")]
    EmptyKhatriRao,
}

/// Dense real tensor of order `D >= 1`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self, TensorError> {
        if dims.is_empty() || dims.iter().any(|&p| p == 0) {
            return Err(TensorError::InvalidDims { dims });
        }
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(TensorError::DataLength {
                len: data.len(),
                dims,
                expected,
            });
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self, TensorError> {
        if dims.is_empty() || dims.iter().any(|&p| p == 0) {
            return Err(TensorError::InvalidDims { dims });
        }
        let len = dims.iter().product();
        Ok(Self {
            dims,
            data: vec![0.0; len],
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Tensor order `D` (number of modes).
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Total number of entries.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Row-major linear index of a multi-index (0-based).
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut lin = 0;
        for (d, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.dims[d]);
            lin = lin * self.dims[d] + i;
        }
        lin
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let lin = self.linear_index(idx);
        self.data[lin] = value;
    }

    /// Row-major vectorization (a view; the storage order is the contract).
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Entry-wise difference, used when measuring approximation error.
    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor, TensorError> {
        if self.dims != other.dims {
            return Err(TensorError::ShapeMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(DenseTensor {
            dims: self.dims.clone(),
            data,
        })
    }
}

/// CP parameters: `D` factor matrices `B_d` of shape `p_d × R`, column `r`
/// holding the mode-`d` vector of the `r`-th rank-1 term.
#[derive(Debug, Clone, PartialEq)]
pub struct CpFactors {
    factors: Vec<Array2<f64>>,
}

impl CpFactors {
    pub fn new(factors: Vec<Array2<f64>>) -> Result<Self, TensorError> {
        if factors.is_empty() {
            return Err(TensorError::EmptyFactors);
        }
        let rank = factors[0].ncols();
        if rank == 0 || factors.iter().any(|f| f.nrows() == 0) {
            return Err(TensorError::EmptyFactors);
        }
        if factors.iter().any(|f| f.ncols() != rank) {
            return Err(TensorError::RankMismatch {
                cols: factors.iter().map(|f| f.ncols()).collect(),
            });
        }
        Ok(Self { factors })
    }

    /// Factors with i.i.d. standard normal entries, the solver's default
    /// initialization.
    pub fn standard_normal<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Self {
        let factors = dims
            .iter()
            .map(|&p| Array2::from_shape_fn((p, rank), |_| StandardNormal.sample(rng)))
            .collect();
        Self { factors }
    }

    pub fn rank(&self) -> usize {
        self.factors[0].ncols()
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.nrows()).collect()
    }

    pub fn factor(&self, d: usize) -> &Array2<f64> {
        &self.factors[d]
    }

    pub fn factors(&self) -> &[Array2<f64>] {
        &self.factors
    }

    pub fn factors_mut(&mut self) -> &mut [Array2<f64>] {
        &mut self.factors
    }

    /// Euclidean norm of column `r` of factor `d`.
    pub fn column_norm(&self, d: usize, r: usize) -> f64 {
        self.factors[d].column(r).iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Reconstruct the coefficient tensor `A = Σ_r β_{1,r} ∘ ... ∘ β_{D,r}`.
pub fn cp_reconstruct(factors: &CpFactors) -> DenseTensor {
    let dims = factors.dims();
    let total: usize = dims.iter().product();
    let mut data = vec![0.0; total];
    let rank = factors.rank();
    let mut term = Vec::with_capacity(total);
    for r in 0..rank {
        // expand the rank-1 term mode by mode; first factor varies slowest
        term.clear();
        term.push(1.0);
        for f in &factors.factors {
            let col = f.column(r);
            let mut next = Vec::with_capacity(term.len() * col.len());
            for &t in &term {
                for &c in col.iter() {
                    next.push(t * c);
                }
            }
            term = next;
        }
        for (acc, t) in data.iter_mut().zip(&term) {
            *acc += t;
        }
    }
    DenseTensor { dims, data }
}

/// Entry-wise inner product `⟨a, b⟩ = Σ a_i b_i`.
pub fn inner_product(a: &DenseTensor, b: &DenseTensor) -> Result<f64, TensorError> {
    if a.dims != b.dims {
        return Err(TensorError::ShapeMismatch {
            left: a.dims.clone(),
            right: b.dims.clone(),
        });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

pub fn frobenius_norm(a: &DenseTensor) -> f64 {
    a.data.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Mode-`d` unfolding (0-based mode index): shape `p_d × ∏_{e≠d} p_e`,
/// columns row-major over the remaining modes in increasing order.
pub fn unfold_mode(a: &DenseTensor, d: usize) -> Result<Array2<f64>, TensorError> {
    let order = a.order();
    if d >= order {
        return Err(TensorError::ModeOutOfRange { mode: d, order });
    }
    let p = a.dims[d];
    let q = a.len() / p;
    let mut out = Array2::zeros((p, q));
    // stride of mode d in the row-major layout
    let stride_d: usize = a.dims[d + 1..].iter().product();
    let rest: Vec<usize> = (0..order).filter(|&e| e != d).collect();
    let mut idx = vec![0usize; rest.len()];
    let mut full = vec![0usize; order];
    for col in 0..q {
        // linear offset of the remaining-mode multi-index with i_d = 0
        for (&e, &i) in rest.iter().zip(&idx) {
            full[e] = i;
        }
        full[d] = 0;
        let mut base = 0usize;
        for (dd, &i) in full.iter().enumerate() {
            base = base * a.dims[dd] + i;
        }
        for j in 0..p {
            out[(j, col)] = a.data[base + j * stride_d];
        }
        // odometer over remaining modes, last one fastest
        for pos in (0..rest.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < a.dims[rest[pos]] {
                break;
            }
            idx[pos] = 0;
        }
    }
    Ok(out)
}

/// Inverse of [`unfold_mode`]: rebuild the tensor from its mode-`d` unfolding.
pub fn refold_mode(
    matrix: &Array2<f64>,
    d: usize,
    dims: &[usize],
) -> Result<DenseTensor, TensorError> {
    let order = dims.len();
    if d >= order {
        return Err(TensorError::ModeOutOfRange { mode: d, order });
    }
    let total: usize = dims.iter().product();
    let p = dims[d];
    let q = total / p;
    if matrix.nrows() != p || matrix.ncols() != q {
        return Err(TensorError::ShapeMismatch {
            left: vec![matrix.nrows(), matrix.ncols()],
            right: vec![p, q],
        });
    }
    let mut out = DenseTensor::zeros(dims.to_vec())?;
    let stride_d: usize = dims[d + 1..].iter().product();
    let rest: Vec<usize> = (0..order).filter(|&e| e != d).collect();
    let mut idx = vec![0usize; rest.len()];
    for col in 0..q {
        let mut full = vec![0usize; order];
        for (&e, &i) in rest.iter().zip(&idx) {
            full[e] = i;
        }
        let mut base = 0usize;
        for (dd, &i) in full.iter().enumerate() {
            base = base * dims[dd] + i;
        }
        for j in 0..p {
            out.data[base + j * stride_d] = matrix[(j, col)];
        }
        for pos in (0..rest.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < dims[rest[pos]] {
                break;
            }
            idx[pos] = 0;
        }
    }
    Ok(out)
}

/// Column-wise Kronecker product. Column `r` of the result is the Kronecker
/// product of column `r` of each input, in list order (first matrix slowest).
pub fn khatri_rao(mats: &[&Array2<f64>]) -> Result<Array2<f64>, TensorError> {
    if mats.is_empty() {
        return Err(TensorError::EmptyKhatriRao);
    }
    let rank = mats[0].ncols();
    if mats.iter().any(|m| m.ncols() != rank) {
        return Err(TensorError::RankMismatch {
            cols: mats.iter().map(|m| m.ncols()).collect(),
        });
    }
    let rows: usize = mats.iter().map(|m| m.nrows()).product();
    let mut out = Array2::zeros((rows, rank));
    for r in 0..rank {
        let mut acc = vec![1.0];
        for m in mats {
            let col = m.column(r);
            let mut next = Vec::with_capacity(acc.len() * col.len());
            for &a in &acc {
                for &c in col.iter() {
                    next.push(a * c);
                }
            }
            acc = next;
        }
        for (i, v) in acc.into_iter().enumerate() {
            out[(i, r)] = v;
        }
    }
    Ok(out)
}

/// Scaling-invariant magnitude of the CP parameters,
/// `M(θ) = Σ_r ∏_d ‖β_{d,r}‖`.
pub fn magnitude(factors: &CpFactors) -> f64 {
    let rank = factors.rank();
    let mut total = 0.0;
    for r in 0..rank {
        let mut prod = 1.0;
        for d in 0..factors.order() {
            prod *= factors.column_norm(d, r);
        }
        total += prod;
    }
    total
}

/// Rebalanced representation: unit-norm columns in modes `1..D-1` with the
/// accumulated scale pushed into mode `D`. Reconstruction and magnitude are
/// unchanged. Rank-1 terms with a zero column among the first `D-1` modes are
/// passed through untouched.
pub fn rebalance(factors: &CpFactors) -> CpFactors {
    let d_total = factors.order();
    let rank = factors.rank();
    let mut out: Vec<Array2<f64>> = factors.factors.clone();
    for r in 0..rank {
        let norms: Vec<f64> = (0..d_total - 1).map(|d| factors.column_norm(d, r)).collect();
        if norms.iter().any(|&n| n == 0.0) {
            continue;
        }
        let scale: f64 = norms.iter().product();
        for (d, &n) in norms.iter().enumerate() {
            for v in out[d].column_mut(r).iter_mut() {
                *v /= n;
            }
        }
        for v in out[d_total - 1].column_mut(r).iter_mut() {
            *v *= scale;
        }
    }
    CpFactors { factors: out }
}

/// Column vector helper for building factor matrices in tests and
/// constructors.
pub fn column_matrix(cols: &[Array1<f64>]) -> Array2<f64> {
    let rows = cols[0].len();
    let mut out = Array2::zeros((rows, cols.len()));
    for (r, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            out[(i, r)] = v;
        }
    }
    out
}
