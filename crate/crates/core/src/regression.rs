//! Tensor linear regression objectives and the block updating solver.
//!
//! Three objectives share one solver:
//!
//! - `LeastSquares`:  f(θ) = Σ_i (y_i − ⟨A(θ), X_i⟩)²
//! - `CpRidge(λ)`:    f(θ) + λ Σ_d ‖B_d‖_F²
//! - `TensorRidge(α)`: f(θ) + α ‖A(θ)‖_F²
//!
//! The solver cycles over modes `d = 1..D`, replacing each factor matrix with
//! the exact minimizer of its convex quadratic subproblem, for exactly `T`
//! sweeps (no convergence stopping: the full iteration trace is the point —
//! divergence diagnostics need it). Each recorded iteration stores the
//! objective, the CP parameter magnitude, and the minimum eigenvalue of the
//! normalized rank-1 Gram matrix.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::degeneracy;
use crate::linalg::{solve_cholesky, solve_sym_pinv};
use crate::tensor::{
    cp_reconstruct, khatri_rao, magnitude, unfold_mode, CpFactors, DenseTensor, TensorError,
};

/// Relative eigenvalue cutoff for pseudo-inverse block solves.
const PINV_CUTOFF: f64 = 1e-12;
/// Relative pivot floor below which Cholesky defers to the pseudo-inverse.
const CHOLESKY_PIVOT: f64 = 1e-14;
/// Entry budget above which the solver assembles block Grams from covariate
/// unfoldings per sample instead of the cached second-moment matrix.
const MOMENT_ENTRY_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressionError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("dataset shape mismatch: {0}")]
    DatasetShape(String),
    #[error("factor dims {factor_dims:?} do not match covariate dims {data_dims:?}")]
    DimsMismatch {
        factor_dims: Vec<usize>,
        data_dims: Vec<usize>,
    },
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
}

/// Regression data with the flattened design matrix cached: row `i` of `Z` is
/// the row-major vectorization of the covariate tensor `X_i`.
#[derive(Debug, Clone)]
pub struct RegressionDataset {
    dims: Vec<usize>,
    z: Array2<f64>,
    y: Array1<f64>,
}

impl RegressionDataset {
    pub fn new(dims: Vec<usize>, z: Array2<f64>, y: Array1<f64>) -> Result<Self, RegressionError> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.iter().any(|&p| p == 0) {
            return Err(RegressionError::DatasetShape(format!(
                "invalid covariate dims {dims:?}"
            )));
        }
        if z.ncols() != total {
            return Err(RegressionError::DatasetShape(format!(
                "Z has {} columns, dims {:?} require {}",
                z.ncols(),
                dims,
                total
            )));
        }
        if z.nrows() != y.len() {
            return Err(RegressionError::DatasetShape(format!(
                "Z has {} rows but y has {} entries",
                z.nrows(),
                y.len()
            )));
        }
        Ok(Self { dims, z, y })
    }

    pub fn from_covariates(
        covariates: &[DenseTensor],
        y: Array1<f64>,
    ) -> Result<Self, RegressionError> {
        if covariates.is_empty() {
            return Err(RegressionError::DatasetShape("no covariates".into()));
        }
        let dims = covariates[0].dims().to_vec();
        let total: usize = dims.iter().product();
        let mut z = Array2::zeros((covariates.len(), total));
        for (i, x) in covariates.iter().enumerate() {
            if x.dims() != dims.as_slice() {
                return Err(RegressionError::DatasetShape(format!(
                    "covariate {i} has dims {:?}, expected {:?}",
                    x.dims(),
                    dims
                )));
            }
            for (j, &v) in x.as_slice().iter().enumerate() {
                z[(i, j)] = v;
            }
        }
        Self::new(dims, z, y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn z(&self) -> &Array2<f64> {
        &self.z
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    /// Covariate tensor `X_i`, rebuilt from its vectorized row.
    pub fn covariate(&self, i: usize) -> DenseTensor {
        DenseTensor::new(self.dims.clone(), self.z.row(i).to_vec())
            .expect("dataset invariant guarantees row length")
    }
}

/// Which objective the solver minimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMethod {
    LeastSquares,
    CpRidge { lambda: f64 },
    TensorRidge { alpha: f64 },
}

impl FitMethod {
    pub fn label(&self) -> &'static str {
        match self {
            FitMethod::LeastSquares => "ls",
            FitMethod::CpRidge { .. } => "cp_ridge",
            FitMethod::TensorRidge { .. } => "tensor_ridge",
        }
    }

    pub fn tuning(&self) -> Option<f64> {
        match self {
            FitMethod::LeastSquares => None,
            FitMethod::CpRidge { lambda } => Some(*lambda),
            FitMethod::TensorRidge { alpha } => Some(*alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// CP rank of the fitted coefficient.
    pub rank: usize,
    pub method: FitMethod,
    /// Number of full sweeps over the modes.
    pub iterations: usize,
    pub num_starts: usize,
    pub seed: u64,
    /// Scalars are recorded at every iteration `t` with `t % trace_stride == 0`
    /// (plus the final iteration).
    pub trace_stride: usize,
    /// Iterations at which full factor copies are kept.
    pub snapshot_iterations: Vec<usize>,
}

impl FitConfig {
    pub fn new(rank: usize, method: FitMethod, iterations: usize, seed: u64) -> Self {
        Self {
            rank,
            method,
            iterations,
            num_starts: 5,
            seed,
            trace_stride: 1,
            snapshot_iterations: Vec::new(),
        }
    }

    pub fn with_num_starts(mut self, num_starts: usize) -> Self {
        self.num_starts = num_starts;
        self
    }

    pub fn with_trace_stride(mut self, stride: usize) -> Self {
        self.trace_stride = stride;
        self
    }

    pub fn with_snapshots(mut self, iterations: Vec<usize>) -> Self {
        self.snapshot_iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<(), RegressionError> {
        if self.rank == 0 {
            return Err(RegressionError::InvalidConfig("rank must be >= 1".into()));
        }
        if self.iterations == 0 {
            return Err(RegressionError::InvalidConfig(
                "iterations must be >= 1".into(),
            ));
        }
        if self.num_starts == 0 {
            return Err(RegressionError::InvalidConfig(
                "num_starts must be >= 1".into(),
            ));
        }
        if self.trace_stride == 0 {
            return Err(RegressionError::InvalidConfig(
                "trace_stride must be >= 1".into(),
            ));
        }
        match self.method {
            FitMethod::CpRidge { lambda } if lambda <= 0.0 => Err(RegressionError::InvalidConfig(
                "cp_ridge needs lambda > 0 (lambda = 0 is plain least squares)".into(),
            )),
            FitMethod::TensorRidge { alpha } if alpha <= 0.0 => {
                Err(RegressionError::InvalidConfig(
                    "tensor_ridge needs alpha > 0 (alpha = 0 is plain least squares)".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

/// One recorded iteration of a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// 1-based sweep index.
    pub iteration: usize,
    pub objective: f64,
    pub magnitude: f64,
    /// λ_min of the normalized rank-1 Gram; `None` when undefined (a rank-1
    /// term collapsed to zero).
    pub lambda_min_d: Option<f64>,
}

/// Full record of a solver run (the winning start when multi-started).
#[derive(Debug, Clone)]
pub struct FitTrace {
    records: Vec<TraceRecord>,
    snapshots: Vec<(usize, CpFactors)>,
    final_factors: CpFactors,
    winning_start: usize,
    initial_objective: f64,
}

impl FitTrace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn snapshots(&self) -> &[(usize, CpFactors)] {
        &self.snapshots
    }

    pub fn final_factors(&self) -> &CpFactors {
        &self.final_factors
    }

    pub fn winning_start(&self) -> usize {
        self.winning_start
    }

    /// Objective of the start's initial factors, before the first sweep.
    pub fn initial_objective(&self) -> f64 {
        self.initial_objective
    }

    pub fn final_objective(&self) -> f64 {
        self.records.last().map(|r| r.objective).unwrap_or(f64::NAN)
    }

    /// Magnitude samples keyed by iteration, the classifier's input.
    pub fn magnitudes(&self) -> BTreeMap<u64, f64> {
        self.records
            .iter()
            .map(|r| (r.iteration as u64, r.magnitude))
            .collect()
    }
}

/// Squared loss `f(θ) = ‖y − Z vec(A(θ))‖²`.
pub fn loss_f(factors: &CpFactors, data: &RegressionDataset) -> Result<f64, RegressionError> {
    check_dims(factors, data)?;
    let coeff = cp_reconstruct(factors);
    Ok(residual_sum_of_squares(&coeff, data))
}

fn residual_sum_of_squares(coeff: &DenseTensor, data: &RegressionDataset) -> f64 {
    let avec = Array1::from(coeff.as_slice().to_vec());
    let pred = data.z.dot(&avec);
    data.y
        .iter()
        .zip(pred.iter())
        .map(|(y, p)| {
            let r = y - p;
            r * r
        })
        .sum()
}

/// Penalized objective value for the configured method.
pub fn objective(
    factors: &CpFactors,
    data: &RegressionDataset,
    config: &FitConfig,
) -> Result<f64, RegressionError> {
    check_dims(factors, data)?;
    let coeff = cp_reconstruct(factors);
    let loss = residual_sum_of_squares(&coeff, data);
    Ok(loss + penalty_value(factors, &coeff, config.method))
}

fn penalty_value(factors: &CpFactors, coeff: &DenseTensor, method: FitMethod) -> f64 {
    match method {
        FitMethod::LeastSquares => 0.0,
        FitMethod::CpRidge { lambda } => {
            let frob2: f64 = factors
                .factors()
                .iter()
                .map(|b| b.iter().map(|x| x * x).sum::<f64>())
                .sum();
            lambda * frob2
        }
        FitMethod::TensorRidge { alpha } => {
            alpha * coeff.as_slice().iter().map(|x| x * x).sum::<f64>()
        }
    }
}

fn check_dims(factors: &CpFactors, data: &RegressionDataset) -> Result<(), RegressionError> {
    if factors.dims() != data.dims {
        return Err(RegressionError::DimsMismatch {
            factor_dims: factors.dims(),
            data_dims: data.dims.clone(),
        });
    }
    Ok(())
}

/// Khatri-Rao product of all factors except mode `d`, in increasing mode
/// order. Shape `(∏_{e≠d} p_e) × R`.
fn co_factor(factors: &CpFactors, d: usize) -> Array2<f64> {
    let others: Vec<&Array2<f64>> = (0..factors.order())
        .filter(|&e| e != d)
        .map(|e| factors.factor(e))
        .collect();
    khatri_rao(&others).expect("validated factors share a rank")
}

/// Design matrix and penalty Gram of the mode-`d` block subproblem.
///
/// With all other factors fixed, the prediction is linear in `vec(B_d)`
/// (row-major, rank index fastest): `⟨A, X_i⟩ = W_d[i,:] · vec(B_d)` where
/// `W_d[i, j·R + r] = (unfold(X_i, d) · K_d)[j, r]` and `K_d` is the
/// Khatri-Rao product of the remaining factors. The second output is the
/// quadratic penalty matrix `P` such that the block objective is
/// `‖y − W_d b‖² + bᵀ P b` plus a constant.
pub fn block_design(
    d: usize,
    factors: &CpFactors,
    data: &RegressionDataset,
    method: FitMethod,
) -> Result<(Array2<f64>, Array2<f64>), RegressionError> {
    check_dims(factors, data)?;
    let order = factors.order();
    if d >= order {
        return Err(RegressionError::Tensor(TensorError::ModeOutOfRange {
            mode: d,
            order,
        }));
    }
    let rank = factors.rank();
    let p = data.dims[d];
    let m = p * rank;
    let k = co_factor(factors, d);
    let mut w = Array2::zeros((data.n(), m));
    for i in 0..data.n() {
        let unf = unfold_mode(&data.covariate(i), d)?;
        let v = unf.dot(&k);
        for j in 0..p {
            for r in 0..rank {
                w[(i, j * rank + r)] = v[(j, r)];
            }
        }
    }
    let penalty = penalty_gram(&k, p, rank, method);
    Ok((w, penalty))
}

fn penalty_gram(k: &Array2<f64>, p: usize, rank: usize, method: FitMethod) -> Array2<f64> {
    let m = p * rank;
    match method {
        FitMethod::LeastSquares => Array2::zeros((m, m)),
        FitMethod::CpRidge { lambda } => Array2::eye(m) * lambda,
        FitMethod::TensorRidge { alpha } => {
            // α‖A‖² = α‖B_d K_dᵀ‖² = vec(B_d)ᵀ (I_p ⊗ α KᵀK) vec(B_d)
            let gk = k.t().dot(k);
            let mut pmat = Array2::zeros((m, m));
            for j in 0..p {
                for r1 in 0..rank {
                    for r2 in 0..rank {
                        pmat[(j * rank + r1, j * rank + r2)] = alpha * gk[(r1, r2)];
                    }
                }
            }
            pmat
        }
    }
}

fn solve_block(
    gram: &Array2<f64>,
    penalty: &Array2<f64>,
    rhs: &Array1<f64>,
    method: FitMethod,
) -> Array1<f64> {
    match method {
        FitMethod::LeastSquares => solve_sym_pinv(gram, rhs, PINV_CUTOFF),
        FitMethod::CpRidge { .. } => {
            let sys = gram + penalty;
            solve_cholesky(&sys, rhs, CHOLESKY_PIVOT)
                .unwrap_or_else(|| solve_sym_pinv(&sys, rhs, PINV_CUTOFF))
        }
        FitMethod::TensorRidge { .. } => {
            let sys = gram + penalty;
            solve_sym_pinv(&sys, rhs, PINV_CUTOFF)
        }
    }
}

/// Exact minimization of the mode-`d` block subproblem; all other factors are
/// kept fixed. The objective never increases.
pub fn block_update(
    d: usize,
    factors: &CpFactors,
    data: &RegressionDataset,
    config: &FitConfig,
) -> Result<CpFactors, RegressionError> {
    config.validate()?;
    let (w, penalty) = block_design(d, factors, data, config.method)?;
    let gram = w.t().dot(&w);
    let rhs = w.t().dot(&data.y);
    let beta = solve_block(&gram, &penalty, &rhs, config.method);
    let p = data.dims[d];
    let rank = factors.rank();
    let b_new = Array2::from_shape_vec((p, rank), beta.to_vec())
        .expect("solution length matches block shape");
    let mut out = factors.clone();
    out.factors_mut()[d] = b_new;
    Ok(out)
}

/// Cached per-mode quantities that make a block update independent of `n`:
/// for mode `d`, `cstack` holds the `q×q` second-moment blocks
/// `C_{j,j'}[k,k'] = Σ_i U_i[j,k] U_i[j',k']` of the unfolded covariates
/// stacked vertically, and `amat[j,k] = Σ_i y_i U_i[j,k]`.
struct ModeMoments {
    p: usize,
    q: usize,
    cstack: Array2<f64>,
    amat: Array2<f64>,
}

struct SweepContext {
    moments: Option<Vec<ModeMoments>>,
    unfolded: Option<Vec<Array2<f64>>>,
}

impl SweepContext {
    fn new(data: &RegressionDataset) -> Self {
        let total: usize = data.dims.iter().product();
        if total * total <= MOMENT_ENTRY_LIMIT {
            Self {
                moments: Some(build_moments(data)),
                unfolded: None,
            }
        } else {
            // stacked unfoldings: mode d holds rows of unfold(X_i, d) for all i
            let unfolded = (0..data.dims.len())
                .map(|d| {
                    let p = data.dims[d];
                    let q = total / p;
                    let mut big = Array2::zeros((data.n() * p, q));
                    for i in 0..data.n() {
                        let unf = unfold_mode(&data.covariate(i), d).expect("mode in range");
                        for j in 0..p {
                            for kk in 0..q {
                                big[(i * p + j, kk)] = unf[(j, kk)];
                            }
                        }
                    }
                    big
                })
                .collect();
            Self {
                moments: None,
                unfolded: Some(unfolded),
            }
        }
    }
}

fn mode_perm(dims: &[usize], d: usize) -> Vec<usize> {
    // perm[j*q + k] = row-major linear index of the entry with i_d = j and
    // remaining modes (increasing order) at row-major offset k
    let order = dims.len();
    let total: usize = dims.iter().product();
    let p = dims[d];
    let q = total / p;
    let stride_d: usize = dims[d + 1..].iter().product();
    let rest: Vec<usize> = (0..order).filter(|&e| e != d).collect();
    let mut perm = vec![0usize; total];
    let mut idx = vec![0usize; rest.len()];
    let mut full = vec![0usize; order];
    for k in 0..q {
        for (&e, &i) in rest.iter().zip(&idx) {
            full[e] = i;
        }
        full[d] = 0;
        let mut base = 0usize;
        for (dd, &i) in full.iter().enumerate() {
            base = base * dims[dd] + i;
        }
        for j in 0..p {
            perm[j * q + k] = base + j * stride_d;
        }
        for pos in (0..rest.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < dims[rest[pos]] {
                break;
            }
            idx[pos] = 0;
        }
    }
    perm
}

fn build_moments(data: &RegressionDataset) -> Vec<ModeMoments> {
    let total: usize = data.dims.iter().product();
    let ztz = data.z.t().dot(&data.z);
    let zty = data.z.t().dot(&data.y);
    (0..data.dims.len())
        .map(|d| {
            let p = data.dims[d];
            let q = total / p;
            let perm = mode_perm(&data.dims, d);
            let mut cstack = Array2::zeros((p * p * q, q));
            let mut amat = Array2::zeros((p, q));
            for j in 0..p {
                for jp in 0..p {
                    let row0 = (j * p + jp) * q;
                    for k in 0..q {
                        let src = perm[j * q + k];
                        for kp in 0..q {
                            cstack[(row0 + k, kp)] = ztz[(src, perm[jp * q + kp])];
                        }
                    }
                }
                for k in 0..q {
                    amat[(j, k)] = zty[perm[j * q + k]];
                }
            }
            ModeMoments { p, q, cstack, amat }
        })
        .collect()
}

fn block_system_from_moments(
    mm: &ModeMoments,
    k: &Array2<f64>,
    rank: usize,
) -> (Array2<f64>, Array1<f64>) {
    let (p, q) = (mm.p, mm.q);
    let m = p * rank;
    let ck = mm.cstack.dot(k); // (p·p·q) × R
    let mut gram = Array2::zeros((m, m));
    for j in 0..p {
        for jp in 0..p {
            let row0 = (j * p + jp) * q;
            for r1 in 0..rank {
                for r2 in 0..rank {
                    let mut s = 0.0;
                    for kk in 0..q {
                        s += k[(kk, r1)] * ck[(row0 + kk, r2)];
                    }
                    gram[(j * rank + r1, jp * rank + r2)] = s;
                }
            }
        }
    }
    let rhs_mat = mm.amat.dot(k); // p × R
    let mut rhs = Array1::zeros(m);
    for j in 0..p {
        for r in 0..rank {
            rhs[j * rank + r] = rhs_mat[(j, r)];
        }
    }
    (gram, rhs)
}

fn block_system_from_unfoldings(
    big: &Array2<f64>,
    k: &Array2<f64>,
    n: usize,
    p: usize,
    rank: usize,
    y: &Array1<f64>,
) -> (Array2<f64>, Array1<f64>) {
    let m = p * rank;
    let v = big.dot(k); // (n·p) × R
    let mut w = Array2::zeros((n, m));
    for i in 0..n {
        for j in 0..p {
            for r in 0..rank {
                w[(i, j * rank + r)] = v[(i * p + j, r)];
            }
        }
    }
    let gram = w.t().dot(&w);
    let rhs = w.t().dot(y);
    (gram, rhs)
}

fn sweep_once(
    factors: &mut CpFactors,
    data: &RegressionDataset,
    ctx: &SweepContext,
    method: FitMethod,
    rank: usize,
) {
    for d in 0..factors.order() {
        let k = co_factor(factors, d);
        let p = data.dims[d];
        let (gram, rhs) = match (&ctx.moments, &ctx.unfolded) {
            (Some(moments), _) => block_system_from_moments(&moments[d], &k, rank),
            (_, Some(unfolded)) => {
                block_system_from_unfoldings(&unfolded[d], &k, data.n(), p, rank, &data.y)
            }
            _ => unreachable!("context always holds one representation"),
        };
        let penalty = penalty_gram(&k, p, rank, method);
        let beta = solve_block(&gram, &penalty, &rhs, method);
        factors.factors_mut()[d] = Array2::from_shape_vec((p, rank), beta.to_vec())
            .expect("solution length matches block shape");
    }
}

fn record_state(
    factors: &CpFactors,
    data: &RegressionDataset,
    method: FitMethod,
    iteration: usize,
) -> TraceRecord {
    let coeff = cp_reconstruct(factors);
    let loss = residual_sum_of_squares(&coeff, data);
    let objective = loss + penalty_value(factors, &coeff, method);
    let lambda_min_d = degeneracy::eigen_diagnostics(factors)
        .ok()
        .map(|diag| diag.lambda_min_d);
    TraceRecord {
        iteration,
        objective,
        magnitude: magnitude(factors),
        lambda_min_d,
    }
}

fn run_sweeps(
    data: &RegressionDataset,
    config: &FitConfig,
    initial: &CpFactors,
    ctx: &SweepContext,
    start_index: usize,
) -> Result<FitTrace, RegressionError> {
    check_dims(initial, data)?;
    if initial.rank() != config.rank {
        return Err(RegressionError::InvalidConfig(format!(
            "initial factors have rank {}, config expects {}",
            initial.rank(),
            config.rank
        )));
    }
    let mut factors = initial.clone();
    let initial_objective = objective(&factors, data, config)?;
    let t_max = config.iterations;
    let mut records = Vec::with_capacity(t_max / config.trace_stride + 1);
    let mut snapshots = Vec::new();
    for t in 1..=t_max {
        sweep_once(&mut factors, data, ctx, config.method, config.rank);
        if t % config.trace_stride == 0 || t == t_max {
            records.push(record_state(&factors, data, config.method, t));
        }
        if config.snapshot_iterations.contains(&t) {
            snapshots.push((t, factors.clone()));
        }
    }
    Ok(FitTrace {
        records,
        snapshots,
        final_factors: factors,
        winning_start: start_index,
        initial_objective,
    })
}

/// Run exactly `config.iterations` sweeps from the given initial factors.
pub fn fit_single(
    data: &RegressionDataset,
    config: &FitConfig,
    initial: &CpFactors,
) -> Result<FitTrace, RegressionError> {
    config.validate()?;
    let ctx = SweepContext::new(data);
    run_sweeps(data, config, initial, &ctx, 0)
}

/// Independent seeded starts; returns the trace whose final objective is
/// smallest (ties break toward the lowest start index). Start `j` draws its
/// initial factors from stream `j` of a ChaCha generator seeded with
/// `config.seed`, so runs are reproducible across platforms.
pub fn fit_multi_start(
    data: &RegressionDataset,
    config: &FitConfig,
) -> Result<FitTrace, RegressionError> {
    config.validate()?;
    let ctx = SweepContext::new(data);
    let mut best: Option<FitTrace> = None;
    for j in 0..config.num_starts {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(j as u64);
        let initial = CpFactors::standard_normal(&data.dims, config.rank, &mut rng);
        let mut trace = run_sweeps(data, config, &initial, &ctx, j)?;
        trace.winning_start = j;
        let better = match &best {
            None => true,
            Some(b) => {
                let cur = trace.final_objective();
                let old = b.final_objective();
                cur.is_finite() && (!old.is_finite() || cur < old)
            }
        };
        if better {
            best = Some(trace);
        }
    }
    Ok(best.expect("num_starts >= 1"))
}

/// Analytic magnitude bound along any CpRidge trace: monotone descent gives
/// `λ Σ_d ‖B_d‖_F² ≤ objective(θ_0)`, and by AM-GM over the modes
/// `M(θ) ≤ (Σ_d ‖B_d‖_F² / D)^{D/2}`.
pub fn cp_ridge_magnitude_bound(initial_objective: f64, lambda: f64, order: usize) -> f64 {
    let budget = initial_objective / lambda;
    (budget / order as f64).powf(order as f64 / 2.0)
}
