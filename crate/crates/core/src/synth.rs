//! Reproducible synthetic benchmark generation.
//!
//! Four data-generating cases over cubic covariates `X ∈ R^{p0×p0×p0}` with
//! independent `Unif(0,1)` entries:
//!
//! - `1a` / `2a`: coefficient `A0 = w1∘v2∘v3 + v1∘w2∘v3 + v1∘v2∘w3`, a rank-3
//!   tensor whose border rank is 2 (degenerate when fitted with rank 2);
//! - `1b` / `2b`: coefficient `A0 = u1∘u2∘u3 + v1∘v2∘v3 + w1∘w2∘w3`, three
//!   separated rank-1 terms;
//! - the `2*` variants add `N(0, σ²)` noise with σ calibrated so that the
//!   sample signal-to-noise ratio is exactly `snr`.
//!
//! Generating vectors are drawn with `Unif(-5,5)` entries, redrawn in the
//! measure-zero event of linear dependence. Everything is deterministic in
//! the spec's seed; the three random ingredients (generating vectors,
//! predictors, noise) use separate ChaCha streams so they stay independent.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg::sym_eigh;
use crate::regression::{RegressionDataset, RegressionError};
use crate::tensor::{column_matrix, cp_reconstruct, CpFactors, DenseTensor, TensorError};

const VECTOR_STREAM: u64 = 0;
const PREDICTOR_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Regression(#[from] RegressionError),
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
    #[error("generating vectors in mode {mode} are numerically linearly dependent")]
    DependentVectors { mode: usize },
    #[error("signal variance is zero; cannot calibrate noise")]
    ZeroSignalVariance,
    #[error("noise calibration needs at least 2 predictors, got {0}")]
    TooFewPredictors(usize),
}

/// The four data-generating cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthCase {
    Case1a,
    Case1b,
    Case2a,
    Case2b,
}

impl SynthCase {
    pub fn is_noisy(self) -> bool {
        matches!(self, SynthCase::Case2a | SynthCase::Case2b)
    }

    /// True for the `b` cases built from three separated rank-1 terms.
    pub fn is_separated(self) -> bool {
        matches!(self, SynthCase::Case1b | SynthCase::Case2b)
    }

    pub const ALL: [SynthCase; 4] = [
        SynthCase::Case1a,
        SynthCase::Case1b,
        SynthCase::Case2a,
        SynthCase::Case2b,
    ];
}

impl fmt::Display for SynthCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SynthCase::Case1a => "1a",
            SynthCase::Case1b => "1b",
            SynthCase::Case2a => "2a",
            SynthCase::Case2b => "2b",
        };
        f.write_str(s)
    }
}

impl FromStr for SynthCase {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1a" => Ok(SynthCase::Case1a),
            "1b" => Ok(SynthCase::Case1b),
            "2a" => Ok(SynthCase::Case2a),
            "2b" => Ok(SynthCase::Case2b),
            other => Err(SynthError::InvalidSpec(format!(
                "unknown case {other:?}, expected one of 1a, 1b, 2a, 2b"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub case: SynthCase,
    pub n: usize,
    pub p0: usize,
    pub snr: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(case: SynthCase, n: usize, p0: usize, seed: u64) -> Self {
        Self {
            case,
            n,
            p0,
            snr: 4.0,
            seed,
        }
    }

    pub fn with_snr(mut self, snr: f64) -> Self {
        self.snr = snr;
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n == 0 {
            return Err(SynthError::InvalidSpec("n must be >= 1".into()));
        }
        if self.p0 < 2 {
            return Err(SynthError::InvalidSpec(
                "p0 must be >= 2 (pairs of generating vectors must be independent)".into(),
            ));
        }
        if self.case.is_separated() && self.p0 < 3 {
            return Err(SynthError::InvalidSpec(
                "b-cases need p0 >= 3 for three independent generating vectors per mode".into(),
            ));
        }
        if !(self.snr > 0.0) {
            return Err(SynthError::InvalidSpec("snr must be > 0".into()));
        }
        Ok(())
    }
}

/// Generating vectors of one synthetic draw.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorVectors {
    pub w: Vec<Array1<f64>>,
    pub v: Vec<Array1<f64>>,
    /// Present only for the `b` cases.
    pub u: Option<Vec<Array1<f64>>>,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub dataset: RegressionDataset,
    pub coefficient: DenseTensor,
    pub generators: GeneratorVectors,
    /// Noise standard deviation actually used (0 for noiseless cases).
    pub sigma: f64,
}

fn cosine(a: &Array1<f64>, b: &Array1<f64>) -> Option<f64> {
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
    Some(dot / (na * nb))
}

fn pair_independent(a: &Array1<f64>, b: &Array1<f64>) -> bool {
    matches!(cosine(a, b), Some(c) if c.abs() < 1.0 - 1e-10)
}

fn triple_independent(a: &Array1<f64>, b: &Array1<f64>, c: &Array1<f64>) -> bool {
    let cols = [a, b, c];
    let mut gram = Array2::zeros((3, 3));
    for i in 0..3 {
        for j in 0..3 {
            match cosine(cols[i], cols[j]) {
                Some(cs) => gram[(i, j)] = cs,
                None => return false,
            }
        }
    }
    let (vals, _) = sym_eigh(&gram);
    vals[0] > 1e-10
}

/// Degenerate rank-3 coefficient
/// `A0 = w1 ∘ v2 ∘ v3 + v1 ∘ w2 ∘ v3 + v1 ∘ v2 ∘ w3`.
pub fn make_coefficient_a(
    w: &[Array1<f64>],
    v: &[Array1<f64>],
) -> Result<DenseTensor, SynthError> {
    if w.len() != 3 || v.len() != 3 {
        return Err(SynthError::InvalidSpec(format!(
            "expected 3 modes of generating vectors, got {} and {}",
            w.len(),
            v.len()
        )));
    }
    for d in 0..3 {
        if !pair_independent(&w[d], &v[d]) {
            return Err(SynthError::DependentVectors { mode: d });
        }
    }
    let factors = coefficient_a_factors(w, v)?;
    Ok(cp_reconstruct(&factors))
}

fn coefficient_a_factors(
    w: &[Array1<f64>],
    v: &[Array1<f64>],
) -> Result<CpFactors, SynthError> {
    Ok(CpFactors::new(vec![
        column_matrix(&[w[0].clone(), v[0].clone(), v[0].clone()]),
        column_matrix(&[v[1].clone(), w[1].clone(), v[1].clone()]),
        column_matrix(&[v[2].clone(), v[2].clone(), w[2].clone()]),
    ])?)
}

/// Separated rank-3 coefficient
/// `A0 = u1 ∘ u2 ∘ u3 + v1 ∘ v2 ∘ v3 + w1 ∘ w2 ∘ w3`.
pub fn make_coefficient_b(
    u: &[Array1<f64>],
    v: &[Array1<f64>],
    w: &[Array1<f64>],
) -> Result<DenseTensor, SynthError> {
    if u.len() != 3 || v.len() != 3 || w.len() != 3 {
        return Err(SynthError::InvalidSpec(
            "expected 3 modes of generating vectors".into(),
        ));
    }
    for d in 0..3 {
        if !triple_independent(&u[d], &v[d], &w[d]) {
            return Err(SynthError::DependentVectors { mode: d });
        }
    }
    let factors = CpFactors::new(vec![
        column_matrix(&[u[0].clone(), v[0].clone(), w[0].clone()]),
        column_matrix(&[u[1].clone(), v[1].clone(), w[1].clone()]),
        column_matrix(&[u[2].clone(), v[2].clone(), w[2].clone()]),
    ])?;
    Ok(cp_reconstruct(&factors))
}

fn uniform_vector<R: Rng + ?Sized>(rng: &mut R, p: usize, lo: f64, hi: f64) -> Array1<f64> {
    Array1::from_shape_fn(p, |_| rng.random::<f64>() * (hi - lo) + lo)
}

/// `n` i.i.d. covariate tensors with independent `Unif(0,1)` entries.
pub fn gen_predictors(n: usize, p0: usize, seed: u64) -> Vec<DenseTensor> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(PREDICTOR_STREAM);
    gen_predictors_with(&mut rng, n, p0)
}

fn gen_predictors_with<R: Rng + ?Sized>(rng: &mut R, n: usize, p0: usize) -> Vec<DenseTensor> {
    (0..n)
        .map(|_| {
            let data: Vec<f64> = (0..p0 * p0 * p0).map(|_| rng.random::<f64>()).collect();
            DenseTensor::new(vec![p0, p0, p0], data).expect("cubic dims are valid")
        })
        .collect()
}

/// Noise standard deviation hitting the target SNR exactly on the generated
/// sample: `σ = sqrt(Var̂{⟨A0, X_i⟩} / snr)` with the unbiased sample
/// variance.
pub fn calibrate_noise(
    coefficient: &DenseTensor,
    predictors: &[DenseTensor],
    snr: f64,
) -> Result<f64, SynthError> {
    if predictors.len() < 2 {
        return Err(SynthError::TooFewPredictors(predictors.len()));
    }
    let signals: Vec<f64> = predictors
        .iter()
        .map(|x| crate::tensor::inner_product(coefficient, x))
        .collect::<Result<_, _>>()?;
    let var = sample_variance(&signals);
    if var <= 0.0 {
        return Err(SynthError::ZeroSignalVariance);
    }
    Ok((var / snr).sqrt())
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Draw one complete synthetic dataset for the spec'd case.
pub fn generate_case(spec: &SynthSpec) -> Result<SynthOutput, SynthError> {
    spec.validate()?;
    let p0 = spec.p0;
    let mut vec_rng = ChaCha12Rng::seed_from_u64(spec.seed);
    vec_rng.set_stream(VECTOR_STREAM);

    let (coefficient, generators) = if spec.case.is_separated() {
        loop {
            let u: Vec<Array1<f64>> =
                (0..3).map(|_| uniform_vector(&mut vec_rng, p0, -5.0, 5.0)).collect();
            let v: Vec<Array1<f64>> =
                (0..3).map(|_| uniform_vector(&mut vec_rng, p0, -5.0, 5.0)).collect();
            let w: Vec<Array1<f64>> =
                (0..3).map(|_| uniform_vector(&mut vec_rng, p0, -5.0, 5.0)).collect();
            if (0..3).all(|d| triple_independent(&u[d], &v[d], &w[d])) {
                let coeff = make_coefficient_b(&u, &v, &w)?;
                break (
                    coeff,
                    GeneratorVectors {
                        w,
                        v,
                        u: Some(u),
                    },
                );
            }
        }
    } else {
        loop {
            let w: Vec<Array1<f64>> =
                (0..3).map(|_| uniform_vector(&mut vec_rng, p0, -5.0, 5.0)).collect();
            let v: Vec<Array1<f64>> =
                (0..3).map(|_| uniform_vector(&mut vec_rng, p0, -5.0, 5.0)).collect();
            if (0..3).all(|d| pair_independent(&w[d], &v[d])) {
                let coeff = make_coefficient_a(&w, &v)?;
                break (coeff, GeneratorVectors { w, v, u: None });
            }
        }
    };

    let mut pred_rng = ChaCha12Rng::seed_from_u64(spec.seed);
    pred_rng.set_stream(PREDICTOR_STREAM);
    let predictors = gen_predictors_with(&mut pred_rng, spec.n, p0);

    let total = p0 * p0 * p0;
    let mut z = Array2::zeros((spec.n, total));
    for (i, x) in predictors.iter().enumerate() {
        for (j, &val) in x.as_slice().iter().enumerate() {
            z[(i, j)] = val;
        }
    }
    let avec = Array1::from(coefficient.as_slice().to_vec());
    let signals = z.dot(&avec);

    let mut y = signals.clone();
    let mut sigma = 0.0;
    if spec.case.is_noisy() {
        sigma = calibrate_noise(&coefficient, &predictors, spec.snr)?;
        let mut noise_rng = ChaCha12Rng::seed_from_u64(spec.seed);
        noise_rng.set_stream(NOISE_STREAM);
        for yi in y.iter_mut() {
            let eps: f64 = StandardNormal.sample(&mut noise_rng);
            *yi += sigma * eps;
        }
    }

    let dataset = RegressionDataset::new(vec![p0, p0, p0], z, y)?;
    Ok(SynthOutput {
        dataset,
        coefficient,
        generators,
        sigma,
    })
}
