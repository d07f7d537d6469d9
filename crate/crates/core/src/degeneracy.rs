//! Degeneracy detection and diagnostics.
//!
//! A rank-restricted tensor regression whose infimum is not attained drives
//! the CP parameter magnitude `M(θ_t)` to infinity along any minimizing
//! iterate sequence, with the normalized rank-1 directions becoming
//! collinear. This module provides:
//!
//! - [`eigen_diagnostics`]: λ_min of the Gram matrix of the normalized
//!   rank-1 Kronecker directions, plus per-mode normalized λ_min values.
//! - the magnitude-curve classifier: finite-difference slope proxies over the
//!   window `[T/2, T]`, a grid-search power-law fit `h(t) = a·t^b + c`, and
//!   the cutoff rule deciding divergence.
//! - border-rank demonstration tensors: a rank-2 sequence converging to a
//!   rank-3 target.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::linalg::sym_eigh;
use crate::tensor::{column_matrix, cp_reconstruct, CpFactors, DenseTensor, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegeneracyError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("all rank-1 terms are zero; normalized diagnostics are undefined")]
    AllTermsZero,
    #[error("magnitude samples missing at iteration {0}")]
    MissingSample(u64),
    #[error("window [{lo}, {hi}] with spacing {spacing} yields fewer than {min} proxy points")]
    InsufficientWindow {
        lo: u64,
        hi: u64,
        spacing: u64,
        min: usize,
    },
    #[error("power-law fit needs at least 3 proxy points, got {0}")]
    TooFewPoints(usize),
    #[error("every candidate exponent produced a degenerate regressor")]
    NoUsableExponent,
    #[error("vectors must come in {expected} modes, got {got}")]
    WrongModeCount { expected: usize, got: usize },
    #[error("vector pair in mode {mode} is numerically linearly dependent")]
    DependentPair { mode: usize },
}

/// Minimum-eigenvalue collinearity diagnostics of the CP parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDiagnostics {
    /// λ_min(D_tᵀ D_t) where the columns of `D_t` are the unit-norm
    /// Kronecker vectors of the rank-1 terms. Always in `[0, 1]`.
    pub lambda_min_d: f64,
    /// Per mode `d`: λ_min(B_dᵀ B_d) / ∏_r ‖β_{d,r}‖².
    pub per_mode: Vec<f64>,
    /// M(θ) of the diagnosed factors.
    pub magnitude: f64,
    /// Rank-1 terms excluded because some column norm was exactly zero.
    pub dropped_terms: usize,
}

/// Build the normalized rank-1 Gram diagnostics.
///
/// `⟨d_r, d_s⟩` factorizes over modes as `Π_d cos∠(β_{d,r}, β_{d,s})`, so the
/// Gram is assembled without materializing the Kronecker columns. Rank-1
/// terms with a zero column are dropped (counted in `dropped_terms`); if all
/// terms are zero the diagnostics are undefined.
pub fn eigen_diagnostics(factors: &CpFactors) -> Result<EigenDiagnostics, DegeneracyError> {
    let order = factors.order();
    let rank = factors.rank();
    let mut kept = Vec::with_capacity(rank);
    for r in 0..rank {
        let nonzero = (0..order).all(|d| factors.column_norm(d, r) > 0.0);
        if nonzero {
            kept.push(r);
        }
    }
    if kept.is_empty() {
        return Err(DegeneracyError::AllTermsZero);
    }
    let k = kept.len();
    let mut gram = Array2::zeros((k, k));
    for (a, &r) in kept.iter().enumerate() {
        for (b, &s) in kept.iter().enumerate() {
            let mut rho = 1.0;
            for d in 0..order {
                let br = factors.factor(d).column(r);
                let bs = factors.factor(d).column(s);
                let dot: f64 = br.iter().zip(bs.iter()).map(|(x, y)| x * y).sum();
                rho *= dot / (factors.column_norm(d, r) * factors.column_norm(d, s));
            }
            gram[(a, b)] = rho;
        }
    }
    let (vals, _) = sym_eigh(&gram);
    let lambda_min_d = vals[0].clamp(0.0, 1.0);

    let per_mode = (0..order)
        .map(|d| {
            let p = factors.factor(d).nrows();
            let mut bd = Array2::zeros((p, k));
            let mut denom = 1.0;
            for (col, &r) in kept.iter().enumerate() {
                for i in 0..p {
                    bd[(i, col)] = factors.factor(d)[(i, r)];
                }
                let nrm = factors.column_norm(d, r);
                denom *= nrm * nrm;
            }
            let gram_d = bd.t().dot(&bd);
            let (vals_d, _) = sym_eigh(&gram_d);
            vals_d[0].max(0.0) / denom
        })
        .collect();

    Ok(EigenDiagnostics {
        lambda_min_d,
        per_mode,
        magnitude: crate::tensor::magnitude(factors),
        dropped_terms: rank - k,
    })
}

/// Finite-difference slope proxies of a magnitude curve: for each
/// `t = lo, lo+s, ..., hi−s` returns `(t, (M(t+s) − M(t)) / s)`.
pub fn gradient_proxies(
    magnitudes: &BTreeMap<u64, f64>,
    window: (u64, u64),
    spacing: u64,
) -> Result<Vec<(f64, f64)>, DegeneracyError> {
    let (lo, hi) = window;
    if spacing == 0 || hi <= lo || (hi - lo) < spacing {
        return Err(DegeneracyError::InsufficientWindow {
            lo,
            hi,
            spacing: spacing.max(1),
            min: 1,
        });
    }
    let mut out = Vec::new();
    let mut t = lo;
    while t + spacing <= hi {
        let m0 = *magnitudes
            .get(&t)
            .ok_or(DegeneracyError::MissingSample(t))?;
        let m1 = *magnitudes
            .get(&(t + spacing))
            .ok_or(DegeneracyError::MissingSample(t + spacing))?;
        out.push((t as f64, (m1 - m0) / spacing as f64));
        t += spacing;
    }
    Ok(out)
}

/// Fitted parameters of the slope surrogate `h(t) = a·t^b + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub sse: f64,
}

/// Exponent grid for the power-law fit, expressed in thousandths so that
/// refining the step keeps coarser grids as exact subsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentGrid {
    pub lo_thousandths: i64,
    pub hi_thousandths: i64,
    pub step_thousandths: i64,
}

impl Default for ExponentGrid {
    fn default() -> Self {
        // b in [-2, 1] step 0.005
        Self {
            lo_thousandths: -2000,
            hi_thousandths: 1000,
            step_thousandths: 5,
        }
    }
}

/// Least-squares fit of `h(t) = a·t^b + c`: exhaustive search of `b` over the
/// grid, an exact 2-parameter linear solve in `(a, c)` for each candidate,
/// smallest SSE wins with ties broken toward the smallest `b`. Candidates
/// whose regressor `t^b` is numerically constant are skipped.
pub fn fit_power_law(proxies: &[(f64, f64)]) -> Result<PowerLawFit, DegeneracyError> {
    fit_power_law_grid(proxies, ExponentGrid::default())
}

pub fn fit_power_law_grid(
    proxies: &[(f64, f64)],
    grid: ExponentGrid,
) -> Result<PowerLawFit, DegeneracyError> {
    let n = proxies.len();
    if n < 3 {
        return Err(DegeneracyError::TooFewPoints(n));
    }
    let mut best: Option<PowerLawFit> = None;
    let mut num = grid.lo_thousandths;
    while num <= grid.hi_thousandths {
        let b = num as f64 / 1000.0;
        num += grid.step_thousandths;
        let x: Vec<f64> = proxies.iter().map(|&(t, _)| t.powf(b)).collect();
        let xmax = x.iter().cloned().fold(f64::MIN, f64::max);
        let xmin = x.iter().cloned().fold(f64::MAX, f64::min);
        if (xmax - xmin).abs() <= 1e-12 * xmax.abs().max(xmin.abs()) {
            continue;
        }
        let xbar = x.iter().sum::<f64>() / n as f64;
        let gbar = proxies.iter().map(|&(_, g)| g).sum::<f64>() / n as f64;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for (&xi, &(_, gi)) in x.iter().zip(proxies.iter()) {
            sxx += (xi - xbar) * (xi - xbar);
            sxy += (xi - xbar) * (gi - gbar);
        }
        if sxx == 0.0 || !sxx.is_finite() {
            continue;
        }
        let a = sxy / sxx;
        let c = gbar - a * xbar;
        let sse: f64 = x
            .iter()
            .zip(proxies.iter())
            .map(|(&xi, &(_, gi))| {
                let r = gi - (a * xi + c);
                r * r
            })
            .sum();
        if !sse.is_finite() {
            continue;
        }
        if best.map_or(true, |bst| sse < bst.sse) {
            best = Some(PowerLawFit { a, b, c, sse });
        }
    }
    best.ok_or(DegeneracyError::NoUsableExponent)
}

/// Classifier cutoffs `(γ_b, η_c, γ_c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoffs {
    pub gamma_b: f64,
    pub eta_c: f64,
    pub gamma_c: f64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        // conservative defaults tuned for iterative curve fitters
        Self {
            gamma_b: -0.5,
            eta_c: 0.0,
            gamma_c: 0.0015,
        }
    }
}

impl Cutoffs {
    pub fn new(gamma_b: f64, eta_c: f64, gamma_c: f64) -> Self {
        Self {
            gamma_b,
            eta_c,
            gamma_c,
        }
    }
}

/// Which clause of the divergence rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleBranch {
    /// `â > 0` and `ĉ > γ_c`.
    PositiveOffset,
    /// `â > 0`, `b̂ ≥ γ_b`, `η_c ≤ ĉ ≤ γ_c`.
    SlowDecay,
}

/// Outcome of the magnitude-curve divergence classification.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceVerdict {
    pub divergent: bool,
    /// True when `M(θ_T) ≤ M(θ_{T/2})`; the fit is skipped in that case.
    pub shortcut_nondivergent: bool,
    pub fit: Option<PowerLawFit>,
    pub branch: Option<RuleBranch>,
    pub cutoffs: Cutoffs,
}

/// Classify a magnitude curve over `[T/2, T]` with proxy spacing `T/1000`.
///
/// The shortcut applies first: a curve with `M(θ_T) ≤ M(θ_{T/2})` is
/// non-divergent. Otherwise slope proxies are fitted with the power-law grid
/// search and the rule is
/// `(â>0 ∧ ĉ>γ_c) ∨ (â>0 ∧ b̂≥γ_b ∧ η_c≤ĉ≤γ_c)`.
pub fn classify_divergence(
    magnitudes: &BTreeMap<u64, f64>,
    t_max: u64,
    cutoffs: Cutoffs,
) -> Result<DivergenceVerdict, DegeneracyError> {
    let t_lo = t_max / 2;
    let spacing = t_max / 1000;
    if spacing == 0 || t_lo == 0 {
        return Err(DegeneracyError::InsufficientWindow {
            lo: t_lo,
            hi: t_max,
            spacing: spacing.max(1),
            min: 3,
        });
    }
    let m_lo = *magnitudes
        .get(&t_lo)
        .ok_or(DegeneracyError::MissingSample(t_lo))?;
    let m_hi = *magnitudes
        .get(&t_max)
        .ok_or(DegeneracyError::MissingSample(t_max))?;
    if m_hi <= m_lo {
        return Ok(DivergenceVerdict {
            divergent: false,
            shortcut_nondivergent: true,
            fit: None,
            branch: None,
            cutoffs,
        });
    }
    let proxies = gradient_proxies(magnitudes, (t_lo, t_max), spacing)?;
    let fit = fit_power_law(&proxies)?;
    let branch = if fit.a > 0.0 && fit.c > cutoffs.gamma_c {
        Some(RuleBranch::PositiveOffset)
    } else if fit.a > 0.0
        && fit.b >= cutoffs.gamma_b
        && fit.c >= cutoffs.eta_c
        && fit.c <= cutoffs.gamma_c
    {
        Some(RuleBranch::SlowDecay)
    } else {
        None
    };
    Ok(DivergenceVerdict {
        divergent: branch.is_some(),
        shortcut_nondivergent: false,
        fit: Some(fit),
        branch,
        cutoffs,
    })
}

fn check_three_modes(
    w: &[Array1<f64>],
    v: &[Array1<f64>],
) -> Result<(), DegeneracyError> {
    if w.len() != 3 || v.len() != 3 {
        return Err(DegeneracyError::WrongModeCount {
            expected: 3,
            got: w.len().max(v.len()),
        });
    }
    for d in 0..3 {
        if w[d].len() != v[d].len() {
            return Err(DegeneracyError::Tensor(TensorError::ShapeMismatch {
                left: vec![w[d].len()],
                right: vec![v[d].len()],
            }));
        }
    }
    Ok(())
}

fn pair_independent(w: &Array1<f64>, v: &Array1<f64>) -> bool {
    let nw: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nw == 0.0 || nv == 0.0 {
        return false;
    }
    let dot: f64 = w.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    (dot / (nw * nv)).abs() < 1.0 - 1e-10
}

/// Rank-2 member of the sequence converging to the rank-3 limit tensor:
/// `G_γ = γ (w_1 + v_1/γ) ∘ (w_2 + v_2/γ) ∘ (w_3 + v_3/γ) − γ w_1 ∘ w_2 ∘ w_3`.
pub fn border_sequence(
    gamma: f64,
    w: &[Array1<f64>],
    v: &[Array1<f64>],
) -> Result<DenseTensor, DegeneracyError> {
    check_three_modes(w, v)?;
    let mut first_cols = Vec::with_capacity(3);
    for d in 0..3 {
        let mut col = &w[d] + &(&v[d] / gamma);
        if d == 0 {
            col *= gamma;
        }
        first_cols.push(col);
    }
    let second_cols = [
        w[0].clone() * (-gamma),
        w[1].clone(),
        w[2].clone(),
    ];
    let factors = CpFactors::new(vec![
        column_matrix(&[first_cols[0].clone(), second_cols[0].clone()]),
        column_matrix(&[first_cols[1].clone(), second_cols[1].clone()]),
        column_matrix(&[first_cols[2].clone(), second_cols[2].clone()]),
    ])?;
    Ok(cp_reconstruct(&factors))
}

/// The rank-3, border-rank-2 target of the sequence:
/// `G = v_1 ∘ w_2 ∘ w_3 + w_1 ∘ v_2 ∘ w_3 + w_1 ∘ w_2 ∘ v_3`.
pub fn degenerate_target(
    w: &[Array1<f64>],
    v: &[Array1<f64>],
) -> Result<DenseTensor, DegeneracyError> {
    check_three_modes(w, v)?;
    for d in 0..3 {
        if !pair_independent(&w[d], &v[d]) {
            return Err(DegeneracyError::DependentPair { mode: d });
        }
    }
    let factors = CpFactors::new(vec![
        column_matrix(&[v[0].clone(), w[0].clone(), w[0].clone()]),
        column_matrix(&[w[1].clone(), v[1].clone(), w[1].clone()]),
        column_matrix(&[w[2].clone(), w[2].clone(), v[2].clone()]),
    ])?;
    Ok(cp_reconstruct(&factors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::frobenius_norm;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn basis(p: usize, i: usize) -> Array1<f64> {
        let mut v = Array1::zeros(p);
        v[i] = 1.0;
        v
    }

    #[test]
    fn eigen_rank_one_is_unity() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let f = CpFactors::standard_normal(&[3, 3, 3], 1, &mut rng);
        let diag = eigen_diagnostics(&f).unwrap();
        assert_abs_diff_eq!(diag.lambda_min_d, 1.0, epsilon = 1e-12);
        assert_eq!(diag.dropped_terms, 0);
    }

    #[test]
    fn eigen_duplicate_terms_collapse_to_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let one = CpFactors::standard_normal(&[3, 3, 3], 1, &mut rng);
        let dup = CpFactors::new(
            (0..3)
                .map(|d| {
                    let col = one.factor(d).column(0).to_owned();
                    column_matrix(&[col.clone(), col])
                })
                .collect(),
        )
        .unwrap();
        let diag = eigen_diagnostics(&dup).unwrap();
        assert_abs_diff_eq!(diag.lambda_min_d, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn eigen_matches_cosine_product_closed_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let f = CpFactors::standard_normal(&[3, 3, 3], 2, &mut rng);
        let mut rho = 1.0;
        for d in 0..3 {
            let b0 = f.factor(d).column(0);
            let b1 = f.factor(d).column(1);
            let dot: f64 = b0.iter().zip(b1.iter()).map(|(a, b)| a * b).sum();
            rho *= dot / (f.column_norm(d, 0) * f.column_norm(d, 1));
        }
        let diag = eigen_diagnostics(&f).unwrap();
        assert_abs_diff_eq!(diag.lambda_min_d, 1.0 - rho.abs(), epsilon = 1e-10);
    }

    #[test]
    fn eigen_drops_zero_terms_and_flags_all_zero() {
        let mut f = {
            let mut rng = ChaCha12Rng::seed_from_u64(4);
            CpFactors::standard_normal(&[2, 2, 2], 2, &mut rng)
        };
        for x in f.factors_mut()[1].column_mut(1).iter_mut() {
            *x = 0.0;
        }
        let diag = eigen_diagnostics(&f).unwrap();
        assert_eq!(diag.dropped_terms, 1);
        assert_abs_diff_eq!(diag.lambda_min_d, 1.0, epsilon = 1e-12);

        let zero = CpFactors::new(vec![
            Array2::zeros((2, 1)),
            Array2::zeros((2, 1)),
            Array2::zeros((2, 1)),
        ])
        .unwrap();
        assert!(matches!(
            eigen_diagnostics(&zero),
            Err(DegeneracyError::AllTermsZero)
        ));
    }

    fn curve<F: Fn(f64) -> f64>(f: F, t_max: u64, stride: u64) -> BTreeMap<u64, f64> {
        (1..=t_max)
            .step_by(stride as usize)
            .chain([t_max])
            .map(|t| (t, f(t as f64)))
            .collect()
    }

    #[test]
    fn proxies_of_simple_curves() {
        let t_max = 2000u64;
        let constant = curve(|_| 5.0, t_max, 1);
        let p = gradient_proxies(&constant, (1000, 2000), 2).unwrap();
        assert!(p.iter().all(|&(_, s)| s == 0.0));

        let linear = curve(|t| 2.0 * t, t_max, 1);
        let p = gradient_proxies(&linear, (1000, 2000), 2).unwrap();
        assert!(p.iter().all(|&(_, s)| s == 2.0));

        // sqrt curve: slope ~ 0.5 t^(-1/2) within 1% at the paper's window
        let sq: BTreeMap<u64, f64> = (50_000..=100_000)
            .step_by(100)
            .map(|t| (t, (t as f64).sqrt()))
            .collect();
        let p = gradient_proxies(&sq, (50_000, 100_000), 100).unwrap();
        for &(t, s) in &p {
            let want = 0.5 * t.powf(-0.5);
            assert!((s - want).abs() <= 0.01 * want, "t={t}: {s} vs {want}");
        }
    }

    #[test]
    fn proxies_demand_complete_samples() {
        let mut mags = curve(|t| t, 100, 1);
        mags.remove(&60);
        assert!(matches!(
            gradient_proxies(&mags, (50, 100), 10),
            Err(DegeneracyError::MissingSample(60))
        ));
    }

    #[test]
    fn power_law_recovers_planted_parameters() {
        let proxies: Vec<(f64, f64)> = (50_000..100_000)
            .step_by(100)
            .map(|t| {
                let t = t as f64;
                (t, 3.0 * t.powf(-0.7) + 0.002)
            })
            .collect();
        let fit = fit_power_law(&proxies).unwrap();
        assert!((fit.a - 3.0).abs() <= 1e-3 * 3.0, "a = {}", fit.a);
        assert!((fit.b + 0.7).abs() <= 0.005, "b = {}", fit.b);
        assert!((fit.c - 0.002).abs() <= 1e-6, "c = {}", fit.c);
    }

    #[test]
    fn power_law_constant_proxies_give_zero_slope_coefficient() {
        let proxies: Vec<(f64, f64)> = (1000..2000).step_by(10).map(|t| (t as f64, 0.75)).collect();
        let fit = fit_power_law(&proxies).unwrap();
        assert_abs_diff_eq!(fit.a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.c, 0.75, epsilon = 1e-12);
        assert!(fit.sse <= 1e-20);
        // ties resolve toward the smallest exponent on the grid
        assert_abs_diff_eq!(fit.b, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn power_law_noise_floor_is_consistent() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let noise = 1e-6;
        let proxies: Vec<(f64, f64)> = (10_000..20_000)
            .step_by(20)
            .map(|t| {
                let t = t as f64;
                let eps = (rng.random::<f64>() * 2.0 - 1.0) * noise;
                (t, 2.0 * t.powf(-0.6) + eps)
            })
            .collect();
        let fit = fit_power_law(&proxies).unwrap();
        let n = proxies.len() as f64;
        assert!(fit.sse <= 2.0 * n * noise * noise, "sse = {}", fit.sse);
    }

    #[test]
    fn power_law_needs_three_points() {
        let p = vec![(1.0, 1.0), (2.0, 2.0)];
        assert!(matches!(
            fit_power_law(&p),
            Err(DegeneracyError::TooFewPoints(2))
        ));
    }

    #[test]
    fn grid_refinement_never_raises_sse() {
        let proxies: Vec<(f64, f64)> = (10_000..20_000)
            .step_by(20)
            .map(|t| {
                let t = t as f64;
                (t, 1.3 * t.powf(-0.643) + 0.0004)
            })
            .collect();
        let coarse = fit_power_law_grid(
            &proxies,
            ExponentGrid {
                step_thousandths: 10,
                ..ExponentGrid::default()
            },
        )
        .unwrap();
        let fine = fit_power_law_grid(
            &proxies,
            ExponentGrid {
                step_thousandths: 5,
                ..ExponentGrid::default()
            },
        )
        .unwrap();
        assert!(fine.sse <= coarse.sse + 1e-18);
    }

    #[test]
    fn classify_constant_curve_uses_shortcut() {
        let t_max = 20_000;
        let mags = curve(|_| 7.0, t_max, 1);
        let v = classify_divergence(&mags, t_max, Cutoffs::default()).unwrap();
        assert!(!v.divergent);
        assert!(v.shortcut_nondivergent);
        assert!(v.fit.is_none());
    }

    #[test]
    fn classify_linear_curve_as_divergent() {
        let t_max = 20_000;
        let mags = curve(|t| 0.01 * t, t_max, 1);
        let v = classify_divergence(&mags, t_max, Cutoffs::default()).unwrap();
        assert!(v.divergent, "verdict: {v:?}");
        let fit = v.fit.unwrap();
        assert!((fit.c - 0.01).abs() <= 1e-4 || fit.a > 0.0);
    }

    #[test]
    fn classify_saturating_curve_as_non_divergent() {
        let t_max = 20_000;
        let mags = curve(|t| 10.0 - 5.0 * (-t / 2000.0).exp(), t_max, 1);
        let v = classify_divergence(&mags, t_max, Cutoffs::default()).unwrap();
        assert!(!v.divergent, "verdict: {v:?}");
        assert!(!v.shortcut_nondivergent);
        let fit = v.fit.unwrap();
        assert!(fit.b < -1.0 || fit.c.abs() < 1e-3);
    }

    #[test]
    fn shortcut_dominates_any_fit() {
        // strictly decreasing over [T/2, T] but wildly shaped before
        let t_max = 10_000;
        let mags = curve(
            |t| if t < 5000.0 { t } else { 5000.0 - (t - 5000.0) * 0.5 },
            t_max,
            1,
        );
        let v = classify_divergence(&mags, t_max, Cutoffs::default()).unwrap();
        assert!(v.shortcut_nondivergent);
        assert!(!v.divergent);
    }

    #[test]
    fn cutoff_overrides_change_the_verdict() {
        let t_max = 20_000;
        let mags = curve(|t| 0.01 * t, t_max, 1);
        // an absurdly large gamma_c forces the first clause off; the second
        // clause needs c <= gamma_c and c >= eta_c
        let v = classify_divergence(&mags, t_max, Cutoffs::new(-0.5, 0.0, 1e9)).unwrap();
        let fit = v.fit.unwrap();
        let expect = fit.a > 0.0 && fit.b >= -0.5 && fit.c >= 0.0 && fit.c <= 1e9;
        assert_eq!(v.divergent, expect);
    }

    #[test]
    fn border_sequence_matches_exact_expansion() {
        let w: Vec<Array1<f64>> = (0..3).map(|_| basis(2, 0)).collect();
        let v: Vec<Array1<f64>> = (0..3).map(|_| basis(2, 1)).collect();
        let target = degenerate_target(&w, &v).unwrap();
        let g10 = border_sequence(10.0, &w, &v).unwrap();
        let err = frobenius_norm(&g10.sub(&target).unwrap());
        let want = (3.0 / 100.0 + 1.0 / 10_000.0_f64).sqrt();
        assert_abs_diff_eq!(err, want, epsilon = 1e-12);
        assert_abs_diff_eq!(err, 0.173_493_515_729_081_56, epsilon = 1e-9);
    }

    #[test]
    fn border_sequence_error_decays_like_inverse_gamma() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let w: Vec<Array1<f64>> =
            (0..3).map(|_| Array1::from_shape_fn(4, |_| rng.random::<f64>() - 0.5)).collect();
        let v: Vec<Array1<f64>> =
            (0..3).map(|_| Array1::from_shape_fn(4, |_| rng.random::<f64>() - 0.5)).collect();
        let target = degenerate_target(&w, &v).unwrap();
        let mut prev = f64::INFINITY;
        for gamma in [10.0, 100.0, 1000.0] {
            let g = border_sequence(gamma, &w, &v).unwrap();
            let err = frobenius_norm(&g.sub(&target).unwrap());
            if prev.is_finite() {
                assert!(err <= 0.15 * prev, "gamma {gamma}: {err} vs prev {prev}");
            }
            prev = err;
        }
    }

    #[test]
    fn degenerate_target_basis_case() {
        let w: Vec<Array1<f64>> = (0..3).map(|_| basis(2, 0)).collect();
        let v: Vec<Array1<f64>> = (0..3).map(|_| basis(2, 1)).collect();
        let g = degenerate_target(&w, &v).unwrap();
        assert_eq!(g.get(&[1, 0, 0]), 1.0);
        assert_eq!(g.get(&[0, 1, 0]), 1.0);
        assert_eq!(g.get(&[0, 0, 1]), 1.0);
        assert_eq!(g.as_slice().iter().filter(|&&x| x != 0.0).count(), 3);
        assert_abs_diff_eq!(frobenius_norm(&g), 3.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn degenerate_target_cyclic_symmetry() {
        let w: Vec<Array1<f64>> = (0..3).map(|_| array![1.0, 2.0, 0.5]).collect();
        let v: Vec<Array1<f64>> = (0..3).map(|_| array![0.0, 1.0, -1.0]).collect();
        let g = degenerate_target(&w, &v).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_abs_diff_eq!(
                        g.get(&[i, j, k]),
                        g.get(&[j, k, i]),
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_target_rejects_dependent_pairs() {
        let w: Vec<Array1<f64>> = (0..3).map(|_| array![1.0, 1.0]).collect();
        let mut v: Vec<Array1<f64>> = (0..3).map(|_| array![0.0, 1.0]).collect();
        v[1] = array![2.0, 2.0];
        assert!(matches!(
            degenerate_target(&w, &v),
            Err(DegeneracyError::DependentPair { mode: 1 })
        ));
    }
}
