//! Low-rank tensor linear regression with CP (CANDECOMP/PARAFAC) coefficient
//! structure, block updating solvers, and degeneracy diagnostics.
//!
//! The crate is organized around four modules:
//!
//! - [`tensor`]: dense tensor storage plus the multilinear algebra the rest of
//!   the crate builds on (outer products, unfoldings, Khatri-Rao products,
//!   CP reconstruction, parameter magnitude).
//! - [`regression`]: the tensor regression objectives (unpenalized least
//!   squares, CP-parameter ridge, coefficient-tensor ridge) and the block
//!   updating solver with multi-start, producing full iteration traces.
//! - [`degeneracy`]: detection of diverging CP parameter magnitudes from a
//!   fitted trace, minimum-eigenvalue collinearity diagnostics, and
//!   border-rank demonstration tensors.
//! - [`synth`]: reproducible synthetic benchmark generation with
//!   signal-to-noise calibration.
//!
//! All types are immutable values after construction and all operations are
//! pure functions, so everything here is safe to share across threads.

pub mod degeneracy;
pub mod linalg;
pub mod regression;
pub mod synth;
pub mod tensor;

pub use degeneracy::{
    border_sequence, classify_divergence, degenerate_target, eigen_diagnostics, fit_power_law,
    gradient_proxies, Cutoffs, DegeneracyError, DivergenceVerdict, EigenDiagnostics, PowerLawFit,
};
pub use regression::{
    block_design, block_update, fit_multi_start, fit_single, loss_f, objective, FitConfig,
    FitMethod, FitTrace, RegressionDataset, RegressionError, TraceRecord,
};
pub use synth::{
    calibrate_noise, gen_predictors, generate_case, make_coefficient_a, make_coefficient_b,
    SynthCase, SynthError, SynthOutput, SynthSpec,
};
pub use tensor::{
    cp_reconstruct, frobenius_norm, inner_product, khatri_rao, magnitude, rebalance, refold_mode,
    unfold_mode, CpFactors, DenseTensor, TensorError,
};
