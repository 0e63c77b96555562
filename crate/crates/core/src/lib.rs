//! Spectral estimation from a finite autocorrelation sequence.
//!
//! Two consistent spectra are computed from `R_0..R_n`:
//!
//! * the maximum-entropy spectrum `k²/|a(e^{jθ})|²` ([`me`]), the worst case
//!   for one-step prediction, and
//! * the most-random, fractional-pole spectrum `1/√(λG)` ([`mr`]), the worst
//!   case for smoothing from past and future samples.
//!
//! [`filters`] provides the matching predictor and smoother, [`simulate`]
//! draws realizations and [`reference`] holds a worked example.

pub mod error;
pub mod filters;
pub mod me;
pub mod moments;
pub mod mr;
pub mod reference;
pub mod simulate;
pub mod trigpoly;

pub use error::{Error, Result};
pub use filters::{
    entropy_integral, finite_window_smoother, finite_window_smoother_from_density, geometric_mean,
    harmonic_mean, inverse_integral, optimal_smoother, prediction_variance, smoother_variance,
    FilterCoeffs, FilterKind,
};
pub use me::{eval_me, fit_me, MeSpectrum};
pub use moments::{
    is_posdef, levinson, moments_of_density, sample_autocov, AutocovSeq, Levinson, MomentVector,
    PosDefReport,
};
pub use mr::{
    eval_mr, jacobian, moment_map, residual, solve_mr, trace_path, LagrangeVector, MrOptions,
    MrSolution, MrSpectrum, PathDiagnostics,
};
pub use simulate::{simulate_ar, simulate_spectral, simulate_true_example, Realization};
pub use trigpoly::{
    fourier_coeffs, min_on_grid, sample_grid, sample_grid_aligned, spectral_factorization,
    sqrt_coeffs, GridDensity, SpectralFactor, TrigPoly, DEFAULT_GRID,
};

pub use num_complex::Complex64;
