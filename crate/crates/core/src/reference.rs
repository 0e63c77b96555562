//! The worked "moving average plus sinusoid" example: its autocorrelation
//! data, its spectral density on a grid, and the published ME/MR values
//! used as regression targets.
//!
//! The process is `u_k = w_k + ½ w_{k-1} + 2 sin(k/2 + φ)` with
//! `Var w = 0.8`. Its spectrum is `1 + 0.8 cos θ` plus two lines of unit
//! (normalized) mass at `θ = ±½`, so `R_k = MA(k) + 2 cos(k/2)`.

use std::f64::consts::PI;

use crate::error::Result;
use crate::trigpoly::{check_grid, grid_theta, GridDensity};

/// `R_0..R_3` as published (four decimals).
pub const REFERENCE_LAGS: [f64; 4] = [3.0000, 2.1552, 1.0806, 0.1415];

/// Published ME predictor polynomial tail `a_1..a_3`.
pub const PUBLISHED_ME_A: [f64; 3] = [-0.9026, 0.1829, 0.1465];
/// Published value labelled `k_ME`.
pub const PUBLISHED_K_ME: f64 = 1.2732;
/// Published `λ_0..λ_3`.
pub const PUBLISHED_LAMBDA: [f64; 4] = [3.4942, -2.5690, 0.9598, -0.1231];
/// Published fractional-pole factor `â_1..â_3`.
pub const PUBLISHED_MR_A: [f64; 3] = [-1.7673, 1.1795, -0.1956];
/// Published value labelled `κ`.
pub const PUBLISHED_KAPPA: f64 = 1.2732;

/// Frequency of the sinusoid.
pub const LINE_FREQ: f64 = 0.5;
/// Power of the sinusoid, `2²/2`.
pub const LINE_POWER: f64 = 2.0;
/// Variance of the white noise driving the MA part.
pub const MA_NOISE_VAR: f64 = 0.8;

/// Exact autocorrelation of the example process at lag `k`.
pub fn exact_lag(k: usize) -> f64 {
    let ma = match k {
        0 => MA_NOISE_VAR * 1.25,
        1 => MA_NOISE_VAR * 0.5,
        _ => 0.0,
    };
    ma + LINE_POWER * (LINE_FREQ * k as f64).cos()
}

/// Absolutely continuous part `1 + 0.8 cos θ`.
pub fn continuous_part(theta: f64) -> f64 {
    MA_NOISE_VAR * (1.25 + theta.cos())
}

/// Grid version of the full spectrum. Each line's mass is lumped into the
/// nearest bin as `mass·2π/Δθ = mass·N`; exact only as `N → ∞`.
pub fn true_density(n_grid: usize) -> Result<GridDensity> {
    check_grid(n_grid)?;
    let mut values: Vec<f64> = (0..n_grid)
        .map(|i| continuous_part(grid_theta(n_grid, false, i)))
        .collect();
    let mass = LINE_POWER / 2.0;
    for freq in [LINE_FREQ, -LINE_FREQ] {
        let idx = ((freq + PI) * n_grid as f64 / (2.0 * PI)).round() as usize % n_grid;
        values[idx] += mass * n_grid as f64;
    }
    GridDensity::new(values, false)
}
