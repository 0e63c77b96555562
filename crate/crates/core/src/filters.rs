//! Prediction and smoothing: harmonic and geometric means of a density,
//! the optimal two-sided smoother and its finite-window approximations.
//!
//! A smoother estimates `u_0` by `Σ_{k≠0} β_k u_{-k}`; its error maps to
//! the function `1 − Σ_{k≠0} β_k e^{jkθ}` and the error variance is the
//! weighted norm `(1/2π)∫ |1 − Σ β_k e^{jkθ}|² f(θ) dθ`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{levinson, moments_of_density, AutocovSeq};
use crate::trigpoly::{grid_coeffs, min_on_grid, GridDensity};

/// Density values at or below this are treated as zeros of the density.
const ZERO_DENSITY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Predictor,
    Smoother,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCoeffs {
    pub kind: FilterKind,
    /// Lag `k` ↦ coefficient of `u_{-k}`.
    pub coeffs: BTreeMap<i64, Complex64>,
    pub variance: f64,
}

impl FilterCoeffs {
    /// `α_1..α_n` applied to `u_{-1}..u_{-n}`.
    pub fn predictor(alpha: Vec<Complex64>, variance: f64) -> Self {
        Self {
            kind: FilterKind::Predictor,
            coeffs: alpha
                .into_iter()
                .enumerate()
                .map(|(i, c)| (i as i64 + 1, c))
                .collect(),
            variance,
        }
    }

    pub fn smoother(coeffs: BTreeMap<i64, Complex64>, variance: f64) -> Result<Self> {
        if coeffs.contains_key(&0) {
            return Err(Error::InvalidArgument("smoother cannot use lag 0".into()));
        }
        Ok(Self {
            kind: FilterKind::Smoother,
            coeffs,
            variance,
        })
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn max_lag(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }
}

/// `(1/2π)∫ f⁻¹ dθ`; infinite if the density vanishes on the grid.
pub fn inverse_integral(g: &GridDensity) -> f64 {
    if g.values().iter().any(|&v| v <= ZERO_DENSITY) {
        return f64::INFINITY;
    }
    g.mean_of(|v| 1.0 / v)
}

/// `(1/2π)∫ log f dθ`; `-∞` if the density vanishes on the grid.
pub fn entropy_integral(g: &GridDensity) -> f64 {
    if g.values().iter().any(|&v| v <= ZERO_DENSITY) {
        return f64::NEG_INFINITY;
    }
    g.mean_of(f64::ln)
}

/// Minimal two-sided smoothing error variance, `((1/2π)∫ f⁻¹)⁻¹`.
///
/// On a finite grid a non-integrable `f⁻¹` shows up only as a value that
/// keeps shrinking under refinement.
pub fn harmonic_mean(g: &GridDensity) -> f64 {
    let inv = inverse_integral(g);
    if inv.is_infinite() {
        0.0
    } else {
        1.0 / inv
    }
}

/// Minimal one-step prediction error variance, `exp((1/2π)∫ log f)`.
pub fn geometric_mean(g: &GridDensity) -> f64 {
    entropy_integral(g).exp()
}

/// The smoother from `α_0 = f⁻¹ / (1/2π)∫f⁻¹`: with `α_0 = 1 + Σ ρ_k e^{jkθ}`,
/// `β_k = −ρ_k` for `0 < |k| ≤ max_lag`.
pub fn optimal_smoother(g: &GridDensity, max_lag: usize) -> Result<FilterCoeffs> {
    let (theta, min) = min_on_grid(g);
    if min <= ZERO_DENSITY {
        return Err(Error::NotPositive { theta, min });
    }
    if 2 * max_lag >= g.n_grid() {
        return Err(Error::InvalidArgument(format!(
            "max_lag {max_lag} must be below n_grid/2"
        )));
    }
    let inv = inverse_integral(g);
    let alpha: Vec<f64> = g.values().iter().map(|v| 1.0 / (v * inv)).collect();
    let rho = grid_coeffs(&alpha, g.is_midpoint(), max_lag);
    debug_assert!((rho[0] - 1.0).norm() < 1e-10);
    if (rho[0] - 1.0).norm() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "normalization failed: ρ_0 = {}",
            rho[0]
        )));
    }
    let mut coeffs = BTreeMap::new();
    for (k, r) in rho.iter().enumerate().skip(1) {
        coeffs.insert(k as i64, -r);
        coeffs.insert(-(k as i64), -r.conj());
    }
    FilterCoeffs::smoother(coeffs, 1.0 / inv)
}

fn lag_of(r: &[Complex64], k: i64) -> Complex64 {
    let c = r[k.unsigned_abs() as usize];
    if k >= 0 {
        c
    } else {
        c.conj()
    }
}

/// Error variance of an arbitrary smoother under autocorrelations `r`
/// (`R_0..R_K`, long enough to cover every lag difference).
pub fn smoother_variance(filter: &FilterCoeffs, r: &[Complex64]) -> Result<f64> {
    let span = 2 * filter.max_lag() as usize;
    if r.len() <= span {
        return Err(Error::InvalidArgument(format!(
            "need autocorrelations up to lag {span}"
        )));
    }
    let mut v = r[0].re;
    for (&k, b) in &filter.coeffs {
        v -= 2.0 * (b * lag_of(r, -k)).re;
    }
    let mut quad = Complex64::new(0.0, 0.0);
    for (&k, bk) in &filter.coeffs {
        for (&l, bl) in &filter.coeffs {
            quad += bk * bl.conj() * lag_of(r, l - k);
        }
    }
    Ok(v + quad.re)
}

/// Least-squares smoother restricted to lags `0 < |k| ≤ window`, from
/// autocorrelations `R_0..R_{2·window}`.
pub fn finite_window_smoother(r: &AutocovSeq, window: usize) -> Result<FilterCoeffs> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    if r.n() < 2 * window {
        return Err(Error::InvalidArgument(format!(
            "window {window} needs autocorrelations up to lag {}",
            2 * window
        )));
    }
    let lags: Vec<i64> = (-(window as i64)..=window as i64)
        .filter(|&k| k != 0)
        .collect();
    let rs = r.as_slice();
    let dim = lags.len();
    // Σ_k R_{ℓ-k} β_k = R_ℓ
    let a = DMatrix::from_fn(dim, dim, |i, j| lag_of(rs, lags[i] - lags[j]));
    let rhs = nalgebra::DVector::from_iterator(dim, lags.iter().map(|&l| lag_of(rs, l)));
    let chol = a.cholesky().ok_or(Error::SingularSystem)?;
    let beta = chol.solve(&rhs);
    if beta.iter().any(|b| !b.re.is_finite() || !b.im.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let coeffs: BTreeMap<i64, Complex64> = lags.iter().copied().zip(beta.iter().copied()).collect();
    let mut filter = FilterCoeffs::smoother(coeffs, 0.0)?;
    filter.variance = smoother_variance(&filter, rs)?.max(0.0);
    Ok(filter)
}

/// [`finite_window_smoother`] with autocorrelations taken from a density.
pub fn finite_window_smoother_from_density(g: &GridDensity, window: usize) -> Result<FilterCoeffs> {
    let m = moments_of_density(g, 2 * window)?;
    finite_window_smoother(&m.to_autocov()?, window)
}

/// `det R_n / det R_{n-1}`, the one-step prediction variance shared by
/// every spectrum consistent with `r`.
pub fn prediction_variance(r: &AutocovSeq) -> Result<f64> {
    Ok(levinson(r)?.sigma2)
}
