//! Seeded realizations of stationary processes.
//!
//! Randomness comes from xoshiro256++ seeded through `seed_from_u64`
//! (SplitMix64 expansion). Uniforms take the top 53 bits of each output;
//! Gaussians use the Box–Muller transform with `u1 = 1 − U`, `u2 = U'`,
//! returning `√(−2 ln u1)·cos(2πu2)` first and the matching sine second.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::me::MeSpectrum;
use crate::reference::{LINE_FREQ, MA_NOISE_VAR};
use crate::trigpoly::{fft, GridDensity};

pub struct GaussianSource {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub seed: u64,
    pub samples: Vec<f64>,
    /// Generator name and parameters.
    pub source: String,
}

/// `u_ℓ = −Σ a_k u_{ℓ−k} + k_ME·w_ℓ`, started from rest with `10·n`
/// discarded samples.
pub fn simulate_ar(s: &MeSpectrum, len: usize, seed: u64) -> Result<Realization> {
    if s.a.iter().any(|c| c.im != 0.0) {
        return Err(Error::InvalidArgument(
            "autoregressive simulation needs real coefficients".into(),
        ));
    }
    let a: Vec<f64> = s.a.iter().map(|c| c.re).collect();
    let n = a.len();
    let gain = s.k();
    let burn = 10 * n;
    let mut noise = GaussianSource::new(seed);
    let mut u = Vec::with_capacity(burn + len);
    for l in 0..burn + len {
        let mut x = gain * noise.standard_normal();
        for (k, ak) in a.iter().enumerate() {
            if l > k {
                x -= ak * u[l - k - 1];
            }
        }
        u.push(x);
    }
    Ok(Realization {
        seed,
        samples: u.split_off(burn),
        source: format!("ar(n={n}, k2={:e})", s.k2),
    })
}

/// Discretized spectral representation of a real process:
/// `u_ℓ = Σ_i √(f(θ_i)Δθ/π)(ξ_i cos ℓθ_i + η_i sin ℓθ_i)` over bins with
/// `0 < θ_i < π`, plus half-weight real terms at `θ = 0` and `θ = π` when
/// those are grid points. The expected sample autocorrelation equals the
/// grid-quadrature moments of the symmetrized density.
///
/// Samples repeat with period `n_grid`, so `n_grid ≥ 4·len` is advisable.
pub fn simulate_spectral(g: &GridDensity, len: usize, seed: u64) -> Result<Realization> {
    let n = g.n_grid();
    let half = n / 2;
    let shift = if g.is_midpoint() { 0.5 } else { 0.0 };
    let f = g.values();
    let mut noise = GaussianSource::new(seed);
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    for q in 0..half {
        let value = f[half + q];
        if q == 0 && !g.is_midpoint() {
            let amp = (value / n as f64).sqrt();
            bins[0] = Complex64::new(amp * noise.standard_normal(), 0.0);
        } else {
            let amp = (2.0 * value / n as f64).sqrt();
            let xi = noise.standard_normal();
            let eta = noise.standard_normal();
            bins[q] = Complex64::new(amp * xi, -amp * eta);
        }
    }
    if !g.is_midpoint() {
        // θ = −π, the same frequency as π
        let amp = (f[0] / n as f64).sqrt();
        bins[half] = Complex64::new(amp * noise.standard_normal(), 0.0);
    }
    fft(&mut bins, true);
    let samples = (0..len)
        .map(|l| {
            let twist = Complex64::from_polar(1.0, 2.0 * PI * l as f64 * shift / n as f64);
            (bins[l % n] * twist).re
        })
        .collect();
    Ok(Realization {
        seed,
        samples,
        source: format!("spectral(n_grid={n}, midpoint={})", g.is_midpoint()),
    })
}

/// `u_k = w_k + ½ w_{k−1} + 2 sin(k/2 + φ)` with `Var w = 0.8` and `φ`
/// uniform on `[−π, π)`. The phase is drawn first, then `w_{-1}, w_0, …`.
pub fn simulate_true_example(len: usize, seed: u64) -> Realization {
    let mut noise = GaussianSource::new(seed);
    let phase = -PI + 2.0 * PI * noise.uniform();
    let sd = MA_NOISE_VAR.sqrt();
    let mut prev = sd * noise.standard_normal();
    let samples = (0..len)
        .map(|k| {
            let w = sd * noise.standard_normal();
            let u = w + 0.5 * prev + 2.0 * (LINE_FREQ * k as f64 + phase).sin();
            prev = w;
            u
        })
        .collect();
    Realization {
        seed,
        samples,
        source: "ma+sinusoid".into(),
    }
}
