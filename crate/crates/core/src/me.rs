//! All-pole maximum-entropy spectrum `f_ME = k²/|a(e^{jθ})|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::filters::FilterCoeffs;
use crate::moments::{levinson, AutocovSeq};
use crate::trigpoly::{sample_values, GridDensity, TrigPoly};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeSpectrum {
    /// Prediction-error variance `k²_ME`.
    pub k2: f64,
    /// `a_1..a_n` of `a(z) = 1 + Σ a_k z^k`; roots lie outside the unit disc.
    pub a: Vec<Complex64>,
}

pub fn fit_me(r: &AutocovSeq) -> Result<MeSpectrum> {
    let l = levinson(r)?;
    Ok(MeSpectrum {
        k2: l.sigma2,
        a: l.coeffs,
    })
}

impl MeSpectrum {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Positive square root of `k2`.
    pub fn k(&self) -> f64 {
        self.k2.sqrt()
    }

    pub fn poly_at(&self, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (k, c) in self.a.iter().enumerate() {
            acc += c * Complex64::from_polar(1.0, (k + 1) as f64 * theta);
        }
        acc
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.k2 / self.poly_at(theta).norm_sqr()
    }

    /// `|a(e^{jθ})|²` as a trigonometric polynomial.
    pub fn denominator(&self) -> TrigPoly {
        TrigPoly::from_monic_modulus_squared(&self.a)
    }

    pub fn to_grid(&self, n_grid: usize) -> Result<GridDensity> {
        self.to_grid_aligned(n_grid, false)
    }

    pub fn to_grid_aligned(&self, n_grid: usize, midpoint: bool) -> Result<GridDensity> {
        let den = sample_values(&self.denominator(), n_grid, midpoint)?;
        GridDensity::new(den.into_iter().map(|d| self.k2 / d).collect(), midpoint)
    }

    /// One-step predictor `α_k = -a_k`, variance `k2`.
    pub fn predictor(&self) -> FilterCoeffs {
        FilterCoeffs::predictor(self.a.iter().map(|c| -c).collect(), self.k2)
    }
}

pub fn eval_me(s: &MeSpectrum, theta: f64) -> f64 {
    s.eval(theta)
}
