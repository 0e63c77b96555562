//! Autocorrelation sequences, Toeplitz positive-definiteness and the map
//! from a density to its trigonometric moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trigpoly::{fourier_coeffs, GridDensity};

/// Reflection coefficients at or beyond this modulus count as singular.
const REFLECTION_LIMIT: f64 = 1.0 - 1e-12;

/// `R_0, R_1, …, R_n` with `R_{-k} = conj(R_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocovSeq {
    r: Vec<Complex64>,
}

impl AutocovSeq {
    /// Validates `R_0` real, finite and nonnegative, and `|R_k| ≤ R_0`.
    ///
    /// `R_0 = 0` is accepted so that degenerate estimates can be
    /// represented; [`is_posdef`] rejects them.
    pub fn new(mut r: Vec<Complex64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidAutocov("empty sequence".into()));
        }
        if r.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidAutocov("non-finite entry".into()));
        }
        let r0 = r[0].re;
        if r0 < 0.0 || r[0].im.abs() > 1e-12 * r0.abs().max(1.0) {
            return Err(Error::InvalidAutocov(format!(
                "R0 must be real and nonnegative, got {}",
                r[0]
            )));
        }
        r[0].im = 0.0;
        if let Some((k, c)) = r
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, c)| c.norm() > r0 * (1.0 + 1e-12))
        {
            return Err(Error::InvalidAutocov(format!(
                "|R{k}| = {} exceeds R0 = {r0}",
                c.norm()
            )));
        }
        Ok(Self { r })
    }

    pub fn from_real(r: &[f64]) -> Result<Self> {
        Self::new(r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Number of lags beyond zero.
    pub fn n(&self) -> usize {
        self.r.len() - 1
    }

    pub fn r0(&self) -> f64 {
        self.r[0].re
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.r
    }

    /// `R_k` for `|k| ≤ n`.
    pub fn lag(&self, k: i64) -> Complex64 {
        let c = self.r[k.unsigned_abs() as usize];
        if k >= 0 {
            c
        } else {
            c.conj()
        }
    }

    pub fn is_real(&self) -> bool {
        self.r.iter().all(|c| c.im == 0.0)
    }

    pub fn to_moment_vector(&self) -> MomentVector {
        let n = self.n() as i64;
        MomentVector {
            entries: (-n..=n).map(|k| self.lag(k)).collect(),
        }
    }
}

/// `(R*_n, …, R*_1, R_0, R_1, …, R_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    entries: Vec<Complex64>,
}

impl MomentVector {
    /// Builds the mirrored vector from nonnegative lags `R_0..R_n`.
    pub fn from_lags(r: &[Complex64]) -> Self {
        let n = r.len() as i64 - 1;
        let entries = (-n..=n)
            .map(|k| {
                let c = r[k.unsigned_abs() as usize];
                if k >= 0 {
                    c
                } else {
                    c.conj()
                }
            })
            .collect();
        Self { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn lag(&self, k: i64) -> Complex64 {
        self.entries[(k + self.n() as i64) as usize]
    }

    /// `R_0..R_n`.
    pub fn lags(&self) -> Vec<Complex64> {
        self.entries[self.n()..].to_vec()
    }

    pub fn sub(&self, other: &MomentVector) -> MomentVector {
        MomentVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn to_autocov(&self) -> Result<AutocovSeq> {
        AutocovSeq::new(self.lags())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosDefReport {
    pub posdef: bool,
    /// `γ_1, γ_2, …` up to and including the first failing order.
    pub reflection: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Levinson {
    /// `a_1..a_n` of the monic predictor polynomial `1 + Σ a_k z^k`.
    pub coeffs: Vec<Complex64>,
    pub sigma2: f64,
    /// `σ²_0 = R_0, σ²_1, …, σ²_n`.
    pub sigma2_path: Vec<f64>,
    pub reflection: Vec<Complex64>,
}

enum Recursion {
    Done(Levinson),
    Failed {
        lag: usize,
        reflection: Vec<Complex64>,
    },
}

fn recurse(a: &AutocovSeq) -> Recursion {
    let r = a.as_slice();
    let n = a.n();
    let mut coeffs: Vec<Complex64> = Vec::with_capacity(n);
    let mut sigma2 = r[0].re;
    let mut path = vec![sigma2];
    let mut reflection = Vec::with_capacity(n);
    if sigma2 <= 0.0 {
        return Recursion::Failed { lag: 0, reflection };
    }
    for k in 1..=n {
        let mut delta = r[k];
        for (j, aj) in coeffs.iter().enumerate() {
            delta += aj * r[k - 1 - j];
        }
        let kappa = -delta / sigma2;
        reflection.push(-kappa);
        if kappa.norm() >= REFLECTION_LIMIT {
            return Recursion::Failed { lag: k, reflection };
        }
        let prev = coeffs.clone();
        for j in 0..k - 1 {
            coeffs[j] = prev[j] + kappa * prev[k - 2 - j].conj();
        }
        coeffs.push(kappa);
        sigma2 *= 1.0 - kappa.norm_sqr();
        if sigma2 <= 0.0 {
            return Recursion::Failed { lag: k, reflection };
        }
        path.push(sigma2);
    }
    Recursion::Done(Levinson {
        coeffs,
        sigma2,
        sigma2_path: path,
        reflection,
    })
}

/// Positive definiteness of the Toeplitz matrix built from `a`, decided by
/// the Levinson recursion (all `|γ_k| < 1`). Reflection coefficients use
/// the partial-correlation sign, `γ_k = -a_k^{(k)}`.
pub fn is_posdef(a: &AutocovSeq) -> PosDefReport {
    match recurse(a) {
        Recursion::Done(l) => PosDefReport {
            posdef: true,
            reflection: l.reflection,
        },
        Recursion::Failed { reflection, .. } => PosDefReport {
            posdef: false,
            reflection,
        },
    }
}

pub fn levinson(a: &AutocovSeq) -> Result<Levinson> {
    match recurse(a) {
        Recursion::Done(l) => Ok(l),
        Recursion::Failed { lag, .. } => Err(Error::NotPosDef { lag }),
    }
}

/// `R_k = (1/2π)∫ e^{-jkθ} f(θ) dθ` for `|k| ≤ n`, by grid quadrature.
pub fn moments_of_density(g: &GridDensity, n: usize) -> Result<MomentVector> {
    let c = fourier_coeffs(g, n)?;
    Ok(MomentVector::from_lags(c.coeffs()))
}

/// Biased estimator `R̂_k = (1/T) Σ_{ℓ=k}^{T-1} u_ℓ conj(u_{ℓ-k})`.
pub fn sample_autocov<T>(series: &[T], n: usize) -> Result<AutocovSeq>
where
    T: Copy + Into<Complex64>,
{
    let len = series.len();
    if len <= n {
        return Err(Error::SeriesTooShort { len, lags: n });
    }
    let u: Vec<Complex64> = series.iter().map(|&x| x.into()).collect();
    let r = (0..=n)
        .map(|k| {
            let s: Complex64 = (k..len).map(|l| u[l] * u[l - k].conj()).sum();
            s / len as f64
        })
        .collect::<Vec<_>>();
    let mut r = r;
    r[0].im = 0.0;
    // Rounding can push |R̂_k| a hair above R̂_0 for perfectly correlated data.
    let r0 = r[0].re;
    for c in r.iter_mut().skip(1) {
        if c.norm() > r0 {
            *c *= r0 / c.norm();
        }
    }
    AutocovSeq::new(r)
}
