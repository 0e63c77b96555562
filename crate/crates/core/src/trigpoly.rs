//! Hermitian trigonometric polynomials and spectral densities sampled on a
//! uniform grid over `[-π, π)`.
//!
//! Every integral `(1/2π)∫ h(θ) dθ` in this crate is the mean of `h` over
//! the grid. For smooth periodic integrands the rectangle rule is
//! spectrally accurate, and it makes grid sampling and Fourier
//! coefficients exact inverses of each other.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default quadrature grid size.
pub const DEFAULT_GRID: usize = 1 << 14;

/// Relative threshold below which tail coefficients of `√p` are dropped.
const SQRT_TRIM: f64 = 1e-13;

/// Half-width of the annulus around the unit circle in which a spectral
/// factor root is rejected as ill-conditioned.
const CIRCLE_GUARD: f64 = 1e-8;

pub(crate) fn fft(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
}

pub(crate) fn check_grid(n_grid: usize) -> Result<()> {
    if n_grid < 8 || !n_grid.is_power_of_two() {
        return Err(Error::InvalidGrid(n_grid));
    }
    Ok(())
}

/// `Σ_{k=-m}^{m} c_k e^{jkθ}` with `c_{-k} = conj(c_k)`.
///
/// Only the nonnegative lags are stored, so Hermitian symmetry holds by
/// construction and `c_0` is kept real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Builds a polynomial from `c_0, c_1, …, c_m`. The imaginary part of
    /// `c_0` must vanish up to rounding.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        let scale: f64 = coeffs.iter().map(|c| c.norm()).sum();
        if coeffs[0].im.abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "zeroth coefficient must be real, got {}",
                coeffs[0]
            )));
        }
        coeffs[0].im = 0.0;
        Ok(Self { coeffs })
    }

    /// Real (even) polynomial `c_0 + 2 Σ c_k cos kθ`.
    pub fn from_real(coeffs: &[f64]) -> Self {
        let mut c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        if c.is_empty() {
            c.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs: c }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_real(&[c])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `e^{jkθ}` for any integer lag; zero beyond the degree.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            Some(c) if k >= 0 => *c,
            Some(c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `c_0, c_1, …, c_m`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Largest lag whose coefficient exceeds `rel_tol` times the l1 norm.
    pub fn effective_degree(&self, rel_tol: f64) -> usize {
        let scale: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        (0..self.coeffs.len())
            .rev()
            .find(|&k| self.coeffs[k].norm() > rel_tol * scale)
            .unwrap_or(0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let phase = Complex64::from_polar(1.0, k as f64 * theta);
            acc += (c * phase).re;
        }
        self.coeffs[0].re + 2.0 * acc
    }

    /// The raw complex sum over `-m..=m`; its imaginary part is rounding only.
    pub fn eval_complex(&self, theta: f64) -> Complex64 {
        let m = self.degree() as i64;
        (-m..=m)
            .map(|k| self.coeff(k) * Complex64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Pointwise product, i.e. the convolution of the coefficient sequences.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let (m1, m2) = (self.degree() as i64, other.degree() as i64);
        let deg = m1 + m2;
        let coeffs = (0..=deg)
            .map(|k| {
                let lo = (k - m2).max(-m1);
                let hi = (k + m2).min(m1);
                (lo..=hi).map(|j| self.coeff(j) * other.coeff(k - j)).sum()
            })
            .collect::<Vec<Complex64>>();
        let mut out = TrigPoly { coeffs };
        out.coeffs[0].im = 0.0;
        out
    }

    /// `|1 + Σ_{k≥1} q_k e^{jkθ}|²` as a trigonometric polynomial.
    pub fn from_monic_modulus_squared(monic_tail: &[Complex64]) -> TrigPoly {
        let mut q = Vec::with_capacity(monic_tail.len() + 1);
        q.push(Complex64::new(1.0, 0.0));
        q.extend_from_slice(monic_tail);
        let m = q.len() - 1;
        let coeffs = (0..=m)
            .map(|k| (0..=m - k).map(|i| q[i + k] * q[i].conj()).sum())
            .collect::<Vec<Complex64>>();
        let mut out = TrigPoly { coeffs };
        out.coeffs[0].im = 0.0;
        out
    }
}

/// A real, nonnegative function sampled at `θ_i = -π + 2π(i + s)/n_grid`,
/// with `s = 0` (nodes) or `s = 1/2` (midpoints).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    n_grid: usize,
    values: Vec<f64>,
    midpoint: bool,
}

impl GridDensity {
    pub fn new(values: Vec<f64>, midpoint: bool) -> Result<Self> {
        check_grid(values.len())?;
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "density values must be finite and nonnegative, got {v}"
            )));
        }
        Ok(Self {
            n_grid: values.len(),
            values,
            midpoint,
        })
    }

    pub fn from_fn(n_grid: usize, midpoint: bool, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(n_grid)?;
        let values = (0..n_grid)
            .map(|i| f(grid_theta(n_grid, midpoint, i)))
            .collect();
        Self::new(values, midpoint)
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_midpoint(&self) -> bool {
        self.midpoint
    }

    pub fn theta(&self, i: usize) -> f64 {
        grid_theta(self.n_grid, self.midpoint, i)
    }

    /// Grid quadrature of `h(f(θ))`.
    pub fn mean_of(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.values.iter().map(|&v| h(v)).sum::<f64>() / self.n_grid as f64
    }

    /// Pointwise sum; both grids must share size and alignment.
    pub fn add(&self, other: &GridDensity) -> Result<GridDensity> {
        if self.n_grid != other.n_grid || self.midpoint != other.midpoint {
            return Err(Error::InvalidArgument("grid mismatch".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        GridDensity::new(values, self.midpoint)
    }
}

pub fn grid_theta(n_grid: usize, midpoint: bool, i: usize) -> f64 {
    let shift = if midpoint { 0.5 } else { 0.0 };
    -PI + 2.0 * PI * (i as f64 + shift) / n_grid as f64
}

pub fn sample_grid(p: &TrigPoly, n_grid: usize) -> Result<GridDensity> {
    sample_grid_aligned(p, n_grid, false)
}

/// Samples `p` on the node or midpoint grid. Negative samples are kept, so
/// the result is a raw `Vec` rather than a density.
pub fn sample_values(p: &TrigPoly, n_grid: usize, midpoint: bool) -> Result<Vec<f64>> {
    check_grid(n_grid)?;
    let m = p.degree();
    if n_grid <= 2 * m {
        return Err(Error::GridTooSmall { n_grid, degree: m });
    }
    let shift = if midpoint { 0.5 } else { 0.0 };
    let mut buf = vec![Complex64::new(0.0, 0.0); n_grid];
    for k in -(m as i64)..=(m as i64) {
        // e^{jkθ_i} = (-1)^k e^{j2πks/N} e^{j2πki/N}
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let twist = Complex64::from_polar(sign, 2.0 * PI * k as f64 * shift / n_grid as f64);
        buf[k.rem_euclid(n_grid as i64) as usize] += p.coeff(k) * twist;
    }
    fft(&mut buf, true);
    Ok(buf.into_iter().map(|c| c.re).collect())
}

pub fn sample_grid_aligned(p: &TrigPoly, n_grid: usize, midpoint: bool) -> Result<GridDensity> {
    let values = sample_values(p, n_grid, midpoint)?;
    if let Some(i) = (0..n_grid).find(|&i| values[i] < 0.0) {
        return Err(Error::NotPositive {
            theta: grid_theta(n_grid, midpoint, i),
            min: values[i],
        });
    }
    GridDensity::new(values, midpoint)
}

/// Minimum over the grid; ties go to the smallest index.
pub fn min_on_grid(g: &GridDensity) -> (f64, f64) {
    let (idx, val) = min_index(g.values());
    (g.theta(idx), val)
}

pub(crate) fn min_index(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// `c_k = (1/N) Σ_i v_i e^{-jkθ_i}` for `k = 0..=max_lag` from raw samples.
pub(crate) fn grid_coeffs(values: &[f64], midpoint: bool, max_lag: usize) -> Vec<Complex64> {
    let n = values.len();
    let shift = if midpoint { 0.5 } else { 0.0 };
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft(&mut buf, false);
    (0..=max_lag)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let twist = Complex64::from_polar(sign, -2.0 * PI * k as f64 * shift / n as f64);
            buf[k] * twist / n as f64
        })
        .collect()
}

pub fn fourier_coeffs(g: &GridDensity, max_lag: usize) -> Result<TrigPoly> {
    if 2 * max_lag >= g.n_grid() {
        return Err(Error::InvalidArgument(format!(
            "max_lag {max_lag} must be below n_grid/2 = {}",
            g.n_grid() / 2
        )));
    }
    let mut coeffs = grid_coeffs(g.values(), g.is_midpoint(), max_lag);
    coeffs[0].im = 0.0;
    Ok(TrigPoly { coeffs })
}

/// Fourier coefficients `ρ_k` of `√p`, computed on an `n_grid` grid and
/// trimmed where `|ρ_k| < 1e-13 |ρ_0|`. Lags up to `deg p` are always kept.
pub fn sqrt_coeffs(p: &TrigPoly, max_lag: usize, n_grid: usize) -> Result<TrigPoly> {
    let values = sample_values(p, n_grid, false)?;
    let (idx, min) = min_index(&values);
    if min <= 0.0 {
        return Err(Error::NotPositive {
            theta: grid_theta(n_grid, false, idx),
            min,
        });
    }
    if 2 * max_lag >= n_grid {
        return Err(Error::InvalidArgument(format!(
            "max_lag {max_lag} must be below n_grid/2 = {}",
            n_grid / 2
        )));
    }
    let roots: Vec<f64> = values.iter().map(|v| v.sqrt()).collect();
    let mut rho = grid_coeffs(&roots, false, max_lag);
    rho[0].im = 0.0;
    let floor = SQRT_TRIM * rho[0].norm();
    let keep = (0..rho.len())
        .rev()
        .find(|&k| rho[k].norm() >= floor)
        .unwrap_or(0)
        .max(p.degree().min(max_lag));
    rho.truncate(keep + 1);
    Ok(TrigPoly { coeffs: rho })
}

/// `p(e^{jθ}) = gain · |1 + Σ monic_k e^{jkθ}|²` with every root of the
/// monic factor outside the closed unit disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFactor {
    pub monic: Vec<Complex64>,
    pub gain: f64,
}

impl SpectralFactor {
    /// `1 + Σ monic_k e^{jkθ}`.
    pub fn eval_monic(&self, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (k, c) in self.monic.iter().enumerate() {
            acc += c * Complex64::from_polar(1.0, (k + 1) as f64 * theta);
        }
        acc
    }

    pub fn to_trigpoly(&self) -> TrigPoly {
        TrigPoly::from_monic_modulus_squared(&self.monic).scale(self.gain)
    }
}

pub fn spectral_factorization(p: &TrigPoly) -> Result<SpectralFactor> {
    let deg = p.effective_degree(1e-15);
    let n_check = (64 * (deg + 1)).next_power_of_two().max(1024);
    let values = sample_values(p, n_check, false)?;
    let (idx, min) = min_index(&values);
    if min <= 0.0 {
        return Err(Error::NotPositive {
            theta: grid_theta(n_check, false, idx),
            min,
        });
    }
    if deg == 0 {
        return Ok(SpectralFactor {
            monic: Vec::new(),
            gain: p.coeff(0).re,
        });
    }

    // z^d p(z) as an ordinary polynomial, ascending powers.
    let d = deg as i64;
    let ascending: Vec<Complex64> = (-d..=d).map(|k| p.coeff(k)).collect();
    let mut roots = polynomial_roots(&ascending);
    roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    if let Some(r) = roots
        .iter()
        .find(|r| (r.norm() - 1.0).abs() <= CIRCLE_GUARD)
    {
        return Err(Error::RootNearCircle { modulus: r.norm() });
    }
    let outside = &roots[..deg];
    if outside.iter().any(|r| r.norm() <= 1.0) {
        let worst = outside
            .iter()
            .map(|r| r.norm())
            .fold(f64::INFINITY, f64::min);
        return Err(Error::RootNearCircle { modulus: worst });
    }

    // Π (1 - z/r)
    let mut q = vec![Complex64::new(1.0, 0.0)];
    for r in outside {
        let mut next = q.clone();
        next.push(Complex64::new(0.0, 0.0));
        for j in 1..next.len() {
            next[j] -= q[j - 1] / r;
        }
        q = next;
    }
    if p.is_real() {
        for c in &mut q {
            c.im = 0.0;
        }
    }
    let energy: f64 = q.iter().map(|c| c.norm_sqr()).sum();
    Ok(SpectralFactor {
        monic: q[1..].to_vec(),
        gain: p.coeff(0).re / energy,
    })
}

/// Roots of `Σ c_i z^i` via the eigenvalues of the companion matrix,
/// polished by a few Newton steps on the original polynomial.
pub(crate) fn polynomial_roots(ascending: &[Complex64]) -> Vec<Complex64> {
    let deg = ascending.len() - 1;
    let lead = ascending[deg];
    let mut companion = DMatrix::<Complex64>::zeros(deg, deg);
    for j in 0..deg {
        companion[(0, j)] = -ascending[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let eig = nalgebra::linalg::Schur::new(companion)
        .eigenvalues()
        .map(|v| v.iter().copied().collect::<Vec<_>>())
        .unwrap_or_default();

    eig.into_iter()
        .map(|mut z| {
            for _ in 0..4 {
                let (val, der) = horner(ascending, z);
                if der.norm() == 0.0 {
                    break;
                }
                let next = z - val / der;
                if horner(ascending, next).0.norm() < val.norm() {
                    z = next;
                } else {
                    break;
                }
            }
            z
        })
        .collect()
}

fn horner(ascending: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for c in ascending.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}
