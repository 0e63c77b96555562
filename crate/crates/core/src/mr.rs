//! Most-random spectrum `f_MR = 1/√(λG)`.
//!
//! The Lagrange vector is found by following the Newton flow of the moment
//! map `H(λ) = (1/2π)∫ G/√(λG) dθ` from `λ = (0, …, 0, 1, 0, …, 0)` towards
//! the target moments. The flow is discretized as damped Newton steps; every
//! accepted iterate keeps `λG` strictly positive on the grid.
//!
//! Internally `λ` is handled through the real coordinates
//! `(λ_0, Re λ_1, Im λ_1, …, Re λ_n, Im λ_n)`, in which
//! `λG(θ) = λ_0 + Σ 2(Re λ_k cos kθ − Im λ_k sin kθ)` and the Jacobian is a
//! real symmetric negative definite matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{is_posdef, AutocovSeq, MomentVector};
use crate::trigpoly::{
    check_grid, grid_coeffs, grid_theta, min_index, sample_values, spectral_factorization,
    GridDensity, SpectralFactor, TrigPoly, DEFAULT_GRID,
};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const MAX_GRID: usize = 1 << 20;
/// Smallest backtracking factor tried, `2^-20`.
const MIN_STEP: f64 = 1.0 / 1_048_576.0;

/// `λ_0..λ_n`, with `λ_{-k} = conj(λ_k)` implied and `λ_0` real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangeVector {
    coeffs: Vec<Complex64>,
}

impl LagrangeVector {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let p = TrigPoly::new(coeffs)?;
        Ok(Self {
            coeffs: p.coeffs().to_vec(),
        })
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self {
            coeffs: TrigPoly::from_real(coeffs).coeffs().to_vec(),
        }
    }

    /// The flow's starting point, `λG ≡ 1`.
    pub fn unit(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[0] = 1.0;
        Self::from_real(&c)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `λ_k` for `|k| ≤ n`.
    pub fn lambda(&self, k: i64) -> Complex64 {
        let c = self.coeffs[k.unsigned_abs() as usize];
        if k >= 0 {
            c
        } else {
            c.conj()
        }
    }

    /// `λG(e^{jθ}) = Σ λ_k e^{jkθ}`.
    pub fn poly(&self) -> TrigPoly {
        TrigPoly::new(self.coeffs.clone()).expect("λ_0 is kept real")
    }

    pub fn to_real_coords(&self) -> DVector<f64> {
        let n = self.n();
        let mut x = DVector::zeros(2 * n + 1);
        x[0] = self.coeffs[0].re;
        for k in 1..=n {
            x[2 * k - 1] = self.coeffs[k].re;
            x[2 * k] = self.coeffs[k].im;
        }
        x
    }

    pub fn from_real_coords(x: &DVector<f64>) -> Self {
        let n = x.len() / 2;
        let mut coeffs = vec![Complex64::new(x[0], 0.0)];
        coeffs.extend((1..=n).map(|k| Complex64::new(x[2 * k - 1], x[2 * k])));
        Self { coeffs }
    }
}

/// `(R_0, 2 Re R_1, 2 Im R_1, …)`: the moment vector in the coordinates
/// dual to [`LagrangeVector::to_real_coords`], so that `λ·R = ∫ λG f`.
fn moments_to_real(lags: &[Complex64]) -> DVector<f64> {
    let n = lags.len() - 1;
    let mut x = DVector::zeros(2 * n + 1);
    x[0] = lags[0].re;
    for k in 1..=n {
        x[2 * k - 1] = 2.0 * lags[k].re;
        x[2 * k] = 2.0 * lags[k].im;
    }
    x
}

/// `λG` on the grid, checked for strict positivity.
fn cone_values(lambda: &LagrangeVector, n_grid: usize) -> Result<(Vec<f64>, f64)> {
    let values = sample_values(&lambda.poly(), n_grid, false)?;
    let (_, min) = min_index(&values);
    if min.is_nan() || min <= 0.0 {
        return Err(Error::NotInCone { min });
    }
    Ok((values, min))
}

fn moments_from_values(values: &[f64], n: usize) -> Vec<Complex64> {
    let v: Vec<f64> = values.iter().map(|p| 1.0 / p.sqrt()).collect();
    let mut c = grid_coeffs(&v, false, n);
    c[0].im = 0.0;
    c
}

fn jacobian_from_values(values: &[f64], n: usize) -> DMatrix<f64> {
    let w: Vec<f64> = values.iter().map(|p| 1.0 / (p * p.sqrt())).collect();
    let m = grid_coeffs(&w, false, 2 * n);
    // C(c) = mean(w cos cθ), S(c) = mean(w sin cθ)
    let cos_m = |c: i64| m[c.unsigned_abs() as usize].re;
    let sin_m = |c: i64| {
        let s = -m[c.unsigned_abs() as usize].im;
        if c >= 0 {
            s
        } else {
            -s
        }
    };
    let dim = 2 * n + 1;
    let mut jac = DMatrix::zeros(dim, dim);
    jac[(0, 0)] = cos_m(0);
    for k in 1..=n {
        let k_ = k as i64;
        jac[(0, 2 * k - 1)] = 2.0 * cos_m(k_);
        jac[(0, 2 * k)] = -2.0 * sin_m(k_);
        for l in 1..=n {
            let l_ = l as i64;
            jac[(2 * k - 1, 2 * l - 1)] = 2.0 * (cos_m(k_ - l_) + cos_m(k_ + l_));
            jac[(2 * k, 2 * l)] = 2.0 * (cos_m(k_ - l_) - cos_m(k_ + l_));
            jac[(2 * k - 1, 2 * l)] = -2.0 * (sin_m(k_ + l_) + sin_m(l_ - k_));
            jac[(2 * k, 2 * l - 1)] = -2.0 * (sin_m(k_ + l_) + sin_m(k_ - l_));
        }
    }
    for i in 1..dim {
        jac[(i, 0)] = jac[(0, i)];
    }
    jac * -0.5
}

/// The moment map `H(λ)`: moments `0..n` of `1/√(λG)` by grid quadrature.
pub fn moment_map(lambda: &LagrangeVector, n_grid: usize) -> Result<MomentVector> {
    check_grid(n_grid)?;
    let (values, _) = cone_values(lambda, n_grid)?;
    Ok(MomentVector::from_lags(&moments_from_values(
        &values,
        lambda.n(),
    )))
}

/// `R − H(λ)`.
pub fn residual(
    lambda: &LagrangeVector,
    target: &MomentVector,
    n_grid: usize,
) -> Result<MomentVector> {
    if target.n() != lambda.n() {
        return Err(Error::InvalidArgument("order mismatch".into()));
    }
    Ok(target.sub(&moment_map(lambda, n_grid)?))
}

/// Jacobian of `H` in real coordinates,
/// `M = −½ (1/2π)∫ Ḡ Ḡᵀ (λG)^{-3/2} dθ`.
pub fn jacobian(lambda: &LagrangeVector, n_grid: usize) -> Result<DMatrix<f64>> {
    check_grid(n_grid)?;
    if n_grid <= 4 * lambda.n() {
        return Err(Error::GridTooSmall {
            n_grid,
            degree: 2 * lambda.n(),
        });
    }
    let (values, _) = cone_values(lambda, n_grid)?;
    Ok(jacobian_from_values(&values, lambda.n()))
}

/// `M^{-1} rhs` through a Cholesky factorization of `−M`.
fn newton_direction(jac: DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let chol = (-jac).cholesky()?;
    let d = -chol.solve(rhs);
    d.iter().all(|x| x.is_finite()).then_some(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MrOptions {
    pub tol: f64,
    pub n_grid: usize,
    pub max_iter: usize,
    /// Upper bound for grid refinement near the cone boundary.
    pub max_grid: usize,
}

impl Default for MrOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            n_grid: DEFAULT_GRID,
            max_iter: DEFAULT_MAX_ITER,
            max_grid: MAX_GRID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDiagnostics {
    pub iterations: usize,
    /// `‖R − H(λ)‖∞` at every visited iterate.
    pub residuals: Vec<f64>,
    /// `min_grid λG` at every visited iterate.
    pub min_values: Vec<f64>,
    /// Accepted step lengths.
    pub steps: Vec<f64>,
    pub n_grid: usize,
    pub refinements: usize,
    pub last_lambda: Vec<Complex64>,
}

impl PathDiagnostics {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }

    pub fn final_min(&self) -> f64 {
        self.min_values.last().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrSpectrum {
    pub lambda: LagrangeVector,
    /// `k²_MR`, also the harmonic mean of `f_MR`.
    pub k2: f64,
    /// Normalized so that the grid mean of `√b` is one.
    pub b: TrigPoly,
    /// `λG = gain·|1 + Σ â_k e^{jkθ}|²`.
    pub factor: SpectralFactor,
    /// `κ² = gain^{-1/2}`, so that `f_MR = κ²/|1 + Σ â_k e^{jkθ}|`.
    pub kappa2: f64,
}

impl MrSpectrum {
    /// Builds the derived quantities from a Lagrange vector in the cone.
    pub fn from_lambda(lambda: LagrangeVector, n_grid: usize) -> Result<Self> {
        let (values, _) = cone_values(&lambda, n_grid)?;
        let root_mean = values.iter().map(|p| p.sqrt()).sum::<f64>() / n_grid as f64;
        let k2 = 1.0 / root_mean;
        let poly = lambda.poly();
        let factor = spectral_factorization(&poly)?;
        let kappa2 = 1.0 / factor.gain.sqrt();
        Ok(Self {
            b: poly.scale(k2 * k2),
            lambda,
            k2,
            factor,
            kappa2,
        })
    }

    pub fn n(&self) -> usize {
        self.lambda.n()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa2.sqrt()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        1.0 / self.lambda.poly().eval(theta).sqrt()
    }

    /// `k2/√b(θ)`.
    pub fn eval_normalized(&self, theta: f64) -> f64 {
        self.k2 / self.b.eval(theta).sqrt()
    }

    /// `κ²/|1 + Σ â_k e^{jkθ}|`.
    pub fn eval_factored(&self, theta: f64) -> f64 {
        self.kappa2 / self.factor.eval_monic(theta).norm()
    }

    pub fn to_grid(&self, n_grid: usize) -> Result<GridDensity> {
        self.to_grid_aligned(n_grid, false)
    }

    pub fn to_grid_aligned(&self, n_grid: usize, midpoint: bool) -> Result<GridDensity> {
        let values = sample_values(&self.lambda.poly(), n_grid, midpoint)?;
        if let Some(i) = (0..n_grid).find(|&i| values[i].is_nan() || values[i] <= 0.0) {
            return Err(Error::NotPositive {
                theta: grid_theta(n_grid, midpoint, i),
                min: values[i],
            });
        }
        GridDensity::new(values.iter().map(|p| 1.0 / p.sqrt()).collect(), midpoint)
    }
}

pub fn eval_mr(s: &MrSpectrum, theta: f64) -> f64 {
    s.eval(theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrSolution {
    pub spectrum: MrSpectrum,
    pub diagnostics: PathDiagnostics,
}

struct Iterate {
    lambda: LagrangeVector,
    values: Vec<f64>,
    min: f64,
    residual: DVector<f64>,
    norm: f64,
}

fn evaluate(
    lambda: LagrangeVector,
    target: &AutocovSeq,
    n_grid: usize,
    real: bool,
) -> Option<Iterate> {
    let values = sample_values(&lambda.poly(), n_grid, false).ok()?;
    let (_, min) = min_index(&values);
    if min.is_nan() || min <= 0.0 {
        return None;
    }
    let h = moments_from_values(&values, lambda.n());
    let norm = target
        .as_slice()
        .iter()
        .zip(&h)
        .map(|(r, h)| (r - h).norm())
        .fold(0.0, f64::max);
    let mut residual = moments_to_real(target.as_slice()) - moments_to_real(&h);
    if real {
        zero_imaginary(&mut residual);
    }
    Some(Iterate {
        lambda,
        values,
        min,
        residual,
        norm,
    })
}

fn zero_imaginary(x: &mut DVector<f64>) {
    for k in 1..=x.len() / 2 {
        x[2 * k] = 0.0;
    }
}

/// Solves `H(λ) = R` for the most-random spectrum.
pub fn solve_mr(r: &AutocovSeq, opts: &MrOptions) -> Result<MrSolution> {
    if !(opts.tol > 0.0 && opts.tol <= 1e-2) {
        return Err(Error::InvalidArgument(format!(
            "tol must lie in (0, 1e-2], got {}",
            opts.tol
        )));
    }
    check_grid(opts.n_grid)?;
    let n = r.n();
    if opts.n_grid <= 4 * n {
        return Err(Error::GridTooSmall {
            n_grid: opts.n_grid,
            degree: 2 * n,
        });
    }
    let report = is_posdef(r);
    if !report.posdef {
        return Err(Error::NotPosDef {
            lag: report.reflection.len(),
        });
    }

    let real = r.is_real();
    let threshold = opts.tol * r.r0();
    let mut n_grid = opts.n_grid;
    let mut diag = PathDiagnostics {
        iterations: 0,
        residuals: Vec::new(),
        min_values: Vec::new(),
        steps: Vec::new(),
        n_grid,
        refinements: 0,
        last_lambda: Vec::new(),
    };
    let mut current = evaluate(LagrangeVector::unit(n), r, n_grid, real)
        .expect("the starting point lies in the cone");

    loop {
        diag.residuals.push(current.norm);
        diag.min_values.push(current.min);
        diag.last_lambda = current.lambda.coeffs().to_vec();

        if current.norm <= threshold {
            let near_boundary = current.min < 100.0 / (n_grid as f64 * n_grid as f64);
            if near_boundary && n_grid < opts.max_grid {
                n_grid *= 2;
                diag.refinements += 1;
                diag.n_grid = n_grid;
                current = evaluate(current.lambda, r, n_grid, real)
                    .ok_or_else(|| Error::NoConvergence(Box::new(diag.clone())))?;
                continue;
            }
            break;
        }
        if diag.iterations >= opts.max_iter {
            return Err(Error::NoConvergence(Box::new(diag)));
        }
        diag.iterations += 1;

        let jac = jacobian_from_values(&current.values, n);
        let Some(mut dir) = newton_direction(jac, &current.residual) else {
            return Err(Error::NoConvergence(Box::new(diag)));
        };
        if real {
            zero_imaginary(&mut dir);
        }
        let base = current.lambda.to_real_coords();
        let mut step = 1.0;
        let accepted = loop {
            let trial = LagrangeVector::from_real_coords(&(&base + &dir * step));
            if let Some(next) = evaluate(trial, r, n_grid, real) {
                if next.norm < current.norm {
                    break Some(next);
                }
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some(next) => {
                diag.steps.push(step);
                current = next;
            }
            None => return Err(Error::NoConvergence(Box::new(diag))),
        }
    }

    let spectrum = MrSpectrum::from_lambda(current.lambda, n_grid)?;
    Ok(MrSolution {
        spectrum,
        diagnostics: diag,
    })
}

/// Integrates `dλ/dτ = M(λ)^{-1}(R_1 − R_0)` over `τ ∈ [0, 1]` with
/// classical RK4, returning `λ(τ_i)` at every step including both ends.
///
/// Without Newton corrections the endpoint carries the integration error;
/// it is a diagnostic for the path, not a solver.
pub fn trace_path(r: &AutocovSeq, steps: usize, n_grid: usize) -> Result<Vec<LagrangeVector>> {
    check_grid(n_grid)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let n = r.n();
    let start = LagrangeVector::unit(n);
    let mut drift = moments_to_real(r.as_slice())
        - moments_to_real(&moments_from_values(&cone_values(&start, n_grid)?.0, n));
    let real = r.is_real();
    if real {
        zero_imaginary(&mut drift);
    }
    let velocity = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let lambda = LagrangeVector::from_real_coords(x);
        let (values, _) = cone_values(&lambda, n_grid)?;
        let mut v = newton_direction(jacobian_from_values(&values, n), &drift)
            .ok_or(Error::SingularSystem)?;
        if real {
            zero_imaginary(&mut v);
        }
        Ok(v)
    };

    let h = 1.0 / steps as f64;
    let mut x = start.to_real_coords();
    let mut path = vec![start];
    for _ in 0..steps {
        let k1 = velocity(&x)?;
        let k2 = velocity(&(&x + &k1 * (h / 2.0)))?;
        let k3 = velocity(&(&x + &k2 * (h / 2.0)))?;
        let k4 = velocity(&(&x + &k3 * h))?;
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let lambda = LagrangeVector::from_real_coords(&x);
        cone_values(&lambda, n_grid)?;
        path.push(lambda);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::REFERENCE_LAGS;

    #[test]
    fn residual_at_start() {
        let unit = LagrangeVector::unit(3);
        let flat = AutocovSeq::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let res = residual(&unit, &flat.to_moment_vector(), 256).unwrap();
        assert!(res.norm_inf() < 1e-15);

        let target = AutocovSeq::from_real(&REFERENCE_LAGS).unwrap();
        let res = residual(&unit, &target.to_moment_vector(), 256).unwrap();
        assert!((res.lag(0).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn jacobian_at_start() {
        let m0 = jacobian(&LagrangeVector::unit(0), 64).unwrap();
        assert_eq!(m0.shape(), (1, 1));
        assert!((m0[(0, 0)] + 0.5).abs() < 1e-15);

        let m1 = jacobian(&LagrangeVector::unit(1), 64).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![-0.5, -1.0, -1.0]));
        assert!((m1 - expected).abs().max() < 1e-15);
    }

    #[test]
    fn outside_cone_is_rejected() {
        let lam = LagrangeVector::from_real(&[1.0, 0.6]);
        assert!(matches!(jacobian(&lam, 64), Err(Error::NotInCone { .. })));
        let target = AutocovSeq::from_real(&[1.0, 0.0])
            .unwrap()
            .to_moment_vector();
        assert!(matches!(
            residual(&lam, &target, 64),
            Err(Error::NotInCone { .. })
        ));
    }

    #[test]
    fn white_noise_is_fixed_point() {
        let r = AutocovSeq::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let sol = solve_mr(&r, &MrOptions::default()).unwrap();
        assert_eq!(sol.diagnostics.iterations, 0);
        assert_eq!(sol.spectrum.lambda, LagrangeVector::unit(3));
        assert!((sol.spectrum.k2 - 1.0).abs() < 1e-15);
        assert!((sol.spectrum.eval(0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = AutocovSeq::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            solve_mr(&bad, &MrOptions::default()),
            Err(Error::NotPosDef { .. })
        ));
        let ok = AutocovSeq::from_real(&[1.0, 0.3]).unwrap();
        let opts = MrOptions {
            tol: 0.5,
            ..MrOptions::default()
        };
        assert!(matches!(
            solve_mr(&ok, &opts),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn iteration_budget_exhaustion() {
        let r = AutocovSeq::from_real(&REFERENCE_LAGS).unwrap();
        let opts = MrOptions {
            max_iter: 2,
            ..MrOptions::default()
        };
        match solve_mr(&r, &opts) {
            Err(Error::NoConvergence(d)) => {
                assert_eq!(d.iterations, 2);
                assert!(d.final_residual() > 0.0);
                assert!(d.final_min() > 0.0);
            }
            other => panic!("expected no-convergence, got {other:?}"),
        }
    }

    #[test]
    fn reference_solution_consistency() {
        let r = AutocovSeq::from_real(&REFERENCE_LAGS).unwrap();
        let sol = solve_mr(&r, &MrOptions::default()).unwrap();
        let s = &sol.spectrum;
        assert!(sol.diagnostics.min_values.iter().all(|&m| m > 0.0));
        assert!(s.lambda.coeffs().iter().all(|c| c.im == 0.0));
        for th in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            let f = s.eval(th);
            assert!((s.eval_normalized(th) - f).abs() < 1e-8 * f);
            assert!((s.eval_factored(th) - f).abs() < 1e-8 * f);
        }
        assert!(s.eval(0.5) > s.eval(std::f64::consts::PI));
        let g = s.to_grid(1 << 14).unwrap();
        assert!((g.mean_of(|f| f) - 3.0).abs() < 1e-4);
    }

    #[test]
    fn refines_grid_near_boundary() {
        // min λG ≈ 0.0042 at the solution, below 100/128² but above 100/256²
        let r = AutocovSeq::from_real(&REFERENCE_LAGS).unwrap();
        let opts = MrOptions {
            n_grid: 128,
            ..MrOptions::default()
        };
        let sol = solve_mr(&r, &opts).unwrap();
        let d = &sol.diagnostics;
        assert_eq!(d.refinements, 1);
        assert_eq!(d.n_grid, 256);
        assert!(d.final_min() >= 100.0 / 256.0f64.powi(2));
    }

    #[test]
    fn extreme_correlation_reports_diagnostics() {
        // R1/R0 = 0.95 puts the minimum of λG ~1e-11 relative to λ_0, past
        // what double precision can resolve at tol 1e-8.
        let r = AutocovSeq::from_real(&[1.0, 0.95]).unwrap();
        match solve_mr(&r, &MrOptions::default()) {
            Err(Error::NoConvergence(d)) => {
                assert!(d.min_values.iter().all(|&m| m > 0.0));
                assert!(d.final_residual() < 1e-3);
            }
            other => panic!("expected no-convergence, got {other:?}"),
        }
    }
}
