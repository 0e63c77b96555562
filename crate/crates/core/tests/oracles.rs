use std::f64::consts::PI;

use fracpole_core::reference::*;
use fracpole_core::*;

fn reference() -> AutocovSeq {
    AutocovSeq::from_real(&REFERENCE_LAGS).unwrap()
}

fn reference_mr() -> MrSolution {
    solve_mr(&reference(), &MrOptions::default()).unwrap()
}

/// Durand–Kerner iteration for the roots of `Σ c_i z^i`.
fn roots_oracle(ascending: &[Complex64]) -> Vec<Complex64> {
    let deg = ascending.len() - 1;
    let lead = ascending[deg];
    let monic: Vec<Complex64> = ascending.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32) * 1.5).collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}

/// Taylor coefficients of `(1 + x z)^{1/2}`.
fn binomial_sqrt(x: f64, terms: usize) -> Vec<f64> {
    let mut t = vec![1.0];
    for k in 1..terms {
        let prev = t[k - 1];
        t.push(prev * (0.5 - (k - 1) as f64) / k as f64 * x);
    }
    t
}

#[test]
fn sqrt_matches_binomial_series() {
    // |1 + 0.5e^{jθ}|² = 1.25 + 0.5(e^{jθ} + e^{-jθ}), √ = |1 + 0.5e^{jθ}|
    let p = TrigPoly::from_real(&[1.25, 0.5]);
    let rho = sqrt_coeffs(&p, 60, 1 << 12).unwrap();
    let t = binomial_sqrt(0.5, 200);
    for k in 0..=40usize {
        let expect: f64 = (0..t.len() - k).map(|i| t[i + k] * t[i]).sum();
        assert!(
            (rho.coeff(k as i64).re - expect).abs() < 1e-12,
            "lag {k}: {} vs {expect}",
            rho.coeff(k as i64).re
        );
        assert!(rho.coeff(k as i64).im.abs() < 1e-14);
    }
}

#[test]
fn factorization_matches_root_oracle() {
    // z·p(z) = z² + 2.5z + 1 has roots −2 and −½
    let p = TrigPoly::from_real(&[2.5, 1.0]);
    let f = spectral_factorization(&p).unwrap();
    let roots = roots_oracle(&[
        Complex64::new(1.0, 0.0),
        Complex64::new(2.5, 0.0),
        Complex64::new(1.0, 0.0),
    ]);
    let outside = roots.iter().find(|r| r.norm() > 1.0).unwrap();
    assert!((outside - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    // q(z) = 1 − z/r, gain = c_1·(−r)
    assert!((f.monic[0] + 1.0 / outside).norm() < 1e-12);
    assert!((f.gain - 2.0).abs() < 1e-12);
}

#[test]
fn me_roots_lie_outside_disc() {
    let mut rng = simulate::GaussianSource::new(17);
    for n in 1..=8 {
        let c: Vec<f64> = (0..=n)
            .map(|k| if k == 0 { 0.0 } else { rng.uniform() - 0.5 })
            .collect();
        let spread: f64 = c.iter().map(|x| x.abs()).sum();
        let mut c = c;
        c[0] = 0.3 + 2.0 * spread;
        let g = sample_grid(&TrigPoly::from_real(&c), 1 << 10).unwrap();
        let r = moments_of_density(&g, n).unwrap().to_autocov().unwrap();
        let me = fit_me(&r).unwrap();
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        poly.extend(me.a.iter().copied());
        while poly.last().unwrap().norm() < 1e-14 {
            poly.pop();
        }
        for root in roots_oracle(&poly) {
            assert!(root.norm() > 1.0, "n = {n}: root {root}");
        }
    }
}

#[test]
fn reference_lambda_is_in_cone() {
    let sol = reference_mr();
    let lambda = &sol.spectrum.lambda;
    let n = lambda.n();
    // z^n λG(z) as an ordinary polynomial
    let poly: Vec<Complex64> = (0..=2 * n)
        .map(|i| lambda.lambda(i as i64 - n as i64))
        .collect();
    for root in roots_oracle(&poly) {
        assert!((root.norm() - 1.0).abs() > 1e-3, "root on circle: {root}");
    }
    let (_, min) = min_on_grid(&sample_grid(&lambda.poly(), 1 << 14).unwrap());
    assert!(min > 0.0);
}

#[test]
fn mr_peak_near_sinusoid() {
    let s = reference_mr().spectrum;
    assert!(s.eval(0.5) > s.eval(PI));
    assert!((s.eval(0.5) - s.eval_factored(0.5)).abs() < 1e-10 * s.eval(0.5));
}

#[test]
fn mr_harmonic_mean_equals_k2() {
    let s = reference_mr().spectrum;
    let g = s.to_grid(1 << 14).unwrap();
    assert!((harmonic_mean(&g) - s.k2).abs() < 1e-6);
    // direct quadrature of √(λG)
    let lp = s.lambda.poly();
    let n = 1 << 14;
    let direct = (0..n)
        .map(|i| lp.eval(-PI + 2.0 * PI * i as f64 / n as f64).sqrt())
        .sum::<f64>()
        / n as f64;
    assert!((1.0 / direct - s.k2).abs() < 1e-6);
}

#[test]
fn me_geometric_mean_equals_k2() {
    let me = fit_me(&reference()).unwrap();
    let g = me.to_grid(1 << 14).unwrap();
    assert!((geometric_mean(&g) - me.k2).abs() < 1e-6);
}

#[test]
fn smoother_routes_agree() {
    let s = reference_mr().spectrum;
    let g = s.to_grid(1 << 14).unwrap();
    let filter = optimal_smoother(&g, 40).unwrap();
    let rho = sqrt_coeffs(&s.b, 40, 1 << 14).unwrap();
    for k in 1..=40i64 {
        let expect = -rho.coeff(k);
        assert!((filter.coeff(k) - expect).norm() < 1e-8, "lag {k}");
        assert!((filter.coeff(-k) - expect.conj()).norm() < 1e-8, "lag -{k}");
    }
    assert!((rho.coeff(0).re - 1.0).abs() < 1e-10);
    assert!((filter.variance - s.k2).abs() < 1e-10);
}

#[test]
fn finite_smoother_is_locally_optimal() {
    let s = reference_mr().spectrum;
    let g = s.to_grid(1 << 14).unwrap();
    let window = 6;
    let filter = finite_window_smoother_from_density(&g, window).unwrap();
    let r = moments_of_density(&g, 2 * window).unwrap().lags();
    let base = smoother_variance(&filter, &r).unwrap();
    for &k in filter.coeffs.keys() {
        for d in [
            Complex64::new(1e-3, 0.0),
            Complex64::new(-1e-3, 0.0),
            Complex64::new(0.0, 1e-3),
            Complex64::new(0.0, -1e-3),
        ] {
            let mut perturbed = filter.clone();
            *perturbed.coeffs.get_mut(&k).unwrap() += d;
            assert!(smoother_variance(&perturbed, &r).unwrap() >= base);
        }
    }
}

#[test]
fn window_variance_decreases_to_harmonic_mean() {
    let s = reference_mr().spectrum;
    let g = s.to_grid(1 << 14).unwrap();
    let hm = harmonic_mean(&g);
    let mut prev = f64::INFINITY;
    for m in [1, 2, 4, 8, 16, 32, 64, 128, 256] {
        let v = finite_window_smoother_from_density(&g, m).unwrap().variance;
        assert!(v <= prev * (1.0 + 1e-12), "m = {m}");
        assert!(v >= hm * (1.0 - 1e-10), "m = {m}: {v} < {hm}");
        prev = v;
    }
    assert!((prev - hm) / hm < 0.01, "{prev} vs {hm}");

    let me = fit_me(&reference()).unwrap().to_grid(1 << 14).unwrap();
    let hm_me = harmonic_mean(&me);
    let v = finite_window_smoother_from_density(&me, 32)
        .unwrap()
        .variance;
    assert!(v >= hm_me * (1.0 - 1e-10));
}

#[test]
fn tighter_tolerance_moves_lambda_by_tol() {
    let r = reference();
    let loose = reference_mr().spectrum.lambda;
    let tight = solve_mr(
        &r,
        &MrOptions {
            tol: 1e-9,
            ..MrOptions::default()
        },
    )
    .unwrap()
    .spectrum
    .lambda;
    let dev = loose
        .coeffs()
        .iter()
        .zip(tight.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-6, "{dev}");
}

#[test]
fn real_input_keeps_real_lambda() {
    let sol = reference_mr();
    assert!(sol.spectrum.lambda.coeffs().iter().all(|c| c.im == 0.0));
    assert!(sol.diagnostics.last_lambda.iter().all(|c| c.im == 0.0));
    let path = trace_path(&reference(), 16, 1 << 12).unwrap();
    assert!(path.iter().all(|l| l.coeffs().iter().all(|c| c.im == 0.0)));
}

#[test]
fn rk4_path_reaches_newton_solution() {
    let n_grid = 1 << 14;
    let newton = reference_mr().spectrum.lambda;
    let path = trace_path(&reference(), 1024, n_grid).unwrap();
    assert_eq!(path.len(), 1025);
    let end = path.last().unwrap();
    let dev = end
        .coeffs()
        .iter()
        .zip(newton.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-6, "{dev}");
    for lambda in &path {
        assert!(min_on_grid(&sample_grid(&lambda.poly(), 1024).unwrap()).1 > 0.0);
    }
}

#[test]
fn mr_maximizes_harmonic_mean() {
    let n_grid = 1 << 14;
    let mr = reference_mr().spectrum.to_grid(n_grid).unwrap();
    let me = fit_me(&reference()).unwrap().to_grid(n_grid).unwrap();
    let continuous = GridDensity::from_fn(n_grid, false, continuous_part).unwrap();
    let hm = harmonic_mean(&mr);
    assert!(hm > harmonic_mean(&me));
    assert!(hm > harmonic_mean(&continuous));
    // √(1 − 0.8²)
    assert!((harmonic_mean(&continuous) - 0.6).abs() < 1e-12);
}

#[test]
fn reference_lags_from_process() {
    for (k, r) in REFERENCE_LAGS.iter().enumerate() {
        assert!((exact_lag(k) - r).abs() < 5e-5);
    }
    // lag 2 comes from the sinusoid alone
    assert!((exact_lag(2) - 2.0 * 1.0f64.cos()).abs() < 1e-15);
}

#[test]
fn realizations_are_stationary() {
    let len = 1 << 16;
    let half = len / 2;
    let me = fit_me(&reference()).unwrap();
    // Bartlett: Var(sample variance) ≈ (2/T) Σ_k R_k²
    let lags = moments_of_density(&me.to_grid(1 << 14).unwrap(), 400)
        .unwrap()
        .lags();
    let sum_sq: f64 =
        lags[0].norm_sqr() + 2.0 * lags[1..].iter().map(|r| r.norm_sqr()).sum::<f64>();
    let se = (2.0 * 2.0 / half as f64 * sum_sq).sqrt();
    for seed in 0..5 {
        let u = simulate_ar(&me, len, seed).unwrap().samples;
        let var = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        let diff = (var(&u[..half]) - var(&u[half..])).abs();
        assert!(diff < 5.0 * se, "seed {seed}: {diff} vs SE {se}");
    }
}

#[test]
fn prediction_variance_dominates_smoothing() {
    let r = reference();
    let pv = prediction_variance(&r).unwrap();
    for g in [
        reference_mr().spectrum.to_grid(1 << 14).unwrap(),
        fit_me(&r).unwrap().to_grid(1 << 14).unwrap(),
    ] {
        assert!(pv >= harmonic_mean(&g));
    }
    assert!((pv - fit_me(&r).unwrap().k2).abs() < 1e-12);
}
