use std::f64::consts::PI;

use fracpole_core::*;
use proptest::prelude::*;

fn complex_coeffs(max_degree: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 0..=max_degree).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

/// A Hermitian polynomial with `c_0 = margin + 2 Σ|c_k|`, hence ≥ margin.
fn positive_poly(max_degree: usize, margin: f64) -> impl Strategy<Value = TrigPoly> {
    complex_coeffs(max_degree).prop_map(move |tail| {
        let c0 = margin + 2.0 * tail.iter().map(|c| c.norm()).sum::<f64>();
        let mut c = vec![Complex64::new(c0, 0.0)];
        c.extend(tail);
        TrigPoly::new(c).unwrap()
    })
}

fn autocov_from_poly(p: &TrigPoly, n: usize) -> AutocovSeq {
    let g = sample_grid(p, 1 << 10).unwrap();
    moments_of_density(&g, n).unwrap().to_autocov().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eval_is_real(tail in complex_coeffs(8), c0 in -3.0f64..3.0, theta in -PI..PI) {
        let mut c = vec![Complex64::new(c0, 0.0)];
        c.extend(tail);
        let p = TrigPoly::new(c).unwrap();
        let raw = p.eval_complex(theta);
        let scale: f64 = (-(p.degree() as i64)..=p.degree() as i64).map(|k| p.coeff(k).norm()).sum();
        prop_assert!(raw.im.abs() <= 1e-12 * scale.max(1e-300));
        prop_assert!((raw.re - p.eval(theta)).abs() <= 1e-12 * scale.max(1.0));
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hermitian_closure(p in positive_poly(8, 0.1), exp in 5u32..9) {
        let n_grid = 1usize << exp;
        let g = sample_grid(&p, n_grid).unwrap();
        let back = fourier_coeffs(&g, p.degree()).unwrap();
        for k in -(p.degree() as i64)..=p.degree() as i64 {
            prop_assert!((back.coeff(k) - p.coeff(k)).norm() < 1e-12 * p.coeff(0).re.max(1.0));
        }
    }

    #[test]
    fn factorization_round_trip(p in positive_poly(6, 0.5)) {
        let f = spectral_factorization(&p).unwrap();
        let g = sample_grid(&p, 1024).unwrap();
        let max = g.values().iter().cloned().fold(0.0, f64::max);
        for i in 0..1024 {
            let th = g.theta(i);
            let v = f.gain * f.eval_monic(th).norm_sqr();
            prop_assert!((v - g.values()[i]).abs() <= 1e-8 * max);
        }
    }

    #[test]
    fn prediction_variance_bounds(p in positive_poly(5, 0.2), n in 1usize..=5) {
        let g = sample_grid(&p, 1 << 10).unwrap();
        let a = moments_of_density(&g, n).unwrap().to_autocov().unwrap();
        let pv = prediction_variance(&a).unwrap();
        prop_assert!(pv >= geometric_mean(&g) * (1.0 - 1e-10));
        prop_assert!(pv >= harmonic_mean(&g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn me_reproduces_moments(p in positive_poly(4, 0.5), n in 1usize..=4) {
        let a = autocov_from_poly(&p, n);
        let me = fit_me(&a).unwrap();
        let g = me.to_grid(1 << 16).unwrap();
        let m = moments_of_density(&g, n).unwrap();
        for k in 0..=n as i64 {
            prop_assert!((m.lag(k) - a.lag(k)).norm() <= 1e-8 * a.r0());
        }
        // f_ME has geometric mean k²
        prop_assert!((geometric_mean(&g) - me.k2).abs() < 1e-8 * me.k2);
    }

    #[test]
    fn mr_reproduces_moments(p in positive_poly(3, 1.0), n in 1usize..=3) {
        let a = autocov_from_poly(&p, n);
        let sol = solve_mr(&a, &MrOptions::default()).unwrap();
        let s = &sol.spectrum;
        let res = residual(&s.lambda, &a.to_moment_vector(), sol.diagnostics.n_grid).unwrap();
        prop_assert!(res.norm_inf() <= 1e-8 * a.r0());
        prop_assert!(sol.diagnostics.min_values.iter().all(|&m| m > 0.0));
        let g = s.to_grid(1 << 14).unwrap();
        prop_assert!((harmonic_mean(&g) - s.k2).abs() < 1e-10 * s.k2);
        // both worst cases against each other
        let ge = fit_me(&a).unwrap().to_grid(1 << 14).unwrap();
        prop_assert!(harmonic_mean(&g) >= harmonic_mean(&ge) * (1.0 - 1e-9));
        prop_assert!(geometric_mean(&ge) >= geometric_mean(&g) * (1.0 - 1e-9));
    }

    #[test]
    fn complex_mr_solution(p in positive_poly(2, 1.0)) {
        let a = autocov_from_poly(&p, p.degree().max(1));
        let sol = solve_mr(&a, &MrOptions::default()).unwrap();
        let res = residual(&sol.spectrum.lambda, &a.to_moment_vector(), sol.diagnostics.n_grid).unwrap();
        prop_assert!(res.norm_inf() <= 1e-8 * a.r0());
    }
}
