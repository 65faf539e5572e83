mod common;

use common::rel_err;
use dhilbert::quadrature::QuadratureSpec;
use dhilbert::specialfn::*;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = KernelParams> {
    (0.01f64..=2.0, 2.0f64..3.999).prop_map(|(a, b)| KernelParams::new(a, b).unwrap())
}

#[test]
fn log_gamma_matches_statrs_on_log_grid() {
    // statrs uses its own Lanczos implementation; agreement to 1e-12
    for j in 0..=600 {
        let x = 10f64.powf(-3.0 + j as f64 * 0.01);
        let want = statrs::function::gamma::ln_gamma(x);
        let got = log_gamma(x).unwrap();
        let err = if want.abs() < 1e-3 { (got - want).abs() } else { rel_err(got, want) };
        assert!(err <= 1e-12, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn incomplete_beta_matches_statrs() {
    for (a, b) in [(0.5, 0.5), (1.0, 3.0), (2.5, 1.5), (10.0, 0.3)] {
        for x in [0.01, 0.2, 0.5, 0.8, 0.999] {
            let want = statrs::function::beta::beta_reg(a, b, x);
            let got = inc_beta_regularized(a, b, x).unwrap();
            assert!((got - want).abs() <= 1e-12, "I_{x}({a}, {b}): {got} vs {want}");
        }
    }
}

#[test]
fn beta_identities() {
    for s in [0.25, 0.5, 1.0, 2.0, 3.5] {
        assert!(rel_err(beta(s, 1.0).unwrap(), 1.0 / s) <= 1e-12);
    }
    assert!(rel_err(beta(0.5, 0.5).unwrap(), std::f64::consts::PI) <= 1e-12);
    assert!(rel_err(beta(0.5, 1.0).unwrap(), 2.0) <= 1e-12);
    assert!(beta(0.0, 1.0).is_err());
}

#[test]
fn kernel_decreasing_on_log_grid() {
    for (a, b) in [(2.0, 2.0), (1.0, 3.0), (0.1, 3.99), (2.0, 3.99), (0.5, 2.0)] {
        let p = KernelParams::new(a, b).unwrap();
        let g = |x: f64| hardy_kernel(x, 1.0, &p).unwrap() * x.powf(-0.5);
        let xs: Vec<f64> = (-20..=20).map(|j| 2f64.powi(j)).collect();
        for w in xs.windows(2) {
            assert!(g(w[1]) < g(w[0]), "({a}, {b}) at x = {}", w[1]);
        }
    }
}

#[test]
fn kernel_integral_matches_closed_form_oracles() {
    let spec = QuadratureSpec::default();
    let p = KernelParams::new(1.0, 3.0).unwrap();
    // Γ(1/2)² = π
    assert!((kernel_integral_check(&p, &spec).unwrap() - std::f64::consts::PI).abs() < 1e-5);
    // ∫ x^{-1/2} (1+x)^{-3/2} dx = [2 sqrt(x/(1+x))]_0^∞ = 2
    let p = KernelParams::new(2.0, 3.0).unwrap();
    assert!((kernel_integral_check(&p, &spec).unwrap() - 2.0).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernel_homogeneous_of_degree_minus_one(
        p in params(),
        x in 1e-6f64..1e6,
        y in 1e-6f64..1e6,
        lambda in 1e-3f64..1e3,
    ) {
        let k = hardy_kernel(x, y, &p).unwrap();
        let scaled = hardy_kernel(lambda * x, lambda * y, &p).unwrap();
        prop_assert!((scaled - k / lambda).abs() <= 1e-12 * k / lambda);
    }

    #[test]
    fn log_kernel_agrees_with_kernel(p in params(), x in 1e-6f64..1e6, y in 1e-6f64..1e6) {
        let k = hardy_kernel(x, y, &p).unwrap();
        let l = ln_hardy_kernel(x.ln(), y.ln(), &p).exp();
        prop_assert!(rel_err(l, k) <= 1e-12);
    }

    #[test]
    fn beta_symmetric(s in 0.01f64..50.0, t in 0.01f64..50.0) {
        prop_assert!(rel_err(beta(s, t).unwrap(), beta(t, s).unwrap()) <= 1e-13);
    }

    #[test]
    fn beta_recurrence(s in 0.01f64..50.0, t in 0.01f64..50.0) {
        // B(s+1, t) = B(s, t) s / (s + t)
        let lhs = beta(s + 1.0, t).unwrap();
        let rhs = beta(s, t).unwrap() * s / (s + t);
        prop_assert!(rel_err(lhs, rhs) <= 1e-12);
    }

    #[test]
    fn gamma_ratio_matches_difference(x in 20.0f64..1e6, c in 0.0f64..5.0) {
        let direct = statrs::function::gamma::ln_gamma(x + c) - statrs::function::gamma::ln_gamma(x);
        let got = log_gamma_ratio(x, c).unwrap();
        // the difference of two large logarithms carries |ln Γ(x)| eps of noise
        let noise = 8.0 * f64::EPSILON * statrs::function::gamma::ln_gamma(x + c).abs();
        prop_assert!((got - direct).abs() <= noise + 1e-12 * direct.abs());
    }

    #[test]
    fn kernel_integrals_over_both_variables_agree(p in params()) {
        let spec = QuadratureSpec::default();
        let x = kernel_integral(&p, KernelVariable::X, &spec).unwrap();
        let y = kernel_integral(&p, KernelVariable::Y, &spec).unwrap();
        prop_assert!((x - y).abs() <= 1e-6 * x.max(1.0));
        prop_assert!(rel_err(x, hardy_constant(&p).unwrap()) <= 1e-6);
    }
}
