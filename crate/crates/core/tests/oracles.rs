//! Frozen reference values and independent closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use statrs::function::erf::erfc;

use xxz_workbench::dynamics::fourier_bound_check;
use xxz_workbench::estimators::{decay_fit, FitPoint};
use xxz_workbench::oracles::{c_alpha, partition_count, partition_generating_function};
use xxz_workbench::prelude::*;

#[test]
fn c_alpha_golden() {
    // (1 − e^{−1})^{−1} Π_n (1 − e^{−n})^{−2}, evaluated to 30 digits offline.
    let golden = 6.217_282_283_409_933;
    let c = c_alpha(1.0).unwrap();
    assert!((c - golden).abs() <= 1e-12 * golden, "{c}");
}

#[test]
fn euler_product_matches_partition_series() {
    for alpha in [0.3, 0.5, 1.0, 2.0] {
        let (series, product) = partition_generating_function(alpha).unwrap();
        assert!((series - product).abs() <= 1e-11 * product, "alpha {alpha}: {series} vs {product}");
    }
    assert_eq!(partition_count(100).unwrap(), 190_569_292);
}

/// `i√(π/2) [erfc(ξ/2√ε) − erfc(ξ/2√t)]`, the transform of the `a = 0` filter.
fn closed_form(t: f64, eps: f64, xi: f64) -> f64 {
    (std::f64::consts::PI / 2.0).sqrt() * (erfc(xi / (2.0 * eps.sqrt())) - erfc(xi / (2.0 * t.sqrt()))).abs()
}

#[test]
fn fourier_quadrature_matches_erfc() {
    let xis: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.5).collect();
    for t in [1.0, 5.0, 20.0] {
        let rep = fourier_bound_check(t, 0.0, 0.01, &xis).unwrap();
        for p in &rep.points {
            let exact = closed_form(t, 0.01, p.xi);
            assert!(
                (p.measured - exact).abs() <= p.budget + 1e-9,
                "t {t}, xi {}: {} vs {exact}",
                p.xi,
                p.measured
            );
        }
    }
}

#[test]
fn fit_recovers_noisy_exponential() {
    let (amplitude, rate, sigma) = (0.8, 0.35, 0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut points = Vec::new();
    for d in 0..=12u64 {
        for _ in 0..40 {
            let v = amplitude * (-rate * d as f64).exp() * (noise.sample(&mut rng) as f64).exp();
            points.push(FitPoint::new(ExtDist::Finite(d), v));
        }
    }
    let fit = decay_fit(&points, DistanceKind::D1, None).unwrap();
    assert!((fit.slope + rate).abs() <= 2.0 * fit.slope_se.max(1e-3), "{} ± {}", fit.slope, fit.slope_se);
    assert!(fit.r_squared > 0.99);

    // Pure noise around a constant has no decay to find.
    let flat: Vec<FitPoint> = (0..=12u64)
        .map(|d| FitPoint::new(ExtDist::Finite(d), 1.0 + 0.01 * rng.random_range(-1.0..1.0)))
        .collect();
    let fit = decay_fit(&flat, DistanceKind::D1, None).unwrap();
    assert!(fit.slope.abs() < 0.01);
}
