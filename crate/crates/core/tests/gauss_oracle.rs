use qmc_cmaes::gauss::{inv_norm_cdf, norm_cdf, sanitize_and_transform};
use qmc_cmaes::lds::sobol_set;
use statrs::function::erf::erfc;

/// Φ⁻¹ by bisection on an independent erfc; the upper half uses the exact
/// complement.
fn oracle(u: f64) -> f64 {
    if u > 0.5 {
        return -oracle(1.0 - u);
    }
    let phi = |x: f64| 0.5 * erfc(-x / std::f64::consts::SQRT_2);
    let (mut lo, mut hi) = (-40.0f64, 0.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn grid() -> Vec<f64> {
    let lo = 1e-15f64;
    let mut g: Vec<f64> = (0..5000)
        .map(|i| lo + (1.0 - 2.0 * lo) * i as f64 / 4999.0)
        .collect();
    // log-spaced tails, mirrored
    for i in 0..2500 {
        let e = -15.0 + 14.0 * i as f64 / 2499.0;
        let u = 10f64.powf(e);
        g.push(u);
        g.push(1.0 - u);
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

#[test]
fn accuracy_against_bisection_oracle() {
    let mut worst = 0.0f64;
    for u in grid() {
        let err = (inv_norm_cdf(u).unwrap() - oracle(u)).abs();
        worst = worst.max(err);
    }
    assert!(worst <= 1e-9, "worst error {worst}");
}

#[test]
fn strictly_monotone_on_grid() {
    let values: Vec<f64> = grid().iter().map(|&u| inv_norm_cdf(u).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn antisymmetric() {
    // Only pairs whose complement is exact in floating point; near 0 the
    // rounded 1 - u is a different point entirely.
    let mut checked = 0;
    for u in grid().into_iter().filter(|&u| 1.0 - (1.0 - u) == u) {
        checked += 1;
        let s = inv_norm_cdf(u).unwrap() + inv_norm_cdf(1.0 - u).unwrap();
        assert!(s.abs() <= 1e-9, "u={u}: {s}");
    }
    assert!(checked > 5000);
    // In the lower tail the mirrored value is exact by construction.
    for u in [1e-15, 2f64.powi(-53), 1e-10] {
        let v = 1.0 - u;
        assert_eq!(inv_norm_cdf(v).unwrap(), -inv_norm_cdf(1.0 - v).unwrap());
    }
}

#[test]
fn boundary_value_matches_oracle() {
    let z = sanitize_and_transform(&[0.0])[0];
    assert!((z - oracle(2f64.powi(-53))).abs() < 1e-9);
}

#[test]
fn cdf_round_trip() {
    for u in grid().into_iter().filter(|&u| (1e-10..=1.0 - 1e-10).contains(&u)) {
        assert!((norm_cdf(inv_norm_cdf(u).unwrap()) - u).abs() <= 1e-12, "u={u}");
    }
}

#[test]
fn sobol_pushforward_moments() {
    let set = sobol_set(100_000, 1).unwrap();
    let z = sanitize_and_transform(set.coords());
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() <= 0.01, "mean {mean}");
    assert!((0.98..=1.02).contains(&var), "variance {var}");
}
