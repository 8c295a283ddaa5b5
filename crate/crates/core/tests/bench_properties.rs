use qmc_cmaes::bench::{make_problem, FUNCTION_IDS};
use qmc_cmaes::cmaes::{default_params, initial_mean, run, CmaState, RunConfig};
use qmc_cmaes::lds::{make_endless_source, EndlessKind};
use qmc_cmaes::seed::mix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn precision_is_nonnegative_and_counted() {
    for &fid in FUNCTION_IDS.iter() {
        for dim in [2usize, 5] {
            let mut p = make_problem(fid, 3, dim).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(mix(7, &[fid as u64, dim as u64]));
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
                let e = p.evaluate(&x).unwrap();
                assert!(e.precision >= 0.0 && e.precision.is_finite(), "fid {fid}");
            }
            assert_eq!(p.evaluations(), 10_000);
            let x_opt = p.x_opt().to_vec();
            assert!(p.evaluate(&x_opt).unwrap().precision <= 1e-9, "fid {fid}");
        }
    }
}

fn evals_to_target(iid: u32, seed: u64) -> u64 {
    let dim = 5;
    let mut problem = make_problem(1, iid, dim).unwrap();
    let params = default_params(dim, None).unwrap();
    let state = CmaState::new(&params, &initial_mean(dim, seed)).unwrap();
    let mut src = make_endless_source(EndlessKind::Uniform, dim, seed).unwrap();
    let out = run(&mut problem, &params, state, &mut src, &RunConfig::new(20_000)).unwrap();
    out.evaluations
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(a: &[u64], b: &[u64]) -> f64 {
    let mut all: Vec<u64> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    all.dedup();
    let cdf = |s: &[u64], t: u64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
    all.iter().map(|&t| (cdf(a, t) - cdf(b, t)).abs()).fold(0.0, f64::max)
}

#[test]
fn sphere_instances_are_statistically_equivalent() {
    let a: Vec<u64> = (0..50).map(|s| evals_to_target(1, mix(1, &[s]))).collect();
    let b: Vec<u64> = (0..50).map(|s| evals_to_target(2, mix(2, &[s]))).collect();
    let d = ks_statistic(&a, &b);
    // critical value at alpha = 0.01
    let crit = 1.628 * ((50.0 + 50.0) / (50.0 * 50.0f64)).sqrt();
    assert!(d <= crit, "KS statistic {d} exceeds {crit}");
}
