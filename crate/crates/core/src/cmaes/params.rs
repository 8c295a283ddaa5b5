use crate::error::{Error, Result};

/// Strategy parameters with the standard CMA-ES defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct CmaParams {
    pub dim: usize,
    pub lambda: usize,
    pub mu: usize,
    /// Positive recombination weights, nonincreasing, summing to one.
    pub weights: Vec<f64>,
    pub mu_eff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c_1: f64,
    pub c_mu: f64,
    /// Expected norm of a standard normal vector, `E‖N(0, I)‖`.
    pub chi_n: f64,
    pub sigma0: f64,
}

/// Initial step size: a fifth of the `[-5, 5]` search box.
pub const DEFAULT_SIGMA0: f64 = 2.0;

/// `4 + ⌊3 ln d⌋`.
pub fn default_lambda(dim: usize) -> usize {
    4 + (3.0 * (dim as f64).ln()).floor() as usize
}

/// Default parameters for dimension `dim`, optionally with a custom λ.
pub fn default_params(dim: usize, lambda_override: Option<usize>) -> Result<CmaParams> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let lambda = match lambda_override {
        Some(l) if l < 2 => {
            return Err(Error::InvalidArgument(format!("population size {l} < 2")))
        }
        Some(l) => l,
        None => default_lambda(dim),
    };
    let mu = lambda / 2;
    let raw: Vec<f64> = (1..=mu)
        .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

    let n = dim as f64;
    let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
    let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
    let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
    let c_1 = 2.0 / ((n + 1.3).powi(2) + mu_eff);
    let c_mu = (1.0 - c_1)
        .min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff))
        .max(0.0);
    let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    Ok(CmaParams {
        dim,
        lambda,
        mu,
        weights,
        mu_eff,
        c_sigma,
        d_sigma,
        c_c,
        c_1,
        c_mu,
        chi_n,
        sigma0: DEFAULT_SIGMA0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_population_sizes() {
        assert_eq!(default_params(2, None).unwrap().lambda, 6);
        assert_eq!(default_params(5, None).unwrap().lambda, 8);
        assert_eq!(default_params(10, None).unwrap().lambda, 10);
        assert_eq!(default_params(40, None).unwrap().lambda, 15);
        for d in 1..=40 {
            assert!(default_lambda(d) < 16);
        }
    }

    #[test]
    fn override_and_weights() {
        let p = default_params(3, Some(16)).unwrap();
        assert_eq!((p.lambda, p.mu), (16, 8));
        assert!((p.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.weights.windows(2).all(|w| w[0] >= w[1]));
        assert!(p.weights.iter().all(|&w| w > 0.0));
        assert!(default_params(3, Some(1)).is_err());
        assert!(default_params(0, None).is_err());
    }

    #[test]
    fn rates_in_range() {
        for d in [1, 2, 5, 10, 20, 40] {
            for lambda in [None, Some(2), Some(15), Some(16), Some(100)] {
                let p = default_params(d, lambda).unwrap();
                assert!(p.mu <= p.lambda && p.mu >= 1);
                for r in [p.c_sigma, p.c_c, p.c_1] {
                    assert!(r > 0.0 && r <= 1.0);
                }
                assert!(p.c_mu >= 0.0 && p.c_1 + p.c_mu <= 1.0);
                assert!(p.d_sigma > 0.0);
                assert!((p.mu_eff - 1.0 / p.weights.iter().map(|w| w * w).sum::<f64>()).abs() < 1e-12);
            }
        }
    }
}
