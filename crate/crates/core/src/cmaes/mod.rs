//! CMA-ES whose Gaussian sampling is driven by a unit-cube [`SamplerSource`].
//!
//! Sampling runs in three stages: `z = Φ⁻¹(u)` for a raw point `u`,
//! `y = B·diag(D)·z`, and `x = m + σ·y`. The update is the standard one:
//! weighted recombination, cumulative step-size adaptation and a rank-one
//! plus rank-μ covariance update, with a fresh eigendecomposition every
//! generation.

mod params;
mod run;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

pub use params::{default_lambda, default_params, CmaParams, DEFAULT_SIGMA0};
pub use run::{run, run_objective, RunConfig, RunOutcome, DEFAULT_TARGET};

use crate::error::{Error, Result};
use crate::gauss;
use crate::lds::SamplerSource;
use crate::seed;

/// Eigenvalues below this fraction of the largest one are raised to it.
pub const EIGEN_FLOOR: f64 = 1e-30;

/// One offspring through the three sampling stages.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Position within its generation; breaks fitness ties.
    pub index: usize,
    pub raw: Vec<f64>,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    /// NaN until evaluated.
    pub fitness: f64,
}

/// Full strategy state.
#[derive(Debug, Clone, PartialEq)]
pub struct CmaState {
    pub mean: DVector<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    /// Eigenvectors of `cov`, one per column.
    pub b: DMatrix<f64>,
    /// Square roots of the (repaired) eigenvalues of `cov`.
    pub d: DVector<f64>,
    pub p_sigma: DVector<f64>,
    pub p_c: DVector<f64>,
    pub generation: u64,
}

/// Uniform start point in `[-4, 4]^dim`.
pub fn initial_mean(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    (0..dim).map(|_| rng.random_range(-4.0..4.0)).collect()
}

impl CmaState {
    pub fn new(params: &CmaParams, m0: &[f64]) -> Result<Self> {
        let n = params.dim;
        if m0.len() != n {
            return Err(Error::InvalidArgument(format!(
                "initial mean has {} coordinates, expected {n}",
                m0.len()
            )));
        }
        if m0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial mean".into()));
        }
        if !(params.sigma0 > 0.0 && params.sigma0.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma0 {} must be positive", params.sigma0)));
        }
        Ok(Self {
            mean: DVector::from_column_slice(m0),
            sigma: params.sigma0,
            cov: DMatrix::identity(n, n),
            b: DMatrix::identity(n, n),
            d: DVector::from_element(n, 1.0),
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            generation: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `y = B·diag(D)·z`.
    pub fn transform(&self, z: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.b[(i, j)] * (self.d[j] * z[j])).sum())
            .collect()
    }

    /// Candidate built from one raw unit-cube point.
    pub fn candidate(&self, index: usize, raw: Vec<f64>) -> Candidate {
        let z = gauss::sanitize_and_transform(&raw);
        let y = self.transform(&z);
        let x = y
            .iter()
            .zip(self.mean.iter())
            .map(|(yi, mi)| mi + self.sigma * yi)
            .collect();
        Candidate {
            index,
            raw,
            z,
            y,
            x,
            fitness: f64::NAN,
        }
    }

    /// Draws λ points from `source` in stream order and maps them to
    /// candidates.
    pub fn ask(&self, params: &CmaParams, source: &mut SamplerSource) -> Vec<Candidate> {
        (0..params.lambda)
            .map(|i| self.candidate(i, source.next_point()))
            .collect()
    }

    /// Updates the distribution from evaluated candidates (minimization).
    pub fn tell(&mut self, params: &CmaParams, candidates: &[Candidate]) -> Result<()> {
        let n = self.dim();
        if candidates.len() != params.lambda {
            return Err(Error::InvalidArgument(format!(
                "tell needs {} candidates, got {}",
                params.lambda,
                candidates.len()
            )));
        }
        if let Some(c) = candidates.iter().find(|c| !c.fitness.is_finite()) {
            return Err(Error::NonFinite(format!("fitness of candidate {}", c.index)));
        }
        let mut ranked: Vec<&Candidate> = candidates.iter().collect();
        ranked.sort_by(|a, b| a.fitness.total_cmp(&b.fitness).then(a.index.cmp(&b.index)));

        // The selected steps in y and z space. Working from the stored z
        // keeps C^{-1/2}·y_w exact even when C is close to singular.
        let steps: Vec<DVector<f64>> = ranked[..params.mu]
            .iter()
            .map(|c| DVector::from_column_slice(&c.y))
            .collect();
        let mut y_w = DVector::zeros(n);
        let mut z_w = DVector::zeros(n);
        for (w, c) in params.weights.iter().zip(&ranked[..params.mu]) {
            y_w.axpy(*w, &DVector::from_column_slice(&c.y), 1.0);
            z_w.axpy(*w, &DVector::from_column_slice(&c.z), 1.0);
        }
        self.mean.axpy(self.sigma, &y_w, 1.0);

        // C^{-1/2} y_w = B D^{-1} B^T B D z_w = B z_w
        let c_inv_sqrt_yw = &self.b * z_w;

        let cs = params.c_sigma;
        self.p_sigma *= 1.0 - cs;
        self.p_sigma
            .axpy((cs * (2.0 - cs) * params.mu_eff).sqrt(), &c_inv_sqrt_yw, 1.0);

        let ps_norm = self.p_sigma.norm();
        let decay = 1.0 - (1.0 - cs).powi(2 * (self.generation as i32 + 1));
        let h_sigma = ps_norm / decay.sqrt() < (1.4 + 2.0 / (n as f64 + 1.0)) * params.chi_n;

        let cc = params.c_c;
        self.p_c *= 1.0 - cc;
        if h_sigma {
            self.p_c.axpy((cc * (2.0 - cc) * params.mu_eff).sqrt(), &y_w, 1.0);
        }

        let delta_h = if h_sigma { 0.0 } else { cc * (2.0 - cc) };
        let keep = 1.0 - params.c_1 - params.c_mu + params.c_1 * delta_h;
        let mut cov = &self.cov * keep;
        cov.ger(params.c_1, &self.p_c, &self.p_c, 1.0);
        for (w, y) in params.weights.iter().zip(&steps) {
            cov.ger(params.c_mu * w, y, y, 1.0);
        }
        // exact symmetry
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        self.cov = cov;

        self.sigma *= ((cs / params.d_sigma) * (ps_norm / params.chi_n - 1.0)).exp();
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Numerical(format!("step size became {}", self.sigma)));
        }
        self.decompose()?;
        self.generation += 1;
        Ok(())
    }

    /// Refreshes `b` and `d` from `cov`, flooring tiny eigenvalues.
    pub fn decompose(&mut self) -> Result<()> {
        if self.cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("covariance matrix has non-finite entries".into()));
        }
        let eig = SymmetricEigen::new(self.cov.clone());
        let max = eig.eigenvalues.max();
        if max.is_nan() || max <= 0.0 {
            return Err(Error::Numerical("covariance matrix lost positive definiteness".into()));
        }
        let floor = EIGEN_FLOOR * max;
        self.d = eig.eigenvalues.map(|v| v.max(floor).sqrt());
        self.b = eig.eigenvectors;
        Ok(())
    }
}
