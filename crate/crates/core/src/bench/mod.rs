//! BBOB-style noiseless benchmark functions with seeded instances.
//!
//! Ten functions cover the five BBOB groups, two per group, and keep the
//! BBOB function ids. Each instance draws a hidden optimum `x_opt` in
//! `[-4, 4]^d`, an offset `f_opt`, and two rotations `R`, `Q` from a seed
//! derived from `(fid, iid, dim)`. Transformations are anchored at `x_opt`
//! so the optimum value is exactly `f_opt` for every function.

mod transforms;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

pub use transforms::{lambda_diag, t_asy, t_osz, t_osz_scalar};
use transforms::{ellipsoid_weight, scale_rows};

use crate::error::{Error, Result};
use crate::seed;

/// Function ids of the implemented suite, in BBOB numbering.
pub const FUNCTION_IDS: [u32; 10] = [1, 2, 6, 9, 10, 11, 15, 16, 17, 22];

const INSTANCE_SALT: u64 = 0x6262_6f62; // "bbob"
const WEIERSTRASS_TERMS: i32 = 12;
const GALLAGHER_PEAKS: usize = 21;

/// One evaluation: objective value and its distance to the optimum value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Extra {
    None,
    /// Per-function linear map applied to `x − x_opt` (precomputed products
    /// of rotations and conditioning).
    Linear(DMatrix<f64>),
    Weierstrass {
        inner: DMatrix<f64>,
        f0: f64,
    },
    Gallagher {
        /// `R·y_i` for each peak.
        rotated_peaks: Vec<DVector<f64>>,
        weights: Vec<f64>,
        /// Diagonal of `C_i` for each peak.
        scales: Vec<Vec<f64>>,
    },
}

/// A benchmark function instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    fid: u32,
    iid: u32,
    dim: usize,
    x_opt: DVector<f64>,
    f_opt: f64,
    r: DMatrix<f64>,
    q: DMatrix<f64>,
    extra: Extra,
    evaluations: u64,
}

/// Short names for reports.
pub fn function_name(fid: u32) -> Option<&'static str> {
    Some(match fid {
        1 => "sphere",
        2 => "ellipsoid-separable",
        6 => "attractive-sector",
        9 => "rosenbrock-rotated",
        10 => "ellipsoid-rotated",
        11 => "discus",
        15 => "rastrigin-rotated",
        16 => "weierstrass",
        17 => "schaffers-f7",
        22 => "gallagher-21",
        _ => return None,
    })
}

fn random_rotation(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

fn cauchy_offset(rng: &mut impl Rng) -> f64 {
    let num: f64 = rng.sample(StandardNormal);
    let den: f64 = rng.sample(StandardNormal);
    let v = (100.0 * num / den).round() / 100.0;
    if v.is_finite() {
        v.clamp(-1000.0, 1000.0)
    } else {
        1000.0
    }
}

/// Builds instance `iid` of function `fid` in dimension `dim`.
pub fn make_problem(fid: u32, iid: u32, dim: usize) -> Result<Problem> {
    if function_name(fid).is_none() {
        return Err(Error::UnknownFunction(fid));
    }
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("benchmark dimension {dim} < 2")));
    }
    if iid == 0 {
        return Err(Error::InvalidArgument("instance ids start at 1".into()));
    }
    let mut rng = seed::rng(seed::mix(
        INSTANCE_SALT,
        &[u64::from(fid), u64::from(iid), dim as u64],
    ));
    let x_opt = DVector::from_fn(dim, |_, _| rng.random_range(-4.0..4.0));
    let f_opt = cauchy_offset(&mut rng);
    let r = random_rotation(&mut rng, dim);
    let q = random_rotation(&mut rng, dim);

    let extra = match fid {
        6 => Extra::Linear(&q * scale_rows(&r, &lambda_diag(10.0, dim))),
        15 => Extra::Linear(&r * scale_rows(&q, &lambda_diag(10.0, dim))),
        16 => {
            let f0 = (0..WEIERSTRASS_TERMS)
                .map(|k| 0.5f64.powi(k) * (2.0 * PI * 3f64.powi(k) * 0.5).cos())
                .sum();
            Extra::Weierstrass {
                inner: &r * scale_rows(&q, &lambda_diag(0.01, dim)),
                f0,
            }
        }
        17 => Extra::Linear(scale_rows(&q, &lambda_diag(10.0, dim))),
        22 => {
            let mut peaks = vec![x_opt.clone()];
            for _ in 1..GALLAGHER_PEAKS {
                peaks.push(DVector::from_fn(dim, |_, _| rng.random_range(-4.9..4.9)));
            }
            let weights: Vec<f64> = (0..GALLAGHER_PEAKS)
                .map(|i| {
                    if i == 0 {
                        10.0
                    } else {
                        1.1 + 8.0 * (i as f64 - 1.0) / (GALLAGHER_PEAKS as f64 - 2.0)
                    }
                })
                .collect();
            let mut exponents: Vec<usize> = (0..GALLAGHER_PEAKS - 1).collect();
            exponents.shuffle(&mut rng);
            let scales = (0..GALLAGHER_PEAKS)
                .map(|i| {
                    let alpha = if i == 0 {
                        1e6
                    } else {
                        1000f64.powf(2.0 * exponents[i - 1] as f64 / (GALLAGHER_PEAKS as f64 - 2.0))
                    };
                    let mut diag = lambda_diag(alpha, dim);
                    diag.shuffle(&mut rng);
                    let norm = alpha.powf(0.25);
                    diag.iter().map(|v| v / norm).collect()
                })
                .collect();
            Extra::Gallagher {
                rotated_peaks: peaks.iter().map(|p| &r * p).collect(),
                weights,
                scales,
            }
        }
        _ => Extra::None,
    };

    Ok(Problem {
        fid,
        iid,
        dim,
        x_opt,
        f_opt,
        r,
        q,
        extra,
        evaluations: 0,
    })
}

impl Problem {
    pub fn fid(&self) -> u32 {
        self.fid
    }

    pub fn iid(&self) -> u32 {
        self.iid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x_opt(&self) -> &[f64] {
        self.x_opt.as_slice()
    }

    pub fn f_opt(&self) -> f64 {
        self.f_opt
    }

    pub fn rotation_r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn rotation_q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Evaluates `x` and counts the call.
    ///
    /// `precision` is the raw function value above the optimum; `value`
    /// adds the hidden offset `f_opt`.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<Evaluation> {
        if x.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("evaluation point".into()));
        }
        self.evaluations += 1;
        let precision = self.raw(x).max(0.0);
        Ok(Evaluation {
            value: precision + self.f_opt,
            precision,
        })
    }

    /// Raw function value `g(transform(x))`, zero at `x_opt`.
    fn raw(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let shifted = DVector::from_column_slice(x) - &self.x_opt;
        match (self.fid, &self.extra) {
            (1, _) => shifted.norm_squared(),
            (2, _) => {
                let mut z = shifted;
                t_osz(&mut z);
                z.iter()
                    .enumerate()
                    .map(|(i, v)| ellipsoid_weight(i, n) * v * v)
                    .sum()
            }
            (6, Extra::Linear(m)) => {
                let z = m * shifted;
                let s: f64 = z
                    .iter()
                    .zip(self.x_opt.iter())
                    .map(|(zi, xo)| {
                        let scale = if zi * xo > 0.0 { 100.0 } else { 1.0 };
                        (scale * zi).powi(2)
                    })
                    .sum();
                t_osz_scalar(s).powf(0.9)
            }
            (9, _) => {
                let c = 1f64.max((n as f64).sqrt() / 8.0);
                let z = (&self.r * shifted) * c;
                z.as_slice()
                    .windows(2)
                    .map(|w| {
                        let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                        100.0 * (a * a - b).powi(2) + (a - 1.0).powi(2)
                    })
                    .sum()
            }
            (10, _) => {
                let mut z = &self.r * shifted;
                t_osz(&mut z);
                z.iter()
                    .enumerate()
                    .map(|(i, v)| ellipsoid_weight(i, n) * v * v)
                    .sum()
            }
            (11, _) => {
                let mut z = &self.r * shifted;
                t_osz(&mut z);
                1e6 * z[0] * z[0] + z.iter().skip(1).map(|v| v * v).sum::<f64>()
            }
            (15, Extra::Linear(m)) => {
                let mut z = &self.r * shifted;
                t_osz(&mut z);
                t_asy(&mut z, 0.2);
                let z = m * z;
                10.0 * (n as f64 - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>())
                    + z.norm_squared()
            }
            (16, Extra::Weierstrass { inner, f0 }) => {
                let mut z = &self.r * shifted;
                t_osz(&mut z);
                let z = inner * z;
                let total: f64 = z
                    .iter()
                    .map(|zi| {
                        (0..WEIERSTRASS_TERMS)
                            .map(|k| 0.5f64.powi(k) * (2.0 * PI * 3f64.powi(k) * (zi + 0.5)).cos())
                            .sum::<f64>()
                    })
                    .sum();
                10.0 * (total / n as f64 - f0).powi(3)
            }
            (17, Extra::Linear(m)) => {
                let mut z = &self.r * shifted;
                t_asy(&mut z, 0.5);
                let z = m * z;
                let mean: f64 = z
                    .as_slice()
                    .windows(2)
                    .map(|w| {
                        let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
                        s.sqrt() + s.sqrt() * (50.0 * s.powf(0.2)).sin().powi(2)
                    })
                    .sum::<f64>()
                    / (n as f64 - 1.0);
                mean * mean
            }
            (
                22,
                Extra::Gallagher {
                    rotated_peaks,
                    weights,
                    scales,
                },
            ) => {
                let rx = &self.r * DVector::from_column_slice(x);
                let best = rotated_peaks
                    .iter()
                    .zip(weights)
                    .zip(scales)
                    .map(|((peak, w), c)| {
                        let q: f64 = rx
                            .iter()
                            .zip(peak.iter())
                            .zip(c)
                            .map(|((a, b), s)| s * (a - b) * (a - b))
                            .sum();
                        w * (-q / (2.0 * n as f64)).exp()
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                t_osz_scalar(10.0 - best).powi(2)
            }
            _ => unreachable!("problem {} built without its data", self.fid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonality_error(m: &DMatrix<f64>) -> f64 {
        let n = m.nrows();
        (m.transpose() * m - DMatrix::<f64>::identity(n, n)).abs().max()
    }

    #[test]
    fn instances_are_deterministic() {
        assert_eq!(make_problem(10, 3, 5).unwrap(), make_problem(10, 3, 5).unwrap());
        assert_ne!(
            make_problem(1, 1, 2).unwrap().x_opt(),
            make_problem(1, 2, 2).unwrap().x_opt()
        );
    }

    #[test]
    fn rotations_are_orthogonal() {
        for &fid in &FUNCTION_IDS {
            for dim in [2, 5, 10, 40] {
                let p = make_problem(fid, 7, dim).unwrap();
                assert!(orthogonality_error(p.rotation_r()) <= 1e-10);
                assert!(orthogonality_error(p.rotation_q()) <= 1e-10);
                assert!(p.x_opt().iter().all(|v| (-4.0..=4.0).contains(v)));
                assert!((-1000.0..=1000.0).contains(&p.f_opt()));
            }
        }
    }

    #[test]
    fn optimum_has_zero_precision() {
        for &fid in &FUNCTION_IDS {
            for dim in [2, 3, 10] {
                let mut p = make_problem(fid, 1, dim).unwrap();
                let x = p.x_opt().to_vec();
                let e = p.evaluate(&x).unwrap();
                assert!(e.precision.abs() <= 1e-9, "f{fid} d{dim}: {}", e.precision);
                assert!((e.value - p.f_opt()).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn sphere_unit_offset() {
        let mut p = make_problem(1, 4, 3).unwrap();
        let mut x = p.x_opt().to_vec();
        x[0] += 1.0;
        assert!((p.evaluate(&x).unwrap().precision - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(matches!(make_problem(3, 1, 2), Err(Error::UnknownFunction(3))));
        assert!(make_problem(1, 1, 1).is_err());
        assert!(make_problem(1, 0, 2).is_err());
        let mut p = make_problem(1, 1, 2).unwrap();
        assert!(p.evaluate(&[f64::NAN, 0.0]).is_err());
        assert!(p.evaluate(&[0.0]).is_err());
        assert_eq!(p.evaluations(), 0);
    }
}
