//! Coordinate maps shared by the benchmark functions.
//!
//! Constants follow the noiseless BBOB definitions:
//! * `T_osz` uses `c1 = 10, c2 = 7.9` for positive and `c1 = 5.5, c2 = 3.1`
//!   for negative inputs, with amplitude 0.049;
//! * `T_asy^β(x_i) = x_i^(1 + β·i/(D−1)·√x_i)` for positive `x_i`;
//! * `Λ^α` is diagonal with entries `α^(i / (2(D−1)))`.

use nalgebra::{DMatrix, DVector};

pub fn t_osz_scalar(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let log = x.abs().ln();
    let (c1, c2) = if x > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
    x.signum() * (log + 0.049 * ((c1 * log).sin() + (c2 * log).sin())).exp()
}

pub fn t_osz(v: &mut DVector<f64>) {
    v.apply(|x| *x = t_osz_scalar(*x));
}

pub fn t_asy(v: &mut DVector<f64>, beta: f64) {
    let n = v.len();
    for (i, x) in v.iter_mut().enumerate() {
        if *x > 0.0 {
            let frac = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            *x = x.powf(1.0 + beta * frac * x.sqrt());
        }
    }
}

/// Diagonal of `Λ^α`.
pub fn lambda_diag(alpha: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let frac = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            alpha.powf(0.5 * frac)
        })
        .collect()
}

pub fn scale_rows(m: &DMatrix<f64>, diag: &[f64]) -> DMatrix<f64> {
    let mut out = m.clone();
    for (i, s) in diag.iter().enumerate() {
        out.row_mut(i).scale_mut(*s);
    }
    out
}

/// Ill-conditioning weight `10^(6 i/(D−1))`.
pub fn ellipsoid_weight(i: usize, n: usize) -> f64 {
    let frac = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
    10f64.powf(6.0 * frac)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_osz_fixes_zero_and_sign() {
        assert_eq!(t_osz_scalar(0.0), 0.0);
        assert!(t_osz_scalar(2.0) > 0.0);
        assert!(t_osz_scalar(-2.0) < 0.0);
        assert!((t_osz_scalar(1.0) - 1.0).abs() < 1e-15);
        // monotone
        let xs: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.37).collect();
        assert!(xs.windows(2).all(|w| t_osz_scalar(w[0]) < t_osz_scalar(w[1])));
    }

    #[test]
    fn t_asy_leaves_first_and_negative_coordinates() {
        let mut v = DVector::from_vec(vec![2.0, -3.0, 4.0]);
        t_asy(&mut v, 0.5);
        assert_eq!(v[0], 2.0);
        assert_eq!(v[1], -3.0);
        assert!((v[2] - 4f64.powf(1.0 + 0.5 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn lambda_endpoints() {
        let d = lambda_diag(100.0, 5);
        assert_eq!(d[0], 1.0);
        assert!((d[4] - 10.0).abs() < 1e-12);
    }
}
