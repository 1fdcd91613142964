use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::exact::{frac, frac_mul};
use crate::sum::pairwise_sum;

/// `(1/N) sum_{n=1}^N e(theta2 n^2 + theta1 n + theta0)` with every phase
/// reduced modulo one before the exponential.
pub fn weyl_sum_average(theta2: f64, theta1: f64, theta0: f64, n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("Weyl sum needs N >= 1".into()));
    }
    let terms: Vec<Complex64> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let k = k as i128;
            let phase = frac(frac_mul(k * k, theta2) + frac_mul(k, theta1) + frac(theta0));
            let (s, c) = (TAU * phase).sin_cos();
            Complex64::new(c, s)
        })
        .collect();
    Ok(pairwise_sum(&terms) / n as f64)
}
