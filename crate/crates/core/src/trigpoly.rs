//! Weighted exponential sums `P(t) = w * sum_{n=1}^L a_n e(n t)` and a
//! certified bracket for `sup_t |P(t)|`.
//!
//! The supremum is sampled on `M = factor * L` equispaced frequencies with a
//! zero-padded inverse FFT. Bernstein's inequality `|P'| <= 2 pi L sup|P|`
//! turns the grid maximum into the upper bound
//! `grid_max / (1 - pi L / M)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};
use crate::exact::frac_mul;
use crate::sum::pairwise_sum;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedExponentialSum {
    coeffs: Vec<Complex64>,
    norm: f64,
}

/// Grid maximum and certified upper bound of `|P|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub grid_max: f64,
    pub certified_upper: f64,
    pub argmax_t: f64,
    pub oversampling: usize,
}

impl WeightedExponentialSum {
    /// Coefficients `a_1, ..., a_L` with the usual weight `1 / L`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<WeightedExponentialSum> {
        let norm = 1.0 / coeffs.len().max(1) as f64;
        WeightedExponentialSum::with_normalization(coeffs, norm)
    }

    pub fn with_normalization(coeffs: Vec<Complex64>, norm: f64) -> Result<WeightedExponentialSum> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "an exponential sum needs at least one coefficient".into(),
            ));
        }
        if !norm.is_finite()
            || coeffs
                .iter()
                .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidArgument(
                "exponential sum entries must be finite".into(),
            ));
        }
        Ok(WeightedExponentialSum { coeffs, norm })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn scaled(&self, c: Complex64) -> WeightedExponentialSum {
        WeightedExponentialSum {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            norm: self.norm,
        }
    }

    /// `P(t)`, each phase `n t` reduced modulo one exactly.
    pub fn eval_at_frequency(&self, t: f64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let (s, c) = (TAU * frac_mul(i as i128 + 1, t)).sin_cos();
                a * Complex64::new(c, s)
            })
            .collect();
        pairwise_sum(&terms) * self.norm
    }

    /// `|P(j / m)|` for `j = 0, ..., m - 1`; requires `m > L`.
    pub fn grid_modulus(&self, m: usize) -> Result<Vec<f64>> {
        Ok(self.grid_values(m)?.iter().map(|z| z.norm()).collect())
    }

    /// `P(j / m)` for `j = 0, ..., m - 1`; requires `m > L`.
    pub fn grid_values(&self, m: usize) -> Result<Vec<Complex64>> {
        if m <= self.coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "grid of {m} nodes cannot resolve {} frequencies",
                self.coeffs.len()
            )));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[1..=self.coeffs.len()].copy_from_slice(&self.coeffs);
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        for z in &mut buf {
            *z *= self.norm;
        }
        Ok(buf)
    }

    /// Grid maximum over `M = factor * L` nodes and the Bernstein bound.
    pub fn sup_modulus_certified(&self, factor: usize) -> Result<SupEstimate> {
        if factor < defaults::MIN_OVERSAMPLING {
            return Err(Error::InvalidArgument(format!(
                "oversampling factor {factor} is below the minimum {}",
                defaults::MIN_OVERSAMPLING
            )));
        }
        let l = self.coeffs.len();
        let m = factor * l;
        let modulus = self.grid_modulus(m)?;
        let (mut best, mut arg) = (0.0f64, 0usize);
        for (j, v) in modulus.iter().enumerate() {
            if *v > best {
                best = *v;
                arg = j;
            }
        }
        Ok(SupEstimate {
            grid_max: best,
            certified_upper: best / (1.0 - PI * l as f64 / m as f64),
            argmax_t: arg as f64 / m as f64,
            oversampling: m,
        })
    }
}

pub fn sup_modulus_certified(p: &WeightedExponentialSum, factor: usize) -> Result<SupEstimate> {
    p.sup_modulus_certified(factor)
}

pub fn eval_at_frequency(p: &WeightedExponentialSum, t: f64) -> Complex64 {
    p.eval_at_frequency(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::ALPHA;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ones(n: usize) -> WeightedExponentialSum {
        WeightedExponentialSum::new(vec![Complex64::new(1.0, 0.0); n]).unwrap()
    }

    fn aligned(n: usize) -> WeightedExponentialSum {
        WeightedExponentialSum::new(
            (1..=n)
                .map(|k| Complex64::from_polar(1.0, -TAU * frac_mul(k as i128, ALPHA)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_sum() {
        let p = WeightedExponentialSum::new(vec![Complex64::new(0.0, 0.0); 16]).unwrap();
        let s = p.sup_modulus_certified(32).unwrap();
        assert_eq!((s.grid_max, s.certified_upper), (0.0, 0.0));
    }

    #[test]
    fn aligned_unimodular() {
        let p = aligned(256);
        let s = p.sup_modulus_certified(32).unwrap();
        assert!(s.grid_max <= 1.0 + 1e-12 && s.grid_max > 0.99);
        assert!((s.argmax_t - ALPHA).abs() <= 0.5 / s.oversampling as f64 + 1e-15);
        assert!(s.certified_upper <= 1.11);
        assert!((p.eval_at_frequency(ALPHA) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn random_signs_are_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let p = WeightedExponentialSum::new(
            (0..4096)
                .map(|_| Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0))
                .collect(),
        )
        .unwrap();
        let s = p.sup_modulus_certified(32).unwrap();
        assert!(s.certified_upper <= 0.2, "{}", s.certified_upper);
        let dense = p.grid_modulus(1 << 20).unwrap();
        assert!(dense.iter().all(|v| *v <= s.certified_upper));
    }

    #[test]
    fn eval_examples() {
        assert!((ones(7).eval_at_frequency(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(ones(2).eval_at_frequency(0.5).norm() < 1e-15);
    }

    #[test]
    fn argmax_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = WeightedExponentialSum::new(
            (0..300)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let s = p.sup_modulus_certified(16).unwrap();
        assert!((p.eval_at_frequency(s.argmax_t).norm() - s.grid_max).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(WeightedExponentialSum::new(vec![]).is_err());
        assert!(WeightedExponentialSum::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(ones(4).sup_modulus_certified(4).is_err());
    }
}
