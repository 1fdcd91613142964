//! Fixtures shared by the estimator benchmarks.

use wwlab_core::defaults::ALPHA;
use wwlab_core::{Complex64, Observable, SystemSpec, WeightedExponentialSum};

/// Quadratic-phase weights `e(n^2 alpha)` of length `n`, a worst case for
/// sup certification since the modulus has no dominant peak.
pub fn quadratic_sum(n: usize) -> WeightedExponentialSum {
    let coeffs = (0..n as u64)
        .map(|k| {
            let phase = ((k * k) as f64 * ALPHA).fract();
            Complex64::from_polar(1.0, std::f64::consts::TAU * phase)
        })
        .collect();
    WeightedExponentialSum::new(coeffs).expect("non-empty weights")
}

pub fn rotation() -> SystemSpec {
    SystemSpec::rotation(ALPHA).expect("irrational rotation")
}

pub fn cosine() -> Observable {
    Observable::cos(1)
}
