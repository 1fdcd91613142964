//! Fixed-order pairwise summation.

use std::ops::Add;

const BLOCK: usize = 32;

/// Sums `xs` by recursive halving with a fixed split, so results are
/// reproducible and the rounding error grows like `log n`.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    if xs.len() <= BLOCK {
        let mut acc = T::default();
        for &x in xs {
            acc = acc + x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_mean<T>(xs: &[T]) -> T
where
    T: Copy + Default + Add<Output = T> + std::ops::Div<f64, Output = T>,
{
    pairwise_sum(xs) / xs.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
