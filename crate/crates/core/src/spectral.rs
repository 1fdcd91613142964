//! Fourier coefficients `sigma(h) = int g . f o T^{a h} d mu` of spectral
//! measures, the Wiener statistic `(1/H) sum |sigma(h)|^2` and atom masses
//! `(1/H) sum sigma(h) e(h t)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::dynsys::{sample_invariant_measure, Observable, OrbitTable, SystemSpec};
use crate::error::{Error, Result};
use crate::seminorms::choose_grid;
use crate::sum::pairwise_sum;
use crate::trigpoly::WeightedExponentialSum;

const BATCHES: usize = 16;
const NODE_CHUNK: usize = 64;

/// How the integrals are estimated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CorrelationMethod {
    /// Tensor quadrature; `nodes` per axis, or automatic.
    Quadrature { nodes: Option<u32> },
    /// Birkhoff average of length `n` along the orbit of the `seed`-sampled point.
    OrbitAverage { n: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSequence {
    /// `sigma(h)` for `h = 0..=H`.
    pub coeffs: Vec<Complex64>,
    pub power: i64,
    pub method: CorrelationMethod,
    /// Batch-means standard errors, for orbit averages.
    pub stderr: Option<Vec<f64>>,
}

impl CorrelationSequence {
    /// The truncation length `H`.
    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `int g(y) f(T^{a h} y) d mu(y)` for `h = 0..=H`, with no conjugation.
pub fn correlation_coefficients(
    sys: &SystemSpec,
    f: &Observable,
    g: &Observable,
    a: i64,
    h: usize,
    method: CorrelationMethod,
) -> Result<CorrelationSequence> {
    if h == 0 {
        return Err(Error::InvalidArgument("H must be at least 1".into()));
    }
    if a < 0 && !sys.is_invertible() {
        return Err(Error::NonInvertible(a));
    }
    let bf = f.bind(sys)?;
    let bg = g.bind(sys)?;
    let span = bf.max_shift().max(bg.max_shift());
    match method {
        CorrelationMethod::Quadrature { nodes } => {
            let degree = f.circle_degree().zip(g.circle_degree()).map(|(x, y)| x + y);
            let grid = choose_grid(sys, nodes, degree)?;
            let q = grid.len(sys);
            let ranges: Vec<_> = (0..q)
                .step_by(NODE_CHUNK)
                .map(|s| s..(s + NODE_CHUNK).min(q))
                .collect();
            let partials: Vec<Vec<Complex64>> = ranges
                .into_par_iter()
                .map(|range| {
                    let mut acc = vec![Complex64::new(0.0, 0.0); h + 1];
                    for i in range {
                        let x = grid.point(sys, i);
                        let gx = bg.eval_unchecked(&x);
                        let orbit = OrbitTable::new(sys, &x, h + 1, a, span)?;
                        for (slot, p) in acc.iter_mut().zip(orbit.points()) {
                            *slot += gx * bf.eval_unchecked(p);
                        }
                    }
                    Ok(acc)
                })
                .collect::<Result<_>>()?;
            let w = grid.weight(sys);
            let coeffs = (0..=h)
                .map(|j| pairwise_sum(&partials.iter().map(|p| p[j]).collect::<Vec<_>>()) * w)
                .collect();
            Ok(CorrelationSequence {
                coeffs,
                power: a,
                method,
                stderr: None,
            })
        }
        CorrelationMethod::OrbitAverage { n, seed } => {
            if n < BATCHES {
                return Err(Error::InvalidArgument(format!(
                    "orbit averages need N >= {BATCHES}"
                )));
            }
            let reach = a.unsigned_abs() as usize * h;
            let x0 = sample_invariant_measure(sys, 1, seed)
                .pop()
                .expect("one sample");
            // start early enough that negative powers stay on the orbit
            let (start, lead) = if a < 0 {
                (
                    crate::dynsys::transform_point(sys, &x0, -(reach as i64))?,
                    reach,
                )
            } else {
                (x0, 0)
            };
            let orbit = OrbitTable::new(sys, &start, n + reach, 1, span)?;
            let fv = orbit.values(&bf);
            let gv: Vec<Complex64> = orbit.points()[lead..lead + n]
                .iter()
                .map(|p| bg.eval_unchecked(p))
                .collect();
            let per_h: Vec<(Complex64, f64)> = (0..=h)
                .into_par_iter()
                .map(|j| {
                    let off = (lead as i64 + a * j as i64) as usize;
                    let terms: Vec<Complex64> = gv
                        .iter()
                        .zip(&fv[off..off + n])
                        .map(|(x, y)| x * y)
                        .collect();
                    let size = n / BATCHES;
                    let means: Vec<Complex64> = (0..BATCHES)
                        .map(|b| pairwise_sum(&terms[b * size..(b + 1) * size]) / size as f64)
                        .collect();
                    let grand = pairwise_sum(&means) / BATCHES as f64;
                    let var = means.iter().map(|m| (m - grand).norm_sqr()).sum::<f64>()
                        / (BATCHES - 1) as f64;
                    (
                        pairwise_sum(&terms) / n as f64,
                        (var / BATCHES as f64).sqrt(),
                    )
                })
                .collect();
            Ok(CorrelationSequence {
                coeffs: per_h.iter().map(|p| p.0).collect(),
                power: a,
                method,
                stderr: Some(per_h.iter().map(|p| p.1).collect()),
            })
        }
    }
}

/// `(1/H) sum_{h=1}^H |sigma(h)|^2`.
pub fn wiener_statistic(corr: &CorrelationSequence) -> f64 {
    let sq: Vec<f64> = corr.coeffs[1..].iter().map(|c| c.norm_sqr()).collect();
    pairwise_sum(&sq) / sq.len() as f64
}

/// `(1/H) sum_{h=1}^H sigma(h) e(h t)`.
pub fn atom_mass(corr: &CorrelationSequence, t: f64) -> Complex64 {
    WeightedExponentialSum::new(corr.coeffs[1..].to_vec())
        .expect("finite coefficients")
        .eval_at_frequency(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub t: f64,
    pub mass: Complex64,
}

/// Local maxima of `|atom_mass|` on a grid of `4H` frequencies above the
/// threshold, largest first. Side lobes within `8 / H` of a larger accepted
/// peak are dropped.
pub fn atom_scan(corr: &CorrelationSequence, threshold: f64) -> Result<Vec<Atom>> {
    let h = corr.len();
    let m = 4 * h;
    let values = WeightedExponentialSum::new(corr.coeffs[1..].to_vec())?.grid_values(m)?;
    let modulus: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    let mut peaks: Vec<usize> = (0..m)
        .filter(|&j| {
            let v = modulus[j];
            v >= threshold && v >= modulus[(j + m - 1) % m] && v >= modulus[(j + 1) % m]
        })
        .collect();
    peaks.sort_by(|&x, &y| modulus[y].total_cmp(&modulus[x]).then(x.cmp(&y)));
    let window = 8.0 / h as f64;
    let mut atoms: Vec<Atom> = Vec::new();
    for j in peaks {
        let t = j as f64 / m as f64;
        let near = atoms.iter().any(|a| {
            let d = (a.t - t).abs();
            d.min(1.0 - d) <= window
        });
        if !near {
            atoms.push(Atom { t, mass: values[j] });
        }
    }
    Ok(atoms)
}

/// Atom scan with the default threshold.
pub fn atom_scan_default(corr: &CorrelationSequence) -> Result<Vec<Atom>> {
    atom_scan(corr, defaults::ATOM_THRESHOLD)
}
