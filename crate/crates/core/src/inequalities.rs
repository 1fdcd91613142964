//! Van der Corput type inequalities as executable checks.
//!
//! Each checker computes both sides with the explicit constants and reports
//! whether `lhs <= rhs + 1e-12 max(1, |rhs|)`. The inequalities are theorems,
//! so a failing verdict on valid input points at a numerical defect.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};
use crate::sum::pairwise_sum;
use crate::trigpoly::WeightedExponentialSum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub n: usize,
    pub h: Option<usize>,
    /// The certified (upper) variant of the left side when it is a supremum.
    pub lhs_certified: Option<f64>,
}

pub fn verdict(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + defaults::VERDICT_TOLERANCE * rhs.abs().max(1.0)
}

fn check_unit(a: &[Complex64]) -> Result<()> {
    for (i, z) in a.iter().enumerate() {
        if z.norm().is_nan() || z.norm() > 1.0 + 1e-12 {
            return Err(Error::BoundViolation {
                index: i,
                modulus: z.norm(),
            });
        }
    }
    Ok(())
}

fn autocorrelation(a: &[Complex64], h: usize) -> Complex64 {
    let terms: Vec<Complex64> = a.iter().zip(&a[h..]).map(|(x, y)| x * y.conj()).collect();
    pairwise_sum(&terms)
}

/// Checks
/// `|(1/N) sum a_n|^2 <= (N+H)/(N^2 (H+1)) sum |a_n|^2
///   + 2 (N+H)/(N^2 (H+1)^2) sum_{h=1}^H (H+1-h) Re sum_n a_n conj(a_{n+h})`.
pub fn vdc_bound_check(a: &[Complex64], h: usize) -> Result<InequalityReport> {
    let n = a.len();
    if n == 0 || h >= n {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= H <= N - 1, got H = {h}, N = {n}"
        )));
    }
    let (nf, hf) = (n as f64, h as f64);
    let mean = pairwise_sum(a) / nf;
    let lhs = mean.norm_sqr();
    let energy = pairwise_sum(&a.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
    let cross: Vec<f64> = (1..=h)
        .map(|k| (hf + 1.0 - k as f64) * autocorrelation(a, k).re)
        .collect();
    let rhs = (nf + hf) / (nf * nf * (hf + 1.0)) * energy
        + 2.0 * (nf + hf) / (nf * nf * (hf + 1.0) * (hf + 1.0)) * pairwise_sum(&cross);
    Ok(InequalityReport {
        lhs,
        rhs,
        holds: verdict(lhs, rhs),
        n,
        h: Some(h),
        lhs_certified: None,
    })
}

/// Checks `sup_t |(1/N) sum a_n e(n t)|^2 <= 2/(N H) sum |a_n|^2
///   + (4/H) sum_{h=1}^H |(1/N) sum_{n=1}^{N-h} a_n conj(a_{n+h})|`.
///
/// The verdict uses the squared grid maximum, which never exceeds the true
/// supremum; the squared certified bound is reported alongside.
pub fn ww_vdc_bound_check(
    a: &[Complex64],
    h: usize,
    oversampling: usize,
) -> Result<InequalityReport> {
    let n = a.len();
    if n == 0 || h == 0 || h > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= H <= N, got H = {h}, N = {n}"
        )));
    }
    check_unit(a)?;
    let (nf, hf) = (n as f64, h as f64);
    let sup = WeightedExponentialSum::new(a.to_vec())?.sup_modulus_certified(oversampling)?;
    let energy = pairwise_sum(&a.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
    let corr: Vec<f64> = (1..=h)
        .map(|k| (autocorrelation(a, k) / nf).norm())
        .collect();
    let rhs = 2.0 / (nf * hf) * energy + 4.0 / hf * pairwise_sum(&corr);
    let lhs = sup.grid_max * sup.grid_max;
    Ok(InequalityReport {
        lhs,
        rhs,
        holds: verdict(lhs, rhs),
        n,
        h: Some(h),
        lhs_certified: Some(sup.certified_upper * sup.certified_upper),
    })
}

/// Checks `|(1/(N (N+1)^2)) sum_{m,n<N} (N+1-m) a_n b_m c_{n+m}|^2
///   <= sup_t |(1/N) sum_{m'=0}^{2(N-1)} c_{m'} e(m' t)|^2`,
/// with the certified upper bound on the right.
pub fn cubes_bound_check(
    a: &[Complex64],
    b: &[Complex64],
    c: &[Complex64],
    n: usize,
) -> Result<InequalityReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if a.len() < n || b.len() < n || c.len() < 2 * n - 1 {
        return Err(Error::InvalidArgument(format!(
            "need |a|, |b| >= N and |c| >= 2N - 1 for N = {n}, got {}, {}, {}",
            a.len(),
            b.len(),
            c.len()
        )));
    }
    let (a, b, c) = (&a[..n], &b[..n], &c[..2 * n - 1]);
    check_unit(a)?;
    check_unit(b)?;
    check_unit(c)?;
    let nf = n as f64;
    let rows: Vec<Complex64> = (0..n)
        .map(|m| {
            let inner: Vec<Complex64> = (0..n).map(|k| a[k] * c[k + m]).collect();
            b[m] * pairwise_sum(&inner) * (nf + 1.0 - m as f64)
        })
        .collect();
    let lhs = (pairwise_sum(&rows) / (nf * (nf + 1.0) * (nf + 1.0))).norm_sqr();
    let sup = WeightedExponentialSum::with_normalization(c.to_vec(), 1.0 / nf)?
        .sup_modulus_certified(defaults::OVERSAMPLING)?;
    let rhs = sup.certified_upper * sup.certified_upper;
    Ok(InequalityReport {
        lhs,
        rhs,
        holds: verdict(lhs, rhs),
        n,
        h: None,
        lhs_certified: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    Vdc,
    WwVdc,
    Cubes,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 3] = [
        InequalityKind::Vdc,
        InequalityKind::WwVdc,
        InequalityKind::Cubes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityKind::Vdc => "vdc",
            InequalityKind::WwVdc => "ww_vdc",
            InequalityKind::Cubes => "cubes",
        }
    }

    pub fn parse(s: &str) -> Result<InequalityKind> {
        InequalityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown inequality `{s}`; expected vdc, ww_vdc or cubes"
                ))
            })
    }
}

/// Outcome of a batch of seeded random inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub kind: InequalityKind,
    pub trials: usize,
    pub max_n: usize,
    pub seed: u64,
    pub violations: usize,
    /// Largest `lhs / rhs` over trials with a positive right side.
    pub worst_ratio: f64,
    pub worst_trial: Option<usize>,
    pub reports: Vec<InequalityReport>,
}

/// Trial `i` draws `N` uniformly from `1..=max_n` and unit-disc entries from
/// its own stream. Every fourth trial is unimodular, every fourth (offset
/// one) is a pure exponential `e(n beta)`, the rest are uniform in the disc.
fn trial_sequence(seed: u64, trial: usize, salt: u64, len: usize) -> Vec<Complex64> {
    let mut rng = stream_rng(seed, streams::TRIAL_DATA, (trial as u64) << 2 | salt);
    let beta: f64 = rng.gen();
    (0..len)
        .map(|n| match trial % 4 {
            0 => Complex64::from_polar(1.0, std::f64::consts::TAU * rng.gen::<f64>()),
            1 => Complex64::from_polar(1.0, std::f64::consts::TAU * (n as f64 * beta).fract()),
            _ => Complex64::from_polar(
                rng.gen::<f64>().sqrt(),
                std::f64::consts::TAU * rng.gen::<f64>(),
            ),
        })
        .collect()
}

fn run_trial(
    kind: InequalityKind,
    seed: u64,
    trial: usize,
    max_n: usize,
    oversampling: usize,
) -> Result<InequalityReport> {
    let mut rng = stream_rng(seed, streams::TRIALS, trial as u64);
    let n = rng.gen_range(1..=max_n);
    match kind {
        InequalityKind::Vdc => {
            vdc_bound_check(&trial_sequence(seed, trial, 0, n), rng.gen_range(0..n))
        }
        InequalityKind::WwVdc => ww_vdc_bound_check(
            &trial_sequence(seed, trial, 0, n),
            rng.gen_range(1..=n),
            oversampling,
        ),
        InequalityKind::Cubes => cubes_bound_check(
            &trial_sequence(seed, trial, 0, n),
            &trial_sequence(seed, trial, 1, n),
            &trial_sequence(seed, trial, 2, 2 * n - 1),
            n,
        ),
    }
}

/// Runs `trials` seeded random inputs of length at most `max_n` through one
/// checker.
pub fn random_trial_suite(
    kind: InequalityKind,
    trials: usize,
    max_n: usize,
    seed: u64,
    oversampling: usize,
) -> Result<SuiteReport> {
    if trials == 0 || max_n == 0 {
        return Err(Error::InvalidArgument(
            "trials and the maximal N must be positive".into(),
        ));
    }
    let reports: Vec<InequalityReport> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(kind, seed, i, max_n, oversampling))
        .collect::<Result<_>>()?;
    let violations = reports.iter().filter(|r| !r.holds).count();
    let (mut worst_ratio, mut worst_trial) = (0.0, None);
    for (i, r) in reports.iter().enumerate() {
        if r.rhs > 0.0 && r.lhs / r.rhs > worst_ratio {
            worst_ratio = r.lhs / r.rhs;
            worst_trial = Some(i);
        }
    }
    Ok(SuiteReport {
        kind,
        trials,
        max_n,
        seed,
        violations,
        worst_ratio,
        worst_trial,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|x| Complex64::new(*x, 0.0)).collect()
    }

    #[test]
    fn vdc_examples() {
        let r = vdc_bound_check(&real(&[0.0; 8]), 3).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (0.0, 0.0, true));
        let r = vdc_bound_check(&real(&[1.0, -1.0, 1.0, -1.0]), 1).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!((r.rhs - 5.0 / 32.0).abs() < 1e-15);
        assert!(r.holds);
        assert!(vdc_bound_check(&real(&[1.0; 4]), 4).is_err());
    }

    #[test]
    fn ww_vdc_examples() {
        let r = ww_vdc_bound_check(&real(&[0.0; 16]), 4, 32).unwrap();
        assert!(r.holds && r.lhs == 0.0 && r.rhs == 0.0);
        let r = ww_vdc_bound_check(&real(&[1.0; 64]), 8, 32).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12);
        let expected =
            2.0 * 64.0 / 512.0 + 0.5 * (1..=8).map(|h| (64 - h) as f64 / 64.0).sum::<f64>();
        assert!((r.rhs - expected).abs() < 1e-12);
        assert!(r.holds);
        assert!(ww_vdc_bound_check(&real(&[2.0; 4]), 1, 32).is_err());
        assert!(ww_vdc_bound_check(&real(&[1.0; 4]), 5, 32).is_err());
    }

    #[test]
    fn cubes_examples() {
        let r =
            cubes_bound_check(&real(&[1.0; 8]), &real(&[1.0; 8]), &real(&[0.0; 15]), 8).unwrap();
        assert!(r.holds && r.lhs == 0.0 && r.rhs == 0.0);
        let r =
            cubes_bound_check(&real(&[1.0; 8]), &real(&[1.0; 8]), &real(&[1.0; 15]), 8).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(
            cubes_bound_check(&real(&[1.0; 8]), &real(&[1.0; 8]), &real(&[1.0; 14]), 8).is_err()
        );
    }

    #[test]
    fn cubes_needs_the_zero_frequency() {
        // c = delta_0: the left side is positive and only c_0 carries mass.
        let mut c = real(&[0.0; 7]);
        c[0] = Complex64::new(1.0, 0.0);
        let r = cubes_bound_check(&real(&[1.0; 4]), &real(&[1.0; 4]), &c, 4).unwrap();
        assert!(r.lhs > 0.0 && r.holds);
    }

    #[test]
    fn random_suites_hold() {
        for kind in InequalityKind::ALL {
            let r = random_trial_suite(kind, 64, 96, 5, 8).unwrap();
            assert_eq!(r.violations, 0, "{kind:?}");
            assert!(r.worst_ratio <= 1.0 + 1e-12);
            assert_eq!(r, random_trial_suite(kind, 64, 96, 5, 8).unwrap());
        }
        assert_eq!(
            InequalityKind::parse("ww_vdc").unwrap(),
            InequalityKind::WwVdc
        );
        assert!(InequalityKind::parse("x").is_err());
    }
}
