//! The averages `W_N(f1, f2, x, t) = (1/N) sum_{n<N} f1(T^{an}x) f2(T^{bn}x) e(n t)`
//! and the experiments built on them: uniform decay along an `N` ladder,
//! the integral inequalities for `Z_2`-type bounds, the bound by `N_2`, the
//! lift for rational frequencies and the eigenfunction twist.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::dynsys::sample_stream;
use crate::dynsys::{
    orbit_observable_values, sample_invariant_measure, transform_point, BoundObservable,
    Observable, StatePoint, SystemKind, SystemSpec,
};
use crate::error::{Error, Result};
use crate::exact::{frac, frac_mul};
use crate::rng::{stream_rng, streams};
use crate::seminorms::{
    angle_seminorm_estimate, ghk_seminorm_estimate, nk_seminorm_estimate, ProductSystem,
    TruncationParams,
};
use crate::sum::{median, pairwise_mean, pairwise_sum};
use crate::trigpoly::{SupEstimate, WeightedExponentialSum};

/// Powers `a, b`, an optional fixed frequency and the `N` ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingScheme {
    pub a: i64,
    pub b: i64,
    #[serde(default)]
    pub t: Option<f64>,
    pub ladder: Vec<usize>,
}

impl AveragingScheme {
    pub fn new(a: i64, b: i64, ladder: Vec<usize>) -> Result<AveragingScheme> {
        let s = AveragingScheme {
            a,
            b,
            t: None,
            ladder,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_frequency(self, t: f64) -> AveragingScheme {
        AveragingScheme { t: Some(t), ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 && self.b == 0 {
            return Err(Error::InvalidArgument("(a, b) must not both vanish".into()));
        }
        if self.ladder.is_empty() || self.ladder[0] == 0 {
            return Err(Error::InvalidArgument(
                "the N ladder must be non-empty with positive entries".into(),
            ));
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "the N ladder must be strictly increasing".into(),
            ));
        }
        if let Some(t) = self.t {
            if !t.is_finite() {
                return Err(Error::InvalidArgument(
                    "the frequency t must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn max_n(&self) -> usize {
        *self.ladder.last().expect("validated ladder")
    }
}

struct Pair {
    f1: BoundObservable,
    f2: BoundObservable,
}

impl Pair {
    fn new(sys: &SystemSpec, f1: &Observable, f2: &Observable, a: i64, b: i64) -> Result<Pair> {
        if (a < 0 || b < 0) && !sys.is_invertible() {
            return Err(Error::NonInvertible(a.min(b)));
        }
        Ok(Pair {
            f1: f1.bind(sys)?,
            f2: f2.bind(sys)?,
        })
    }

    /// `f1(T^{an}x) f2(T^{bn}x)` for `n = 0..len`.
    fn products(&self, x: &StatePoint, a: i64, b: i64, len: usize) -> Result<Vec<Complex64>> {
        let v1 = orbit_observable_values(&self.f1, x, len, a)?;
        let v2 = orbit_observable_values(&self.f2, x, len, b)?;
        Ok(v1.iter().zip(&v2).map(|(p, q)| p * q).collect())
    }
}

fn twisted_mean(values: &[Complex64], t: f64, first: i128) -> Complex64 {
    let terms: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let (s, c) = (TAU * frac_mul(first + n as i128, t)).sin_cos();
            v * Complex64::new(c, s)
        })
        .collect();
    pairwise_mean(&terms)
}

/// `W_N(f1, f2, x, t)`.
#[allow(clippy::too_many_arguments)]
pub fn wn_average(
    sys: &SystemSpec,
    f1: &Observable,
    f2: &Observable,
    a: i64,
    b: i64,
    x: &StatePoint,
    n: usize,
    t: f64,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let values = Pair::new(sys, f1, f2, a, b)?.products(x, a, b, n)?;
    Ok(twisted_mean(&values, t, 0))
}

fn sup_of(values: &[Complex64], oversampling: usize) -> Result<SupEstimate> {
    WeightedExponentialSum::new(values.to_vec())?.sup_modulus_certified(oversampling)
}

/// Grid maximum and certified bound of `sup_t |W_N(f1, f2, x, t)|`.
#[allow(clippy::too_many_arguments)]
pub fn sup_wn_statistic(
    sys: &SystemSpec,
    f1: &Observable,
    f2: &Observable,
    a: i64,
    b: i64,
    x: &StatePoint,
    n: usize,
    oversampling: usize,
) -> Result<SupEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let values = Pair::new(sys, f1, f2, a, b)?.products(x, a, b, n)?;
    sup_of(&values, oversampling)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// `W_N` at the scheme frequency, or at the maximising grid node.
    pub value: Complex64,
    pub sup: SupEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WWRecord {
    pub n: usize,
    pub samples: Vec<SampleRecord>,
    pub median_grid_max: f64,
    pub median_certified: f64,
    pub max_certified: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayVerdict {
    pub strictly_decreasing: bool,
    pub final_median: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WWSeries {
    pub scheme: AveragingScheme,
    pub seed: u64,
    /// Coordinates of the sampled points.
    pub points: Vec<Vec<f64>>,
    pub records: Vec<WWRecord>,
    pub decay: DecayVerdict,
}

/// Medians below this are treated as exact zeros by the decay verdict.
const ZERO_MEDIAN: f64 = 1e-15;

fn decay_verdict(medians: &[f64], threshold: f64) -> DecayVerdict {
    let strictly_decreasing = medians
        .windows(2)
        .all(|w| w[1] < w[0] || (w[0] <= ZERO_MEDIAN && w[1] <= ZERO_MEDIAN));
    let final_median = *medians.last().expect("non-empty ladder");
    DecayVerdict {
        strictly_decreasing,
        final_median,
        threshold,
        passed: strictly_decreasing && final_median <= threshold,
    }
}

fn per_sample_records(
    pair: &Pair,
    scheme: &AveragingScheme,
    points: &[StatePoint],
    oversampling: usize,
) -> Result<Vec<Vec<SampleRecord>>> {
    points
        .par_iter()
        .map(|x| {
            let values = pair.products(x, scheme.a, scheme.b, scheme.max_n())?;
            scheme
                .ladder
                .iter()
                .map(|&n| {
                    let sup = sup_of(&values[..n], oversampling)?;
                    let t = scheme.t.unwrap_or(sup.argmax_t);
                    Ok(SampleRecord {
                        value: twisted_mean(&values[..n], t, 0),
                        sup,
                    })
                })
                .collect()
        })
        .collect()
}

/// Records `sup_t |W_N|` for each `N` of the ladder at `samples` points drawn
/// from `seed`, and decides decay: the median certified bound must strictly
/// decrease along the ladder and end at or below the threshold.
pub fn uniform_decay_experiment(
    sys: &SystemSpec,
    f1: &Observable,
    f2: &Observable,
    scheme: &AveragingScheme,
    samples: usize,
    seed: u64,
    oversampling: usize,
) -> Result<WWSeries> {
    scheme.validate()?;
    if scheme.ladder.len() < 3 {
        return Err(Error::InvalidArgument(
            "the decay experiment needs a ladder of at least three values".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample is required".into(),
        ));
    }
    let pair = Pair::new(sys, f1, f2, scheme.a, scheme.b)?;
    let points = sample_invariant_measure(sys, samples, seed);
    let per_sample = per_sample_records(&pair, scheme, &points, oversampling)?;
    let records: Vec<WWRecord> = scheme
        .ladder
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let samples: Vec<SampleRecord> = per_sample.iter().map(|s| s[i].clone()).collect();
            let grid: Vec<f64> = samples.iter().map(|s| s.sup.grid_max).collect();
            let cert: Vec<f64> = samples.iter().map(|s| s.sup.certified_upper).collect();
            WWRecord {
                n,
                median_grid_max: median(&grid),
                median_certified: median(&cert),
                max_certified: cert.iter().cloned().fold(0.0, f64::max),
                samples,
            }
        })
        .collect();
    let medians: Vec<f64> = records.iter().map(|r| r.median_certified).collect();
    Ok(WWSeries {
        scheme: scheme.clone(),
        seed,
        points: points.iter().map(StatePoint::coordinates).collect(),
        records,
        decay: decay_verdict(&medians, defaults::DECAY_THRESHOLD),
    })
}

/// Which integral inequality to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Z2Kind {
    /// `int |(1/N) sum G1(T^{an}x) G2(T^{bn}x)|^2 <= C |||G1|||_2^2`.
    Cl,
    /// `int int |(1/N) sum f1(T^{an}x) f2(T^{bn}y)|^2 <= C |a| |||f1|||_2^2`.
    DoubleFctn,
    /// `int int sup_t |...|^2 <= C |a|^{1/2} |||f1|||_3^2`.
    DoubleFctnWw,
    /// `int |(1/N) sum f(U^n y)|^2 <= C ||<f>||_2^2` for `U = T^a`.
    SingleFctn,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Z2Params {
    pub samples: usize,
    pub seed: u64,
    pub h: usize,
    pub constant: f64,
    pub oversampling: usize,
}

impl Default for Z2Params {
    fn default() -> Self {
        Z2Params {
            samples: defaults::SAMPLES,
            seed: defaults::MASTER_SEED,
            h: 1000,
            constant: defaults::BOUND_CONSTANT,
            oversampling: defaults::OVERSAMPLING,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Z2Report {
    pub kind: Z2Kind,
    pub ladder: Vec<usize>,
    /// Left side at each `N` of the ladder.
    pub lhs: Vec<f64>,
    /// The seminorm expression on the right, without the constant.
    pub seminorm_bound: f64,
    /// `C (seminorm_bound + 1/H)`: the finite-`H` form of the bound.
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub non_increasing: bool,
    pub holds: bool,
}

/// Estimates both sides of one of the integral inequalities. The left side
/// averages over `samples` points (pairs of points for the two-function
/// forms); the right side comes from the seminorm estimators with outer
/// length `H`.
pub fn z2_inequality_experiment(
    sys: &SystemSpec,
    kind: Z2Kind,
    f1: &Observable,
    f2: &Observable,
    scheme: &AveragingScheme,
    params: &Z2Params,
) -> Result<Z2Report> {
    scheme.validate()?;
    if params.samples == 0 || params.h == 0 {
        return Err(Error::InvalidArgument(
            "samples and H must be positive".into(),
        ));
    }
    let (a, b) = (scheme.a, scheme.b);
    let trunc = TruncationParams::new(params.h);
    let xs = sample_invariant_measure(sys, params.samples, params.seed);
    let ys = sample_stream(sys, params.samples, params.seed, streams::SECOND_SAMPLES);
    let nmax = scheme.max_n();
    let ladder = scheme.ladder.clone();

    // per-sample, per-N contribution to the left side
    let contributions: Vec<Vec<f64>> = match kind {
        Z2Kind::Cl => {
            let pair = Pair::new(sys, f1, f2, a, b)?;
            xs.par_iter()
                .map(|x| {
                    let v = pair.products(x, a, b, nmax)?;
                    Ok(ladder
                        .iter()
                        .map(|&n| pairwise_mean(&v[..n]).norm_sqr())
                        .collect())
                })
                .collect::<Result<_>>()?
        }
        Z2Kind::DoubleFctn | Z2Kind::DoubleFctnWw => {
            let pair = Pair::new(sys, f1, f2, a, b)?;
            xs.par_iter()
                .zip(ys.par_iter())
                .map(|(x, y)| {
                    let v1 = orbit_observable_values(&pair.f1, x, nmax, a)?;
                    let v2 = orbit_observable_values(&pair.f2, y, nmax, b)?;
                    let v: Vec<Complex64> = v1.iter().zip(&v2).map(|(p, q)| p * q).collect();
                    ladder
                        .iter()
                        .map(|&n| {
                            if kind == Z2Kind::DoubleFctn {
                                Ok(pairwise_mean(&v[..n]).norm_sqr())
                            } else {
                                let s = sup_of(&v[..n], params.oversampling)?;
                                Ok(s.certified_upper * s.certified_upper)
                            }
                        })
                        .collect()
                })
                .collect::<Result<_>>()?
        }
        Z2Kind::SingleFctn => {
            let bf = f1.bind(sys)?;
            xs.par_iter()
                .map(|x| {
                    let v = orbit_observable_values(&bf, x, nmax, a)?;
                    Ok(ladder
                        .iter()
                        .map(|&n| pairwise_mean(&v[..n]).norm_sqr())
                        .collect())
                })
                .collect::<Result<_>>()?
        }
    };
    let lhs: Vec<f64> = (0..ladder.len())
        .map(|i| {
            pairwise_sum(&contributions.iter().map(|c| c[i]).collect::<Vec<_>>())
                / params.samples as f64
        })
        .collect();
    let seminorm_bound = match kind {
        Z2Kind::Cl => ghk_seminorm_estimate(sys, f1, 2, &trunc)?.value.powi(2),
        Z2Kind::DoubleFctn => {
            a.unsigned_abs() as f64 * ghk_seminorm_estimate(sys, f1, 2, &trunc)?.value.powi(2)
        }
        Z2Kind::DoubleFctnWw => {
            (a.unsigned_abs() as f64).sqrt()
                * ghk_seminorm_estimate(sys, f1, 3, &trunc)?.value.powi(2)
        }
        Z2Kind::SingleFctn => {
            let u = ProductSystem::power(sys, a)?;
            angle_seminorm_estimate(&u, std::slice::from_ref(f1), 2, &trunc)?
                .value
                .powi(2)
        }
    };
    let rhs = params.constant * (seminorm_bound + 1.0 / params.h as f64);
    let last = *lhs.last().expect("non-empty ladder");
    let non_increasing = lhs
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + defaults::ESTIMATE_SLACK) + 1e-15);
    Ok(Z2Report {
        kind,
        ladder,
        ratio: (seminorm_bound > 0.0).then(|| last / seminorm_bound),
        holds: last <= rhs,
        lhs,
        seminorm_bound,
        rhs,
        non_increasing,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxIsomReport {
    pub n: usize,
    pub n2: f64,
    pub bound: f64,
    pub sups: Vec<f64>,
    pub per_sample: Vec<bool>,
    pub median_sup: f64,
    pub holds: bool,
}

/// Compares `sup_t |W_N|` at `samples` points with `C N_2(f1)^2` plus the
/// finite-`N` allowance used by the decay experiments.
#[allow(clippy::too_many_arguments)]
pub fn maxisom_bound_check(
    sys: &SystemSpec,
    f1: &Observable,
    f2: &Observable,
    a: i64,
    b: i64,
    samples: usize,
    seed: u64,
    n: usize,
    h: usize,
    constant: f64,
    oversampling: usize,
) -> Result<MaxIsomReport> {
    if samples == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "samples and N must be positive".into(),
        ));
    }
    let n2 = nk_seminorm_estimate(sys, f1, 2, &TruncationParams::new(h))?.value;
    let bound = constant * n2 * n2 + defaults::DECAY_THRESHOLD;
    let pair = Pair::new(sys, f1, f2, a, b)?;
    let points = sample_invariant_measure(sys, samples, seed);
    let sups: Vec<f64> = points
        .par_iter()
        .map(|x| Ok(sup_of(&pair.products(x, a, b, n)?, oversampling)?.certified_upper))
        .collect::<Result<_>>()?;
    let per_sample: Vec<bool> = sups.iter().map(|s| *s <= bound).collect();
    let median_sup = median(&sups);
    Ok(MaxIsomReport {
        n,
        n2,
        bound,
        holds: median_sup <= bound,
        sups,
        per_sample,
        median_sup,
    })
}

/// A frequency `p / q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub p: i64,
    pub q: u64,
}

impl Rational {
    pub fn new(p: i64, q: u64) -> Result<Rational> {
        if q == 0 {
            return Err(Error::InvalidArgument(
                "denominator must be positive".into(),
            ));
        }
        Ok(Rational { p, q })
    }

    pub fn to_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `n t` reduced modulo one, exactly.
    fn phase(self, n: i128) -> f64 {
        let q = self.q as i128;
        (n * self.p as i128).rem_euclid(q) as f64 / q as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub lifted: Complex64,
    pub twisted: Complex64,
    pub diff: f64,
    pub tolerance: f64,
    pub holds: bool,
}

pub const LIFT_TOLERANCE: f64 = 1e-10;

/// Both sides of the lift identity
/// `(1/N) sum F1(U^{an}(x,y)) F2(U^{bn}(x,y)) = e((alpha1 + alpha2) y) W'_N`,
/// where `U = T x S_t`, `S_t y = y + t` on the line, `F_i(x, y) = f_i(x) e(alpha_i y)`,
/// `alpha1 a + alpha2 b = 1`, and `W'_N` sums `n = 1..N`.
#[allow(clippy::too_many_arguments)]
pub fn rational_lift_check(
    sys: &SystemSpec,
    f1: &Observable,
    f2: &Observable,
    a: i64,
    b: i64,
    t: Rational,
    alpha1: f64,
    alpha2: f64,
    x: &StatePoint,
    y: f64,
    n: usize,
) -> Result<LiftReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(alpha1 * a as f64 + alpha2 * b as f64 - 1.0)
        .abs()
        .le(&1e-12)
    {
        return Err(Error::InvalidArgument(format!(
            "alpha1 a + alpha2 b = {} must equal 1",
            alpha1 * a as f64 + alpha2 * b as f64
        )));
    }
    let pair = Pair::new(sys, f1, f2, a, b)?;
    let v = pair.products(x, a, b, n + 1)?;
    let tf = t.to_f64();
    let lifted_terms: Vec<Complex64> = (1..=n)
        .map(|k| {
            let y1 = y + (a as f64 * k as f64) * tf;
            let y2 = y + (b as f64 * k as f64) * tf;
            v[k] * Complex64::from_polar(1.0, TAU * frac(alpha1 * y1 + alpha2 * y2))
        })
        .collect();
    let lifted = pairwise_mean(&lifted_terms);
    let twisted_terms: Vec<Complex64> = (1..=n)
        .map(|k| v[k] * Complex64::from_polar(1.0, TAU * t.phase(k as i128)))
        .collect();
    let twisted = Complex64::from_polar(1.0, TAU * frac((alpha1 + alpha2) * y))
        * pairwise_mean(&twisted_terms);
    let diff = (lifted - twisted).norm();
    Ok(LiftReport {
        lifted,
        twisted,
        diff,
        tolerance: LIFT_TOLERANCE,
        holds: diff <= LIFT_TOLERANCE,
    })
}

/// Outcome of [`rational_lift_trials`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftTrialsReport {
    pub trials: usize,
    pub n: usize,
    pub seed: u64,
    pub max_diff: f64,
    pub worst_trial: usize,
    pub holds: bool,
}

fn random_trig(rng: &mut impl Rng) -> Observable {
    let terms: Vec<(i64, Complex64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(-3..=3),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    Observable::trig_polynomial(0, &terms)
}

/// Random trigonometric `f1, f2` of degree at most 3, powers `a, b` in
/// `1..=4`, a random `alpha1` with `alpha2` solving the constraint, and
/// `t = p/q` with `q <= 7`; all drawn from the trial streams of `seed`.
pub fn rational_lift_trials(
    sys: &SystemSpec,
    trials: usize,
    n: usize,
    seed: u64,
) -> Result<LiftTrialsReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let diffs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, streams::TRIALS, i as u64);
            let (f1, f2) = (random_trig(&mut rng), random_trig(&mut rng));
            let (a, b) = (rng.gen_range(1..=4i64), rng.gen_range(1..=4i64));
            let alpha1 = rng.gen_range(-2.0..2.0);
            let alpha2 = (1.0 - alpha1 * a as f64) / b as f64;
            let q = rng.gen_range(1..=7u64);
            let t = Rational::new(rng.gen_range(-(q as i64)..=q as i64), q)?;
            let x = sample_stream(sys, 1, seed, streams::TRIAL_DATA).remove(0);
            let x = transform_point(sys, &x, i as i64)?;
            let y = rng.gen_range(-1.0..1.0);
            Ok(rational_lift_check(sys, &f1, &f2, a, b, t, alpha1, alpha2, &x, y, n)?.diff)
        })
        .collect::<Result<_>>()?;
    let (worst_trial, max_diff) = diffs
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    Ok(LiftTrialsReport {
        trials,
        n,
        seed,
        max_diff,
        worst_trial,
        holds: max_diff <= LIFT_TOLERANCE,
    })
}

/// Checks `f_t(T^n x) = e(n t) f_t(x)` for `n = 1..=n_max` and the reduction
/// `W_N(f1, f2, x, t) = (1/N) sum f1(T^n x) f2(T^{2n} x) f_t(T^n x) / f_t(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistReport {
    pub twist: Twist,
    pub relation_error: f64,
    pub reduction_error: f64,
    pub relation_holds: bool,
    pub reduction_holds: bool,
}

pub const TWIST_RELATION_TOLERANCE: f64 = 1e-12;
pub const TWIST_REDUCTION_TOLERANCE: f64 = 1e-10;

#[allow(clippy::too_many_arguments)]
pub fn twist_check(
    sys: &SystemSpec,
    twist: &Twist,
    f1: &Observable,
    f2: &Observable,
    a: i64,
    b: i64,
    points: &[StatePoint],
    n: usize,
) -> Result<TwistReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let ft = twist.function.bind(sys)?;
    let twisted_f1 = f1.clone() * twist.function.clone();
    let mut relation_error = 0.0f64;
    let mut reduction_error = 0.0f64;
    for x in points {
        let values = orbit_observable_values(&ft, x, n + 1, a)?;
        let fx = values[0];
        for (k, v) in values.iter().enumerate().skip(1) {
            let expected =
                fx * Complex64::from_polar(1.0, TAU * frac_mul(k as i128 * a as i128, twist.t));
            relation_error = relation_error.max((v - expected).norm());
        }
        let lhs = wn_average(sys, f1, f2, a, b, x, n, a as f64 * twist.t)?;
        let rhs = wn_average(sys, &twisted_f1, f2, a, b, x, n, 0.0)? / fx;
        reduction_error = reduction_error.max((lhs - rhs).norm());
    }
    Ok(TwistReport {
        twist: twist.clone(),
        relation_error,
        reduction_error,
        relation_holds: relation_error <= TWIST_RELATION_TOLERANCE,
        reduction_holds: reduction_error <= TWIST_REDUCTION_TOLERANCE,
    })
}

/// The eigenfunction `f_t = e(k x)` with `f_t o T^n = e(n t) f_t`, `t = k alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    pub k: i64,
    pub t: f64,
    pub function: Observable,
}

pub fn eigenfunction_twist(sys: &SystemSpec, k: i64) -> Result<Twist> {
    if !matches!(sys.kind(), SystemKind::Rotation { .. }) {
        return Err(Error::Unsupported(
            "eigenfunction twists are implemented on circle rotations".into(),
        ));
    }
    Ok(Twist {
        k,
        t: sys.step().mul_int(k).to_f64(),
        function: Observable::character(k),
    })
}

/// Finds the twist for frequency `t`, which must be `k alpha mod 1` with
/// `|k| <= cutoff`.
pub fn twist_for_frequency(sys: &SystemSpec, t: f64, cutoff: i64) -> Result<Twist> {
    for k in (0..=cutoff).flat_map(|k| [k, -k]) {
        let tw = eigenfunction_twist(sys, k)?;
        let d = (frac(t) - tw.t).abs();
        if d.min(1.0 - d) <= 1e-12 {
            return Ok(tw);
        }
    }
    Err(Error::Unsupported(format!(
        "t = {t} is not an eigenvalue frequency k alpha with |k| <= {cutoff}; continuous twists exist only for eigenvalues"
    )))
}
