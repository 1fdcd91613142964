//! Invariant-set kernels, conditional expectations onto invariant and
//! Kronecker factors, and the eigenbasis resonance limit of double averages.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::dynsys::orbit_observable_values;
use crate::dynsys::{
    integrate_observable, Observable, QuadratureGrid, StatePoint, SystemKind, SystemSpec,
};
use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::sum::{median, pairwise_mean};
use crate::wwdr;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The atoms `A_0, ..., A_{l-1}` of the `T^s`-invariant sigma-algebra, each
/// of measure `1 / l`. The kernel is `K(x, y) = l sum_i 1_{A_i}(x) 1_{A_i}(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelPartition {
    pub system: SystemSpec,
    pub s: u64,
    pub l: u32,
    pub atom_measures: Vec<f64>,
}

impl KernelPartition {
    /// Index of the atom containing `x`.
    pub fn atom_of(&self, x: &StatePoint) -> Result<u32> {
        match (self.system.kind(), x) {
            (SystemKind::Rotation { .. }, StatePoint::Circle(_)) => Ok(0),
            (SystemKind::CyclicProduct { q, .. }, StatePoint::Cyclic { index, .. })
                if index < q =>
            {
                Ok(index % self.l)
            }
            _ => Err(Error::PointMismatch(self.system.name())),
        }
    }

    /// `1_{A_r}` as an observable.
    pub fn indicator(&self, r: u32) -> Observable {
        match self.system.kind() {
            SystemKind::CyclicProduct { q, .. } => Observable::sum(
                (0..*q)
                    .filter(|i| i % self.l == r)
                    .map(Observable::fiber)
                    .collect(),
            ),
            _ => Observable::one(),
        }
    }
}

pub fn invariant_kernel_partition(sys: &SystemSpec, s: u64) -> Result<KernelPartition> {
    if s == 0 {
        return Err(Error::InvalidArgument(
            "the power s must be at least 1".into(),
        ));
    }
    let l = match sys.kind() {
        SystemKind::Rotation { .. } => 1,
        SystemKind::CyclicProduct { q, .. } => gcd(s, *q as u64) as u32,
        _ => {
            return Err(Error::Unsupported(format!(
                "invariant kernels are implemented for rotations and cyclic products, not the {} system",
                sys.name()
            )))
        }
    };
    Ok(KernelPartition {
        system: sys.clone(),
        s,
        l,
        atom_measures: vec![1.0 / l as f64; l as usize],
    })
}

fn coefficient_times(c: Complex64, f: Observable) -> Observable {
    if c == Complex64::new(1.0, 0.0) {
        f
    } else if c.im == 0.0 {
        f.scale(c.re)
    } else {
        f.scale_complex(c)
    }
}

/// `E(f | T^s-invariant sets)(x) = l int 1_{A(x)} f d mu`.
pub fn conditional_expectation_invariant(
    sys: &SystemSpec,
    s: u64,
    f: &Observable,
    partition: &KernelPartition,
) -> Result<Observable> {
    if partition.system != *sys || partition.s != s {
        return Err(Error::InvalidArgument(
            "the partition was built for a different system or power".into(),
        ));
    }
    let grid = QuadratureGrid::default_for(sys);
    let floor = 1e-13 * f.sup_bound().max(1.0);
    let mut terms = Vec::new();
    for r in 0..partition.l {
        let atom = partition.indicator(r);
        let mass =
            integrate_observable(sys, &(f.clone() * atom.clone()), &grid)? * partition.l as f64;
        if mass.norm() > floor {
            terms.push(coefficient_times(mass, atom));
        }
    }
    Ok(Observable::sum(terms))
}

/// Characters of the Kronecker coordinate with their eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenBasis {
    pub system: SystemSpec,
    pub entries: Vec<Eigenpair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub k: i64,
    pub eigenvalue: Complex64,
    pub function: Observable,
}

impl EigenBasis {
    /// `e_k(x) = e(k z)` with `|k| <= cutoff`, `z` the base coordinate.
    pub fn new(sys: &SystemSpec, cutoff: i64) -> Result<EigenBasis> {
        let step = match sys.kind() {
            SystemKind::Rotation { .. } | SystemKind::SkewProduct { .. } => sys.step(),
            SystemKind::Doubling => {
                return Ok(EigenBasis {
                    system: sys.clone(),
                    entries: vec![Eigenpair {
                        k: 0,
                        eigenvalue: Complex64::new(1.0, 0.0),
                        function: Observable::one(),
                    }],
                })
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "no eigenbasis for the {} system",
                    sys.name()
                )))
            }
        };
        let entries = (-cutoff..=cutoff)
            .map(|k| {
                let (s, c) = (std::f64::consts::TAU * step.mul_int(k).to_f64()).sin_cos();
                Eigenpair {
                    k,
                    eigenvalue: Complex64::new(c, s),
                    function: Observable::character(k),
                }
            })
            .collect();
        Ok(EigenBasis {
            system: sys.clone(),
            entries,
        })
    }
}

fn drop_noise(coeffs: &mut BTreeMap<i64, Complex64>, scale: f64) {
    let floor = 1e-13 * scale.max(1.0);
    coeffs.retain(|_, c| c.norm() > floor);
}

/// Projection onto the Kronecker factor: identity on a rotation, the mean on
/// the doubling map, and the base-circle Fourier series up to `cutoff` on the
/// skew product.
pub fn kronecker_projection(sys: &SystemSpec, f: &Observable, cutoff: i64) -> Result<Observable> {
    match sys.kind() {
        SystemKind::Rotation { .. } => {
            f.bind(sys)?;
            Ok(f.clone())
        }
        SystemKind::Doubling => {
            let grid = QuadratureGrid::default_for(sys);
            let m = integrate_observable(sys, f, &grid)?;
            Ok(Observable::Const(m))
        }
        SystemKind::SkewProduct { .. } => {
            let grid = QuadratureGrid::default_for(sys);
            if cutoff < 0 || 2 * cutoff >= grid.nodes_per_axis() as i64 {
                return Err(Error::InvalidArgument(format!(
                    "cutoff {cutoff} is too large for {} quadrature nodes per axis",
                    grid.nodes_per_axis()
                )));
            }
            let mut coeffs = BTreeMap::new();
            for k in -cutoff..=cutoff {
                let c = integrate_observable(sys, &(f.clone() * Observable::character(-k)), &grid)?;
                coeffs.insert(k, c);
            }
            drop_noise(&mut coeffs, f.sup_bound());
            Ok(Observable::trig_polynomial(
                0,
                &coeffs.into_iter().collect::<Vec<_>>(),
            ))
        }
        _ => Err(Error::Unsupported(format!(
            "the Kronecker factor of the {} system is not implemented",
            sys.name()
        ))),
    }
}

/// Fourier coefficients of a trigonometric polynomial on the circle.
fn fourier_coefficients(sys: &SystemSpec, f: &Observable) -> Result<BTreeMap<i64, Complex64>> {
    let degree = f.circle_degree().ok_or_else(|| {
        Error::IncompatibleObservable(format!(
            "`{f}` is not a trigonometric polynomial in one coordinate"
        ))
    })?;
    let m = (2 * degree as usize + 1).next_power_of_two().max(8);
    let bound = f.bind(sys)?;
    let mut values: Vec<Complex64> = (0..m)
        .map(|j| bound.eval_unchecked(&StatePoint::Circle(Phase::from_ratio(j as u64, m as u64))))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut values);
    let mut out = BTreeMap::new();
    for k in -(degree as i64)..=degree as i64 {
        out.insert(k, values[k.rem_euclid(m as i64) as usize] / m as f64);
    }
    drop_noise(&mut out, f.sup_bound());
    Ok(out)
}

/// Integer frequency pairs `(j, l)` with `a j + b l = 0` among the supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub a: i64,
    pub b: i64,
    pub pairs: Vec<(i64, i64)>,
}

/// `lim_N (1/N) sum f1(T^{a n} x) f2(T^{b n} x)` on a rotation, as the sum of
/// `c1_j c2_l e_{j+l}` over resonant pairs.
pub fn resonance_limit(
    sys: &SystemSpec,
    f1: &Observable,
    f2: &Observable,
    a: i64,
    b: i64,
) -> Result<(Observable, ResonanceSet)> {
    if !matches!(sys.kind(), SystemKind::Rotation { .. }) {
        return Err(Error::Unsupported(
            "the resonance limit is implemented on circle rotations".into(),
        ));
    }
    if a == 0 && b == 0 {
        return Err(Error::InvalidArgument("(a, b) must not both vanish".into()));
    }
    let c1 = fourier_coefficients(sys, f1)?;
    let c2 = fourier_coefficients(sys, f2)?;
    let mut pairs = Vec::new();
    let mut limit: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (&j, x) in &c1 {
        for (&l, y) in &c2 {
            if a * j + b * l == 0 {
                pairs.push((j, l));
                *limit.entry(j + l).or_insert(Complex64::new(0.0, 0.0)) += x * y;
            }
        }
    }
    drop_noise(&mut limit, f1.sup_bound() * f2.sup_bound());
    let f = Observable::trig_polynomial(0, &limit.into_iter().collect::<Vec<_>>());
    Ok((f, ResonanceSet { a, b, pairs }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub n: usize,
    pub direct: Vec<Complex64>,
    pub projected: Vec<Complex64>,
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    pub median_direct: f64,
}

/// Compares the double average of `(F1, F2)` with that of their Kronecker
/// projections at the given points.
pub fn characteristic_projection_check(
    sys: &SystemSpec,
    f1: &Observable,
    f2: &Observable,
    a: i64,
    b: i64,
    samples: &[StatePoint],
    n: usize,
) -> Result<ProjectionReport> {
    let p1 = kronecker_projection(sys, f1, defaults::EIGEN_CUTOFF)?;
    let p2 = kronecker_projection(sys, f2, defaults::EIGEN_CUTOFF)?;
    let mut direct = Vec::with_capacity(samples.len());
    let mut projected = Vec::with_capacity(samples.len());
    for x in samples {
        direct.push(wwdr::wn_average(sys, f1, f2, a, b, x, n, 0.0)?);
        projected.push(wwdr::wn_average(sys, &p1, &p2, a, b, x, n, 0.0)?);
    }
    let gaps: Vec<f64> = direct
        .iter()
        .zip(&projected)
        .map(|(d, p)| (d - p).norm())
        .collect();
    let max_gap = gaps.iter().cloned().fold(0.0, f64::max);
    let median_direct = median(&direct.iter().map(|z| z.norm()).collect::<Vec<_>>());
    Ok(ProjectionReport {
        n,
        direct,
        projected,
        gaps,
        max_gap,
        median_direct,
    })
}

/// Birkhoff averages of `T^s` against the kernel conditional expectation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCheckReport {
    pub s: u64,
    pub l: u32,
    pub n: usize,
    pub expectation: Observable,
    pub birkhoff: Vec<Complex64>,
    pub kernel: Vec<Complex64>,
    pub max_gap: f64,
}

/// Compares `(1/N) sum_{n<N} f(T^{s n} x)` with `E(f | T^s-invariant)(x)`
/// at each point.
pub fn kernel_birkhoff_check(
    sys: &SystemSpec,
    f: &Observable,
    s: u64,
    points: &[StatePoint],
    n: usize,
) -> Result<KernelCheckReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let partition = invariant_kernel_partition(sys, s)?;
    let expectation = conditional_expectation_invariant(sys, s, f, &partition)?;
    let (bf, be) = (f.bind(sys)?, expectation.bind(sys)?);
    let step = i64::try_from(s).map_err(|_| Error::PowerOutOfRange(s as i128))?;
    let mut birkhoff = Vec::with_capacity(points.len());
    let mut kernel = Vec::with_capacity(points.len());
    for x in points {
        birkhoff.push(pairwise_mean(&orbit_observable_values(&bf, x, n, step)?));
        kernel.push(be.eval(x)?);
    }
    let max_gap = birkhoff
        .iter()
        .zip(&kernel)
        .map(|(b, k)| (b - k).norm())
        .fold(0.0, f64::max);
    Ok(KernelCheckReport {
        s,
        l: partition.l,
        n,
        expectation,
        birkhoff,
        kernel,
        max_gap,
    })
}

/// Direct `W_N` at `t = 0` against the eigenbasis resonance limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub set: ResonanceSet,
    pub limit: Observable,
    pub n: usize,
    pub direct: Vec<Complex64>,
    pub closed_form: Vec<Complex64>,
    pub max_gap: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn resonance_check(
    sys: &SystemSpec,
    f1: &Observable,
    f2: &Observable,
    a: i64,
    b: i64,
    points: &[StatePoint],
    n: usize,
) -> Result<ResonanceReport> {
    let (limit, set) = resonance_limit(sys, f1, f2, a, b)?;
    let bl = limit.bind(sys)?;
    let mut direct = Vec::with_capacity(points.len());
    let mut closed_form = Vec::with_capacity(points.len());
    for x in points {
        direct.push(wwdr::wn_average(sys, f1, f2, a, b, x, n, 0.0)?);
        closed_form.push(bl.eval(x)?);
    }
    let max_gap = direct
        .iter()
        .zip(&closed_form)
        .map(|(d, c)| (d - c).norm())
        .fold(0.0, f64::max);
    Ok(ResonanceReport {
        set,
        limit,
        n,
        direct,
        closed_form,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::ALPHA;
    use crate::dynsys::sample_invariant_measure;

    fn obs(s: &str) -> Observable {
        s.parse().unwrap()
    }

    fn same(sys: &SystemSpec, f: &Observable, g: &Observable, tol: f64) -> bool {
        let grid = QuadratureGrid::default_for(sys);
        let (bf, bg) = (f.bind(sys).unwrap(), g.bind(sys).unwrap());
        grid.points(sys)
            .iter()
            .all(|p| (bf.eval(p).unwrap() - bg.eval(p).unwrap()).norm() <= tol)
    }

    #[test]
    fn partitions() {
        let rot = SystemSpec::rotation(ALPHA).unwrap();
        assert_eq!(invariant_kernel_partition(&rot, 5).unwrap().l, 1);
        let c3 = SystemSpec::cyclic_product(3, ALPHA).unwrap();
        let p = invariant_kernel_partition(&c3, 3).unwrap();
        assert_eq!(p.l, 3);
        for i in 0..3 {
            assert_eq!(
                p.atom_of(&StatePoint::Cyclic {
                    index: i,
                    x: Phase::ZERO
                })
                .unwrap(),
                i
            );
        }
        let c4 = SystemSpec::cyclic_product(4, ALPHA).unwrap();
        let p = invariant_kernel_partition(&c4, 2).unwrap();
        assert_eq!(p.l, 2);
        assert_eq!(
            p.atom_of(&StatePoint::Cyclic {
                index: 3,
                x: Phase::ZERO
            })
            .unwrap(),
            1
        );
        assert!((p.atom_measures.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(invariant_kernel_partition(&SystemSpec::doubling(), 2).is_err());
    }

    #[test]
    fn atoms_are_invariant() {
        let c6 = SystemSpec::cyclic_product(6, ALPHA).unwrap();
        for s in 1..=12u64 {
            let p = invariant_kernel_partition(&c6, s).unwrap();
            for x in sample_invariant_measure(&c6, 20, s) {
                let y = crate::dynsys::transform_point(&c6, &x, s as i64).unwrap();
                assert_eq!(p.atom_of(&x).unwrap(), p.atom_of(&y).unwrap());
            }
        }
    }

    #[test]
    fn conditional_expectations() {
        let c2 = SystemSpec::cyclic_product(2, ALPHA).unwrap();
        let p = invariant_kernel_partition(&c2, 2).unwrap();
        let c = conditional_expectation_invariant(&c2, 2, &Observable::constant(0.7), &p).unwrap();
        assert!(same(&c2, &c, &Observable::constant(0.7), 1e-12));
        let f = obs("(fiber:0+-1*fiber:1)*cos:1");
        let e = conditional_expectation_invariant(&c2, 2, &f, &p).unwrap();
        assert!(same(&c2, &e, &Observable::zero(), 1e-12));
        let f = obs("fiber:0+-1*fiber:1");
        let e = conditional_expectation_invariant(&c2, 2, &f, &p).unwrap();
        assert!(same(&c2, &e, &f, 1e-12));
        assert!(conditional_expectation_invariant(&c2, 1, &f, &p).is_err());
    }

    #[test]
    fn kronecker_examples() {
        let d = SystemSpec::doubling();
        assert!(same(
            &d,
            &kronecker_projection(&d, &Observable::cos(1), 32).unwrap(),
            &Observable::zero(),
            1e-12
        ));
        let rot = SystemSpec::rotation(ALPHA).unwrap();
        let f = obs("cos:3*sin:1+0.2");
        assert_eq!(kronecker_projection(&rot, &f, 32).unwrap(), f);
        let skew = SystemSpec::skew_product(ALPHA).unwrap();
        let p = kronecker_projection(&skew, &obs("cos:1+cos:1@1"), 32).unwrap();
        assert!(same(&skew, &p, &Observable::cos(1), 1e-12), "{p}");
        let pp = kronecker_projection(&skew, &p, 32).unwrap();
        assert!(same(&skew, &p, &pp, 1e-10));
        assert!(kronecker_projection(&skew, &p, 64).is_err());
    }

    #[test]
    fn eigenbasis_relation() {
        let rot = SystemSpec::rotation(ALPHA).unwrap();
        let basis = EigenBasis::new(&rot, 4).unwrap();
        let x = StatePoint::Circle(Phase::from_f64(0.37));
        let tx = crate::dynsys::transform_point(&rot, &x, 1).unwrap();
        for e in &basis.entries {
            let b = e.function.bind(&rot).unwrap();
            assert!((b.eval(&tx).unwrap() - e.eigenvalue * b.eval(&x).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn resonance_examples() {
        let rot = SystemSpec::rotation(ALPHA).unwrap();
        let (f, r) = resonance_limit(&rot, &Observable::cos(1), &Observable::cos(1), 1, 2).unwrap();
        assert!(r.pairs.is_empty());
        assert!(same(&rot, &f, &Observable::zero(), 1e-15));
        let (f, r) = resonance_limit(&rot, &Observable::cos(2), &Observable::cos(1), 1, 2).unwrap();
        assert_eq!(r.pairs, vec![(-2, 1), (2, -1)]);
        assert!(same(&rot, &f, &Observable::cos(1).scale(0.5), 1e-14), "{f}");
        let (f, _) = resonance_limit(&rot, &Observable::one(), &Observable::one(), 1, 2).unwrap();
        assert!(same(&rot, &f, &Observable::one(), 1e-15));
        assert!(
            resonance_limit(&rot, &Observable::cos(1).shift(0), &obs("fiber:0"), 1, 2).is_err()
        );
    }

    #[test]
    fn projection_check_on_rotation_is_exact() {
        let rot = SystemSpec::rotation(ALPHA).unwrap();
        let xs = sample_invariant_measure(&rot, 4, 9);
        let r = characteristic_projection_check(
            &rot,
            &Observable::cos(1),
            &Observable::cos(2),
            1,
            2,
            &xs,
            500,
        )
        .unwrap();
        assert_eq!(r.max_gap, 0.0);
        let r = characteristic_projection_check(
            &rot,
            &Observable::zero(),
            &Observable::cos(2),
            1,
            2,
            &xs,
            500,
        )
        .unwrap();
        assert!(r.direct.iter().chain(&r.projected).all(|z| z.norm() == 0.0));
    }
}
