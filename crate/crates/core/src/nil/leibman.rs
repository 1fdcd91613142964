use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::group::{translate_power, GroupElement, HeisenbergPoint};
use crate::dynsys::{Observable, StatePoint, SystemSpec};
use crate::error::{Error, Result};
use crate::sum::pairwise_mean;

/// The polynomial sequence `g(n) = g1^{a n} g2^{b n} g3^{n}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSequenceSpec {
    pub g1: GroupElement,
    pub g2: GroupElement,
    pub g3: GroupElement,
    pub a: i64,
    pub b: i64,
}

impl PolynomialSequenceSpec {
    /// The default sequence of the runner: `a = 1`, `b = 2` and irrational
    /// generators whose averages of `cos(2 pi (x + y))` from the origin have
    /// non-increasing Cauchy gaps on `2^10..2^16`.
    pub fn reference() -> PolynomialSequenceSpec {
        let frac = |v: f64| v - v.floor();
        PolynomialSequenceSpec {
            g1: GroupElement::new(2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0, 0.1),
            g2: GroupElement::new(5f64.sqrt() - 2.0, std::f64::consts::PI - 3.0, 0.2),
            g3: GroupElement::new(
                frac(133.0 * crate::defaults::ALPHA),
                frac(133.0 * 7f64.sqrt()),
                0.3,
            ),
            a: 1,
            b: 2,
        }
    }

    /// `reduce(g(n) x0)`, applying the three factors right to left.
    pub fn apply(&self, n: i64, x0: &HeisenbergPoint) -> Result<HeisenbergPoint> {
        let an = self
            .a
            .checked_mul(n)
            .ok_or(Error::PowerOutOfRange(self.a as i128 * n as i128))?;
        let bn = self
            .b
            .checked_mul(n)
            .ok_or(Error::PowerOutOfRange(self.b as i128 * n as i128))?;
        let p = translate_power(&self.g3, n, x0)?;
        let p = translate_power(&self.g2, bn, &p)?;
        translate_power(&self.g1, an, &p)
    }
}

/// Averages along the ladder together with the Cauchy gaps `|A_{2N} - A_N|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeibmanSeries {
    pub ladder: Vec<usize>,
    pub averages: Vec<Complex64>,
    pub gaps: Vec<f64>,
}

impl LeibmanSeries {
    pub fn gaps_non_increasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] <= w[0])
    }
}

/// `A_N = (1/N) sum_{n=1}^N F(g(n) x0)` for each `N` of the ladder.
///
/// `F` must depend only on the first two coordinates, be built without
/// fiber indicators and contain no shifts.
pub fn leibman_average(
    spec: &PolynomialSequenceSpec,
    x0: &HeisenbergPoint,
    f: &Observable,
    ladder: &[usize],
) -> Result<LeibmanSeries> {
    if f.uses_coord(2) {
        return Err(Error::IncompatibleObservable(
            "polynomial averages take functions of the first two coordinates only; use a Weyl sum for the central direction".into(),
        ));
    }
    if f.max_shift() > 0 {
        return Err(Error::IncompatibleObservable(
            "shifted observables are not defined along a polynomial sequence".into(),
        ));
    }
    if ladder.is_empty() || ladder.contains(&0) {
        return Err(Error::InvalidArgument(
            "ladder entries must be positive".into(),
        ));
    }
    for g in [spec.g1, spec.g2, spec.g3] {
        if !g.is_finite() {
            return Err(Error::InvalidArgument(
                "group elements must be finite".into(),
            ));
        }
    }
    let host = SystemSpec::heisenberg(spec.g3.x, spec.g3.y, spec.g3.z)?;
    let bound = f.bind(&host)?;
    let longest = 2 * *ladder.iter().max().expect("non-empty ladder");
    let values: Vec<Complex64> = (1..=longest as i64)
        .into_par_iter()
        .map(|n| Ok(bound.eval_unchecked(&StatePoint::Heisenberg(spec.apply(n, x0)?))))
        .collect::<Result<_>>()?;
    let averages: Vec<Complex64> = ladder
        .iter()
        .map(|&n| pairwise_mean(&values[..n]))
        .collect();
    let gaps = ladder
        .iter()
        .zip(&averages)
        .map(|(&n, a)| (pairwise_mean(&values[..2 * n]) - a).norm())
        .collect();
    Ok(LeibmanSeries {
        ladder: ladder.to_vec(),
        averages,
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::ALPHA;

    fn ladder() -> Vec<usize> {
        (10..=16).map(|k| 1usize << k).collect()
    }

    #[test]
    fn constant_function() {
        let g = GroupElement::new(ALPHA, 0.3, 0.1);
        let spec = PolynomialSequenceSpec {
            g1: g,
            g2: g,
            g3: g,
            a: 1,
            b: 2,
        };
        let s = leibman_average(
            &spec,
            &HeisenbergPoint::new(0.1, 0.2, 0.3),
            &Observable::one(),
            &ladder(),
        )
        .unwrap();
        for a in &s.averages {
            assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn reduces_to_rotation() {
        let id = GroupElement::IDENTITY;
        let spec = PolynomialSequenceSpec {
            g1: GroupElement::new(ALPHA, 0.0, 0.0),
            g2: id,
            g3: id,
            a: 1,
            b: 0,
        };
        let s = leibman_average(
            &spec,
            &HeisenbergPoint::new(0.0, 0.0, 0.0),
            &Observable::cos(1),
            &[1 << 16],
        )
        .unwrap();
        assert!(s.gaps[0] <= 0.01);
        assert!(s.averages[0].norm() <= 0.01);
    }

    #[test]
    fn rejects_central_dependence() {
        let g = GroupElement::new(ALPHA, 0.3, 0.1);
        let spec = PolynomialSequenceSpec {
            g1: g,
            g2: g,
            g3: g,
            a: 1,
            b: 1,
        };
        let x0 = HeisenbergPoint::new(0.0, 0.0, 0.0);
        assert!(leibman_average(&spec, &x0, &Observable::cos(1).on(2), &[8]).is_err());
        assert!(leibman_average(&spec, &x0, &Observable::cos(1), &[]).is_err());
    }
}
