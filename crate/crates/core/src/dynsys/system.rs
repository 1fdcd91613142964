use serde::{Deserialize, Serialize};

use super::point::StatePoint;
use crate::defaults;
use crate::error::{Error, Result};
use crate::exact::choose2;
use crate::nil::{self, GroupElement};
use crate::phase::Phase;

pub const MAX_POWER: i64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemKind {
    Rotation { alpha: f64 },
    SkewProduct { alpha: f64 },
    Doubling,
    CyclicProduct { q: u32, alpha: f64 },
    Heisenberg { a: f64, b: f64, c: f64 },
}

/// A validated model system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemKind", into = "SystemKind")]
pub struct SystemSpec {
    kind: SystemKind,
    description: String,
    step: Phase,
}

impl TryFrom<SystemKind> for SystemSpec {
    type Error = Error;
    fn try_from(kind: SystemKind) -> Result<Self> {
        SystemSpec::new(kind)
    }
}

impl From<SystemSpec> for SystemKind {
    fn from(s: SystemSpec) -> SystemKind {
        s.kind
    }
}

/// Rejects `alpha` when it equals some `p/q` with `q <= 10^6` to machine
/// precision.
pub fn check_irrational(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::InvalidSystem(format!(
            "rotation number {alpha} is not finite"
        )));
    }
    let x = alpha - alpha.floor();
    for q in 1..=defaults::MAX_RATIONAL_DENOMINATOR {
        let qx = q as f64 * x;
        let p = qx.round();
        if (qx - p).abs() <= 8.0 * f64::EPSILON * q as f64 {
            return Err(Error::RationalAlpha {
                alpha,
                p: p as i64 + alpha.floor() as i64 * q,
                q,
            });
        }
    }
    Ok(())
}

impl SystemSpec {
    pub fn new(kind: SystemKind) -> Result<SystemSpec> {
        let (description, step) = match &kind {
            SystemKind::Rotation { alpha } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(Error::InvalidSystem(format!(
                        "rotation number {alpha} must lie in (0, 1)"
                    )));
                }
                check_irrational(*alpha)?;
                (
                    format!("circle rotation by {alpha}"),
                    Phase::from_f64(*alpha),
                )
            }
            SystemKind::SkewProduct { alpha } => {
                check_irrational(*alpha)?;
                (
                    format!("skew product (z, u) -> (z + {alpha}, u + z) on the 2-torus"),
                    Phase::from_f64(*alpha),
                )
            }
            SystemKind::Doubling => ("doubling map x -> 2x mod 1".to_string(), Phase::ZERO),
            SystemKind::CyclicProduct { q, alpha } => {
                if *q < 2 {
                    return Err(Error::InvalidSystem(format!(
                        "cyclic order q = {q} must be >= 2"
                    )));
                }
                check_irrational(*alpha)?;
                (
                    format!("(i, x) -> (i + 1 mod {q}, x + {alpha})"),
                    Phase::from_f64(*alpha),
                )
            }
            SystemKind::Heisenberg { a, b, c } => {
                if !(a.is_finite() && b.is_finite() && c.is_finite()) {
                    return Err(Error::InvalidSystem(
                        "Heisenberg generator must be finite".into(),
                    ));
                }
                (
                    format!("translation by ({a}, {b}, {c}) on the Heisenberg nilmanifold"),
                    Phase::ZERO,
                )
            }
        };
        Ok(SystemSpec {
            kind,
            description,
            step,
        })
    }

    pub fn rotation(alpha: f64) -> Result<SystemSpec> {
        Self::new(SystemKind::Rotation { alpha })
    }

    pub fn skew_product(alpha: f64) -> Result<SystemSpec> {
        Self::new(SystemKind::SkewProduct { alpha })
    }

    pub fn doubling() -> SystemSpec {
        Self::new(SystemKind::Doubling).expect("doubling map is always valid")
    }

    pub fn cyclic_product(q: u32, alpha: f64) -> Result<SystemSpec> {
        Self::new(SystemKind::CyclicProduct { q, alpha })
    }

    pub fn heisenberg(a: f64, b: f64, c: f64) -> Result<SystemSpec> {
        Self::new(SystemKind::Heisenberg { a, b, c })
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Short lowercase name, as used on the command line.
    pub fn name(&self) -> &'static str {
        match self.kind {
            SystemKind::Rotation { .. } => "rotation",
            SystemKind::SkewProduct { .. } => "skew",
            SystemKind::Doubling => "doubling",
            SystemKind::CyclicProduct { .. } => "cyclic",
            SystemKind::Heisenberg { .. } => "heisenberg",
        }
    }

    /// Rotation number as a fixed-point phase (zero for systems without one).
    pub fn step(&self) -> Phase {
        self.step
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            SystemKind::Rotation { alpha }
            | SystemKind::SkewProduct { alpha }
            | SystemKind::CyclicProduct { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    /// Number of circle coordinates.
    pub fn circle_dim(&self) -> usize {
        match self.kind {
            SystemKind::Rotation { .. }
            | SystemKind::Doubling
            | SystemKind::CyclicProduct { .. } => 1,
            SystemKind::SkewProduct { .. } => 2,
            SystemKind::Heisenberg { .. } => 3,
        }
    }

    pub fn cyclic_order(&self) -> Option<u32> {
        match self.kind {
            SystemKind::CyclicProduct { q, .. } => Some(q),
            _ => None,
        }
    }

    pub fn is_invertible(&self) -> bool {
        !matches!(self.kind, SystemKind::Doubling)
    }

    pub(crate) fn generator(&self) -> Option<GroupElement> {
        match self.kind {
            SystemKind::Heisenberg { a, b, c } => Some(GroupElement::new(a, b, c)),
            _ => None,
        }
    }
}

/// `T^power(x)` by the closed form of each system.
pub fn transform_point(sys: &SystemSpec, x: &StatePoint, power: i64) -> Result<StatePoint> {
    if power.unsigned_abs() > MAX_POWER as u64 {
        return Err(Error::PowerOutOfRange(power as i128));
    }
    let alpha = sys.step;
    Ok(match (&sys.kind, x) {
        (SystemKind::Rotation { .. }, StatePoint::Circle(p)) => {
            StatePoint::Circle(*p + alpha.mul_int(power))
        }
        (SystemKind::SkewProduct { .. }, StatePoint::Torus(z, u)) => {
            let m = power as i128;
            StatePoint::Torus(
                *z + alpha.mul_int(power),
                *u + z.mul_int(power) + alpha.mul_wide(choose2(m)),
            )
        }
        (SystemKind::Doubling, StatePoint::Doubling(d)) => {
            if power < 0 {
                return Err(Error::NonInvertible(power));
            }
            StatePoint::Doubling(d.advanced(power as u64))
        }
        (SystemKind::CyclicProduct { q, .. }, StatePoint::Cyclic { index, x }) => {
            let q = *q as i128;
            let i = (*index as i128 + power as i128).rem_euclid(q) as u32;
            StatePoint::Cyclic {
                index: i,
                x: *x + alpha.mul_int(power),
            }
        }
        (SystemKind::Heisenberg { .. }, StatePoint::Heisenberg(h)) => {
            let g = sys.generator().expect("heisenberg generator");
            StatePoint::Heisenberg(nil::translate_power(&g, power, h)?)
        }
        _ => return Err(Error::PointMismatch(sys.name())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::point::DoublingPoint;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn rejects_rationals() {
        assert!(matches!(
            SystemSpec::rotation(0.25),
            Err(Error::RationalAlpha { p: 1, q: 4, .. })
        ));
        assert!(SystemSpec::rotation(355.0 / 113.0 - 3.0).is_err());
        assert!(SystemSpec::rotation(1.0 / 999_983.0).is_err());
        assert!(SystemSpec::rotation(golden()).is_ok());
        assert!(SystemSpec::rotation(2f64.sqrt() - 1.0).is_ok());
        assert!(SystemSpec::rotation(1.5).is_err());
        assert!(SystemSpec::cyclic_product(1, golden()).is_err());
        assert!(SystemSpec::skew_product(3.5).is_err());
    }

    #[test]
    fn rotation_powers() {
        let sys = SystemSpec::rotation(golden()).unwrap();
        let x = StatePoint::Circle(Phase::ZERO);
        assert_eq!(transform_point(&sys, &x, 0).unwrap(), x);
        let x = StatePoint::Circle(Phase::from_f64(0.1));
        let y = transform_point(&sys, &x, 2).unwrap();
        let expect = (0.1 + 2.0 * golden()).fract();
        assert!((y.coordinates()[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn skew_power_matches_threefold_composition() {
        let a = golden();
        let sys = SystemSpec::skew_product(a).unwrap();
        // oracle: compose (z, u) -> (z + a, u + z) three times in f64
        let (mut z, mut u) = (0.0f64, 0.0f64);
        for _ in 0..3 {
            let nz = (z + a).fract();
            u = (u + z).fract();
            z = nz;
        }
        let y = transform_point(&sys, &StatePoint::Torus(Phase::ZERO, Phase::ZERO), 3).unwrap();
        let c = y.coordinates();
        assert!((c[0] - z).abs() < 1e-14 && (c[1] - u).abs() < 1e-14);
        assert!((c[0] - (3.0 * a).fract()).abs() < 1e-14);
        assert!((c[1] - (3.0 * a).fract()).abs() < 1e-14);
    }

    #[test]
    fn skew_inverse() {
        let sys = SystemSpec::skew_product(golden()).unwrap();
        let x = StatePoint::Torus(Phase::from_f64(0.3), Phase::from_f64(0.7));
        let y = transform_point(&sys, &x, 17).unwrap();
        assert_eq!(transform_point(&sys, &y, -17).unwrap(), x);
    }

    #[test]
    fn doubling_rejects_negative_powers() {
        let sys = SystemSpec::doubling();
        let x = StatePoint::Doubling(DoublingPoint::dyadic(Phase::from_f64(0.375)));
        assert_eq!(transform_point(&sys, &x, -1), Err(Error::NonInvertible(-1)));
        let y = transform_point(&sys, &x, 1).unwrap();
        assert_eq!(y.coordinates()[0], 0.75);
    }

    #[test]
    fn power_range() {
        let sys = SystemSpec::rotation(golden()).unwrap();
        let x = StatePoint::Circle(Phase::ZERO);
        assert!(transform_point(&sys, &x, i64::MAX).is_err());
        assert!(transform_point(&sys, &x, MAX_POWER).is_ok());
    }

    #[test]
    fn cyclic_wraps_index() {
        let sys = SystemSpec::cyclic_product(3, golden()).unwrap();
        let x = StatePoint::Cyclic {
            index: 2,
            x: Phase::ZERO,
        };
        match transform_point(&sys, &x, -4).unwrap() {
            StatePoint::Cyclic { index, .. } => assert_eq!(index, 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn mismatched_point() {
        let sys = SystemSpec::doubling();
        assert!(transform_point(&sys, &StatePoint::Circle(Phase::ZERO), 1).is_err());
    }

    #[test]
    fn conversion_from_kind_validates() {
        assert!(SystemSpec::try_from(SystemKind::Rotation { alpha: 0.5 }).is_err());
        let s = SystemSpec::try_from(SystemKind::Doubling).unwrap();
        assert_eq!(SystemKind::from(s), SystemKind::Doubling);
    }
}
