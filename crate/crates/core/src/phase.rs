use serde::{Deserialize, Serialize};
use std::ops::{Add, Neg, Sub};

/// A point of the circle R/Z stored as a 64-bit binary fraction.
///
/// Rotations act by wrapping addition, so orbit arithmetic on circle
/// coordinates is exact and the group law holds bit for bit.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Phase(pub u64);

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;
const TWO_POW_M53: f64 = 1.0 / 9_007_199_254_740_992.0;

impl Phase {
    pub const ZERO: Phase = Phase(0);

    /// Reduces `x` modulo one.
    pub fn from_f64(x: f64) -> Phase {
        let f = x - x.floor();
        if f.is_nan() || f >= 1.0 {
            return Phase(0);
        }
        Phase((f * TWO_POW_64) as u64)
    }

    /// `j / q` rounded down to the 64-bit grid.
    pub fn from_ratio(j: u64, q: u64) -> Phase {
        debug_assert!(q > 0);
        let j = j % q;
        Phase((((j as u128) << 64) / q as u128) as u64)
    }

    /// Value in `[0, 1)`, truncated to 53 bits.
    pub fn to_f64(self) -> f64 {
        (self.0 >> 11) as f64 * TWO_POW_M53
    }

    pub fn mul_int(self, k: i64) -> Phase {
        Phase(self.0.wrapping_mul(k as u64))
    }

    /// Multiplies by an integer given modulo 2^64.
    pub fn mul_wide(self, k: i128) -> Phase {
        Phase(self.0.wrapping_mul(k as u64))
    }

    /// Distance to the nearest integer, in `[0, 1/2]`.
    pub fn circle_distance(self, other: Phase) -> f64 {
        let d = self.0.wrapping_sub(other.0);
        let d = d.min(d.wrapping_neg());
        d as f64 / TWO_POW_64
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase(self.0.wrapping_add(rhs.0))
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        Phase(self.0.wrapping_sub(rhs.0))
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase(self.0.wrapping_neg())
    }
}
