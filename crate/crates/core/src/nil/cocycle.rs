use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::exact::frac;

/// `a cos(2 pi k z) + b sin(2 pi k z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: i64,
    pub cos: f64,
    pub sin: f64,
}

/// A real function on the circle of the form
/// `slope * z + offset + sum of trigonometric terms`, read modulo one.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircleMap {
    pub slope: i64,
    pub offset: f64,
    #[serde(default)]
    pub terms: Vec<TrigTerm>,
}

impl CircleMap {
    pub fn zero() -> CircleMap {
        CircleMap::default()
    }

    pub fn affine(slope: i64, offset: f64) -> CircleMap {
        CircleMap {
            slope,
            offset,
            terms: Vec::new(),
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let trig: f64 = self
            .terms
            .iter()
            .map(|t| {
                let (s, c) = (TAU * frac(t.k as f64 * z)).sin_cos();
                t.cos * c + t.sin * s
            })
            .sum();
        self.slope as f64 * z + self.offset + trig
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClReport {
    pub max_residual: f64,
    pub worst_node: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

pub const CL_TOLERANCE: f64 = 1e-10;

/// Checks `rho(z + s) - rho(z) = f(z + alpha) - f(z) + c` modulo one on the
/// grid `j / nodes`.
pub fn cl_equation_check(
    alpha: f64,
    rho: &CircleMap,
    s: f64,
    f: &CircleMap,
    c: f64,
    nodes: usize,
) -> Result<ClReport> {
    if nodes == 0 {
        return Err(Error::InvalidArgument(
            "the check needs at least one grid node".into(),
        ));
    }
    if ![alpha, s, c, rho.offset, f.offset]
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(Error::InvalidArgument("non-finite parameter".into()));
    }
    let mut max_residual = 0.0f64;
    let mut worst_node = 0.0;
    for j in 0..nodes {
        let z = j as f64 / nodes as f64;
        let lhs = rho.eval(z + s) - rho.eval(z);
        let rhs = f.eval(z + alpha) - f.eval(z) + c;
        let r = dist_to_integer(lhs - rhs);
        if r > max_residual {
            max_residual = r;
            worst_node = z;
        }
    }
    Ok(ClReport {
        max_residual,
        worst_node,
        tolerance: CL_TOLERANCE,
        passed: max_residual <= CL_TOLERANCE,
    })
}
