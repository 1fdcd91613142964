use num_complex::Complex64;
use rayon::prelude::*;

use super::observable::Observable;
use super::point::{DoublingPoint, StatePoint};
use super::system::{SystemKind, SystemSpec};
use crate::defaults;
use crate::error::{Error, Result};
use crate::nil::HeisenbergPoint;
use crate::phase::Phase;
use crate::sum::pairwise_sum;

/// A tensor grid of equispaced nodes `j / n` on every circle coordinate,
/// times every point of the cyclic factor. Uniform weights make it exact
/// for trigonometric polynomials of degree below `n` in each coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureGrid {
    nodes_per_axis: u32,
}

impl QuadratureGrid {
    pub fn new(nodes_per_axis: u32) -> Result<QuadratureGrid> {
        if nodes_per_axis == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one node per axis".into(),
            ));
        }
        Ok(QuadratureGrid { nodes_per_axis })
    }

    pub fn default_for(sys: &SystemSpec) -> QuadratureGrid {
        let n = match sys.circle_dim() {
            1 => defaults::QUADRATURE_NODES,
            2 => defaults::QUADRATURE_NODES_2D,
            _ => defaults::QUADRATURE_NODES_3D,
        };
        QuadratureGrid { nodes_per_axis: n }
    }

    pub fn nodes_per_axis(&self) -> u32 {
        self.nodes_per_axis
    }

    /// Total number of nodes on `sys`.
    pub fn len(&self, sys: &SystemSpec) -> usize {
        let n = self.nodes_per_axis as usize;
        let circle = n.pow(sys.circle_dim() as u32);
        circle * sys.cyclic_order().unwrap_or(1) as usize
    }

    pub fn is_empty(&self, sys: &SystemSpec) -> bool {
        self.len(sys) == 0
    }

    pub fn weight(&self, sys: &SystemSpec) -> f64 {
        1.0 / self.len(sys) as f64
    }

    /// Node `i` in row-major order, the cyclic index varying slowest.
    pub fn point(&self, sys: &SystemSpec, i: usize) -> StatePoint {
        let n = self.nodes_per_axis as u64;
        let at = |j: u64| Phase::from_ratio(j, n);
        let i = i as u64;
        match sys.kind() {
            SystemKind::Rotation { .. } => StatePoint::Circle(at(i)),
            SystemKind::Doubling => StatePoint::Doubling(DoublingPoint::dyadic(at(i))),
            SystemKind::SkewProduct { .. } => StatePoint::Torus(at(i / n), at(i % n)),
            SystemKind::CyclicProduct { .. } => StatePoint::Cyclic {
                index: (i / n) as u32,
                x: at(i % n),
            },
            SystemKind::Heisenberg { .. } => {
                let c = |j: u64| j as f64 / n as f64;
                StatePoint::Heisenberg(HeisenbergPoint::new(
                    c(i / (n * n)),
                    c((i / n) % n),
                    c(i % n),
                ))
            }
        }
    }

    pub fn points(&self, sys: &SystemSpec) -> Vec<StatePoint> {
        (0..self.len(sys)).map(|i| self.point(sys, i)).collect()
    }
}

/// `integral f d mu` by the tensor quadrature.
pub fn integrate_observable(
    sys: &SystemSpec,
    f: &Observable,
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    let bound = f.bind(sys)?;
    let values: Vec<Complex64> = (0..grid.len(sys))
        .into_par_iter()
        .map(|i| bound.eval_unchecked(&grid.point(sys, i)))
        .collect();
    Ok(pairwise_sum(&values) * grid.weight(sys))
}
