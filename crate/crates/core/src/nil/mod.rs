//! The Heisenberg nilmanifold `G / Gamma` with `G` the upper unitriangular
//! real 3x3 matrices and `Gamma` the integer ones.
//!
//! Orbits of translations and polynomial sequences are generated from the
//! closed form of `g^n`, with every fractional part computed by compensated
//! integer-times-real products, so no error accumulates along an orbit.
//! Functions genuinely depending on the central coordinate are handled
//! through quadratic Weyl sums instead of observables.

mod cocycle;
mod group;
mod leibman;
mod weyl;

pub use cocycle::{cl_equation_check, CircleMap, ClReport, TrigTerm, CL_TOLERANCE};
pub use group::{
    group_multiply, group_power_closed_form, reduce_to_fundamental_domain, translate_power,
    GroupElement, HeisenbergPoint,
};
pub use leibman::{leibman_average, LeibmanSeries, PolynomialSequenceSpec};
pub use weyl::weyl_sum_average;
