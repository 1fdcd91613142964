//! Model measure-preserving systems.
//!
//! Five concrete systems are provided, each with a closed-form power map:
//! circle rotation, the skew product `(z, u) -> (z + alpha, u + z)` on the
//! 2-torus, the doubling map realised as a shift on a seeded bit stream, a
//! cyclic permutation crossed with a rotation, and a translation on the
//! Heisenberg nilmanifold.

mod observable;
mod orbit;
mod point;
mod quadrature;
mod system;

pub use observable::{BoundObservable, Observable};
pub use orbit::{orbit_observable_values, OrbitTable};
pub(crate) use point::sample_stream;
pub use point::{sample_invariant_measure, BitSource, DoublingPoint, StatePoint};
pub use quadrature::{integrate_observable, QuadratureGrid};
pub use system::{check_irrational, transform_point, SystemKind, SystemSpec, MAX_POWER};
