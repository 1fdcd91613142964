//! Numerical laboratory for double-recurrence Wiener-Wintner averages.
//!
//! The crate is organised bottom-up:
//!
//! - [`dynsys`]: model measure-preserving systems, observables, orbits and
//!   quadrature of the invariant measure.
//! - [`trigpoly`]: weighted exponential sums and a certified supremum over
//!   the frequency.
//! - [`inequalities`]: executable van der Corput type inequalities.
//! - [`seminorms`]: truncated Gowers-Host-Kra, non-ergodic and
//!   Assani-Presser seminorm estimators.
//! - [`spectral`]: correlation sequences, the Wiener statistic and atoms.
//! - [`factors`]: invariant-set kernels, Kronecker projections and the
//!   eigenbasis resonance limit.
//! - [`wwdr`]: the `W_N` averages and the decay / bound experiments.
//! - [`nil`]: Heisenberg nilmanifold arithmetic, polynomial orbit averages,
//!   Weyl sums and the cocycle equation check.

pub mod defaults;
pub mod dynsys;
pub mod error;
pub mod exact;
pub mod factors;
pub mod inequalities;
pub mod nil;
pub mod phase;
pub mod rng;
pub mod seminorms;
pub mod spectral;
pub mod sum;
pub mod trigpoly;
pub mod wwdr;

pub use num_complex::Complex64;

pub use dynsys::{
    integrate_observable, orbit_observable_values, sample_invariant_measure, transform_point,
    BoundObservable, DoublingPoint, Observable, OrbitTable, QuadratureGrid, StatePoint, SystemKind,
    SystemSpec,
};
pub use error::{Error, Result};
pub use inequalities::InequalityReport;
pub use nil::{GroupElement, HeisenbergPoint};
pub use phase::Phase;
pub use seminorms::{SeminormEstimate, SeminormKind, TruncationParams};
pub use spectral::CorrelationSequence;
pub use trigpoly::{SupEstimate, WeightedExponentialSum};
pub use wwdr::{AveragingScheme, WWSeries};
