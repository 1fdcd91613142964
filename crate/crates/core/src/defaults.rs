//! Default parameters shared by the library and the command line runner.
//!
//! | name                    | value          |
//! |-------------------------|----------------|
//! | rotation number         | (sqrt 5 - 1)/2 |
//! | quadrature nodes (1-d)  | 2^12           |
//! | quadrature nodes (2-d)  | 2^7 per axis   |
//! | quadrature nodes (3-d)  | 2^5 per axis   |
//! | oversampling factor     | 32             |
//! | samples                 | 32             |
//! | bound constant C        | 16             |
//! | decay threshold         | 0.15           |
//! | eigenbasis cutoff J     | 32             |
//! | atom threshold          | 0.02           |

/// Golden mean conjugate.
pub const ALPHA: f64 = 0.618_033_988_749_894_8;

pub const QUADRATURE_NODES: u32 = 1 << 12;
pub const QUADRATURE_NODES_2D: u32 = 1 << 7;
pub const QUADRATURE_NODES_3D: u32 = 1 << 5;

pub const OVERSAMPLING: usize = 32;
pub const MIN_OVERSAMPLING: usize = 8;

pub const SAMPLES: usize = 32;

/// Unquantified constant of the uniform bounds, used for verdicts.
pub const BOUND_CONSTANT: f64 = 16.0;

/// Final-median threshold of the decay verdict.
pub const DECAY_THRESHOLD: f64 = 0.15;

pub const EIGEN_CUTOFF: i64 = 32;

pub const ATOM_THRESHOLD: f64 = 0.02;

/// Relative tolerance of theorem-true inequality verdicts.
pub const VERDICT_TOLERANCE: f64 = 1e-12;

/// Slack for comparisons between two truncated limit estimates.
pub const ESTIMATE_SLACK: f64 = 0.05;

/// Largest denominator probed when rejecting rational rotation numbers.
pub const MAX_RATIONAL_DENOMINATOR: i64 = 1_000_000;

pub const MASTER_SEED: u64 = 0x5757_4c41_4221;
