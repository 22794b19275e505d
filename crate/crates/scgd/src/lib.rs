//! Stochastic coordinate gradient descent (SCGD) with adaptive coordinate sampling.
//!
//! At each step the optimizer draws a coordinate ζ from a probability vector d,
//! estimates the partial derivative along that coordinate (exactly, or by
//! zeroth-order finite differences / random smoothing), and updates only that
//! coordinate. The coordinate distribution is either fixed (uniform, full) or
//! learned online by the MUSKETEER explore/exploit policy, which accumulates
//! per-coordinate gain statistics and re-weights sampling toward coordinates
//! that recently produced large gradients.
//!
//! Modules:
//! - [`objectives`]: ridge / logistic objectives over block-structured synthetic
//!   data, two 2-D toy problems, and exact solvers used as ground truth.
//! - [`gradients`]: first-order and zeroth-order gradient estimators with query
//!   accounting and smoothing-bias constants.
//! - [`policies`]: coordinate-sampling policies, including MUSKETEER.
//! - [`optimizer`]: step-size schedules, the SCGD loop, convergence-condition
//!   validation, and a non-asymptotic bound evaluator.
//! - [`bench`]: seeded multi-method experiments, CSV/SVG emission, and named
//!   reproduction profiles.
//! - [`cli`]: a thin command-line front end over `bench`.

pub mod bench;
pub mod cli;
mod error;
pub mod gradients;
pub mod objectives;
pub mod optimizer;
pub mod policies;
pub mod rng;

pub use error::ScgdError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, ScgdError>;
