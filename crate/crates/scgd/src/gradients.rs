//! Gradient estimators.
//!
//! Zeroth-order estimators only evaluate the mini-batch loss ℓ(·, ξ):
//!
//! - forward differences along coordinate k:  g⁽ᵏ⁾ = h⁻¹[ℓ(θ + h·eₖ, ξ) − ℓ(θ, ξ)]
//! - full forward-difference vector: the same formula for every coordinate,
//!   sharing the base evaluation ℓ(θ, ξ)
//! - random smoothing:  g = h⁻¹[ℓ(θ + h·U, ξ) − ℓ(θ, ξ)]·U with U standard
//!   Gaussian, or drawn uniformly on the unit sphere
//!
//! The first-order estimator returns the exact mini-batch gradient.
//!
//! Every sample carries `queries_used`, the number of loss evaluations
//! actually consumed. The benchmark layer separately normalizes budgets with
//! the 2-evaluations-per-coordinate convention so that full-vector and
//! per-coordinate methods are charged comparably at equal x-axis positions.
//!
//! For an L-smooth objective the smoothed gradient's bias obeys
//! ‖E[g_h] − ∇f‖ ≤ c·h with c = √C·L/2, where C = E‖U‖⁶: 1 for coordinate
//! differences and sphere directions, p(p+2)(p+4) for Gaussian directions.

use crate::objectives::{Objective, ParamVector};
use crate::{Result, ScgdError};
use rand_chacha::ChaCha8Rng;

/// Which estimator a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    FirstOrder,
    FiniteDifference,
    GaussianSmoothing,
    SphereSmoothing,
}

/// Estimator plus the mini-batch size m drawn per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub batch_size: usize,
}

/// Either a full estimate vector or a single coordinate's estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum GradientValues {
    Full(ParamVector),
    Coordinate { index: usize, value: f64 },
}

/// One gradient estimate with its query cost.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample {
    pub values: GradientValues,
    /// Loss evaluations consumed by this estimate (0 for first order).
    pub queries_used: u64,
    /// Smoothing step used (0 for first order).
    pub h_used: f64,
}

fn check_h(h: f64) -> Result<()> {
    if !h.is_finite() || h <= 0.0 {
        return Err(ScgdError::InvalidSmoothing(h));
    }
    Ok(())
}

fn check_coordinate(objective: &Objective, k: usize) -> Result<()> {
    if k >= objective.dim() {
        return Err(ScgdError::IndexOutOfRange { index: k, len: objective.dim() });
    }
    Ok(())
}

/// Forward difference along coordinate `k` of the mini-batch loss (2 queries).
pub fn fd_coordinate(
    objective: &Objective,
    theta: &ParamVector,
    k: usize,
    h: f64,
    batch: &[usize],
) -> Result<GradientSample> {
    check_h(h)?;
    check_coordinate(objective, k)?;
    let base = objective.sample_loss(theta, batch)?;
    let mut shifted = theta.clone();
    shifted[k] += h;
    let bumped = objective.sample_loss(&shifted, batch)?;
    Ok(GradientSample {
        values: GradientValues::Coordinate { index: k, value: (bumped - base) / h },
        queries_used: 2,
        h_used: h,
    })
}

/// Forward-difference vector over all p coordinates, sharing the base
/// evaluation (p + 1 queries).
pub fn fd_full(
    objective: &Objective,
    theta: &ParamVector,
    h: f64,
    batch: &[usize],
) -> Result<GradientSample> {
    check_h(h)?;
    let p = objective.dim();
    let base = objective.sample_loss(theta, batch)?;
    let mut values = ParamVector::zeros(p);
    let mut shifted = theta.clone();
    for k in 0..p {
        shifted[k] += h;
        values[k] = (objective.sample_loss(&shifted, batch)? - base) / h;
        shifted[k] = theta[k];
    }
    Ok(GradientSample {
        values: GradientValues::Full(values),
        queries_used: p as u64 + 1,
        h_used: h,
    })
}

/// Random-smoothing estimate h⁻¹[ℓ(θ + h·U, ξ) − ℓ(θ, ξ)]·U with U standard
/// Gaussian (2 queries).
pub fn gaussian_smoothing(
    objective: &Objective,
    theta: &ParamVector,
    h: f64,
    batch: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<GradientSample> {
    let u = ParamVector::from_vec(crate::rng::normal_vector(rng, objective.dim()));
    smoothing_with_direction(objective, theta, h, batch, u)
}

/// Random-smoothing estimate with U uniform on the unit sphere (2 queries).
pub fn sphere_smoothing(
    objective: &Objective,
    theta: &ParamVector,
    h: f64,
    batch: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<GradientSample> {
    let u = ParamVector::from_vec(crate::rng::sphere_vector(rng, objective.dim()));
    smoothing_with_direction(objective, theta, h, batch, u)
}

fn smoothing_with_direction(
    objective: &Objective,
    theta: &ParamVector,
    h: f64,
    batch: &[usize],
    u: ParamVector,
) -> Result<GradientSample> {
    check_h(h)?;
    let base = objective.sample_loss(theta, batch)?;
    let shifted = theta + h * &u;
    let bumped = objective.sample_loss(&shifted, batch)?;
    Ok(GradientSample {
        values: GradientValues::Full(((bumped - base) / h) * u),
        queries_used: 2,
        h_used: h,
    })
}

/// Exact mini-batch gradient (no loss queries; gradient evaluations are
/// tracked by the caller as one per batch element).
pub fn first_order(
    objective: &Objective,
    theta: &ParamVector,
    batch: &[usize],
) -> Result<GradientSample> {
    let g = objective.exact_gradient(theta, Some(batch))?;
    Ok(GradientSample { values: GradientValues::Full(g), queries_used: 0, h_used: 0.0 })
}

/// Bias constant c = √C·L/2 of ‖E[g_h] − ∇f‖ ≤ c·h for an L-smooth objective.
/// C = 1 for finite differences and sphere directions; C = p(p+2)(p+4) for
/// Gaussian directions; first order is unbiased.
pub fn bias_bound(smoothness: f64, kind: EstimatorKind, p: usize) -> f64 {
    let c_factor = match kind {
        EstimatorKind::FirstOrder => return 0.0,
        EstimatorKind::FiniteDifference | EstimatorKind::SphereSmoothing => 1.0,
        EstimatorKind::GaussianSmoothing => {
            let p = p as f64;
            p * (p + 2.0) * (p + 4.0)
        }
    };
    c_factor.sqrt() * smoothness / 2.0
}
