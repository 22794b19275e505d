//! The SCGD loop: step-size and smoothing schedules, the single-coordinate
//! update rule, deterministic seeded runs with checkpointing, and the
//! round-based driver for adaptive sampling.
//!
//! One step at time t (1-indexed) draws a mini-batch ξ from the data stream,
//! a coordinate ζ from the coordinate stream according to the current weights
//! d, estimates the partial derivative g⁽ᶻ⁾ at θₜ₋₁, and applies
//!
//!   θₜ⁽ᵏ⁾ = θₜ₋₁⁽ᵏ⁾ − γₜ·g⁽ᵏ⁾   iff k = ζ,
//!
//! leaving every other coordinate untouched (the `Full` policy instead moves
//! all coordinates along the full estimate). Adaptive policies additionally
//! feed the raw g⁽ᶻ⁾ into their gain statistics; importance-weighted variants
//! rescale only the applied update, never the recorded gain.

pub mod bound;
pub mod conditions;

pub use bound::{gap_upper_bound, power_mean_scale, BoundConstants};
pub use conditions::{validate_conditions, ConditionReport, ConditionStatus, FloorSchedule};

use crate::gradients::{
    fd_coordinate, fd_full, first_order, gaussian_smoothing, sphere_smoothing, EstimatorKind,
    EstimatorSpec, GradientValues,
};
use crate::objectives::{Objective, ParamVector};
use crate::policies::{
    descent_direction, sample_coordinate, IsScaling, MusketeerConfig, MusketeerState, PolicyKind,
    PolicyStateSnapshot, ProbabilityWeights,
};
use crate::rng::{self, streams};
use crate::{Result, ScgdError};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Step-size family γₜ, evaluated at integer step indices.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSizeForm {
    /// γₜ = γ/(t + k₀).
    PolyOffset { gamma: f64, k0: f64 },
    /// γₜ = γ·t^{−α} with α ∈ [0, 1]; α = 0 is a constant step.
    Poly { gamma: f64, alpha: f64 },
}

/// Smoothing step hₜ used by zeroth-order estimators.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingRule {
    /// hₜ = √γₜ, which keeps hₜ² = γₜ.
    SqrtGamma,
    /// Fixed hₜ = h.
    Constant(f64),
}

/// Step-size plus smoothing schedule.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Schedule {
    pub step: StepSizeForm,
    pub smoothing: SmoothingRule,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        match self.step {
            StepSizeForm::PolyOffset { gamma, k0 } => {
                if !gamma.is_finite() || gamma <= 0.0 {
                    return Err(ScgdError::InvalidConfig(format!(
                        "step scale γ must be positive, got {gamma}"
                    )));
                }
                if !k0.is_finite() || k0 < 0.0 {
                    return Err(ScgdError::InvalidConfig(format!(
                        "step offset k0 must be non-negative, got {k0}"
                    )));
                }
            }
            StepSizeForm::Poly { gamma, alpha } => {
                if !gamma.is_finite() || gamma <= 0.0 {
                    return Err(ScgdError::InvalidConfig(format!(
                        "step scale γ must be positive, got {gamma}"
                    )));
                }
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(ScgdError::InvalidConfig(format!(
                        "step exponent α must lie in [0, 1], got {alpha}"
                    )));
                }
            }
        }
        if let SmoothingRule::Constant(h) = self.smoothing {
            if !h.is_finite() || h <= 0.0 {
                return Err(ScgdError::InvalidSmoothing(h));
            }
        }
        Ok(())
    }

    /// γₜ. The polynomial form without offset is defined for t ≥ 1 when α > 0.
    pub fn gamma_at(&self, t: u64) -> f64 {
        match self.step {
            StepSizeForm::PolyOffset { gamma, k0 } => gamma / (t as f64 + k0),
            StepSizeForm::Poly { gamma, alpha } => {
                if alpha == 0.0 {
                    gamma
                } else {
                    gamma * (t as f64).powf(-alpha)
                }
            }
        }
    }

    /// hₜ.
    pub fn h_at(&self, t: u64) -> f64 {
        match self.smoothing {
            SmoothingRule::SqrtGamma => self.gamma_at(t).sqrt(),
            SmoothingRule::Constant(h) => h,
        }
    }
}

/// Tunables that do not change the optimization path.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunOptions {
    /// Abort with [`ScgdError::Diverged`] when a checkpoint value exceeds this
    /// factor times the initial objective value.
    pub divergence_factor: f64,
    /// Record elapsed milliseconds at checkpoints. Off by default so that
    /// emitted records are byte-identical across machines and repetitions.
    pub record_wall_time: bool,
    /// Keep a copy of the sampling weights after every exploitation round.
    pub record_weight_history: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            divergence_factor: 1e6,
            record_wall_time: false,
            record_weight_history: false,
        }
    }
}

/// Everything a seeded run needs.
#[derive(Debug, Clone)]
pub struct RunConfig<'a> {
    pub objective: &'a Objective,
    pub estimator: EstimatorSpec,
    pub policy: PolicyKind,
    /// Required for adaptive policies, ignored otherwise.
    pub musketeer: Option<MusketeerConfig>,
    pub scaling: IsScaling,
    pub schedule: Schedule,
    pub theta0: ParamVector,
    pub seed: u64,
    pub options: RunOptions,
}

/// Objective value and query budget at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointRow {
    pub step: u64,
    /// Conventional query count: 2 per directional zeroth-order estimate, 2p
    /// per full finite-difference step, batch size per first-order call.
    pub queries: u64,
    pub value: f64,
    /// 0 unless `record_wall_time` was set.
    pub wall_ms: u64,
}

/// Result of a seeded run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub checkpoints: Vec<CheckpointRow>,
    pub final_theta: ParamVector,
    pub initial_value: f64,
    /// Terminal sampling state for adaptive policies.
    pub policy: Option<PolicyStateSnapshot>,
    /// Weights after each exploitation round, when recorded.
    pub weight_history: Vec<Vec<f64>>,
    /// Actual loss evaluations (p + 1 per full finite-difference step, 2 per
    /// directional estimate) — the honest counterpart of the conventional
    /// `queries` column.
    pub loss_queries: u64,
    /// Exact per-sample gradient evaluations (first-order runs only).
    pub grad_evals: u64,
}

/// Incremental SCGD driver. [`run`] wraps it; examples can also step it by
/// hand to watch θ and the sampling weights evolve.
pub struct Runner<'a> {
    objective: &'a Objective,
    estimator: EstimatorSpec,
    policy: PolicyKind,
    scaling: IsScaling,
    schedule: Schedule,
    options: RunOptions,
    theta: ParamVector,
    t: u64,
    uniform: ProbabilityWeights,
    musketeer: Option<MusketeerState>,
    coordinate_rng: ChaCha8Rng,
    data_rng: ChaCha8Rng,
    smoothing_rng: ChaCha8Rng,
    queries: u64,
    loss_queries: u64,
    grad_evals: u64,
    weight_history: Vec<Vec<f64>>,
}

impl<'a> Runner<'a> {
    pub fn new(config: &RunConfig<'a>) -> Result<Self> {
        let p = config.objective.dim();
        if config.theta0.len() != p {
            return Err(ScgdError::DimensionMismatch { expected: p, got: config.theta0.len() });
        }
        if config.theta0.iter().any(|v| !v.is_finite()) {
            return Err(ScgdError::InvalidConfig("θ0 has non-finite entries".into()));
        }
        let n = config.objective.sample_count();
        let m = config.estimator.batch_size;
        if m == 0 || m > n {
            return Err(ScgdError::InvalidConfig(format!(
                "batch size must lie in 1..={n}, got {m}"
            )));
        }
        config.schedule.validate()?;
        if !config.options.divergence_factor.is_finite() || config.options.divergence_factor <= 0.0
        {
            return Err(ScgdError::InvalidConfig(format!(
                "divergence factor must be positive, got {}",
                config.options.divergence_factor
            )));
        }
        let musketeer = if config.policy.is_adaptive() {
            let cfg = config.musketeer.ok_or_else(|| {
                ScgdError::InvalidConfig("adaptive policies need a musketeer configuration".into())
            })?;
            Some(MusketeerState::new(p, cfg)?)
        } else {
            None
        };
        Ok(Runner {
            objective: config.objective,
            estimator: config.estimator,
            policy: config.policy,
            scaling: config.scaling,
            schedule: config.schedule,
            options: config.options,
            theta: config.theta0.clone(),
            t: 0,
            uniform: ProbabilityWeights::uniform(p),
            musketeer,
            coordinate_rng: rng::stream(config.seed, streams::COORDINATE),
            data_rng: rng::stream(config.seed, streams::DATA),
            smoothing_rng: rng::stream(config.seed, streams::SMOOTHING),
            queries: 0,
            loss_queries: 0,
            grad_evals: 0,
            weight_history: Vec::new(),
        })
    }

    /// Completed steps.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn theta(&self) -> &ParamVector {
        &self.theta
    }

    /// Conventional query count so far (see [`CheckpointRow::queries`]).
    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Sampling weights the next step will draw from.
    pub fn current_weights(&self) -> &ProbabilityWeights {
        match &self.musketeer {
            Some(state) => state.weights(),
            None => &self.uniform,
        }
    }

    pub fn musketeer(&self) -> Option<&MusketeerState> {
        self.musketeer.as_ref()
    }

    /// f(θ) over the full dataset.
    pub fn objective_value(&self) -> Result<f64> {
        self.objective.full_objective(&self.theta)
    }

    /// Advance one step.
    pub fn step(&mut self) -> Result<()> {
        let s = self.t + 1;
        let gamma = self.schedule.gamma_at(s);
        let h = self.schedule.h_at(s);
        let batch = rng::distinct_indices(
            &mut self.data_rng,
            self.objective.sample_count(),
            self.estimator.batch_size,
        );

        if self.policy == PolicyKind::Full {
            self.full_step(s, gamma, h, &batch)?;
        } else {
            self.coordinate_step(s, gamma, h, &batch)?;
        }
        self.t = s;
        Ok(())
    }

    fn full_step(&mut self, s: u64, gamma: f64, h: f64, batch: &[usize]) -> Result<()> {
        let p = self.objective.dim();
        let sample = match self.estimator.kind {
            EstimatorKind::FirstOrder => {
                self.grad_evals += batch.len() as u64;
                first_order(self.objective, &self.theta, batch)?
            }
            EstimatorKind::FiniteDifference => fd_full(self.objective, &self.theta, h, batch)?,
            EstimatorKind::GaussianSmoothing => {
                gaussian_smoothing(self.objective, &self.theta, h, batch, &mut self.smoothing_rng)?
            }
            EstimatorKind::SphereSmoothing => {
                sphere_smoothing(self.objective, &self.theta, h, batch, &mut self.smoothing_rng)?
            }
        };
        self.loss_queries += sample.queries_used;
        self.queries += match self.estimator.kind {
            EstimatorKind::FirstOrder => batch.len() as u64,
            EstimatorKind::FiniteDifference => 2 * p as u64,
            _ => 2,
        };
        let GradientValues::Full(g) = sample.values else {
            unreachable!("full estimators return full vectors");
        };
        self.theta.axpy(-gamma, &g, 1.0);
        if self.theta.iter().any(|v| !v.is_finite()) {
            return Err(ScgdError::NonFiniteObjective { step: s });
        }
        Ok(())
    }

    fn coordinate_step(&mut self, s: u64, gamma: f64, h: f64, batch: &[usize]) -> Result<()> {
        let u = self.coordinate_rng.random::<f64>();
        let k = sample_coordinate(self.current_weights(), u)?;

        let (g_k, actual, conventional) = match self.estimator.kind {
            EstimatorKind::FirstOrder => {
                let sample = first_order(self.objective, &self.theta, batch)?;
                self.grad_evals += batch.len() as u64;
                let GradientValues::Full(g) = sample.values else { unreachable!() };
                (g[k], 0, batch.len() as u64)
            }
            EstimatorKind::FiniteDifference => {
                let sample = fd_coordinate(self.objective, &self.theta, k, h, batch)?;
                let GradientValues::Coordinate { value, .. } = sample.values else {
                    unreachable!()
                };
                (value, sample.queries_used, 2)
            }
            EstimatorKind::GaussianSmoothing | EstimatorKind::SphereSmoothing => {
                let sample = if self.estimator.kind == EstimatorKind::GaussianSmoothing {
                    gaussian_smoothing(self.objective, &self.theta, h, batch, &mut self.smoothing_rng)?
                } else {
                    sphere_smoothing(self.objective, &self.theta, h, batch, &mut self.smoothing_rng)?
                };
                let GradientValues::Full(g) = sample.values else { unreachable!() };
                (g[k], sample.queries_used, 2)
            }
        };
        self.loss_queries += actual;
        self.queries += conventional;

        let update = descent_direction(self.policy, self.current_weights(), k, g_k, self.scaling)?;
        self.theta[update.index] -= gamma * update.coefficient;
        if !self.theta[update.index].is_finite() {
            return Err(ScgdError::NonFiniteObjective { step: s });
        }

        // Gains always see the raw partial derivative, not the rescaled move.
        if let Some(state) = &mut self.musketeer {
            let closed_round = state.record_step(k, g_k)?;
            if closed_round && self.options.record_weight_history {
                self.weight_history.push(state.weights().as_slice().to_vec());
            }
        }
        Ok(())
    }
}

/// Run SCGD to the last checkpoint, recording f(θ) at every checkpoint step.
/// `checkpoints` must be strictly increasing; a leading 0 records the initial
/// value. Divergence and non-finite values abort the run with diagnostics.
pub fn run(config: &RunConfig, checkpoints: &[u64]) -> Result<Trajectory> {
    if checkpoints.is_empty() {
        return Err(ScgdError::InvalidConfig("at least one checkpoint step is required".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ScgdError::InvalidConfig("checkpoints must be strictly increasing".into()));
    }

    let mut runner = Runner::new(config)?;
    let start = Instant::now();
    let initial_value = runner.objective_value()?;
    if !initial_value.is_finite() {
        return Err(ScgdError::NonFiniteObjective { step: 0 });
    }
    let factor = config.options.divergence_factor;
    let threshold = if initial_value > 0.0 { factor * initial_value } else { factor };

    let mut rows = Vec::with_capacity(checkpoints.len());
    for &mark in checkpoints {
        while runner.t() < mark {
            runner.step()?;
        }
        let value = runner.objective_value()?;
        if !value.is_finite() {
            return Err(ScgdError::NonFiniteObjective { step: mark });
        }
        if value > threshold {
            return Err(ScgdError::Diverged { step: mark, value, initial: initial_value, factor });
        }
        rows.push(CheckpointRow {
            step: mark,
            queries: runner.queries(),
            value,
            wall_ms: if config.options.record_wall_time {
                start.elapsed().as_millis() as u64
            } else {
                0
            },
        });
    }

    Ok(Trajectory {
        checkpoints: rows,
        final_theta: runner.theta.clone(),
        initial_value,
        policy: runner.musketeer.as_ref().map(MusketeerState::snapshot),
        weight_history: std::mem::take(&mut runner.weight_history),
        loss_queries: runner.loss_queries,
        grad_evals: runner.grad_evals,
    })
}

/// Run the adaptive policy for a whole number of explore/exploit rounds and
/// keep the weight trajectory. With `rounds = 0` the run is a no-op that
/// reports θ0 and uniform weights.
#[allow(clippy::too_many_arguments)]
pub fn run_musketeer(
    objective: &Objective,
    estimator: EstimatorSpec,
    config: MusketeerConfig,
    schedule: Schedule,
    rounds: u64,
    seed: u64,
    theta0: ParamVector,
) -> Result<Trajectory> {
    config.validate()?;
    let total = rounds * config.exploration_len as u64;
    let run_config = RunConfig {
        objective,
        estimator,
        policy: PolicyKind::Musketeer,
        musketeer: Some(config),
        scaling: IsScaling::OverP,
        schedule,
        theta0,
        seed,
        options: RunOptions { record_weight_history: true, ..RunOptions::default() },
    };
    let checkpoints = if total == 0 { vec![0] } else { vec![0, total] };
    run(&run_config, &checkpoints)
}
