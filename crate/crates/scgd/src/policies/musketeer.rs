//! The MUSKETEER explore/exploit policy.
//!
//! The run is partitioned into rounds of T steps. During a round (explore)
//! the weights d are frozen; each step's sampled coordinate ζ contributes a
//! reweighted gain to the round accumulator
//!
//!   G̃⁽ᵏ⁾ += r(g⁽ᵏ⁾)/(T·d⁽ᵏ⁾)·1{ζ = k},   r = g, |g|, or g²,
//!
//! so E[G̃] recovers the chosen gradient statistic without selection bias.
//! When a round completes (exploit), the lifetime average gain is updated
//! online — Gₙ₊₁ = Gₙ + (G̃ − Gₙ)/(n+1), never reset — then normalized to a
//! probability vector φ(G) (ℓ1 or softmax) and mixed with the uniform vector:
//!
//!   d ← (1 − λₙ)·φ(G) + λₙ/p,
//!
//! which keeps every coordinate's probability at or above λₙ/p, the
//! exploration floor that step-size conditions rely on.

use super::ProbabilityWeights;
use crate::{Result, ScgdError};

/// Gain statistic accumulated per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainVariant {
    /// Signed gradient values (cancellation possible).
    Avg,
    /// Absolute gradient values.
    Abs,
    /// Squared gradient values.
    Sqr,
}

/// Map from average gains to a probability vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// |x⁽ᵏ⁾| / Σⱼ|x⁽ʲ⁾|; all-zero gains fall back to uniform.
    L1,
    /// exp(η·x⁽ᵏ⁾) / Σⱼ exp(η·x⁽ʲ⁾), computed with max subtraction.
    Softmax,
}

/// Exploration coefficient λₙ per exploitation round n (0-indexed).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSchedule {
    Constant(f64),
    /// min(1, 1/ln(n + e)) — equals 1 at round 0 and decays like 1/ln n.
    InverseLog,
}

impl LambdaSchedule {
    pub fn at_round(&self, n: u64) -> f64 {
        match *self {
            LambdaSchedule::Constant(lambda) => lambda,
            LambdaSchedule::InverseLog => (1.0 / (n as f64 + std::f64::consts::E).ln()).min(1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if let LambdaSchedule::Constant(lambda) = *self {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(ScgdError::LambdaOutOfRange(lambda));
            }
        }
        Ok(())
    }
}

/// Adaptive-policy configuration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MusketeerConfig {
    /// Steps per exploration round (T ≥ 1).
    pub exploration_len: usize,
    pub normalization: Normalization,
    /// Softmax temperature η > 0 (ignored by ℓ1).
    pub eta: f64,
    pub lambda: LambdaSchedule,
    pub gain_variant: GainVariant,
}

impl MusketeerConfig {
    /// The default round length T = max(1, ⌊√p⌋).
    pub fn default_exploration_len(p: usize) -> usize {
        ((p as f64).sqrt().floor() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.exploration_len == 0 {
            return Err(ScgdError::InvalidConfig("exploration_len must be ≥ 1".into()));
        }
        if !self.eta.is_finite() || self.eta <= 0.0 {
            return Err(ScgdError::InvalidConfig(format!("η must be positive, got {}", self.eta)));
        }
        self.lambda.validate()
    }
}

/// Gain accumulators: the lifetime average G and the in-progress round G̃.
#[derive(Debug, Clone, PartialEq)]
pub struct GainState {
    total: Vec<f64>,
    current: Vec<f64>,
    rounds: u64,
    variant: GainVariant,
}

impl GainState {
    pub fn new(p: usize, variant: GainVariant) -> Self {
        GainState { total: vec![0.0; p], current: vec![0.0; p], rounds: 0, variant }
    }

    /// Lifetime average gains G.
    pub fn total(&self) -> &[f64] {
        &self.total
    }

    /// Current-round accumulator G̃.
    pub fn current(&self) -> &[f64] {
        &self.current
    }

    /// Completed exploitation rounds n.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Largest |G⁽ᵏ⁾|.
    pub fn max_abs_total(&self) -> f64 {
        self.total.iter().fold(0.0, |acc, g| acc.max(g.abs()))
    }

    /// Add one step's contribution for sampled coordinate `k` with gradient
    /// estimate `g_k`, under sampling weights `weights` and round length
    /// `t_len`.
    pub fn accumulate(
        &mut self,
        weights: &ProbabilityWeights,
        k: usize,
        g_k: f64,
        t_len: usize,
    ) -> Result<()> {
        if k >= self.total.len() {
            return Err(ScgdError::IndexOutOfRange { index: k, len: self.total.len() });
        }
        let d_k = weights.get(k);
        if d_k <= 0.0 {
            return Err(ScgdError::ZeroSampledWeight { index: k });
        }
        let statistic = match self.variant {
            GainVariant::Avg => g_k,
            GainVariant::Abs => g_k.abs(),
            GainVariant::Sqr => g_k * g_k,
        };
        self.current[k] += statistic / d_k / t_len as f64;
        Ok(())
    }

    /// Fold the completed round into the lifetime average:
    /// G ← G + (G̃ − G)/(n+1), then reset G̃ and advance n.
    pub fn merge(&mut self) {
        let n1 = (self.rounds + 1) as f64;
        for (total, current) in self.total.iter_mut().zip(&mut self.current) {
            *total += (*current - *total) / n1;
            *current = 0.0;
        }
        self.rounds += 1;
    }
}

/// Normalize average gains to a probability vector.
pub fn normalize(gains: &[f64], normalization: Normalization, eta: f64) -> ProbabilityWeights {
    assert!(!gains.is_empty(), "gains must be non-empty");
    let p = gains.len();
    let weights = match normalization {
        Normalization::L1 => {
            let sum: f64 = gains.iter().map(|g| g.abs()).sum();
            if sum == 0.0 {
                return ProbabilityWeights::uniform(p);
            }
            gains.iter().map(|g| g.abs() / sum).collect()
        }
        Normalization::Softmax => {
            let max = gains.iter().map(|g| eta * g).fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = gains.iter().map(|g| (eta * g - max).exp()).collect();
            let sum: f64 = exps.iter().sum();
            exps.into_iter().map(|e| e / sum).collect()
        }
    };
    ProbabilityWeights::new(weights).expect("normalization lands on the simplex")
}

/// Mix a normalized gain vector with uniform: (1 − λ)·φ + λ/p.
pub fn mixture_update(phi: &ProbabilityWeights, lambda: f64) -> Result<ProbabilityWeights> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ScgdError::LambdaOutOfRange(lambda));
    }
    let p = phi.len() as f64;
    ProbabilityWeights::new(
        phi.as_slice().iter().map(|&w| (1.0 - lambda) * w + lambda / p).collect(),
    )
}

/// Serializable view of the adaptive policy's state.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolicyStateSnapshot {
    pub weights: Vec<f64>,
    pub gains: Vec<f64>,
    pub rounds: u64,
}

/// Runtime state of the adaptive policy: current weights, gain accumulators,
/// and the position within the exploration round.
#[derive(Debug, Clone)]
pub struct MusketeerState {
    config: MusketeerConfig,
    weights: ProbabilityWeights,
    gains: GainState,
    steps_in_round: usize,
}

impl MusketeerState {
    pub fn new(p: usize, config: MusketeerConfig) -> Result<Self> {
        config.validate()?;
        if p == 0 {
            return Err(ScgdError::InvalidConfig("dimension must be ≥ 1".into()));
        }
        Ok(MusketeerState {
            config,
            weights: ProbabilityWeights::uniform(p),
            gains: GainState::new(p, config.gain_variant),
            steps_in_round: 0,
        })
    }

    pub fn config(&self) -> &MusketeerConfig {
        &self.config
    }

    pub fn weights(&self) -> &ProbabilityWeights {
        &self.weights
    }

    pub fn gains(&self) -> &GainState {
        &self.gains
    }

    /// Record one explore step for sampled coordinate `k`; when this step
    /// completes the round, run the exploit update. Returns whether a round
    /// closed.
    pub fn record_step(&mut self, k: usize, g_k: f64) -> Result<bool> {
        self.gains.accumulate(&self.weights, k, g_k, self.config.exploration_len)?;
        self.steps_in_round += 1;
        if self.steps_in_round < self.config.exploration_len {
            return Ok(false);
        }
        // λₙ is indexed by the number of rounds completed before this one.
        let lambda = self.config.lambda.at_round(self.gains.rounds());
        self.gains.merge();
        let phi = normalize(self.gains.total(), self.config.normalization, self.config.eta);
        self.weights = mixture_update(&phi, lambda)?;
        self.steps_in_round = 0;
        Ok(true)
    }

    pub fn snapshot(&self) -> PolicyStateSnapshot {
        PolicyStateSnapshot {
            weights: self.weights.as_slice().to_vec(),
            gains: self.gains.total().to_vec(),
            rounds: self.gains.rounds(),
        }
    }
}
