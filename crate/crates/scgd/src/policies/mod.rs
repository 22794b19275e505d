//! Coordinate-sampling policies.
//!
//! A policy supplies, at every step, a probability vector d over the p
//! coordinates; the optimizer draws ζ ~ d and updates that coordinate alone.
//! `Full` is the degenerate policy that updates every coordinate. The
//! adaptive policy lives in [`musketeer`].

pub mod musketeer;

pub use musketeer::{
    mixture_update, normalize, GainState, GainVariant, LambdaSchedule, MusketeerConfig,
    MusketeerState, Normalization, PolicyStateSnapshot,
};

use crate::{Result, ScgdError};

/// Which sampling policy drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Update all coordinates each step.
    Full,
    /// ζ uniform on [p], plain coordinate update.
    Uniform,
    /// ζ uniform on [p], importance-reweighted update.
    UniformIs,
    /// Adaptive explore/exploit weights, plain coordinate update.
    Musketeer,
    /// Adaptive weights, importance-reweighted update.
    MusketeerIs,
}

impl PolicyKind {
    /// Whether the update divides by the sampled probability.
    pub fn is_importance_weighted(self) -> bool {
        matches!(self, PolicyKind::UniformIs | PolicyKind::MusketeerIs)
    }

    /// Whether the policy adapts its weights from observed gradients.
    pub fn is_adaptive(self) -> bool {
        matches!(self, PolicyKind::Musketeer | PolicyKind::MusketeerIs)
    }
}

/// Scaling convention for importance-reweighted updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsScaling {
    /// g⁽ᵏ⁾/(p·d⁽ᵏ⁾): unbiased for ∇f/p, and identical to the plain uniform
    /// update when d is uniform, so the reweighted and plain baselines are
    /// step-for-step comparable.
    #[default]
    OverP,
    /// g⁽ᵏ⁾/d⁽ᵏ⁾: unbiased for ∇f itself.
    Raw,
}

/// A probability vector over coordinates: non-negative entries summing to 1
/// within 1e−9.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProbabilityWeights(Vec<f64>);

impl ProbabilityWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(ScgdError::InvalidConfig("weights must be non-empty".into()));
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ScgdError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ScgdError::WeightsOffSimplex { sum });
        }
        Ok(ProbabilityWeights(weights))
    }

    /// The uniform vector (1/p, …, 1/p).
    pub fn uniform(p: usize) -> Self {
        assert!(p > 0, "dimension must be positive");
        ProbabilityWeights(vec![1.0 / p as f64; p])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Smallest entry — the exploration floor β appearing in step-size
    /// conditions.
    pub fn min_weight(&self) -> f64 {
        self.0.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Inverse-CDF draw from `weights`: the smallest k whose cumulative sum
/// strictly exceeds u. Zero-weight coordinates are never selected; if
/// accumulated rounding leaves u at or above the total mass, the last
/// positive-weight coordinate is returned.
pub fn sample_coordinate(weights: &ProbabilityWeights, u: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&u) {
        return Err(ScgdError::InvalidConfig(format!("u must lie in [0, 1), got {u}")));
    }
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for (k, &w) in weights.as_slice().iter().enumerate() {
        if w > 0.0 {
            last_positive = Some(k);
        }
        cumulative += w;
        if cumulative > u {
            return Ok(k);
        }
    }
    last_positive.ok_or(ScgdError::WeightsOffSimplex { sum: 0.0 })
}

/// The coordinate update chosen by a (non-`Full`) policy: the step subtracts
/// γ·coefficient from θ at `index` and leaves every other coordinate intact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateUpdate {
    pub index: usize,
    pub coefficient: f64,
}

/// Update vector for the sampled coordinate `k` with partial-derivative
/// estimate `g_k`. Plain policies use the estimate as is; importance-weighted
/// policies divide by the sampled probability per `scaling`.
pub fn descent_direction(
    kind: PolicyKind,
    weights: &ProbabilityWeights,
    k: usize,
    g_k: f64,
    scaling: IsScaling,
) -> Result<CoordinateUpdate> {
    if k >= weights.len() {
        return Err(ScgdError::IndexOutOfRange { index: k, len: weights.len() });
    }
    let coefficient = match kind {
        PolicyKind::Full => {
            return Err(ScgdError::InvalidConfig(
                "the full policy updates every coordinate; no sampled direction exists".into(),
            ))
        }
        PolicyKind::Uniform | PolicyKind::Musketeer => g_k,
        PolicyKind::UniformIs | PolicyKind::MusketeerIs => {
            let d_k = weights.get(k);
            if d_k <= 0.0 {
                return Err(ScgdError::ZeroSampledWeight { index: k });
            }
            match scaling {
                IsScaling::OverP => g_k / (weights.len() as f64 * d_k),
                IsScaling::Raw => g_k / d_k,
            }
        }
    };
    Ok(CoordinateUpdate { index: k, coefficient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weights_are_validated() {
        assert!(ProbabilityWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            ProbabilityWeights::new(vec![0.5, 0.6]),
            Err(ScgdError::WeightsOffSimplex { .. })
        ));
        assert!(matches!(
            ProbabilityWeights::new(vec![-0.1, 1.1]),
            Err(ScgdError::NegativeWeight { .. })
        ));
        assert!(ProbabilityWeights::new(vec![]).is_err());
        let u = ProbabilityWeights::uniform(4);
        assert_eq!(u.as_slice(), &[0.25; 4]);
        assert_eq!(u.min_weight(), 0.25);
    }

    #[test]
    fn degenerate_mass_always_selects_its_coordinate() {
        let w = ProbabilityWeights::new(vec![1.0, 0.0, 0.0]).unwrap();
        for u in [0.0, 0.3, 0.999_999] {
            assert_eq!(sample_coordinate(&w, u).unwrap(), 0);
        }
    }

    #[test]
    fn inverse_cdf_boundaries_are_strict() {
        let w = ProbabilityWeights::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(sample_coordinate(&w, 0.29).unwrap(), 0);
        assert_eq!(sample_coordinate(&w, 0.31).unwrap(), 1);
        // At u exactly on the boundary the first interval [0, 0.3) is closed
        // on the right against selection.
        assert_eq!(sample_coordinate(&w, 0.3).unwrap(), 1);
        assert!(sample_coordinate(&w, 1.0).is_err());
        assert!(sample_coordinate(&w, -0.1).is_err());
    }

    #[test]
    fn zero_weight_coordinates_are_skipped() {
        let w = ProbabilityWeights::new(vec![0.3, 0.0, 0.7]).unwrap();
        for i in 0..1000 {
            let u = i as f64 / 1000.0;
            assert_ne!(sample_coordinate(&w, u).unwrap(), 1);
        }
    }

    #[test]
    fn sampling_frequencies_match_weights() {
        let w = ProbabilityWeights::new(vec![0.2, 0.5, 0.3]).unwrap();
        let mut rng = crate::rng::stream(17, 0);
        let draws = 100_000;
        let mut counts = [0u64; 3];
        for _ in 0..draws {
            counts[sample_coordinate(&w, rand::Rng::random(&mut rng)).unwrap()] += 1;
        }
        for k in 0..3 {
            let freq = counts[k] as f64 / draws as f64;
            let d = w.get(k);
            let se = (d * (1.0 - d) / draws as f64).sqrt();
            assert!((freq - d).abs() < 5.0 * se, "coordinate {k}: {freq} vs {d}");
        }
    }

    #[test]
    fn plain_direction_masks_the_sampled_coordinate() {
        // d = uniform over p = 2, sampled k = 2 (index 1), g = (5, 3): the
        // update is (0, 3).
        let w = ProbabilityWeights::uniform(2);
        let update = descent_direction(PolicyKind::Uniform, &w, 1, 3.0, IsScaling::OverP).unwrap();
        assert_eq!(update, CoordinateUpdate { index: 1, coefficient: 3.0 });
    }

    #[test]
    fn importance_direction_divides_by_p_times_weight() {
        // d = (0.8, 0.2), sampled k = 2 (index 1), g = (5, 3):
        // 3/(2·0.2) = 7.5.
        let w = ProbabilityWeights::new(vec![0.8, 0.2]).unwrap();
        let update =
            descent_direction(PolicyKind::MusketeerIs, &w, 1, 3.0, IsScaling::OverP).unwrap();
        assert_eq!(update, CoordinateUpdate { index: 1, coefficient: 7.5 });
        // Raw scaling keeps the plain 1/d reweighting: 3/0.2 = 15.
        let raw = descent_direction(PolicyKind::MusketeerIs, &w, 1, 3.0, IsScaling::Raw).unwrap();
        assert_eq!(raw.coefficient, 15.0);
    }

    #[test]
    fn importance_with_uniform_weights_is_the_plain_update() {
        for p in [2usize, 4, 50] {
            let w = ProbabilityWeights::uniform(p);
            for g in [1.0, -3.5, 0.125] {
                let plain =
                    descent_direction(PolicyKind::Uniform, &w, p - 1, g, IsScaling::OverP).unwrap();
                let is =
                    descent_direction(PolicyKind::UniformIs, &w, p - 1, g, IsScaling::OverP).unwrap();
                assert_eq!(plain, is, "p = {p}, g = {g}: updates must match bitwise");
            }
        }
    }

    #[test]
    fn exhaustive_expectation_of_directions() {
        // Plain coordinate sampling is unbiased for D(d)·g; the /(p·d) variant
        // is unbiased for g/p, which equals D·g exactly when d is uniform.
        let g = [5.0, 3.0, -2.0, 0.5, 1.25, -0.75, 4.0, -1.0];
        for p in 2..=8usize {
            let weights =
                ProbabilityWeights::new((1..=p).map(|k| 2.0 * k as f64 / (p * (p + 1)) as f64).collect())
                    .unwrap();
            for k in 0..p {
                let d_k = weights.get(k);
                let plain =
                    descent_direction(PolicyKind::Musketeer, &weights, k, g[k], IsScaling::OverP)
                        .unwrap();
                let is =
                    descent_direction(PolicyKind::MusketeerIs, &weights, k, g[k], IsScaling::OverP)
                        .unwrap();
                assert!((d_k * plain.coefficient - d_k * g[k]).abs() <= 1e-12);
                assert!((d_k * is.coefficient - g[k] / p as f64).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_weight_importance_update_is_rejected() {
        let w = ProbabilityWeights::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            descent_direction(PolicyKind::UniformIs, &w, 1, 2.0, IsScaling::OverP),
            Err(ScgdError::ZeroSampledWeight { index: 1 })
        ));
    }

    proptest! {
        #[test]
        fn prop_sampled_coordinate_has_positive_weight(
            raw in proptest::collection::vec(0.0f64..1.0, 2..9),
            u in 0.0f64..1.0,
        ) {
            let sum: f64 = raw.iter().sum();
            prop_assume!(sum > 1e-6);
            let weights = ProbabilityWeights::new(raw.iter().map(|w| w / sum).collect());
            prop_assume!(weights.is_ok());
            let weights = weights.unwrap();
            let k = sample_coordinate(&weights, u).unwrap();
            prop_assert!(weights.get(k) > 0.0);
            // Matches a direct scan for the first cumulative sum above u.
            let mut cumulative = 0.0;
            let mut expected = None;
            for (i, &w) in weights.as_slice().iter().enumerate() {
                cumulative += w;
                if cumulative > u {
                    expected = Some(i);
                    break;
                }
            }
            if let Some(e) = expected {
                prop_assert_eq!(k, e);
            }
        }
    }
}
