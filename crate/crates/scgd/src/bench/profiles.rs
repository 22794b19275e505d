//! Named, fully-resolved benchmark profiles.
//!
//! Each profile pins every knob of a synthetic study — dataset shape and
//! seed, objective, estimator, schedule, adaptive-policy settings, method
//! list, run seeds, and pass budget — so a single name reproduces the same
//! records everywhere. Overrides rescale a profile (fewer seeds, smaller
//! data, different methods) without editing code; everything that ends up in
//! a run is reported back in [`ResolvedProfile`] for the manifest.

use super::{ExperimentConfig, Method};
use crate::gradients::{EstimatorKind, EstimatorSpec};
use crate::objectives::{
    generate_block_dataset, BlockStructureConfig, LabelModel, Objective, ParamVector,
};
use crate::optimizer::{RunOptions, Schedule, SmoothingRule, StepSizeForm};
use crate::policies::{GainVariant, LambdaSchedule, MusketeerConfig, Normalization};
use crate::{Result, ScgdError};

/// Profile names accepted by [`instantiate`].
pub const PROFILE_NAMES: [&str; 6] =
    ["ridge-zo", "logistic-zo", "ridge-fo", "logistic-fo", "toy-2d", "sweep-np"];

/// Seed used to generate every profile dataset (distinct from run seeds).
pub const DATA_SEED: u64 = 42;

/// User-tunable deviations from a profile's defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Dataset rows. For `sweep-np` this collapses the grid to one instance.
    pub n: Option<usize>,
    /// Dataset columns. For `sweep-np` this collapses the grid to one instance.
    pub p: Option<usize>,
    /// Multiply dataset rows by this factor (applies per grid instance).
    pub n_scale: Option<f64>,
    /// Number of run seeds (uses seeds 0..count).
    pub seeds: Option<u64>,
    /// Budget in effective passes.
    pub passes: Option<u64>,
    /// Method subset (canonical names).
    pub methods: Option<Vec<String>>,
    /// Record wall-clock times (breaks byte-reproducibility of the CSV).
    pub record_wall_time: bool,
}

/// Every resolved setting of one experiment instance, for the manifest.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResolvedProfile {
    pub profile: String,
    /// Distinguishes instances of multi-instance profiles ("" otherwise).
    pub label: String,
    pub objective: String,
    pub mu: f64,
    /// None for the data-free toy objective.
    pub dataset: Option<BlockStructureConfig>,
    pub estimator: EstimatorSpec,
    pub schedule: Schedule,
    pub musketeer: MusketeerConfig,
    pub methods: Vec<String>,
    pub seeds: Vec<u64>,
    pub passes: u64,
    pub theta0: Vec<f64>,
}

/// One ready-to-run experiment instance.
#[derive(Debug, Clone)]
pub struct PreparedExperiment {
    pub resolved: ResolvedProfile,
    pub config: ExperimentConfig,
}

struct ProfileDefaults {
    objective: &'static str,
    label_model: LabelModel,
    n: usize,
    p: usize,
    alpha_block: f64,
    block_size: usize,
    estimator_kind: EstimatorKind,
    batch_size: usize,
    schedule: Schedule,
    /// None means T = max(1, ⌊√p⌋), tracking a p override.
    exploration_len: Option<usize>,
    normalization: Normalization,
    eta: f64,
    lambda: LambdaSchedule,
    methods: &'static [&'static str],
    seeds: u64,
    passes: u64,
}

fn poly_offset(gamma: f64, k0: f64) -> Schedule {
    Schedule { step: StepSizeForm::PolyOffset { gamma, k0 }, smoothing: SmoothingRule::SqrtGamma }
}

const ZO_METHODS: &[&str] = &[
    "FULL",
    "NESTEROV",
    "UNIFORM",
    "UNIFORM-IS",
    "MUSKETEER-AVG",
    "MUSKETEER-ABS",
    "MUSKETEER-SQR",
];
const FO_METHODS: &[&str] =
    &["FULL", "UNIFORM", "UNIFORM-IS", "MUSKETEER-AVG", "MUSKETEER-IS-AVG"];

fn defaults(profile: &str) -> Option<ProfileDefaults> {
    let base = ProfileDefaults {
        objective: "ridge",
        label_model: LabelModel::LinearGaussian,
        n: 10_000,
        p: 250,
        alpha_block: 5.0,
        block_size: 1,
        estimator_kind: EstimatorKind::FiniteDifference,
        batch_size: 1,
        schedule: poly_offset(3.0, 10.0),
        exploration_len: None,
        normalization: Normalization::Softmax,
        eta: 1.0,
        lambda: LambdaSchedule::Constant(0.5),
        methods: ZO_METHODS,
        seeds: 20,
        passes: 400,
    };
    Some(match profile {
        "ridge-zo" => base,
        "logistic-zo" => ProfileDefaults {
            objective: "logistic",
            label_model: LabelModel::LogisticBernoulli,
            alpha_block: 2.0,
            schedule: poly_offset(10.0, 5.0),
            ..base
        },
        "ridge-fo" => ProfileDefaults {
            estimator_kind: EstimatorKind::FirstOrder,
            batch_size: 8,
            schedule: poly_offset(1.0, 0.0),
            lambda: LambdaSchedule::InverseLog,
            methods: FO_METHODS,
            ..base
        },
        "logistic-fo" => ProfileDefaults {
            objective: "logistic",
            label_model: LabelModel::LogisticBernoulli,
            alpha_block: 2.0,
            estimator_kind: EstimatorKind::FirstOrder,
            batch_size: 8,
            schedule: poly_offset(1.0, 0.0),
            lambda: LambdaSchedule::InverseLog,
            methods: FO_METHODS,
            ..base
        },
        "toy-2d" => ProfileDefaults {
            objective: "axis_quadratic_2d",
            n: 1,
            p: 2,
            estimator_kind: EstimatorKind::FirstOrder,
            batch_size: 1,
            schedule: poly_offset(1.0, 10.0),
            exploration_len: Some(1),
            eta: 5.0,
            lambda: LambdaSchedule::Constant(0.2),
            methods: &["UNIFORM", "MUSKETEER-AVG"],
            seeds: 50,
            passes: 25,
            ..base
        },
        "sweep-np" => ProfileDefaults {
            n: 1000,
            p: 20,
            block_size: 10,
            schedule: poly_offset(1.0, 10.0),
            normalization: Normalization::L1,
            lambda: LambdaSchedule::InverseLog,
            methods: &["FULL", "UNIFORM", "MUSKETEER-ABS"],
            seeds: 10,
            passes: 150,
            ..base
        },
        _ => return None,
    })
}

fn build_instance(
    profile: &str,
    label: String,
    d: &ProfileDefaults,
    n: usize,
    p: usize,
    overrides: &Overrides,
) -> Result<PreparedExperiment> {
    let (objective, dataset_config, mu) = if d.objective == "axis_quadratic_2d" {
        (Objective::axis_quadratic_2d(), None, 0.0)
    } else {
        let cfg = BlockStructureConfig {
            n,
            p,
            alpha_block: d.alpha_block,
            block_size: d.block_size.min(p),
            label_model: d.label_model,
            seed: DATA_SEED,
        };
        let dataset = generate_block_dataset(&cfg)?;
        let mu = 1.0 / n as f64;
        let objective = match d.objective {
            "ridge" => Objective::ridge(dataset, mu)?,
            _ => Objective::logistic(dataset, mu)?,
        };
        (objective, Some(cfg), mu)
    };

    let estimator = EstimatorSpec { kind: d.estimator_kind, batch_size: d.batch_size };
    let musketeer = MusketeerConfig {
        exploration_len: d
            .exploration_len
            .unwrap_or_else(|| MusketeerConfig::default_exploration_len(p)),
        normalization: d.normalization,
        eta: d.eta,
        lambda: d.lambda,
        gain_variant: GainVariant::Avg,
    };

    let method_names: Vec<String> = match &overrides.methods {
        Some(names) => names.clone(),
        None => d.methods.iter().map(|s| s.to_string()).collect(),
    };
    let methods = method_names
        .iter()
        .map(|name| Method::by_name(name, estimator, musketeer))
        .collect::<Result<Vec<Method>>>()?;

    let seeds: Vec<u64> = (0..overrides.seeds.unwrap_or(d.seeds)).collect();
    let passes = overrides.passes.unwrap_or(d.passes);
    let theta0 = if d.objective == "axis_quadratic_2d" {
        ParamVector::from_element(2, 1.0)
    } else {
        ParamVector::zeros(p)
    };

    let resolved = ResolvedProfile {
        profile: profile.to_string(),
        label,
        objective: d.objective.to_string(),
        mu,
        dataset: dataset_config,
        estimator,
        schedule: d.schedule,
        musketeer,
        methods: method_names,
        seeds: seeds.clone(),
        passes,
        theta0: theta0.iter().copied().collect(),
    };
    let config = ExperimentConfig {
        objective,
        methods,
        seeds,
        passes,
        schedule: d.schedule,
        theta0,
        options: RunOptions { record_wall_time: overrides.record_wall_time, ..RunOptions::default() },
    };
    Ok(PreparedExperiment { resolved, config })
}

/// Build every experiment instance of a named profile, with overrides
/// applied. Single-instance profiles return one entry; `sweep-np` returns the
/// n × p grid (or a single collapsed instance when n/p are overridden).
pub fn instantiate(profile: &str, overrides: &Overrides) -> Result<Vec<PreparedExperiment>> {
    let d = defaults(profile).ok_or_else(|| ScgdError::UnknownProfile(profile.to_string()))?;

    if let Some(scale) = overrides.n_scale {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(ScgdError::InvalidConfig(format!(
                "row-count scale must be a positive finite number, got {scale}"
            )));
        }
    }
    if d.objective == "axis_quadratic_2d"
        && (overrides.n.is_some() || overrides.p.is_some() || overrides.n_scale.is_some())
    {
        return Err(ScgdError::InvalidConfig(
            "the 2-D toy profile has a fixed dimension; n/p overrides do not apply".into(),
        ));
    }
    let scaled = |n: usize| match overrides.n_scale {
        Some(scale) => ((n as f64 * scale).round() as usize).max(1),
        None => n,
    };

    if profile == "sweep-np" && overrides.n.is_none() && overrides.p.is_none() {
        let mut instances = Vec::new();
        for &n in &[1000usize, 2000, 5000] {
            for &p in &[20usize, 50, 100, 200] {
                let n = scaled(n);
                instances.push(build_instance(profile, format!("n{n}-p{p}"), &d, n, p, overrides)?);
            }
        }
        return Ok(instances);
    }

    let n = scaled(overrides.n.unwrap_or(d.n));
    let p = overrides.p.unwrap_or(d.p);
    Ok(vec![build_instance(profile, String::new(), &d, n, p, overrides)?])
}
