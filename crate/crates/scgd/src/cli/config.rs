//! Strict `key = value` experiment configuration files.
//!
//! One assignment per line; `#` starts a comment; keys outside the documented
//! set are rejected with the offending line number, so a typo can never pass
//! silently as a default. A file either names a `profile` (plus the handful
//! of override keys) or spells out a custom experiment in full.

use crate::bench::profiles::{instantiate, Overrides, PreparedExperiment, ResolvedProfile};
use crate::bench::{ExperimentConfig, Method};
use crate::gradients::{EstimatorKind, EstimatorSpec};
use crate::objectives::{
    generate_block_dataset, BlockStructureConfig, LabelModel, Objective, ParamVector,
};
use crate::optimizer::{RunOptions, Schedule, SmoothingRule, StepSizeForm};
use crate::policies::{GainVariant, LambdaSchedule, MusketeerConfig, Normalization};
use crate::{Result, ScgdError};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Every key a configuration file may set.
pub const KNOWN_KEYS: [&str; 28] = [
    "profile",
    "objective",
    "n",
    "p",
    "alpha_block",
    "block_size",
    "label_model",
    "data_seed",
    "mu",
    "estimator",
    "batch_size",
    "step_form",
    "gamma",
    "k0",
    "alpha_step",
    "smoothing",
    "h",
    "exploration_len",
    "normalization",
    "eta",
    "lambda_schedule",
    "lambda_bar",
    "methods",
    "seeds",
    "passes",
    "theta0",
    "divergence_factor",
    "record_wall_time",
];

/// Keys that may accompany `profile = <name>`.
const PROFILE_OVERRIDE_KEYS: [&str; 7] =
    ["profile", "n", "p", "seeds", "passes", "methods", "record_wall_time"];

/// A parsed configuration file: values by key, with line numbers for errors.
pub struct FileConfig {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl FileConfig {
    pub fn parse(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| ScgdError::io(path, e))?;
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let number = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ScgdError::parse(path, number, format!("expected 'key = value', found '{line}'")));
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(ScgdError::parse(path, number, format!("unknown key '{key}'")));
            }
            if value.is_empty() {
                return Err(ScgdError::parse(path, number, format!("key '{key}' has no value")));
            }
            if let Some((previous, _)) = entries.get(key) {
                return Err(ScgdError::parse(
                    path,
                    number,
                    format!("key '{key}' already set on line {previous}"),
                ));
            }
            entries.insert(key.to_string(), (number, value.to_string()));
        }
        Ok(FileConfig { path: path.to_path_buf(), entries })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, value)) => value.parse().map(Some).map_err(|_| {
                ScgdError::parse(&self.path, *line, format!("bad value '{value}' for '{key}'"))
            }),
        }
    }

    fn bad_value(&self, key: &str) -> ScgdError {
        let (line, value) = &self.entries[key];
        ScgdError::parse(&self.path, *line, format!("bad value '{value}' for '{key}'"))
    }

    fn methods_list(&self) -> Option<Vec<String>> {
        self.raw("methods").map(|v| {
            v.split(',').map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect()
        })
    }
}

/// Build every experiment instance described by a configuration file.
pub fn experiments_from_file(path: &Path) -> Result<Vec<PreparedExperiment>> {
    experiments_from_file_with(path, &Overrides::default())
}

/// Like [`experiments_from_file`], with command-line overrides that take
/// precedence over the file's own keys.
pub fn experiments_from_file_with(
    path: &Path,
    cli: &Overrides,
) -> Result<Vec<PreparedExperiment>> {
    let cfg = FileConfig::parse(path)?;
    match cfg.raw("profile") {
        Some(_) => profile_experiments(&cfg, cli),
        None => Ok(vec![custom_experiment(&cfg, cli)?]),
    }
}

fn profile_experiments(cfg: &FileConfig, cli: &Overrides) -> Result<Vec<PreparedExperiment>> {
    for (key, (line, _)) in &cfg.entries {
        if !PROFILE_OVERRIDE_KEYS.contains(&key.as_str()) {
            return Err(ScgdError::parse(
                &cfg.path,
                *line,
                format!("key '{key}' does not apply when 'profile' is set"),
            ));
        }
    }
    let overrides = Overrides {
        n: cli.n.or(cfg.parse_value("n")?),
        p: cli.p.or(cfg.parse_value("p")?),
        n_scale: cli.n_scale,
        seeds: cli.seeds.or(cfg.parse_value("seeds")?),
        passes: cli.passes.or(cfg.parse_value("passes")?),
        methods: cli.methods.clone().or_else(|| cfg.methods_list()),
        record_wall_time: cli.record_wall_time
            || cfg.parse_value("record_wall_time")?.unwrap_or(false),
    };
    instantiate(cfg.raw("profile").unwrap(), &overrides)
}

fn custom_experiment(cfg: &FileConfig, cli: &Overrides) -> Result<PreparedExperiment> {
    let objective_name = cfg
        .raw("objective")
        .ok_or_else(|| {
            ScgdError::InvalidConfig(format!(
                "{}: set either 'profile' or 'objective'",
                cfg.path.display()
            ))
        })?
        .to_string();

    let is_toy = matches!(objective_name.as_str(), "quadratic_2d" | "axis_quadratic_2d");
    if is_toy {
        for key in ["n", "p", "alpha_block", "block_size", "label_model", "data_seed", "mu"] {
            if let Some((line, _)) = cfg.entries.get(key) {
                return Err(ScgdError::parse(
                    &cfg.path,
                    *line,
                    format!("key '{key}' does not apply to the data-free objective '{objective_name}'"),
                ));
            }
        }
        if cli.n.is_some() || cli.p.is_some() || cli.n_scale.is_some() {
            return Err(ScgdError::InvalidConfig(format!(
                "the data-free objective '{objective_name}' has a fixed dimension; n/p overrides do not apply"
            )));
        }
    }

    // Objective and dataset.
    let (objective, dataset_config, mu, p) = match objective_name.as_str() {
        "quadratic_2d" => (Objective::quadratic_2d(), None, 0.0, 2),
        "axis_quadratic_2d" => (Objective::axis_quadratic_2d(), None, 0.0, 2),
        "ridge" | "logistic" => {
            let mut n = cli.n.or(cfg.parse_value("n")?).unwrap_or(1000usize);
            if let Some(scale) = cli.n_scale {
                if !scale.is_finite() || scale <= 0.0 {
                    return Err(ScgdError::InvalidConfig(format!(
                        "row-count scale must be a positive finite number, got {scale}"
                    )));
                }
                n = ((n as f64 * scale).round() as usize).max(1);
            }
            let p = cli.p.or(cfg.parse_value("p")?).unwrap_or(50usize);
            let default_labels = if objective_name == "ridge" {
                LabelModel::LinearGaussian
            } else {
                LabelModel::LogisticBernoulli
            };
            let label_model = match cfg.raw("label_model") {
                None => default_labels,
                Some("linear_gaussian") => LabelModel::LinearGaussian,
                Some("logistic_bernoulli") => LabelModel::LogisticBernoulli,
                Some(_) => return Err(cfg.bad_value("label_model")),
            };
            let data = BlockStructureConfig {
                n,
                p,
                alpha_block: cfg.parse_value("alpha_block")?.unwrap_or(5.0),
                block_size: cfg.parse_value("block_size")?.unwrap_or(1),
                label_model,
                seed: cfg.parse_value("data_seed")?.unwrap_or(42),
            };
            let mu = cfg.parse_value("mu")?.unwrap_or(1.0 / n as f64);
            let dataset = generate_block_dataset(&data)?;
            let objective = if objective_name == "ridge" {
                Objective::ridge(dataset, mu)?
            } else {
                Objective::logistic(dataset, mu)?
            };
            (objective, Some(data), mu, p)
        }
        _ => {
            return Err(ScgdError::InvalidConfig(format!(
                "unknown objective '{objective_name}'; known: ridge, logistic, quadratic_2d, axis_quadratic_2d"
            )))
        }
    };

    // Estimator.
    let estimator_kind = match cfg.raw("estimator") {
        None => EstimatorKind::FiniteDifference,
        Some("finite_difference") => EstimatorKind::FiniteDifference,
        Some("first_order") => EstimatorKind::FirstOrder,
        Some("gaussian_smoothing") => EstimatorKind::GaussianSmoothing,
        Some("sphere_smoothing") => EstimatorKind::SphereSmoothing,
        Some(_) => return Err(cfg.bad_value("estimator")),
    };
    let estimator =
        EstimatorSpec { kind: estimator_kind, batch_size: cfg.parse_value("batch_size")?.unwrap_or(1) };

    // Schedule.
    let gamma = cfg.parse_value("gamma")?.unwrap_or(1.0);
    let step = match cfg.raw("step_form") {
        None | Some("poly_offset") => {
            StepSizeForm::PolyOffset { gamma, k0: cfg.parse_value("k0")?.unwrap_or(10.0) }
        }
        Some("poly") => {
            StepSizeForm::Poly { gamma, alpha: cfg.parse_value("alpha_step")?.unwrap_or(1.0) }
        }
        Some(_) => return Err(cfg.bad_value("step_form")),
    };
    let smoothing = match cfg.raw("smoothing") {
        None | Some("sqrt_gamma") => SmoothingRule::SqrtGamma,
        Some("constant") => {
            let h = cfg.parse_value("h")?.ok_or_else(|| {
                ScgdError::InvalidConfig(format!(
                    "{}: smoothing = constant needs 'h'",
                    cfg.path.display()
                ))
            })?;
            SmoothingRule::Constant(h)
        }
        Some(_) => return Err(cfg.bad_value("smoothing")),
    };
    let schedule = Schedule { step, smoothing };
    schedule.validate()?;

    // Adaptive-policy settings.
    let lambda = match cfg.raw("lambda_schedule") {
        None | Some("inverse_log") => LambdaSchedule::InverseLog,
        Some("constant") => {
            let bar = cfg.parse_value("lambda_bar")?.ok_or_else(|| {
                ScgdError::InvalidConfig(format!(
                    "{}: lambda_schedule = constant needs 'lambda_bar'",
                    cfg.path.display()
                ))
            })?;
            LambdaSchedule::Constant(bar)
        }
        Some(_) => return Err(cfg.bad_value("lambda_schedule")),
    };
    let normalization = match cfg.raw("normalization") {
        None | Some("l1") => Normalization::L1,
        Some("softmax") => Normalization::Softmax,
        Some(_) => return Err(cfg.bad_value("normalization")),
    };
    let musketeer = MusketeerConfig {
        exploration_len: cfg
            .parse_value("exploration_len")?
            .unwrap_or_else(|| MusketeerConfig::default_exploration_len(p)),
        normalization,
        eta: cfg.parse_value("eta")?.unwrap_or(1.0),
        lambda,
        gain_variant: GainVariant::Avg,
    };
    musketeer.validate()?;

    // Methods, seeds, budget, start point.
    let method_names = cli
        .methods
        .clone()
        .or_else(|| cfg.methods_list())
        .unwrap_or_else(|| vec!["FULL".into(), "UNIFORM".into(), "MUSKETEER-AVG".into()]);
    let methods = method_names
        .iter()
        .map(|name| Method::by_name(name, estimator, musketeer))
        .collect::<Result<Vec<Method>>>()?;
    let seeds: Vec<u64> =
        (0..cli.seeds.or(cfg.parse_value("seeds")?).unwrap_or(10u64)).collect();
    let passes: u64 = cli.passes.or(cfg.parse_value("passes")?).unwrap_or(100);
    let theta0 = match cfg.raw("theta0") {
        // The axis toy's minimizer is the origin, so starting there would be
        // a no-op; the toys default to (1, 1).
        None if is_toy => ParamVector::from_element(p, 1.0),
        None | Some("zeros") => ParamVector::zeros(p),
        Some("ones") => ParamVector::from_element(p, 1.0),
        Some(_) => return Err(cfg.bad_value("theta0")),
    };
    let options = RunOptions {
        divergence_factor: cfg.parse_value("divergence_factor")?.unwrap_or(1e6),
        record_wall_time: cli.record_wall_time
            || cfg.parse_value("record_wall_time")?.unwrap_or(false),
        record_weight_history: false,
    };

    let resolved = ResolvedProfile {
        profile: "custom".into(),
        label: String::new(),
        objective: objective_name,
        mu,
        dataset: dataset_config,
        estimator,
        schedule,
        musketeer,
        methods: method_names,
        seeds: seeds.clone(),
        passes,
        theta0: theta0.iter().copied().collect(),
    };
    let config =
        ExperimentConfig { objective, methods, seeds, passes, schedule, theta0, options };
    Ok(PreparedExperiment { resolved, config })
}
