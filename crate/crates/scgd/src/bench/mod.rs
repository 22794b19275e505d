//! Seeded multi-method benchmark harness.
//!
//! A benchmark fixes one objective and runs every (method × seed) pair to a
//! shared budget of *effective passes*. One pass is p coordinate updates for
//! coordinate-sampling methods and one full update for full-gradient methods,
//! so zeroth-order variants consume identical conventional query budgets at
//! equal pass counts (2p per pass, counting 2 per directional estimate and 2p
//! per full finite-difference step). The optimality gap f(θ) − f* against the
//! exact solver is recorded on a geometric checkpoint grid shared by every
//! run, which keeps per-seed records aligned for aggregation.
//!
//! Runs execute in parallel under whatever rayon pool is installed; records
//! are assembled in deterministic (method, seed, checkpoint) order regardless
//! of thread count, and wall-clock columns stay zero unless explicitly
//! requested, so repeated invocations emit byte-identical CSV.

pub mod csv;
pub mod profiles;
pub mod svg;

use crate::gradients::{EstimatorKind, EstimatorSpec};
use crate::objectives::{Objective, ParamVector};
use crate::optimizer::{run, RunConfig, RunOptions, Schedule};
use crate::policies::{GainVariant, IsScaling, MusketeerConfig, PolicyKind};
use crate::{Result, ScgdError};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Canonical method names accepted by [`Method::by_name`].
pub const METHOD_NAMES: [&str; 8] = [
    "FULL",
    "NESTEROV",
    "UNIFORM",
    "UNIFORM-IS",
    "MUSKETEER-AVG",
    "MUSKETEER-ABS",
    "MUSKETEER-SQR",
    "MUSKETEER-IS-AVG",
];

/// One competitor in a benchmark: a named policy/estimator combination.
#[derive(Debug, Clone)]
pub struct Method {
    pub name: String,
    pub policy: PolicyKind,
    pub estimator: EstimatorSpec,
    pub musketeer: Option<MusketeerConfig>,
    pub scaling: IsScaling,
}

impl Method {
    /// Build a method from its canonical name. `base` is the benchmark's
    /// estimator; NESTEROV swaps in Gaussian smoothing (it has no first-order
    /// counterpart), adaptive methods take `musketeer` with the gain variant
    /// fixed by the name.
    pub fn by_name(
        name: &str,
        base: EstimatorSpec,
        musketeer: MusketeerConfig,
    ) -> Result<Method> {
        let unknown = || {
            ScgdError::InvalidConfig(format!(
                "unknown method '{name}'; known methods: {}",
                METHOD_NAMES.join(", ")
            ))
        };
        let with_variant = |variant| {
            Some(MusketeerConfig { gain_variant: variant, ..musketeer })
        };
        let (policy, estimator, musketeer, scaling) = match name {
            "FULL" => (PolicyKind::Full, base, None, IsScaling::OverP),
            "NESTEROV" => {
                if base.kind == EstimatorKind::FirstOrder {
                    return Err(ScgdError::InvalidConfig(
                        "NESTEROV is a zeroth-order method; use a zeroth-order estimator".into(),
                    ));
                }
                let smoothing =
                    EstimatorSpec { kind: EstimatorKind::GaussianSmoothing, ..base };
                (PolicyKind::Full, smoothing, None, IsScaling::OverP)
            }
            "UNIFORM" => (PolicyKind::Uniform, base, None, IsScaling::OverP),
            "UNIFORM-IS" => (PolicyKind::UniformIs, base, None, IsScaling::OverP),
            "MUSKETEER-AVG" => {
                (PolicyKind::Musketeer, base, with_variant(GainVariant::Avg), IsScaling::OverP)
            }
            "MUSKETEER-ABS" => {
                (PolicyKind::Musketeer, base, with_variant(GainVariant::Abs), IsScaling::OverP)
            }
            "MUSKETEER-SQR" => {
                (PolicyKind::Musketeer, base, with_variant(GainVariant::Sqr), IsScaling::OverP)
            }
            "MUSKETEER-IS-AVG" => {
                (PolicyKind::MusketeerIs, base, with_variant(GainVariant::Avg), IsScaling::OverP)
            }
            _ => return Err(unknown()),
        };
        Ok(Method { name: name.to_string(), policy, estimator, musketeer, scaling })
    }

    /// Steps that make up one effective pass for this method: full
    /// finite-difference and full first-order updates already touch every
    /// coordinate, everything else needs p single-coordinate steps (the
    /// smoothing-based full update also counts as p steps, since it costs
    /// only 2 queries).
    pub fn steps_per_pass(&self, p: usize) -> u64 {
        match (self.policy, self.estimator.kind) {
            (PolicyKind::Full, EstimatorKind::FiniteDifference)
            | (PolicyKind::Full, EstimatorKind::FirstOrder) => 1,
            _ => p as u64,
        }
    }
}

/// A full benchmark specification.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub objective: Objective,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    /// Budget in effective passes.
    pub passes: u64,
    pub schedule: Schedule,
    pub theta0: ParamVector,
    pub options: RunOptions,
}

/// One checkpoint of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: String,
    pub seed: u64,
    pub step: u64,
    pub queries: u64,
    pub passes: u64,
    pub gap: f64,
    pub wall_ms: u64,
}

/// A run that aborted (divergence, non-finite value); siblings continue.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub method: String,
    pub seed: u64,
    pub message: String,
}

/// Everything a benchmark produces.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
    pub f_star: f64,
    pub oracle_theta: ParamVector,
}

/// Per-method aggregate of the gap across seeds at one pass mark.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub method: String,
    pub passes: u64,
    pub gap_mean: f64,
    pub gap_median: f64,
    pub gap_std: f64,
}

/// Geometric checkpoint grid over pass counts: 0, 1, then 5% growth with a
/// minimum increment of one pass, capped at the budget. Integer marks keep
/// every method's checkpoints aligned at exactly equal query budgets.
pub fn checkpoint_passes(budget: u64) -> Vec<u64> {
    if budget == 0 {
        return vec![0];
    }
    let mut marks = vec![0];
    let mut m = 1u64;
    while m < budget {
        marks.push(m);
        m = (m + 1).max((m as f64 * 1.05).ceil() as u64);
    }
    marks.push(budget);
    marks
}

/// Run every (method × seed) pair of the benchmark. Individual runs that
/// diverge are reported in `failures` without aborting the rest; configuration
/// errors and oracle failures abort the whole experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    if config.methods.is_empty() {
        return Err(ScgdError::InvalidConfig("an experiment needs at least one method".into()));
    }
    if config.seeds.is_empty() {
        return Err(ScgdError::InvalidConfig("an experiment needs at least one seed".into()));
    }
    let (oracle_theta, f_star) = config.objective.solve_oracle()?;
    let pass_marks = checkpoint_passes(config.passes);
    let p = config.objective.dim();

    let jobs: Vec<(usize, u64)> = config
        .methods
        .iter()
        .enumerate()
        .flat_map(|(mi, _)| config.seeds.iter().map(move |&s| (mi, s)))
        .collect();

    let results: Vec<std::result::Result<Vec<RunRecord>, RunFailure>> = jobs
        .par_iter()
        .map(|&(mi, seed)| {
            let method = &config.methods[mi];
            let spp = method.steps_per_pass(p);
            let step_marks: Vec<u64> = pass_marks.iter().map(|&m| m * spp).collect();
            let run_config = RunConfig {
                objective: &config.objective,
                estimator: method.estimator,
                policy: method.policy,
                musketeer: method.musketeer,
                scaling: method.scaling,
                schedule: config.schedule,
                theta0: config.theta0.clone(),
                seed,
                options: config.options,
            };
            match run(&run_config, &step_marks) {
                Ok(trajectory) => Ok(pass_marks
                    .iter()
                    .zip(&trajectory.checkpoints)
                    .map(|(&passes, row)| RunRecord {
                        method: method.name.clone(),
                        seed,
                        step: row.step,
                        queries: row.queries,
                        passes,
                        gap: row.value - f_star,
                        wall_ms: row.wall_ms,
                    })
                    .collect()),
                Err(err) => Err(RunFailure {
                    method: method.name.clone(),
                    seed,
                    message: err.to_string(),
                }),
            }
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok(rows) => records.extend(rows),
            Err(failure) => failures.push(failure),
        }
    }
    Ok(ExperimentOutcome { records, failures, f_star, oracle_theta })
}

/// Collapse run records into per-method mean/median/std of the gap at each
/// pass mark. Every run of a method must share the same checkpoint grid.
pub fn aggregate(records: &[RunRecord]) -> Result<Vec<AggregateRecord>> {
    let mut order: Vec<&str> = Vec::new();
    let mut buckets: BTreeMap<(&str, u64), Vec<f64>> = BTreeMap::new();
    let mut seeds_per_method: BTreeMap<&str, std::collections::BTreeSet<u64>> = BTreeMap::new();
    for record in records {
        if !order.contains(&record.method.as_str()) {
            order.push(&record.method);
        }
        buckets.entry((&record.method, record.passes)).or_default().push(record.gap);
        seeds_per_method.entry(&record.method).or_default().insert(record.seed);
    }

    let mut out = Vec::new();
    for method in order {
        let expected = seeds_per_method[method].len();
        let marks: Vec<u64> = buckets
            .range((method, 0)..=(method, u64::MAX))
            .map(|(&(_, passes), _)| passes)
            .collect();
        for passes in marks {
            let gaps = &buckets[&(method, passes)];
            if gaps.len() != expected {
                return Err(ScgdError::InvalidConfig(format!(
                    "method {method} has {} records at pass {passes} but {expected} seeds; \
                     runs do not share a checkpoint grid",
                    gaps.len()
                )));
            }
            let mut sorted = gaps.clone();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            let mean = sorted.iter().sum::<f64>() / n as f64;
            let median = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
            };
            let std = if n > 1 {
                (sorted.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            out.push(AggregateRecord {
                method: method.to_string(),
                passes,
                gap_mean: mean,
                gap_median: median,
                gap_std: std,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{generate_block_dataset, BlockStructureConfig, LabelModel};
    use crate::optimizer::{SmoothingRule, StepSizeForm};
    use crate::policies::{LambdaSchedule, Normalization};
    use approx::assert_relative_eq;

    fn small_ridge() -> Objective {
        let dataset = generate_block_dataset(&BlockStructureConfig {
            n: 200,
            p: 10,
            alpha_block: 1.0,
            block_size: 2,
            label_model: LabelModel::LinearGaussian,
            seed: 42,
        })
        .unwrap();
        Objective::ridge(dataset, 0.01).unwrap()
    }

    fn base_musketeer() -> MusketeerConfig {
        MusketeerConfig {
            exploration_len: 3,
            normalization: Normalization::L1,
            eta: 1.0,
            lambda: LambdaSchedule::InverseLog,
            gain_variant: GainVariant::Avg,
        }
    }

    fn zo_spec() -> EstimatorSpec {
        EstimatorSpec { kind: EstimatorKind::FiniteDifference, batch_size: 1 }
    }

    fn schedule() -> Schedule {
        Schedule {
            step: StepSizeForm::PolyOffset { gamma: 1.0, k0: 10.0 },
            smoothing: SmoothingRule::SqrtGamma,
        }
    }

    fn small_experiment(methods: &[&str], seeds: std::ops::Range<u64>, passes: u64) -> ExperimentConfig {
        let objective = small_ridge();
        let theta0 = ParamVector::zeros(objective.dim());
        ExperimentConfig {
            objective,
            methods: methods
                .iter()
                .map(|name| Method::by_name(name, zo_spec(), base_musketeer()).unwrap())
                .collect(),
            seeds: seeds.collect(),
            passes,
            schedule: schedule(),
            theta0,
            options: RunOptions::default(),
        }
    }

    #[test]
    fn checkpoint_grid_is_strictly_increasing_with_five_percent_growth() {
        let marks = checkpoint_passes(200);
        assert_eq!(marks[0], 0);
        assert_eq!(marks[1], 1);
        assert_eq!(*marks.last().unwrap(), 200);
        assert!(marks.windows(2).all(|w| w[0] < w[1]));
        // Small marks advance by one; large marks grow by ⌈5%⌉.
        assert!(marks.contains(&2) && marks.contains(&20));
        let tail: Vec<u64> = marks.iter().copied().filter(|&m| m >= 100).collect();
        for w in tail.windows(2) {
            assert!(w[1] <= (w[0] + 1).max((w[0] as f64 * 1.05).ceil() as u64));
        }
        assert_eq!(checkpoint_passes(0), vec![0]);
        assert_eq!(checkpoint_passes(1), vec![0, 1]);
        assert_eq!(checkpoint_passes(3), vec![0, 1, 2, 3]);
    }

    #[test]
    fn method_names_map_to_the_right_policies() {
        let m = Method::by_name("FULL", zo_spec(), base_musketeer()).unwrap();
        assert_eq!(m.policy, PolicyKind::Full);
        assert_eq!(m.steps_per_pass(10), 1);

        let m = Method::by_name("NESTEROV", zo_spec(), base_musketeer()).unwrap();
        assert_eq!(m.policy, PolicyKind::Full);
        assert_eq!(m.estimator.kind, EstimatorKind::GaussianSmoothing);
        assert_eq!(m.steps_per_pass(10), 10);

        let m = Method::by_name("MUSKETEER-SQR", zo_spec(), base_musketeer()).unwrap();
        assert_eq!(m.policy, PolicyKind::Musketeer);
        assert_eq!(m.musketeer.unwrap().gain_variant, GainVariant::Sqr);

        let m = Method::by_name("MUSKETEER-IS-AVG", zo_spec(), base_musketeer()).unwrap();
        assert_eq!(m.policy, PolicyKind::MusketeerIs);
        assert_eq!(m.musketeer.unwrap().gain_variant, GainVariant::Avg);

        assert!(Method::by_name("SGD", zo_spec(), base_musketeer()).is_err());
        let fo = EstimatorSpec { kind: EstimatorKind::FirstOrder, batch_size: 4 };
        assert!(Method::by_name("NESTEROV", fo, base_musketeer()).is_err());
    }

    #[test]
    fn equal_passes_mean_equal_queries_across_zeroth_order_methods() {
        let cfg = small_experiment(&["FULL", "NESTEROV", "UNIFORM", "MUSKETEER-ABS"], 0..2, 12);
        let outcome = run_experiment(&cfg).unwrap();
        assert!(outcome.failures.is_empty());
        let mut by_passes: BTreeMap<u64, std::collections::BTreeSet<u64>> = BTreeMap::new();
        for r in &outcome.records {
            by_passes.entry(r.passes).or_default().insert(r.queries);
        }
        for (passes, queries) in by_passes {
            assert_eq!(queries.len(), 1, "query counts differ at pass {passes}: {queries:?}");
            assert_eq!(queries.into_iter().next().unwrap(), 2 * 10 * passes);
        }
    }

    #[test]
    fn records_are_ordered_and_deterministic_regardless_of_threads() {
        let cfg = small_experiment(&["UNIFORM", "MUSKETEER-AVG"], 0..3, 10);
        let parallel = run_experiment(&cfg).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap());
        assert_eq!(parallel.records, single.records);

        // (method, seed) blocks appear in configuration order.
        let mut last_key = None;
        for r in &parallel.records {
            let mi = cfg.methods.iter().position(|m| m.name == r.method).unwrap();
            let si = cfg.seeds.iter().position(|&s| s == r.seed).unwrap();
            let key = (mi, si);
            if let Some(last) = last_key {
                assert!(key >= last, "records out of order: {key:?} after {last:?}");
            }
            last_key = Some(key);
        }
    }

    #[test]
    fn gaps_shrink_toward_the_oracle_value() {
        let mut cfg = small_experiment(&["UNIFORM"], 0..3, 200);
        cfg.schedule = Schedule {
            step: StepSizeForm::PolyOffset { gamma: 10.0, k0: 10.0 },
            smoothing: SmoothingRule::SqrtGamma,
        };
        // Average the difference quotient over a batch of 8 samples to push
        // the gradient-noise plateau γσ²/(μβ) below the assertion threshold.
        let batched = EstimatorSpec { kind: EstimatorKind::FiniteDifference, batch_size: 8 };
        cfg.methods = vec![Method::by_name("UNIFORM", batched, base_musketeer()).unwrap()];
        let outcome = run_experiment(&cfg).unwrap();
        assert!(outcome.failures.is_empty());
        for seed in 0..3 {
            let rows: Vec<&RunRecord> =
                outcome.records.iter().filter(|r| r.seed == seed).collect();
            let first = rows.iter().find(|r| r.passes == 0).unwrap();
            let last = rows.iter().find(|r| r.passes == 200).unwrap();
            assert!(last.gap >= -1e-9, "gap fell below the oracle optimum: {}", last.gap);
            assert!(
                last.gap < 0.25 * first.gap,
                "seed {seed}: gap {} barely moved from {}",
                last.gap,
                first.gap
            );
        }
    }

    #[test]
    fn diverging_runs_become_failures_not_errors() {
        // Duplicated-column ridge: Hessian [[s+μ, s], [s, s+μ]] with s = 1.
        // At γ = 1.6 the full step sees γ·λmax = 1.6·2.01 > 2 and diverges
        // deterministically, while single-coordinate steps stay in the SOR
        // stability regime γ·H_kk = 1.616 < 2 and keep converging.
        let dataset = crate::objectives::Dataset::new(
            nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, -1.0]),
            nalgebra::DVector::from_vec(vec![1.0, -1.0]),
        )
        .unwrap();
        let objective = Objective::ridge(dataset, 0.01).unwrap();
        let theta0 = ParamVector::zeros(2);
        let cfg = ExperimentConfig {
            objective,
            methods: ["FULL", "UNIFORM"]
                .iter()
                .map(|name| {
                    Method::by_name(
                        name,
                        EstimatorSpec { kind: EstimatorKind::FirstOrder, batch_size: 2 },
                        base_musketeer(),
                    )
                    .unwrap()
                })
                .collect(),
            seeds: vec![0, 1],
            passes: 40,
            schedule: Schedule {
                step: StepSizeForm::Poly { gamma: 1.6, alpha: 0.0 },
                smoothing: SmoothingRule::SqrtGamma,
            },
            theta0,
            options: RunOptions::default(),
        };
        let outcome = run_experiment(&cfg).unwrap();
        // Both FULL seeds fail with a divergence diagnostic...
        assert_eq!(outcome.failures.len(), 2);
        for failure in &outcome.failures {
            assert_eq!(failure.method, "FULL");
            assert!(failure.message.contains("diverged"), "{}", failure.message);
        }
        // ...while both UNIFORM runs complete with full checkpoint sets.
        let surviving: Vec<&RunRecord> =
            outcome.records.iter().filter(|r| r.method == "UNIFORM").collect();
        assert_eq!(surviving.len(), 2 * checkpoint_passes(40).len());
        assert!(outcome.records.iter().all(|r| r.method == "UNIFORM"));
    }

    #[test]
    fn aggregate_computes_mean_median_std_per_mark() {
        let records = vec![
            RunRecord { method: "A".into(), seed: 0, step: 0, queries: 0, passes: 0, gap: 1.0, wall_ms: 0 },
            RunRecord { method: "A".into(), seed: 1, step: 0, queries: 0, passes: 0, gap: 3.0, wall_ms: 0 },
            RunRecord { method: "A".into(), seed: 2, step: 0, queries: 0, passes: 0, gap: 8.0, wall_ms: 0 },
            RunRecord { method: "A".into(), seed: 0, step: 5, queries: 10, passes: 5, gap: 0.5, wall_ms: 0 },
            RunRecord { method: "A".into(), seed: 1, step: 5, queries: 10, passes: 5, gap: 0.1, wall_ms: 0 },
            RunRecord { method: "A".into(), seed: 2, step: 5, queries: 10, passes: 5, gap: 0.3, wall_ms: 0 },
        ];
        let agg = aggregate(&records).unwrap();
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].method, "A");
        assert_eq!(agg[0].passes, 0);
        assert_relative_eq!(agg[0].gap_mean, 4.0, max_relative = 1e-15);
        assert_relative_eq!(agg[0].gap_median, 3.0, max_relative = 1e-15);
        // Sample std of {1, 3, 8} = √((9 + 1 + 16)/2) = √13.
        assert_relative_eq!(agg[0].gap_std, 13f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(agg[1].gap_median, 0.3, max_relative = 1e-15);

        // Even seed counts take the midpoint of the two central gaps.
        let even = aggregate(&records[0..2]).unwrap();
        assert_relative_eq!(even[0].gap_median, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn aggregate_rejects_mismatched_grids() {
        let records = vec![
            RunRecord { method: "A".into(), seed: 0, step: 0, queries: 0, passes: 0, gap: 1.0, wall_ms: 0 },
            RunRecord { method: "A".into(), seed: 1, step: 0, queries: 0, passes: 0, gap: 2.0, wall_ms: 0 },
            RunRecord { method: "A".into(), seed: 0, step: 5, queries: 10, passes: 5, gap: 0.5, wall_ms: 0 },
        ];
        assert!(aggregate(&records).is_err());
        assert!(aggregate(&[]).unwrap().is_empty());
    }
}
