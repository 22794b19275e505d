//! A small end-to-end benchmark: several sampling policies race on ridge
//! regression under an equal query budget, and the result is written as
//! CSV artifacts plus an SVG plot.
//!
//! Zeroth-order methods pay 2 loss queries per coordinate step, so "effective
//! passes" (queries normalized by 2p) puts single-coordinate and full-vector
//! methods on the same axis. The aggregate table reports the mean/median/std
//! of the optimality gap across seeds at each checkpoint.
//!
//! Run with: cargo run --example ridge_benchmark

use scgd::bench::csv::{aggregate_to_csv, runs_to_csv};
use scgd::bench::svg::{render_gap_plot, PlotSpec};
use scgd::bench::{aggregate, run_experiment, ExperimentConfig, Method};
use scgd::gradients::{EstimatorKind, EstimatorSpec};
use scgd::objectives::{
    generate_block_dataset, BlockStructureConfig, LabelModel, Objective, ParamVector,
};
use scgd::optimizer::{RunOptions, Schedule, SmoothingRule, StepSizeForm};
use scgd::policies::{GainVariant, LambdaSchedule, MusketeerConfig, Normalization};

fn main() -> scgd::Result<()> {
    let data = BlockStructureConfig {
        n: 1000,
        p: 30,
        alpha_block: 5.0,
        block_size: 5,
        label_model: LabelModel::LinearGaussian,
        seed: 42,
    };
    let dataset = generate_block_dataset(&data)?;
    let objective = Objective::ridge(dataset, 1.0 / data.n as f64)?;

    let estimator = EstimatorSpec { kind: EstimatorKind::FiniteDifference, batch_size: 1 };
    let musketeer = MusketeerConfig {
        exploration_len: MusketeerConfig::default_exploration_len(data.p),
        normalization: Normalization::L1,
        eta: 1.0,
        lambda: LambdaSchedule::InverseLog,
        gain_variant: GainVariant::Avg,
    };
    let methods: Vec<Method> = ["FULL", "UNIFORM", "MUSKETEER-ABS"]
        .iter()
        .map(|name| Method::by_name(name, estimator, musketeer))
        .collect::<scgd::Result<_>>()?;

    let config = ExperimentConfig {
        objective,
        methods,
        seeds: (0..10).collect(),
        passes: 150,
        schedule: Schedule {
            step: StepSizeForm::PolyOffset { gamma: 3.0, k0: 10.0 },
            smoothing: SmoothingRule::SqrtGamma,
        },
        theta0: ParamVector::zeros(data.p),
        options: RunOptions::default(),
    };

    let outcome = run_experiment(&config)?;
    println!(
        "ran {} records across {} methods x {} seeds (f* = {:.6})",
        outcome.records.len(),
        config.methods.len(),
        config.seeds.len(),
        outcome.f_star
    );
    for failure in &outcome.failures {
        println!("  FAILED {} seed {}: {}", failure.method, failure.seed, failure.message);
    }

    let rows = aggregate(&outcome.records)?;
    println!("\nmedian optimality gap by budget:");
    println!("{:>8}  {:>12}  {:>12}  {:>12}", "passes", "FULL", "UNIFORM", "MUSK-ABS");
    for &passes in &[0u64, 10, 50, 150] {
        let gap = |name: &str| {
            rows.iter()
                .find(|r| r.method == name && r.passes == passes)
                .map(|r| format!("{:.3e}", r.gap_median))
                .unwrap_or_else(|| "-".into())
        };
        println!(
            "{passes:>8}  {:>12}  {:>12}  {:>12}",
            gap("FULL"),
            gap("UNIFORM"),
            gap("MUSKETEER-ABS")
        );
    }

    let dir = std::env::temp_dir().join("scgd_ridge_benchmark_example");
    std::fs::create_dir_all(&dir).map_err(|e| scgd::ScgdError::io(&dir, e))?;
    let write = |name: &str, text: &str| -> scgd::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| scgd::ScgdError::io(&path, e))?;
        println!("wrote {}", path.display());
        Ok(())
    };
    write("runs.csv", &runs_to_csv(&outcome.records))?;
    write("aggregate.csv", &aggregate_to_csv(&rows))?;
    let spec = PlotSpec { title: "ridge benchmark example".into(), ..PlotSpec::default() };
    write("gaps.svg", &render_gap_plot(&rows, &spec))?;
    Ok(())
}
