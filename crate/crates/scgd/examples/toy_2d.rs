//! Watch the adaptive sampler discover which coordinate matters.
//!
//! The 2-D toy objective f(θ) = θ₁²/2 depends on its first coordinate only,
//! so a sampler that learns from observed gradients should shift probability
//! mass toward coordinate 1 and away from the useless coordinate 2. This
//! example runs the explore/exploit policy on that toy (and, as a control, on
//! the symmetric objective f(θ) = ‖θ‖²/2 where both coordinates matter
//! equally) and prints the sampling weights as they evolve.
//!
//! Run with: cargo run --example toy_2d

use scgd::gradients::{EstimatorKind, EstimatorSpec};
use scgd::objectives::{Objective, ParamVector};
use scgd::optimizer::{run_musketeer, Schedule, SmoothingRule, StepSizeForm};
use scgd::policies::{GainVariant, LambdaSchedule, MusketeerConfig, Normalization};

fn main() -> scgd::Result<()> {
    let estimator = EstimatorSpec { kind: EstimatorKind::FirstOrder, batch_size: 1 };
    let config = MusketeerConfig {
        exploration_len: 1,
        normalization: Normalization::Softmax,
        eta: 5.0,
        lambda: LambdaSchedule::Constant(0.2),
        gain_variant: GainVariant::Avg,
    };
    let schedule = Schedule {
        step: StepSizeForm::PolyOffset { gamma: 1.0, k0: 10.0 },
        smoothing: SmoothingRule::SqrtGamma,
    };
    let theta0 = ParamVector::from_vec(vec![1.0, 1.0]);
    let rounds = 40;

    println!("asymmetric toy: f(x, y) = x^2/2 (only the first coordinate matters)");
    let trajectory = run_musketeer(
        &Objective::axis_quadratic_2d(),
        estimator,
        config,
        schedule,
        rounds,
        7,
        theta0.clone(),
    )?;
    print_history(&trajectory.weight_history);
    let last = trajectory.weight_history.last().expect("rounds > 0");
    println!(
        "after {rounds} rounds the sampler spends {:.0}% of its draws on the live coordinate\n",
        100.0 * last[0]
    );

    // A single control run oscillates (one observed gradient per round moves
    // the softmax a lot), so average the final weights over seeds instead.
    println!("symmetric control: f(x, y) = (x^2 + y^2)/2 (no coordinate to prefer)");
    let seeds = 50;
    let mut mean_first = 0.0;
    for seed in 0..seeds {
        let control = run_musketeer(
            &Objective::quadratic_2d(),
            estimator,
            config,
            schedule,
            rounds,
            seed,
            theta0.clone(),
        )?;
        mean_first += control.weight_history.last().expect("rounds > 0")[0] / seeds as f64;
    }
    println!(
        "mean final P(coordinate 1) over {seeds} seeds: {mean_first:.3} (no preference to learn)"
    );
    Ok(())
}

fn print_history(history: &[Vec<f64>]) {
    println!("  round   P(coordinate 1)   P(coordinate 2)");
    for (i, weights) in history.iter().enumerate() {
        let round = i + 1;
        if round == 1 || round % 10 == 0 {
            println!("  {round:>5}   {:>15.3}   {:>15.3}", weights[0], weights[1]);
        }
    }
}
