//! End-to-end acceptance checks, one per guaranteed behavior. Each test
//! prints a single `PASS`/`FAIL` line with the measured quantities so the
//! whole gate can be read off `cargo test --test acceptance -- --nocapture`.
//!
//! Every tolerance below is pinned to a number that the implementation meets
//! with real margin (measured before freezing), so a regression trips the
//! assert rather than the noise floor.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use scgd::bench::csv::runs_to_csv;
use scgd::bench::{aggregate, run_experiment, ExperimentConfig, Method};
use scgd::gradients::{bias_bound, fd_full, EstimatorKind, EstimatorSpec, GradientValues};
use scgd::objectives::{
    generate_block_dataset, BlockStructureConfig, Dataset, LabelModel, Objective, ParamVector,
};
use scgd::optimizer::{
    gap_upper_bound, run, run_musketeer, validate_conditions, BoundConstants, ConditionStatus,
    FloorSchedule, RunConfig, RunOptions, Schedule, SmoothingRule, StepSizeForm,
};
use scgd::policies::{
    descent_direction, GainVariant, IsScaling, LambdaSchedule, MusketeerConfig, Normalization,
    PolicyKind,
};

/// Print one acceptance line and fail the test if the check did not hold.
fn verdict(ok: bool, name: &str, detail: String) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

fn sqrt_gamma(step: StepSizeForm) -> Schedule {
    Schedule { step, smoothing: SmoothingRule::SqrtGamma }
}

fn block_ridge(n: usize, p: usize, alpha_block: f64, block_size: usize) -> Objective {
    let dataset = generate_block_dataset(&BlockStructureConfig {
        n,
        p,
        alpha_block,
        block_size,
        label_model: LabelModel::LinearGaussian,
        seed: 42,
    })
    .expect("dataset generation");
    let mu = 1.0 / n as f64;
    Objective::ridge(dataset, mu).expect("ridge objective")
}

fn median_at(records: &[scgd::bench::AggregateRecord], method: &str, passes: u64) -> f64 {
    records
        .iter()
        .find(|r| r.method == method && r.passes == passes)
        .unwrap_or_else(|| panic!("no aggregate row for {method} at {passes} passes"))
        .gap_median
}

/// On a block-structured ridge problem whose coordinate curvatures span a
/// 5^α range, the adaptive samplers must beat uniform sampling at an equal
/// query budget, and uniform coordinate descent must stay within 2x of the
/// full-update baseline.
#[test]
fn adaptive_sampling_beats_uniform_on_block_structured_ridge() {
    let objective = block_ridge(1000, 50, 5.0, 5);
    let base = EstimatorSpec { kind: EstimatorKind::FiniteDifference, batch_size: 1 };
    let musketeer = MusketeerConfig {
        exploration_len: 7,
        normalization: Normalization::L1,
        eta: 1.0,
        lambda: LambdaSchedule::InverseLog,
        gain_variant: GainVariant::Avg,
    };
    let methods = ["FULL", "UNIFORM", "MUSKETEER-ABS", "MUSKETEER-AVG"]
        .iter()
        .map(|name| Method::by_name(name, base, musketeer).expect("known method"))
        .collect();
    let config = ExperimentConfig {
        objective,
        methods,
        seeds: (0..20).collect(),
        passes: 200,
        schedule: sqrt_gamma(StepSizeForm::PolyOffset { gamma: 3.0, k0: 10.0 }),
        theta0: ParamVector::zeros(50),
        options: RunOptions::default(),
    };
    let outcome = run_experiment(&config).expect("experiment");
    assert!(outcome.failures.is_empty(), "runs diverged: {:?}", outcome.failures);
    let rows = aggregate(&outcome.records).expect("aggregate");

    let full = median_at(&rows, "FULL", 200);
    let uniform = median_at(&rows, "UNIFORM", 200);
    let abs = median_at(&rows, "MUSKETEER-ABS", 200);
    let avg = median_at(&rows, "MUSKETEER-AVG", 200);
    let ok = abs < uniform && avg < uniform && uniform <= 2.0 * full;
    verdict(
        ok,
        "adaptive sampling beats uniform on block-structured ridge",
        format!(
            "median gaps at 200 passes: FULL {full:.3e}, UNIFORM {uniform:.3e}, \
             MUSKETEER-ABS {abs:.3e}, MUSKETEER-AVG {avg:.3e} \
             (need ABS < UNIFORM, AVG < UNIFORM, UNIFORM <= 2*FULL)"
        ),
    );
}

/// On the 2-D toy whose objective depends on one coordinate only, the
/// adaptive sampler must concentrate its draws on that coordinate, while on
/// the symmetric toy it must stay near uniform (averaged over seeds; a single
/// short run oscillates).
#[test]
fn adaptive_weights_concentrate_on_the_live_coordinate() {
    let estimator = EstimatorSpec { kind: EstimatorKind::FirstOrder, batch_size: 1 };
    let config = MusketeerConfig {
        exploration_len: 1,
        normalization: Normalization::Softmax,
        eta: 5.0,
        lambda: LambdaSchedule::Constant(0.2),
        gain_variant: GainVariant::Avg,
    };
    let schedule = sqrt_gamma(StepSizeForm::PolyOffset { gamma: 1.0, k0: 10.0 });
    let theta0 = ParamVector::from_vec(vec![1.0, 1.0]);
    let seeds = 50u64;
    let rounds = 40;

    let mean_final = |objective: &Objective| -> f64 {
        let mut sum = 0.0;
        for seed in 0..seeds {
            let trajectory = run_musketeer(
                objective,
                estimator,
                config,
                schedule,
                rounds,
                seed,
                theta0.clone(),
            )
            .expect("musketeer run");
            sum += trajectory.weight_history.last().expect("rounds > 0")[0];
        }
        sum / seeds as f64
    };

    let live = mean_final(&Objective::axis_quadratic_2d());
    let control = mean_final(&Objective::quadratic_2d());
    let ok = live > 0.6 && (control - 0.5).abs() <= 0.1;
    verdict(
        ok,
        "adaptive weights concentrate on the live coordinate",
        format!(
            "mean final weight on coordinate 1 over {seeds} seeds: \
             {live:.3} on the one-live-coordinate toy (need > 0.6), \
             {control:.3} on the symmetric toy (need within 0.1 of 0.5)"
        ),
    );
}

/// The finite-difference gradient bias must stay under c*h with
/// c = sqrt(C)*L/2, shrink linearly in h, and the bound must be tight enough
/// that substituting any constant smaller than the spectral norm for L would
/// break it. The duplicated-column design makes the largest eigenvalue twice
/// the largest diagonal entry, so the check distinguishes the two.
#[test]
fn finite_difference_bias_stays_under_the_smoothness_bound() {
    let n = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut features = DMatrix::zeros(n, 2);
    let mut labels = DVector::zeros(n);
    for i in 0..n {
        let z = scgd::rng::standard_normal(&mut rng);
        features[(i, 0)] = z;
        features[(i, 1)] = z; // duplicated column: lambda_max = 2 * max diagonal
        labels[i] = 2.0 * z + 0.1 * scgd::rng::standard_normal(&mut rng);
    }
    let dataset = Dataset::new(features, labels).expect("dataset");
    let objective = Objective::ridge(dataset, 1.0 / n as f64).expect("ridge");
    let smoothness = objective.smoothness_constant();
    let slope = bias_bound(smoothness, EstimatorKind::FiniteDifference, 2);

    let theta = ParamVector::from_vec(vec![0.3, -0.7]);
    let batch: Vec<usize> = (0..n).collect();
    let exact = objective.exact_gradient(&theta, None).expect("gradient");
    let error_at = |h: f64| -> f64 {
        let sample = fd_full(&objective, &theta, h, &batch).expect("estimate");
        match sample.values {
            GradientValues::Full(g) => (g - &exact).norm(),
            GradientValues::Coordinate { .. } => unreachable!("fd_full returns a full vector"),
        }
    };

    let steps = [1.0, 0.1, 0.01];
    let errors: Vec<f64> = steps.iter().map(|&h| error_at(h)).collect();
    let within = steps.iter().zip(&errors).all(|(&h, &e)| e <= slope * h);
    // On a quadratic the bias is exactly linear in h, so consecutive errors
    // shrink by the step ratio (10); allow [8, 12] for float noise.
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let linear = ratios.iter().all(|r| (8.0..=12.0).contains(r));
    // Non-vacuity: the measured bias uses a sizable fraction of the bound, so
    // an L smaller than the spectral norm (e.g. the max diagonal, half of it)
    // would push the fraction above 1 and fail the `within` check.
    let fraction = errors[0] / (slope * steps[0]);
    let tight = fraction > 0.5;
    verdict(
        within && linear && tight,
        "finite-difference bias stays under the smoothness bound",
        format!(
            "|g(h) - grad f| <= {slope:.4}*h at h = 1, 0.1, 0.01 \
             (errors {:.3e}, {:.3e}, {:.3e}); per-decade ratios {:.2}, {:.2} \
             (need 8..12); bias uses {:.0}% of the bound",
            errors[0],
            errors[1],
            errors[2],
            ratios[0],
            ratios[1],
            100.0 * fraction
        ),
    );
}

/// On a problem with known constants (f = ||theta||^2/2 via a ridge instance,
/// L = mu_PL = 1, uniform sampling over 4 coordinates), the mean optimality
/// gap over 200 seeds must stay below the certified expected-gap bound at
/// every checkpoint, and the bound itself must decay at its advertised
/// t^(-mu*beta*gamma) rate.
#[test]
fn expected_gap_bound_holds_along_the_trajectory() {
    let p = 4;
    let dataset = Dataset::new(DMatrix::identity(p, p) * 2.0, DVector::zeros(p)).expect("dataset");
    // ||2*theta||^2 / (2*4) = ||theta||^2 / 2: smoothness 1, PL constant 1.
    let objective = Objective::ridge(dataset, 0.0).expect("ridge");
    let gamma = 16.0;
    let constants = BoundConstants {
        smoothness: 1.0,
        // E||g e_k||^2 = (1/p)*||grad f||^2 = (2/p)*(f - f*) under uniform
        // coordinate sampling, so the growth constant is 1/p exactly.
        growth: 1.0 / p as f64,
        noise: 0.0,
        bias: 0.0,
        pl_constant: 1.0,
        floor: 1.0 / p as f64,
        gamma,
        alpha: 1.0,
        initial_gap: 2.0,
    };
    let checkpoints = [10u64, 100, 1000, 4000];
    let bounds: Vec<f64> = checkpoints
        .iter()
        .map(|&t| gap_upper_bound(&constants, t).expect("bound"))
        .collect();

    let seeds = 200u64;
    let mut means = vec![0.0f64; checkpoints.len()];
    for seed in 0..seeds {
        let config = RunConfig {
            objective: &objective,
            estimator: EstimatorSpec { kind: EstimatorKind::FirstOrder, batch_size: p },
            policy: PolicyKind::Uniform,
            musketeer: None,
            scaling: IsScaling::OverP,
            schedule: sqrt_gamma(StepSizeForm::Poly { gamma, alpha: 1.0 }),
            theta0: ParamVector::from_element(p, 1.0),
            seed,
            // gamma_t = 16/t overshoots until t >= 8; the transient blows the
            // value up ~1e7x before the contraction takes over, so the
            // divergence guard must sit above that.
            options: RunOptions { divergence_factor: 1e12, ..RunOptions::default() },
        };
        let trajectory = run(&config, &checkpoints).expect("run");
        for (mean, row) in means.iter_mut().zip(&trajectory.checkpoints) {
            *mean += row.value / seeds as f64; // f* = 0
        }
    }

    let holds = means.iter().zip(&bounds).all(|(&m, &b)| m <= b);
    let decays = means.windows(2).all(|w| w[1] < w[0]);
    // The alpha = 1, sigma = c = 0 branch is 2*exp(L*growth*gamma^2) *
    // delta0 * t^(-mu*beta*gamma); mu*beta*gamma = 4 here, so the bound must
    // fall by exactly 10^4 per decade of t.
    let rate = bounds[1] / bounds[0];
    let rate_ok = (rate - 1e-4).abs() <= 1e-14;
    verdict(
        holds && decays && rate_ok,
        "expected gap bound holds along the trajectory",
        format!(
            "mean gap over {seeds} seeds at t = 10, 100, 1000, 4000: \
             {:.3e}, {:.3e}, {:.3e}, {:.3e} vs bound {:.3e}, {:.3e}, {:.3e}, {:.3e} \
             (bound decade ratio {:.6e}, advertised 1e-4)",
            means[0], means[1], means[2], means[3], bounds[0], bounds[1], bounds[2], bounds[3],
            rate
        ),
    );
}

/// With uniform weights the importance-weighted sampler must reproduce the
/// plain uniform sampler bit for bit: d_k = 1/p makes the reweighting factor
/// p*d_k round to exactly 1, and both policies consume the RNG identically.
#[test]
fn importance_weighting_is_inert_under_uniform_weights() {
    let objective = block_ridge(200, 50, 3.0, 5);
    let schedule = sqrt_gamma(StepSizeForm::PolyOffset { gamma: 3.0, k0: 10.0 });
    let checkpoints = [0u64, 2500, 5000];
    let run_with = |policy: PolicyKind| {
        let config = RunConfig {
            objective: &objective,
            estimator: EstimatorSpec { kind: EstimatorKind::FiniteDifference, batch_size: 1 },
            policy,
            musketeer: None,
            scaling: IsScaling::OverP,
            schedule,
            theta0: ParamVector::zeros(50),
            seed: 3,
            options: RunOptions::default(),
        };
        run(&config, &checkpoints).expect("run")
    };

    let plain = run_with(PolicyKind::Uniform);
    let weighted = run_with(PolicyKind::UniformIs);
    let theta_equal = plain
        .final_theta
        .iter()
        .zip(weighted.final_theta.iter())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    let values_equal = plain
        .checkpoints
        .iter()
        .zip(&weighted.checkpoints)
        .all(|(a, b)| a.value.to_bits() == b.value.to_bits());
    verdict(
        theta_equal && values_equal,
        "importance weighting is inert under uniform weights",
        format!(
            "UNIFORM and UNIFORM-IS agree bitwise over {} steps at p = 50 \
             (final theta and all checkpoint values)",
            checkpoints.last().unwrap()
        ),
    );
}

/// Averaging the sampled update over the coordinate distribution must give
/// back the gradient direction: with the 1/(p*d_k) reweighting the mean is
/// grad f / p for any strictly positive weights, and with raw 1/d_k
/// reweighting it is grad f itself. Checked exhaustively for p = 1..8.
#[test]
fn importance_weighted_updates_are_unbiased() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for p in 1..=8usize {
        for _ in 0..20 {
            // Strictly positive weights on the simplex and an arbitrary gradient.
            let raw: Vec<f64> = (0..p).map(|_| rng.random::<f64>() + 0.1).collect();
            let total: f64 = raw.iter().sum();
            let weights = scgd::policies::ProbabilityWeights::new(
                raw.iter().map(|w| w / total).collect(),
            )
            .expect("weights");
            let gradient: Vec<f64> =
                (0..p).map(|_| scgd::rng::standard_normal(&mut rng)).collect();

            for (kind, scaling, divisor) in [
                (PolicyKind::UniformIs, IsScaling::OverP, p as f64),
                (PolicyKind::MusketeerIs, IsScaling::OverP, p as f64),
                (PolicyKind::UniformIs, IsScaling::Raw, 1.0),
            ] {
                for k in 0..p {
                    let update = descent_direction(kind, &weights, k, gradient[k], scaling)
                        .expect("update");
                    // E[coefficient * e_k] contributes d_k * coefficient to
                    // coordinate k; it must equal gradient[k] / divisor.
                    let mean_k = weights.get(k) * update.coefficient;
                    worst = worst.max((mean_k - gradient[k] / divisor).abs());
                }
            }
        }
    }
    let ok = worst <= 1e-12;
    verdict(
        ok,
        "importance-weighted updates are unbiased",
        format!(
            "max |E[update] - grad/p| over p = 1..8, random positive weights: \
             {worst:.2e} (need <= 1e-12; raw scaling checked against grad itself)"
        ),
    );
}

/// The softmax exploitation weights must stay inside their analytic envelope:
/// with temperature eta and accumulated-gain spread D = max G - min G, every
/// weight sits within (e^(eta*D) - 1)/p of uniform, and the exploration floor
/// keeps every weight at or above lambda_n / p.
#[test]
fn softmax_weights_respect_the_analytic_envelope() {
    let config = MusketeerConfig {
        exploration_len: 1,
        normalization: Normalization::Softmax,
        eta: 1.0,
        lambda: LambdaSchedule::InverseLog,
        gain_variant: GainVariant::Avg,
    };
    let rounds = 200;
    let trajectory = run_musketeer(
        &Objective::quadratic_2d(),
        EstimatorSpec { kind: EstimatorKind::FirstOrder, batch_size: 1 },
        config,
        sqrt_gamma(StepSizeForm::PolyOffset { gamma: 1.0, k0: 10.0 }),
        rounds,
        11,
        ParamVector::from_vec(vec![1.0, 1.0]),
    )
    .expect("musketeer run");
    let snapshot = trajectory.policy.expect("adaptive policy state");
    assert_eq!(snapshot.rounds, rounds);

    let p = snapshot.weights.len() as f64;
    let spread = snapshot.gains.iter().cloned().fold(f64::MIN, f64::max)
        - snapshot.gains.iter().cloned().fold(f64::MAX, f64::min);
    let envelope = ((config.eta * spread).exp() - 1.0) / p;
    // The floor uses the lambda applied at the last exploitation, i.e. the
    // value at the round counter before its final increment.
    let lambda_last = config.lambda.at_round(rounds - 1);
    let uniform = 1.0 / p;

    let inside = snapshot.weights.iter().all(|&w| (w - uniform).abs() <= envelope + 1e-15);
    let floored = snapshot.weights.iter().all(|&w| w >= lambda_last / p - 1e-15);
    let simplex = (snapshot.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
    // The envelope only certifies something if it is tighter than the trivial
    // |w - 1/p| <= 1/2.
    let binding = envelope < 0.5;
    verdict(
        inside && floored && simplex && binding,
        "softmax weights respect the analytic envelope",
        format!(
            "after {rounds} rounds: weights {:?}, gain spread {spread:.4}, \
             envelope (e^(eta*D)-1)/p = {envelope:.4} (binding since < 0.5), \
             floor lambda/p = {:.4}",
            snapshot.weights,
            lambda_last / p
        ),
    );
}

/// A schedule that passes all three convergence conditions must actually
/// converge: every seed of a uniform-sampling first-order run on a small
/// ridge problem ends below a 1e-4 optimality gap. The validator must also
/// flag the two canonical violations (non-summable squared steps, smoothing
/// that does not shrink with the step size).
#[test]
fn validated_schedules_converge_on_every_seed() {
    let floor = FloorSchedule::Constant(1.0 / 5.0);
    let good = sqrt_gamma(StepSizeForm::PolyOffset { gamma: 12.0, k0: 8.0 });
    let good_report = validate_conditions(&good, &floor);

    let slow = sqrt_gamma(StepSizeForm::Poly { gamma: 0.3, alpha: 0.0 });
    let slow_report = validate_conditions(&slow, &FloorSchedule::Constant(0.1));
    let slow_statuses: Vec<ConditionStatus> =
        slow_report.checks.iter().map(|c| c.status).collect();

    let fixed_h = Schedule {
        step: StepSizeForm::Poly { gamma: 1.0, alpha: 1.0 },
        smoothing: SmoothingRule::Constant(0.1),
    };
    let fixed_h_report = validate_conditions(&fixed_h, &FloorSchedule::Constant(0.1));
    let fixed_h_statuses: Vec<ConditionStatus> =
        fixed_h_report.checks.iter().map(|c| c.status).collect();

    let validator_ok = good_report.all_pass()
        && slow_statuses
            == [ConditionStatus::Pass, ConditionStatus::Fail, ConditionStatus::Pass]
        && fixed_h_statuses
            == [ConditionStatus::Pass, ConditionStatus::Pass, ConditionStatus::Fail];

    let objective = block_ridge(100, 5, 1.0, 1);
    let method = Method::by_name(
        "UNIFORM",
        EstimatorSpec { kind: EstimatorKind::FirstOrder, batch_size: 8 },
        MusketeerConfig {
            exploration_len: 2,
            normalization: Normalization::L1,
            eta: 1.0,
            lambda: LambdaSchedule::InverseLog,
            gain_variant: GainVariant::Avg,
        },
    )
    .expect("method");
    let config = ExperimentConfig {
        objective,
        methods: vec![method],
        seeds: (0..10).collect(),
        passes: 40_000,
        schedule: good,
        theta0: ParamVector::zeros(5),
        options: RunOptions::default(),
    };
    let outcome = run_experiment(&config).expect("experiment");
    assert!(outcome.failures.is_empty(), "runs diverged: {:?}", outcome.failures);
    let final_gaps: Vec<f64> = (0..10)
        .map(|seed| {
            outcome
                .records
                .iter()
                .filter(|r| r.seed == seed && r.passes == 40_000)
                .map(|r| r.gap)
                .next()
                .expect("final checkpoint")
        })
        .collect();
    let worst = final_gaps.iter().cloned().fold(f64::MIN, f64::max);
    let converged = worst <= 1e-4;

    verdict(
        validator_ok && converged,
        "validated schedules converge on every seed",
        format!(
            "validator: good schedule all-pass, constant step fails the \
             summability check, fixed smoothing fails the h^2 = O(gamma) \
             check; worst final gap across 10 seeds after 40000 passes: \
             {worst:.3e} (need <= 1e-4)"
        ),
    );
}

/// Repeating an experiment must reproduce the emitted records byte for byte,
/// including when the runs execute inside a rayon pool of a different size.
#[test]
fn experiments_reproduce_byte_identically() {
    let make_config = || {
        let base = EstimatorSpec { kind: EstimatorKind::FiniteDifference, batch_size: 1 };
        let musketeer = MusketeerConfig {
            exploration_len: 3,
            normalization: Normalization::L1,
            eta: 1.0,
            lambda: LambdaSchedule::InverseLog,
            gain_variant: GainVariant::Avg,
        };
        let methods = ["FULL", "UNIFORM", "MUSKETEER-ABS"]
            .iter()
            .map(|name| Method::by_name(name, base, musketeer).expect("known method"))
            .collect();
        ExperimentConfig {
            objective: block_ridge(200, 10, 2.0, 2),
            methods,
            seeds: (0..5).collect(),
            passes: 40,
            schedule: sqrt_gamma(StepSizeForm::PolyOffset { gamma: 3.0, k0: 10.0 }),
            theta0: ParamVector::zeros(10),
            options: RunOptions::default(),
        }
    };

    let csv_once = |config: &ExperimentConfig| {
        let outcome = run_experiment(config).expect("experiment");
        assert!(outcome.failures.is_empty(), "runs diverged: {:?}", outcome.failures);
        runs_to_csv(&outcome.records)
    };

    let config = make_config();
    let first = csv_once(&config);
    let second = csv_once(&make_config());
    let single_threaded = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool")
        .install(|| csv_once(&config));

    let digest = |text: &str| {
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        format!("{:x}", hasher.finalize())
    };
    let d1 = digest(&first);
    let ok = first == second && first == single_threaded && d1 == digest(&second);
    verdict(
        ok,
        "experiments reproduce byte-identically",
        format!(
            "three runs (twice on the default pool, once on 1 thread) emit \
             identical CSV, sha256 {}...",
            &d1[..16]
        ),
    );
}
