//! Check step-size and smoothing schedules against the convergence
//! conditions before spending any compute on a run.
//!
//! Convergence of the stochastic coordinate method needs three things from a
//! schedule (γₜ, hₜ) and the policy's sampling floor βₜ:
//!   Σ γₜβₜ = ∞  (enough total movement),
//!   Σ γₜ²  < ∞  (noise dies out),
//!   hₜ² = O(γₜ) (smoothing bias dies out).
//! The validator classifies each analytically and reports PASS / FAIL /
//! CANNOT VERIFY per condition.
//!
//! Run with: cargo run --example schedule_validation

use scgd::optimizer::{
    validate_conditions, FloorSchedule, Schedule, SmoothingRule, StepSizeForm,
};

fn show(name: &str, schedule: Schedule, floor: FloorSchedule) {
    let report = validate_conditions(&schedule, &floor);
    let verdict = if report.all_pass() { "usable" } else { "NOT usable" };
    println!("{name} -> {verdict}");
    print!("{report}");
    println!();
}

fn main() {
    // γₜ = 3/(t+10), h = √γ, uniform sampling over p = 50: the classic
    // 1/t step size satisfies everything.
    show(
        "gamma_t = 3/(t+10), h = sqrt(gamma), beta = 1/50",
        Schedule {
            step: StepSizeForm::PolyOffset { gamma: 3.0, k0: 10.0 },
            smoothing: SmoothingRule::SqrtGamma,
        },
        FloorSchedule::Constant(1.0 / 50.0),
    );

    // γₜ = 0.3·t^0 (constant): plenty of movement, but the noise never
    // averages out — Σγ² diverges.
    show(
        "gamma_t = 0.3 (constant), h = sqrt(gamma), beta = 1/50",
        Schedule {
            step: StepSizeForm::Poly { gamma: 0.3, alpha: 0.0 },
            smoothing: SmoothingRule::SqrtGamma,
        },
        FloorSchedule::Constant(1.0 / 50.0),
    );

    // γₜ = t^{-1} with a fixed smoothing radius: the step size is fine but
    // h² is no longer O(γₜ), so the finite-difference bias dominates late.
    show(
        "gamma_t = 1/t, h = 0.1 (constant), beta = 1/50",
        Schedule {
            step: StepSizeForm::Poly { gamma: 1.0, alpha: 1.0 },
            smoothing: SmoothingRule::Constant(0.1),
        },
        FloorSchedule::Constant(1.0 / 50.0),
    );

    // The adaptive policy's floor decays like 1/(p·ln t); γₜβₜ then behaves
    // like 1/(t·ln t), whose sum still diverges — the mixture keeps enough
    // exploration for the guarantee.
    show(
        "gamma_t = 1/(t+10), h = sqrt(gamma), beta_t = 1/(50 ln(t+e))",
        Schedule {
            step: StepSizeForm::PolyOffset { gamma: 1.0, k0: 10.0 },
            smoothing: SmoothingRule::SqrtGamma,
        },
        FloorSchedule::InverseLogOverDim { dim: 50 },
    );
}
