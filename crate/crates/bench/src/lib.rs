//! Shared fixtures for the solver benchmarks.

use dualprox_core::problems::{
    builtin, make_instance, reference_solve, ReferenceMode, DEFAULT_REF_TOL,
};
use dualprox_core::solvers::{make_schedule, Method, ScheduleKind, SolverConfig, StepRule};
use dualprox_core::CompositeProblem;

pub fn instance(name: &str) -> CompositeProblem {
    make_instance(&builtin(name, None).expect("builtin name")).expect("builtin instance")
}

/// Fixed step at `L_F`, or the default backtracking rule.
pub fn config(
    problem: &CompositeProblem,
    method: Method,
    schedule: ScheduleKind,
    backtracking: bool,
    iters: usize,
) -> SolverConfig {
    let step = if backtracking {
        StepRule::default_backtracking(problem)
    } else {
        StepRule::fixed_at(problem)
    };
    SolverConfig::new(method, step, iters)
        .with_schedule(make_schedule(schedule).expect("valid schedule"))
}

pub fn reference(
    problem: &CompositeProblem,
    mode: ReferenceMode,
) -> dualprox_core::diagnostics::ReferenceSolution {
    reference_solve(problem, mode, DEFAULT_REF_TOL).expect("reference solution")
}
