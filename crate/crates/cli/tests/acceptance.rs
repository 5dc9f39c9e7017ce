//! Acceptance suite: one pass/fail line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dualprox_cli::config::ProblemSource;
use dualprox_cli::{cmd_run, RunConfig, StepChoice};
use dualprox_core::diagnostics::{
    certify, fit_rate, running_min, BoundCertificate, BoundId, CertContext, ReferenceSolution,
};
use dualprox_core::linalg::{dist, norm};
use dualprox_core::problems::{
    builtin, make_instance, reference_solve, ReferenceMode, BUILTINS, DEFAULT_REF_TOL,
};
use dualprox_core::solvers::{
    dpg_step, make_schedule, prox_form_step, run_solver, Method, ScheduleKind, SolverConfig,
    SolverReport, StepRule,
};
use dualprox_core::CompositeProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn instance(name: &str) -> CompositeProblem {
    make_instance(&builtin(name, None).unwrap()).unwrap()
}

fn reference(problem: &CompositeProblem) -> ReferenceSolution {
    let mode = if problem.dual_qp_form().is_some() && problem.dual_dim() <= 14 {
        ReferenceMode::Enumerate
    } else {
        ReferenceMode::LongRun
    };
    reference_solve(problem, mode, DEFAULT_REF_TOL).unwrap()
}

fn run(
    problem: &CompositeProblem,
    method: Method,
    schedule: ScheduleKind,
    step: StepRule,
    iters: usize,
) -> SolverReport {
    let config =
        SolverConfig::new(method, step, iters).with_schedule(make_schedule(schedule).unwrap());
    run_solver(problem, &config).unwrap()
}

/// Fails when any evaluated row of `ids` fails or no row was evaluated.
fn require_pass(label: &str, certs: &[BoundCertificate], ids: &[BoundId]) -> Result<usize, String> {
    let mut evaluated = 0;
    for id in ids {
        let rows: Vec<_> = certs.iter().filter(|c| c.bound_id == *id).collect();
        if let Some(bad) = rows.iter().find(|c| c.failed()) {
            return Err(format!(
                "{label}: {id} fails at k={} (bound {:e}, measured {:e})",
                bad.k,
                bad.bound().unwrap(),
                bad.measured().unwrap()
            ));
        }
        let n = rows.iter().filter(|c| c.passed().is_some()).count();
        if n == 0 {
            return Err(format!("{label}: {id} was never evaluated"));
        }
        evaluated += n;
    }
    Ok(evaluated)
}

fn step_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for name in BUILTINS {
        let p = instance(name);
        for _ in 0..50 {
            let scale = 10f64.powf(rng.random_range(-1.0..1.0));
            let y: Vec<f64> = (0..p.dual_dim())
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let l = p.lipschitz() * 10f64.powf(rng.random_range(-1.0..1.0));
            let a = dpg_step(&p, &y, l).map_err(|e| e.to_string())?.y;
            let b = prox_form_step(&p, &y, l).map_err(|e| e.to_string())?;
            let rel = dist(&a, &b) / (1.0 + norm(&a));
            worst = worst.max(rel);
            if rel > 1e-10 {
                return Err(format!("{name}: relative difference {rel:e} at L={l}"));
            }
        }
    }
    Ok(format!("250 states, worst relative difference {worst:.1e}"))
}

fn step_residual() -> Check {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for name in BUILTINS {
        let p = instance(name);
        let runs = [
            (Method::Dpg, ScheduleKind::Fista),
            (Method::Fdpg, ScheduleKind::Fista),
            (Method::Gfdpg, ScheduleKind::Poly { a: 4.0 }),
            (Method::Gfdpg, ScheduleKind::FixedHorizon { n: 500 }),
        ];
        for (method, schedule) in runs {
            for step in [StepRule::fixed_at(&p), StepRule::default_backtracking(&p)] {
                let report = run(&p, method, schedule.clone(), step, 500);
                for r in &report.records {
                    let rel = r.step_residual / (1.0 + r.au_norm);
                    worst = worst.max(rel);
                    count += 1;
                    if rel > 1e-10 {
                        return Err(format!("{name} {method} k={}: residual {rel:e}", r.k));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{count} iterations, worst scaled residual {worst:.1e}"
    ))
}

fn fdpg_dual_certificate() -> Check {
    let mut rows = 0;
    for name in ["tv1d", "box-qp"] {
        let p = instance(name);
        let r = reference(&p);
        let report = run(
            &p,
            Method::Fdpg,
            ScheduleKind::Fista,
            StepRule::fixed_at(&p),
            2000,
        );
        let certs = certify(
            &CertContext::new(&p, &r, &report),
            Some(&[BoundId::FdpgDualK, BoundId::FdpgDualT]),
        );
        rows += require_pass(name, &certs, &[BoundId::FdpgDualK, BoundId::FdpgDualT])?;
    }
    Ok(format!("{rows} rows on tv1d and box-qp"))
}

fn gfdpg_schedules() -> [ScheduleKind; 5] {
    [
        ScheduleKind::Poly { a: 3.0 },
        ScheduleKind::Poly { a: 4.0 },
        ScheduleKind::Poly { a: 8.0 },
        ScheduleKind::FixedHorizon { n: 100 },
        ScheduleKind::FixedHorizon { n: 500 },
    ]
}

fn gfdpg_ids(schedule: &ScheduleKind) -> Vec<BoundId> {
    let mut ids = vec![BoundId::GfdpgDual, BoundId::GfdpgGrad, BoundId::Telescoping];
    if matches!(schedule, ScheduleKind::Poly { .. }) {
        ids.push(BoundId::CorollaryGrad);
    }
    ids
}

fn horizon_iters(schedule: &ScheduleKind, default: usize) -> usize {
    match schedule {
        ScheduleKind::FixedHorizon { n } => *n,
        _ => default,
    }
}

fn gfdpg_certificates(step_for: fn(&CompositeProblem) -> StepRule) -> Result<usize, String> {
    let mut rows = 0;
    for name in ["tv1d", "box-qp"] {
        let p = instance(name);
        let r = reference(&p);
        for schedule in gfdpg_schedules() {
            let iters = horizon_iters(&schedule, 2000);
            let report = run(&p, Method::Gfdpg, schedule.clone(), step_for(&p), iters);
            let ids = gfdpg_ids(&schedule);
            let certs = certify(&CertContext::new(&p, &r, &report), Some(&ids));
            rows += require_pass(&format!("{name} {schedule}"), &certs, &ids)?;
        }
    }
    Ok(rows)
}

fn gfdpg_certificate_suite() -> Check {
    Ok(format!(
        "{} rows over 5 schedules on tv1d and box-qp",
        gfdpg_certificates(StepRule::fixed_at)?
    ))
}

fn gap_certificates() -> Check {
    let p = instance("tv1d");
    let r = reference(&p);
    let gap_ids = [
        BoundId::Lemma3Gap,
        BoundId::Lemma3GapStep,
        BoundId::Lemma4Gap,
        BoundId::Lemma4GapStep,
    ];
    let mut rows = 0;
    let dpg = run(
        &p,
        Method::Dpg,
        ScheduleKind::Fista,
        StepRule::fixed_at(&p),
        2000,
    );
    let ids: Vec<_> = gap_ids.iter().copied().chain([BoundId::Thm2Gap]).collect();
    rows += require_pass(
        "tv1d dpg",
        &certify(&CertContext::new(&p, &r, &dpg), Some(&ids)),
        &ids,
    )?;
    let fdpg = run(
        &p,
        Method::Fdpg,
        ScheduleKind::Fista,
        StepRule::fixed_at(&p),
        2000,
    );
    rows += require_pass(
        "tv1d fdpg",
        &certify(&CertContext::new(&p, &r, &fdpg), Some(&ids)),
        &ids,
    )?;
    let gf = run(
        &p,
        Method::Gfdpg,
        ScheduleKind::Poly { a: 4.0 },
        StepRule::fixed_at(&p),
        2000,
    );
    let ids: Vec<_> = gap_ids
        .iter()
        .copied()
        .chain([BoundId::Thm4SplitGap, BoundId::Thm4Gap])
        .collect();
    rows += require_pass(
        "tv1d gfdpg",
        &certify(&CertContext::new(&p, &r, &gf), Some(&ids)),
        &ids,
    )?;

    let p = instance("intersection");
    let r = reference(&p);
    let fdpg = run(
        &p,
        Method::Fdpg,
        ScheduleKind::Fista,
        StepRule::fixed_at(&p),
        2000,
    );
    let needs_gamma_g = [BoundId::Lemma4Gap, BoundId::Lemma4GapStep, BoundId::Thm2Gap];
    let ids: Vec<_> = [BoundId::Lemma3Gap, BoundId::Lemma3GapStep]
        .into_iter()
        .chain(needs_gamma_g)
        .collect();
    let certs = certify(&CertContext::new(&p, &r, &fdpg), Some(&ids));
    rows += require_pass(
        "intersection",
        &certs,
        &[BoundId::Lemma3Gap, BoundId::Lemma3GapStep],
    )?;
    for id in needs_gamma_g {
        if certs
            .iter()
            .any(|c| c.bound_id == id && c.passed().is_some())
        {
            return Err(format!(
                "intersection: {id} evaluated although gamma_g is infinite"
            ));
        }
    }
    Ok(format!(
        "{rows} rows pass; indicator-only gap bounds NA on intersection"
    ))
}

fn iterate_bound() -> Check {
    let mut rows = 0;
    for name in BUILTINS {
        let p = instance(name);
        let r = reference(&p);
        for schedule in gfdpg_schedules().into_iter().chain([ScheduleKind::Fista]) {
            let iters = horizon_iters(&schedule, 1000);
            for step in [StepRule::fixed_at(&p), StepRule::default_backtracking(&p)] {
                let report = run(&p, Method::Gfdpg, schedule.clone(), step, iters);
                let ids = [BoundId::Lemma5Iterates];
                let certs = certify(&CertContext::new(&p, &r, &report), Some(&ids));
                rows += require_pass(&format!("{name} {schedule}"), &certs, &ids)?;
            }
        }
    }
    Ok(format!(
        "{rows} rows over every builtin, 6 schedules, fixed and backtracking steps"
    ))
}

fn reduction_to_fdpg() -> Check {
    let mut worst: f64 = 0.0;
    for name in BUILTINS {
        let p = instance(name);
        let a = run(
            &p,
            Method::Fdpg,
            ScheduleKind::Fista,
            StepRule::fixed_at(&p),
            100,
        );
        let b = run(
            &p,
            Method::Gfdpg,
            ScheduleKind::Fista,
            StepRule::fixed_at(&p),
            100,
        );
        if a.records.len() != b.records.len() {
            return Err(format!(
                "{name}: {} vs {} iterations",
                a.records.len(),
                b.records.len()
            ));
        }
        for (ra, rb) in a.records.iter().zip(&b.records) {
            let d = dist(&ra.y, &rb.y) / (1.0 + norm(&ra.y));
            worst = worst.max(d);
            if d > 1e-10 {
                return Err(format!("{name} k={}: iterates differ by {d:e}", ra.k));
            }
        }
    }
    Ok(format!("worst relative iterate difference {worst:.1e}"))
}

/// Slope and the `k` range actually fitted.
fn envelope_slope(points: &[(usize, f64)], floor: f64) -> Result<(f64, (usize, usize)), String> {
    let values: Vec<f64> = points.iter().map(|p| p.1).collect();
    let env: Vec<(usize, f64)> = points
        .iter()
        .map(|p| p.0)
        .zip(running_min(&values))
        .collect();
    fit_rate("envelope", &env, 20..=2000, floor)
        .map(|f| (f.slope, f.window))
        .map_err(|e| e.to_string())
}

fn empirical_rates() -> Check {
    let p = instance("box-qp");
    let r = reference(&p);
    let floor = 64.0 * f64::EPSILON * (1.0 + r.dual_value.abs());
    let gap = |report: &SolverReport| -> Vec<(usize, f64)> {
        report
            .records
            .iter()
            .map(|x| (x.k, x.dual_value - r.dual_value))
            .collect()
    };
    let dpg = run(
        &p,
        Method::Dpg,
        ScheduleKind::Fista,
        StepRule::fixed_at(&p),
        2000,
    );
    let fdpg = run(
        &p,
        Method::Fdpg,
        ScheduleKind::Fista,
        StepRule::fixed_at(&p),
        2000,
    );
    let gf = run(
        &p,
        Method::Gfdpg,
        ScheduleKind::Poly { a: 4.0 },
        StepRule::fixed_at(&p),
        2000,
    );
    let (s_dpg, w_dpg) = envelope_slope(&gap(&dpg), floor)?;
    let (s_fdpg, w_fdpg) = envelope_slope(&gap(&fdpg), floor)?;
    let pg: Vec<(usize, f64)> = gf
        .records
        .iter()
        .map(|x| (x.k, x.pg_norm().unwrap()))
        .collect();
    let (s_gf, w_gf) = envelope_slope(&pg, 1e-15)?;
    let detail = format!(
        "dpg {s_dpg:.2} on k={w_dpg:?}, fdpg {s_fdpg:.2} on k={w_fdpg:?}, gfdpg(a=4) pg {s_gf:.2} on k={w_gf:?}"
    );
    if s_dpg <= -0.9 && s_fdpg <= -1.8 && s_gf <= -1.4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn backtracking() -> Check {
    let mut worst: f64 = 0.0;
    for name in ["tv1d", "box-qp"] {
        let p = instance(name);
        let r = reference(&p);
        let mut runs = vec![(Method::Fdpg, ScheduleKind::Fista, 2000)];
        runs.extend(gfdpg_schedules().map(|s| (Method::Gfdpg, s.clone(), horizon_iters(&s, 2000))));
        for (method, schedule, iters) in runs {
            let report = run(
                &p,
                method,
                schedule.clone(),
                StepRule::default_backtracking(&p),
                iters,
            );
            let label = format!("{name} {method} {schedule}");
            let ls: Vec<f64> = report.records.iter().map(|x| x.lipschitz).collect();
            if ls.windows(2).any(|w| w[1] < w[0]) {
                return Err(format!("{label}: L_k decreases"));
            }
            let top = ls.iter().copied().fold(0.0, f64::max);
            worst = worst.max(top / p.lipschitz());
            if top > 2.0 * p.lipschitz() {
                return Err(format!("{label}: L_k = {top} exceeds 2 L_F"));
            }
            let mut ids = vec![
                BoundId::Lemma5Iterates,
                BoundId::Lemma3Gap,
                BoundId::Lemma4Gap,
                BoundId::GfdpgDual,
                BoundId::GfdpgGrad,
                BoundId::Telescoping,
            ];
            match (&method, &schedule) {
                (Method::Fdpg, _) => {
                    ids.extend([BoundId::FdpgDualK, BoundId::FdpgDualT, BoundId::Thm2Gap])
                }
                (_, ScheduleKind::Poly { .. }) => ids.extend([
                    BoundId::CorollaryGrad,
                    BoundId::Thm4SplitGap,
                    BoundId::Thm4Gap,
                ]),
                _ => {}
            }
            let certs = certify(&CertContext::new(&p, &r, &report), Some(&ids));
            require_pass(&label, &certs, &ids)?;
        }
    }
    Ok(format!("max L_k / L_F = {worst:.3}; items 3 to 6 pass"))
}

fn toy_exactness() -> Check {
    let p = instance("tv1d-toy");
    let r = reference_solve(&p, ReferenceMode::Enumerate, DEFAULT_REF_TOL)
        .map_err(|e| e.to_string())?;
    let close = |a: &[f64], b: &[f64]| dist(a, b) <= 1e-12;
    if !close(&r.y_star, &[-1.0]) || !close(&r.x_star, &[1.0, 3.0]) {
        return Err(format!("y* = {:?}, x* = {:?}", r.y_star, r.x_star));
    }
    if (r.primal_value - 3.0).abs() > 1e-12 || (-r.dual_value - 3.0).abs() > 1e-12 {
        return Err(format!(
            "H(x*) = {}, q(y*) = {}",
            r.primal_value, -r.dual_value
        ));
    }
    let step = dpg_step(&p, &[0.0], 2.0).map_err(|e| e.to_string())?;
    if !close(&step.y, &[-1.0]) {
        return Err(format!("one DPG step gives {:?}", step.y));
    }
    Ok("y* = [-1], x* = [1, 3], H(x*) = q(y*) = 3, one DPG step reaches y*".into())
}

fn gradient_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let h = 1e-6;
    for name in BUILTINS {
        let p = instance(name);
        for _ in 0..20 {
            let y: Vec<f64> = (0..p.dual_dim())
                .map(|_| rng.sample(StandardNormal))
                .collect();
            let grad = p.grad_dual_smooth(&y).map_err(|e| e.to_string())?;
            for j in 0..y.len() {
                let mut plus = y.clone();
                let mut minus = y.clone();
                plus[j] += h;
                minus[j] -= h;
                let fp = p.smooth_dual(&plus).map_err(|e| e.to_string())?.value;
                let fm = p.smooth_dual(&minus).map_err(|e| e.to_string())?.value;
                let err = ((fp - fm) / (2.0 * h) - grad[j]).abs();
                worst = worst.max(err);
                if err > 1e-6 {
                    return Err(format!("{name}: coordinate {j} off by {err:e}"));
                }
            }
        }
    }
    Ok(format!("100 points, worst absolute error {worst:.1e}"))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let config = RunConfig {
            problem: ProblemSource::Builtin("box-qp".into()),
            method: Method::Gfdpg,
            schedule: ScheduleKind::Poly { a: 4.0 },
            step: StepChoice::Backtrack { l0: None, eta: 2.0 },
            max_iters: 300,
            seed: 1234,
            out: Some(dir.path().join(format!("run{i}.csv"))),
            ..RunConfig::default()
        };
        cmd_run(&config).map_err(|e| e.to_string())?;
        outputs.push(std::fs::read(config.out.unwrap()).map_err(|e| e.to_string())?);
    }
    if outputs[0] == outputs[1] {
        Ok(format!("two runs, {} identical bytes", outputs[0].len()))
    } else {
        Err("trace CSVs differ".into())
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "step equivalence",
            step_equivalence,
            Some(Duration::from_secs(5)),
        ),
        ("step residual", step_residual, None),
        (
            "fdpg dual certificate",
            fdpg_dual_certificate,
            Some(Duration::from_secs(30)),
        ),
        (
            "gfdpg certificates",
            gfdpg_certificate_suite,
            Some(Duration::from_secs(60)),
        ),
        ("gap certificates", gap_certificates, None),
        ("iterate bound", iterate_bound, None),
        ("reduction to fdpg", reduction_to_fdpg, None),
        ("empirical rates", empirical_rates, None),
        ("backtracking", backtracking, None),
        ("toy exactness", toy_exactness, None),
        ("gradient check", gradient_check, None),
        ("determinism", determinism, None),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let mut result = check();
        let elapsed = started.elapsed();
        if let (Ok(detail), Some(budget)) = (&result, budget) {
            if elapsed > *budget {
                result = Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"));
            }
        }
        match result {
            Ok(detail) => println!(
                "criterion {:>2} {name}: PASS ({detail}; {elapsed:.2?})",
                i + 1
            ),
            Err(detail) => {
                failures += 1;
                println!(
                    "criterion {:>2} {name}: FAIL ({detail}; {elapsed:.2?})",
                    i + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
