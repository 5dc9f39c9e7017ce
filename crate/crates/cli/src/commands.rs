use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::thread;

use dualprox_core::diagnostics::{
    certify, fit_rate, running_min, BoundCertificate, BoundId, CertContext, CertOptions, RateFit,
    ReferenceSolution,
};
use dualprox_core::problems::{
    make_instance, reference_solve, ReferenceMode, DEFAULT_REF_TOL, MAX_ENUMERATE_DIM,
};
use dualprox_core::solvers::{run_solver, IterateRecord, SolverReport};
use dualprox_core::{CompositeProblem, Error};

use crate::config::RunConfig;
use crate::svg::{loglog, Series};
use crate::{CliError, Status};

pub const TRACE_HEADER: &str = "k,L,t,T,dual_val,primal_val,pg_norm,step_norm,pd_gap,infeas";
pub const CERT_HEADER: &str = "bound_id,k,bound,measured,margin,pass";
pub const COMPARE_HEADER: &str = "method,schedule,k,metric,value";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), num)
}

fn pd_gap(r: &IterateRecord) -> f64 {
    r.primal_value.minus(-r.dual_value).to_f64()
}

pub fn trace_csv(records: &[IterateRecord]) -> String {
    let mut s = String::with_capacity(200 * (records.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.k,
            num(r.lipschitz),
            opt(r.t),
            opt(r.big_t),
            num(r.dual_value),
            num(r.primal_value.to_f64()),
            opt(r.pg_norm()),
            num(r.step_norm),
            num(pd_gap(r)),
            num(r.infeasibility),
        );
    }
    s
}

pub fn certificate_csv(certs: &[BoundCertificate], reference: &ReferenceSolution) -> String {
    let notice = reference.low_precision.then(|| {
        format!(
            "low-precision reference (residual {:e}); slack widened",
            reference.residual
        )
    });
    let mut s = String::from(CERT_HEADER);
    if notice.is_some() {
        s.push_str(",notice");
    }
    s.push('\n');
    for c in certs {
        let pass = c
            .passed()
            .map_or("NA", |p| if p { "true" } else { "false" });
        let _ = write!(
            s,
            "{},{},{},{},{},{pass}",
            c.bound_id,
            c.k,
            opt(c.bound()),
            opt(c.measured()),
            opt(c.margin())
        );
        if let Some(n) = &notice {
            let _ = write!(s, ",{n}");
        }
        s.push('\n');
    }
    s
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Abort(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Abort(format!("cannot write to stdout: {e}"))),
    }
}

pub fn build_problem(config: &RunConfig) -> Result<CompositeProblem, CliError> {
    config.validate()?;
    make_instance(&config.problem_spec()?).map_err(CliError::config)
}

/// Enumeration when the instance has the dual QP form and is small enough.
pub fn pick_reference(problem: &CompositeProblem, mode: Option<ReferenceMode>) -> ReferenceMode {
    mode.unwrap_or(
        if problem.dual_qp_form().is_some() && problem.dual_dim() <= MAX_ENUMERATE_DIM {
            ReferenceMode::Enumerate
        } else {
            ReferenceMode::LongRun
        },
    )
}

pub fn solve_reference(
    problem: &CompositeProblem,
    mode: Option<ReferenceMode>,
) -> Result<ReferenceSolution, CliError> {
    reference_solve(problem, pick_reference(problem, mode), DEFAULT_REF_TOL).map_err(|e| match e {
        Error::Refused(_) | Error::Unsupported(_) => CliError::Usage(e.to_string()),
        other => CliError::Abort(format!("reference solve failed: {other}")),
    })
}

fn solve(
    problem: &CompositeProblem,
    config: &RunConfig,
) -> Result<Result<SolverReport, (SolverReport, String)>, CliError> {
    let solver = config.solver_config(problem)?;
    Ok(run_solver(problem, &solver).map_err(|abort| {
        let message = abort.to_string();
        (*abort.partial, message)
    }))
}

/// Runs the solver and writes the trace CSV to `config.out` (stdout when
/// absent). With `config.certs` every applicable certificate is evaluated
/// and a summary printed to stderr.
pub fn cmd_run(config: &RunConfig) -> Result<Status, CliError> {
    let problem = build_problem(config)?;
    let report = match solve(&problem, config)? {
        Ok(report) => report,
        Err((partial, message)) => {
            write_output(config.out.as_deref(), &trace_csv(&partial.records))?;
            return Err(CliError::Abort(message));
        }
    };
    write_output(config.out.as_deref(), &trace_csv(&report.records))?;
    if !config.certs {
        return Ok(Status::Success);
    }
    let reference = solve_reference(&problem, config.reference)?;
    let certs = certify(&CertContext::new(&problem, &reference, &report), None);
    let failed = certs.iter().filter(|c| c.failed()).count();
    let na = certs.iter().filter(|c| c.passed().is_none()).count();
    eprintln!(
        "certificates: {} evaluated, {failed} failed, {na} not applicable",
        certs.len() - na
    );
    Ok(if failed == 0 {
        Status::Success
    } else {
        Status::CertificateFailure
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyOptions {
    /// Every bound defined for the run when `None`.
    pub bounds: Option<Vec<BoundId>>,
    pub cert: CertOptions,
}

/// Runs the solver, evaluates the certificates and writes them as CSV.
pub fn cmd_verify(config: &RunConfig, options: &VerifyOptions) -> Result<Status, CliError> {
    let problem = build_problem(config)?;
    let report = solve(&problem, config)?.map_err(|(_, message)| CliError::Abort(message))?;
    let reference = solve_reference(&problem, config.reference)?;
    let ctx = CertContext::new(&problem, &reference, &report).with_options(options.cert);
    let certs = certify(&ctx, options.bounds.as_deref());
    write_output(config.out.as_deref(), &certificate_csv(&certs, &reference))?;
    if reference.low_precision {
        eprintln!(
            "notice: reference residual {:e} exceeds the tolerance; certificate slack widened",
            reference.residual
        );
    }
    Ok(if certs.iter().any(BoundCertificate::failed) {
        Status::CertificateFailure
    } else {
        Status::Success
    })
}

fn compare_metrics(report: &SolverReport) -> Vec<(&'static str, Vec<(usize, f64)>)> {
    let ks: Vec<usize> = report.records.iter().map(|r| r.k).collect();
    let pg: Vec<f64> = report
        .records
        .iter()
        .map(|r| r.pg_norm().unwrap_or(f64::NAN))
        .collect();
    let zip = |v: Vec<f64>| ks.iter().copied().zip(v).collect::<Vec<_>>();
    vec![
        (
            "dual_val",
            zip(report.records.iter().map(|r| r.dual_value).collect()),
        ),
        ("pd_gap", zip(report.records.iter().map(pd_gap).collect())),
        ("pg_norm_min", zip(running_min(&pg))),
        ("pg_norm", zip(pg)),
    ]
}

/// Runs every configuration on one shared problem instance, in parallel, and
/// writes a long-format CSV (plus a log-log plot of the running-minimum
/// prox-gradient norm when `svg` is given).
pub fn cmd_compare(
    configs: &[RunConfig],
    out: Option<&Path>,
    svg: Option<&Path>,
) -> Result<Status, CliError> {
    if configs.len() < 2 {
        return Err(CliError::usage("compare needs at least two configurations"));
    }
    let spec = configs[0].problem_spec()?;
    for c in configs {
        c.validate()?;
        if c.problem_spec()? != spec {
            return Err(CliError::usage(
                "compared configurations must share one problem",
            ));
        }
    }
    let problem = make_instance(&spec).map_err(CliError::config)?;
    let solvers = configs
        .iter()
        .map(|c| c.solver_config(&problem))
        .collect::<Result<Vec<_>, _>>()?;
    let problem = &problem;
    let reports = thread::scope(|scope| {
        let handles: Vec<_> = solvers
            .iter()
            .map(|solver| scope.spawn(move || run_solver(problem, solver)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect::<Vec<_>>()
    });
    let mut csv = String::from(COMPARE_HEADER);
    csv.push('\n');
    let mut series = Vec::new();
    for (config, report) in configs.iter().zip(reports) {
        let report = report.map_err(|abort| CliError::Abort(abort.to_string()))?;
        let label = format!("{} {}", config.method, report.schedule);
        for (metric, points) in compare_metrics(&report) {
            for &(k, v) in &points {
                let _ = writeln!(
                    csv,
                    "{},{},{k},{metric},{}",
                    config.method,
                    report.schedule,
                    num(v)
                );
            }
            if metric == "pg_norm_min" {
                series.push(Series {
                    label: label.clone(),
                    points: points.iter().map(|&(k, v)| (k as f64, v)).collect(),
                });
            }
        }
    }
    write_output(out, &csv)?;
    if let Some(path) = svg {
        let plot = loglog(
            "running minimum of the prox-gradient norm",
            "k",
            "min ||p(y_i) - y_i||",
            &series,
        );
        fs::write(path, plot)
            .map_err(|e| CliError::Abort(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Status::Success)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatesOptions {
    pub metric: String,
    pub window: RangeInclusive<usize>,
    /// Fit the running minimum instead of the raw values.
    pub envelope: bool,
    /// Subtracted from every value before fitting.
    pub baseline: f64,
}

fn read_metric(path: &Path, metric: &str) -> Result<Vec<(usize, f64)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| CliError::usage(format!("{}: no `{name}` column", path.display())))
    };
    let (kc, mc) = (column("k")?, column(metric)?);
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            let bad = || CliError::usage(format!("{}: malformed row {}", path.display(), i + 2));
            let k = fields.get(kc).ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let v = match *fields.get(mc).ok_or_else(bad)? {
                "NA" => f64::NAN,
                v => v.parse().map_err(|_| bad())?,
            };
            Ok((k, v))
        })
        .collect()
}

/// Log-log slope of `metric` in each trace.
pub fn cmd_rates(
    files: &[PathBuf],
    options: &RatesOptions,
) -> Result<Vec<(PathBuf, RateFit)>, CliError> {
    files
        .iter()
        .map(|path| {
            let points = read_metric(path, &options.metric)?;
            let shifted: Vec<f64> = points.iter().map(|p| p.1 - options.baseline).collect();
            let values = if options.envelope {
                running_min(&shifted)
            } else {
                shifted
            };
            let points: Vec<(usize, f64)> = points.iter().map(|p| p.0).zip(values).collect();
            let fit = fit_rate(&options.metric, &points, options.window.clone(), 0.0)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            Ok((path.clone(), fit))
        })
        .collect()
}

pub fn rates_table(fits: &[(PathBuf, RateFit)]) -> String {
    let mut s = String::from("file,metric,slope,residual\n");
    for (path, fit) in fits {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            path.display(),
            fit.metric,
            num(fit.slope),
            num(fit.residual)
        );
    }
    s
}
