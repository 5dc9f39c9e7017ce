use std::fs;
use std::path::{Path, PathBuf};

use dualprox_cli::config::{ProblemSource, StepChoice, Y0Mode};
use dualprox_cli::{main_with, RunConfig};
use dualprox_core::problems::{ReferenceMode, BUILTINS};
use dualprox_core::solvers::{Method, ScheduleKind};
use proptest::prelude::*;

fn dualprox(args: &[&str]) -> i32 {
    main_with(std::iter::once("dualprox").chain(args.iter().copied()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn toy_dpg_row_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let code = dualprox(&[
        "run",
        "--problem",
        "tv1d-toy",
        "--method",
        "dpg",
        "--fixed-L",
        "--iters",
        "5",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, 0);
    let rows = rows(&out);
    assert_eq!(
        rows[0].join(","),
        "k,L,t,T,dual_val,primal_val,pg_norm,step_norm,pd_gap,infeas"
    );
    assert_eq!(rows[1][0], "1");
    let dual: f64 = rows[1][4].parse().unwrap();
    let pg: f64 = rows[1][6].parse().unwrap();
    assert!((dual + 3.0).abs() < 1e-12);
    assert!(pg.abs() < 1e-12);
}

#[test]
fn zero_iterations_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    assert_eq!(
        dualprox(&["run", "--iters", "0", "--out", path_str(&out)]),
        0
    );
    assert_eq!(rows(&out).len(), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dualprox(&["run", "--method", "newton"]), 2);
    assert_eq!(dualprox(&["run", "--problem", "/no/such/file.spec"]), 2);
    assert_eq!(
        dualprox(&[
            "run",
            "--method",
            "gfdpg",
            "--schedule",
            "poly",
            "--a",
            "1.5"
        ]),
        2
    );
    assert_eq!(
        dualprox(&["run", "--method", "dpg", "--schedule", "poly", "--a", "3"]),
        2
    );
    assert_eq!(
        dualprox(&[
            "run",
            "--method",
            "gfdpg",
            "--schedule",
            "fixed_horizon",
            "--N",
            "10",
            "--iters",
            "11"
        ]),
        2
    );
    assert_eq!(
        dualprox(&["verify", "--problem", "tv1d", "--ref", "enumerate"]),
        2
    );
    assert_eq!(dualprox(&["run", "--bogus"]), 2);
}

#[test]
fn certificate_run_reports_through_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let code = dualprox(&[
        "run",
        "--problem",
        "box-qp",
        "--method",
        "fdpg",
        "--iters",
        "200",
        "--certs",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn verify_toy_poly_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let code = dualprox(&[
        "verify",
        "--problem",
        "tv1d-toy",
        "--method",
        "gfdpg",
        "--schedule",
        "poly",
        "--a",
        "3",
        "--iters",
        "200",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, 0);
    let rows = rows(&out);
    assert_eq!(rows[0].join(","), "bound_id,k,bound,measured,margin,pass");
    assert!(rows[1..].iter().all(|r| r[5] == "true" || r[5] == "NA"));
    assert!(rows[1..].iter().any(|r| r[5] == "true"));
}

#[test]
fn scaled_bounds_are_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let args = [
        "verify",
        "--problem",
        "box-qp",
        "--method",
        "dpg",
        "--iters",
        "300",
        "--out",
        path_str(&out),
    ];
    assert_eq!(dualprox(&args), 0);
    let mut scaled = args.to_vec();
    scaled.extend(["--bound-scale", "0.9"]);
    assert_eq!(dualprox(&scaled), 1);
    assert!(rows(&out).iter().any(|r| r[5] == "false"));
}

#[test]
fn indicator_gap_bound_is_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let code = dualprox(&[
        "verify",
        "--problem",
        "intersection",
        "--method",
        "fdpg",
        "--iters",
        "100",
        "--bounds",
        "lemma4_gap,lemma3_gap",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, 0);
    let rows = rows(&out);
    let gap_rows: Vec<_> = rows.iter().filter(|r| r[0] == "lemma4_gap").collect();
    assert_eq!(gap_rows.len(), 100);
    assert!(gap_rows.iter().all(|r| r[2..].iter().all(|f| f == "NA")));
    assert!(rows.iter().any(|r| r[0] == "lemma3_gap" && r[5] == "true"));
}

#[test]
fn spec_file_problem() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("toy.spec");
    fs::write(
        &spec,
        "# two samples\nproblem = tv1d\nd = 0, 4\nlambda = 1\n",
    )
    .unwrap();
    let out = dir.path().join("t.csv");
    let code = dualprox(&[
        "run",
        "--problem",
        path_str(&spec),
        "--method",
        "dpg",
        "--iters",
        "1",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, 0);
    let dual: f64 = rows(&out)[1][4].parse().unwrap();
    assert!((dual + 3.0).abs() < 1e-12);
}

#[test]
fn y0_file_must_match_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let y0 = dir.path().join("y0.txt");
    fs::write(&y0, "0.5\n").unwrap();
    let out = dir.path().join("t.csv");
    assert_eq!(
        dualprox(&[
            "run",
            "--y0",
            path_str(&y0),
            "--iters",
            "3",
            "--out",
            path_str(&out)
        ]),
        0
    );
    fs::write(&y0, "0.5, 1\n").unwrap();
    assert_eq!(dualprox(&["run", "--y0", path_str(&y0), "--iters", "3"]), 2);
}

fn write_config(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let mut full = vec!["dualprox", "config"];
    full.extend_from_slice(args);
    let cli = <dualprox_cli::Cli as clap::Parser>::try_parse_from(full).unwrap();
    let dualprox_cli::args::Command::Config(run) = cli.command else {
        unreachable!()
    };
    let path = dir.join(name);
    fs::write(&path, run.to_config().unwrap().normalized()).unwrap();
    path
}

#[test]
fn compare_writes_long_csv_and_optional_svg() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--problem", "tv1d", "--iters", "300"];
    let mk = |name: &str, extra: &[&str]| {
        let mut args = common.to_vec();
        args.extend_from_slice(extra);
        write_config(dir.path(), name, &args)
    };
    let a = mk("dpg.cfg", &["--method", "dpg"]);
    let b = mk("fdpg.cfg", &["--method", "fdpg"]);
    let c = mk(
        "gfdpg.cfg",
        &["--method", "gfdpg", "--schedule", "poly", "--a", "4"],
    );
    let out = dir.path().join("cmp.csv");
    let svg = dir.path().join("cmp.svg");
    let code = dualprox(&[
        "compare",
        path_str(&a),
        path_str(&b),
        path_str(&c),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, 0);
    assert!(!svg.exists());
    let rows = rows(&out);
    assert_eq!(rows[0].join(","), "method,schedule,k,metric,value");
    for method in ["dpg", "fdpg", "gfdpg"] {
        assert!(rows.iter().any(|r| r[0] == method && r[3] == "pg_norm_min"));
    }
    let code = dualprox(&[
        "compare",
        path_str(&a),
        path_str(&c),
        "--out",
        path_str(&out),
        "--svg",
        path_str(&svg),
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        fs::read_to_string(&svg)
            .unwrap()
            .matches("<polyline")
            .count(),
        2
    );
}

#[test]
fn compare_rejects_single_or_mismatched_configs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(
        dir.path(),
        "a.cfg",
        &["--problem", "tv1d", "--method", "dpg"],
    );
    let b = write_config(
        dir.path(),
        "b.cfg",
        &["--problem", "box-qp", "--method", "dpg"],
    );
    assert_eq!(dualprox(&["compare", path_str(&a)]), 2);
    assert_eq!(dualprox(&["compare", path_str(&a), path_str(&b)]), 2);
    assert_eq!(
        dualprox(&[
            "compare",
            path_str(&a),
            "problem=builtin:tv1d;method=fdpg;iters=10"
        ]),
        0
    );
}

#[test]
fn rates_of_synthetic_inverse_square() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("synthetic.csv");
    let mut text = String::from("k,pg_norm\n");
    for k in 1..=1000 {
        text.push_str(&format!("{k},{:e}\n", 3.0 / (k * k) as f64));
    }
    fs::write(&trace, text).unwrap();
    let options = dualprox_cli::RatesOptions {
        metric: "pg_norm".into(),
        window: 1..=1000,
        envelope: false,
        baseline: 0.0,
    };
    let fits = dualprox_cli::cmd_rates(std::slice::from_ref(&trace), &options).unwrap();
    assert!((fits[0].1.slope + 2.0).abs() < 0.01);
    assert_eq!(
        dualprox(&[
            "rates",
            path_str(&trace),
            "--metric",
            "pg_norm",
            "--window",
            "1:1000"
        ]),
        0
    );
    assert_eq!(
        dualprox(&["rates", path_str(&trace), "--metric", "dual_val"]),
        2
    );
}

#[test]
fn rates_of_gfdpg_box_qp_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("gf.csv");
    let code = dualprox(&[
        "run",
        "--problem",
        "box-qp",
        "--method",
        "gfdpg",
        "--schedule",
        "poly",
        "--a",
        "4",
        "--iters",
        "2000",
        "--out",
        path_str(&trace),
    ]);
    assert_eq!(code, 0);
    let options = dualprox_cli::RatesOptions {
        metric: "pg_norm".into(),
        window: 20..=2000,
        envelope: true,
        baseline: 0.0,
    };
    let fits = dualprox_cli::cmd_rates(&[trace], &options).unwrap();
    assert!(fits[0].1.slope <= -1.4, "slope {}", fits[0].1.slope);
}

#[test]
fn seed_flag_reaches_config() {
    let cli =
        <dualprox_cli::Cli as clap::Parser>::try_parse_from(["dualprox", "config", "--seed", "7"])
            .unwrap();
    let dualprox_cli::args::Command::Config(run) = cli.command else {
        unreachable!()
    };
    assert_eq!(run.to_config().unwrap().seed, 7);
}

fn finite_positive() -> impl Strategy<Value = f64> {
    (1e-6f64..1e6).prop_map(|v| v)
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    let problem = prop_oneof![
        proptest::sample::select(BUILTINS.to_vec())
            .prop_map(|n| ProblemSource::Builtin(n.to_string())),
        "[a-z]{1,8}/[a-z]{1,8}\\.spec".prop_map(|p| ProblemSource::File(PathBuf::from(p))),
    ];
    let method_schedule = prop_oneof![
        Just((Method::Dpg, ScheduleKind::Fista)),
        Just((Method::Fdpg, ScheduleKind::Fista)),
        Just((Method::Gfdpg, ScheduleKind::Fista)),
        (2.0f64..50.0).prop_map(|a| (Method::Gfdpg, ScheduleKind::Poly { a })),
        (2000usize..5000).prop_map(|n| (Method::Gfdpg, ScheduleKind::FixedHorizon { n })),
    ];
    let step = prop_oneof![
        proptest::option::of(finite_positive()).prop_map(StepChoice::Fixed),
        (proptest::option::of(finite_positive()), 1.01f64..10.0)
            .prop_map(|(l0, eta)| StepChoice::Backtrack { l0, eta }),
    ];
    let y0 = prop_oneof![
        Just(Y0Mode::Zero),
        "[a-z]{1,8}\\.txt".prop_map(|p| Y0Mode::File(PathBuf::from(p))),
    ];
    let reference = proptest::option::of(prop_oneof![
        Just(ReferenceMode::Enumerate),
        Just(ReferenceMode::LongRun)
    ]);
    let paths = (
        proptest::option::of("[a-z]{1,8}\\.csv".prop_map(PathBuf::from)),
        proptest::option::of("[a-z]{1,8}\\.svg".prop_map(PathBuf::from)),
    );
    (
        problem,
        method_schedule,
        step,
        y0,
        (0usize..2000, 0.0f64..1e-3, any::<bool>(), any::<u64>()),
        reference,
        paths,
    )
        .prop_map(
            |(
                problem,
                (method, schedule),
                step,
                y0,
                (max_iters, pg_tol, certs, seed),
                reference,
                (out, svg),
            )| {
                RunConfig {
                    problem,
                    method,
                    schedule,
                    step,
                    y0,
                    max_iters,
                    pg_tol,
                    certs,
                    reference,
                    out,
                    svg,
                    seed,
                }
            },
        )
}

proptest! {
    #[test]
    fn normalized_form_round_trips(config in run_config()) {
        let text = config.normalized();
        let parsed = RunConfig::parse_normalized(&text).unwrap();
        prop_assert_eq!(&parsed, &config);
        prop_assert_eq!(parsed.normalized(), text);
    }
}
