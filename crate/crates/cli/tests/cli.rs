use std::process::{Command, Output};

use spectra_cli::record::OutputRecord;

fn spectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args(args)
        .env_remove("SPECTRA_GRID_N")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, OutputRecord) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = spectra(&full);
    let rec = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), rec)
}

fn f(rec: &OutputRecord, i: usize, col: &str) -> f64 {
    rec.get(i, col).and_then(|c| c.as_f64()).unwrap()
}

#[test]
fn spectrum_table() {
    let out = spectra(&[
        "spectrum", "--model", "gaussian", "--n", "3", "--rho", "1", "--kmax", "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,value,mult,exact,provenance");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("1,0.0,1,true,"));
    assert!(lines[2].starts_with("2,1.0,3,true,"));
    assert!(lines[10].starts_with("10,2.0,6,true,"));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "bound", "--name", "wang", "--rho", "1", "--lsob", "1", "--m2", "1", "--k", "100",
    ];
    assert_eq!(spectra(&args).stdout, spectra(&args).stdout);
    let args = [
        "transport",
        "--source",
        "gaussian:1",
        "--target",
        "exp-power:4",
        "--format",
        "json",
    ];
    assert_eq!(spectra(&args).stdout, spectra(&args).stdout);
}

#[test]
fn json_round_trips() {
    let out = spectra(&[
        "spectrum", "--model", "sphere", "--n", "2", "--kmax", "9", "--format", "json",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rec: OutputRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(rec.to_json(), text);
    assert!(rec.rows.iter().all(|r| !r.provenance.is_empty()));
}

#[test]
fn z_upper_bound_example() {
    let (code, rec) = json(&[
        "bound", "--name", "z-upper", "--rho", "1", "--lsob", "1", "--m2", "1", "--t", "2",
    ]);
    assert_eq!(code, 0);
    assert!((f(&rec, 0, "value") - 5.33).abs() < 0.01);
    let (_, rec) = json(&[
        "bound", "--name", "z-upper", "--rho", "1", "--lsob", "1", "--m2", "1", "--t", "1.6",
    ]);
    assert_eq!(
        rec.get(0, "valid").unwrap(),
        &spectra_cli::record::Cell::Bool(false)
    );
}

#[test]
fn compare_quartic_passes() {
    let out = spectra(&[
        "compare",
        "--source",
        "gaussian:1",
        "--target",
        "potential:x^2/2+x^4/4",
        "--kmax",
        "20",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("lipschitz: 0.77"));
}

#[test]
fn failed_comparison_exits_3() {
    let out = spectra(&[
        "compare",
        "--source",
        "gaussian:1",
        "--target",
        "gaussian:0.25",
        "--lipschitz",
        "1.5",
        "--kmax",
        "5",
        "--grid-n",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validation_and_usage_errors_exit_2() {
    for args in [
        vec!["spectrum", "--model", "gaussian", "--n", "3", "--rho", "-1"],
        vec!["spectrum", "--model", "torus", "--n", "3"],
        vec!["solve1d", "--measure", "potential:x^"],
        vec!["count", "--model", "nu-p", "--n", "1", "--lambda", "10"],
        vec!["bound", "--name", "z-upper", "--rho", "1"],
        vec!["--bogus"],
        vec!["counterexample", "--n", "2"],
    ] {
        let out = spectra(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn grid_size_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args([
            "solve1d",
            "--measure",
            "gaussian:1",
            "--kmax",
            "3",
            "--format",
            "json",
        ])
        .env("SPECTRA_GRID_N", "500")
        .output()
        .unwrap();
    let rec: OutputRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec.inputs["grid_n"].as_f64(), Some(500.0));
}

#[test]
fn solve1d_methods_agree() {
    let base = [
        "solve1d",
        "--measure",
        "potential:x^2/2+x^4/4",
        "--kmax",
        "5",
        "--grid-n",
        "2000",
    ];
    let (_, s) = json(&base);
    let mut neu = base.to_vec();
    neu.extend(["--method", "neumann"]);
    let (_, n) = json(&neu);
    for i in 1..5 {
        let (a, b) = (f(&s, i, "value"), f(&n, i, "value"));
        assert!((a - b).abs() < 5e-3 * b, "{a} vs {b}");
    }
}

#[test]
fn remaining_subcommands() {
    let (_, rec) = json(&[
        "count", "--model", "gaussian", "--n", "3", "--lambda", "2,2.5",
    ]);
    assert_eq!(f(&rec, 0, "count"), 10.0);
    assert_eq!(f(&rec, 1, "count"), 10.0);

    let (_, rec) = json(&["counterexample", "--n", "3", "--n-max", "5"]);
    assert_eq!(rec.rows.len(), 3);
    assert_eq!(f(&rec, 0, "sphere"), 1.5);
    assert_eq!(rec.get(2, "sphere_fraction").unwrap().csv(), "5/4");

    let (_, rec) = json(&["classify", "--p", "1.5"]);
    assert_eq!(f(&rec, 0, "scenario"), 2.0);
    let (_, rec) = json(&["classify", "--p", "inf"]);
    assert_eq!(f(&rec, 0, "scenario"), 3.0);

    let (_, rec) = json(&["profile", "--measure", "gaussian:1", "--levels", "0.5"]);
    assert!((f(&rec, 0, "profile") - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);

    let (_, rec) = json(&[
        "transport",
        "--source",
        "gaussian:1",
        "--target",
        "gaussian:0.25",
        "--lipschitz",
    ]);
    assert!((f(&rec, 0, "lipschitz") - 2.0).abs() < 1e-6);

    let (_, rec) = json(&[
        "transport",
        "--source",
        "gaussian:1",
        "--target",
        "gaussian:0.25",
        "--x",
        "-1,0.5",
    ]);
    assert!((f(&rec, 0, "map") + 2.0).abs() < 1e-9);
    assert!((f(&rec, 1, "derivative") - 2.0).abs() < 1e-9);

    let (_, rec) = json(&["trace", "--model", "gaussian", "--n", "1", "--t", "2"]);
    assert!((f(&rec, 0, "value") - 1.0 / (1.0 - (-2f64).exp())).abs() < 1e-12);

    let (code, rec) = json(&[
        "compare",
        "--mode",
        "sphere-trace",
        "--n",
        "3",
        "--rho",
        "2",
        "--shift",
        "0.1",
    ]);
    assert_eq!(code, 0);
    assert!(rec.rows.iter().all(|r| r.cells[3].as_f64().unwrap() > 0.0));

    let (_, rec) = json(&[
        "bound",
        "--name",
        "hyper",
        "--lsob",
        "1",
        "--p",
        "2",
        "--t",
        "0.6931471805599453",
    ]);
    assert!((f(&rec, 0, "value") - 5.0).abs() < 1e-12);
}
