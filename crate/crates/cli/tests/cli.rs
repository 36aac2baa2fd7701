use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str =
    "sweep_var,value,duplex,protocol,mode,alpha_star,throughput,outage,ergodic_rate,mc_mean,mc_ci95,trials,seed";

fn fdrelay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdrelay")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Rows as field vectors, header checked.
fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

#[test]
fn eval_analytic_and_simulated_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eval.csv");
    let o = fdrelay(&[
        "eval",
        "--duplex",
        "fd-single",
        "--protocol",
        "df",
        "--mode",
        "dc",
        "--alpha",
        "0.2",
        "--snr-db",
        "20",
        "--mc",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("delay-constrained"));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r[..6], ["ps_db", "20", "fd-single", "df", "delay-constrained", "0.2"]);
    let (analytic, mc, ci) = (num(&r[6]), num(&r[9]), num(&r[10]));
    assert!((analytic - mc).abs() <= 1.5 * ci, "{analytic} vs {mc} +/- {ci}");
    assert_eq!(r[11], "100000");
    assert_eq!(r[12], "42");
}

#[test]
fn zero_split_is_a_validation_error() {
    let o = fdrelay(&["eval", "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha"));
}

#[test]
fn unknown_arguments_are_validation_errors() {
    assert_eq!(fdrelay(&["eval", "--duplex", "triplex"]).status.code(), Some(1));
    assert_eq!(fdrelay(&["figure", "7"]).status.code(), Some(1));
    assert_eq!(fdrelay(&["sweep", "--var", "rc"]).status.code(), Some(1));
    assert_eq!(fdrelay(&["eval", "--mc", "--trials", "100"]).status.code(), Some(1));
    assert_eq!(fdrelay(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulation_only_variant_gets_notice_and_empty_analytic_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mrc.csv");
    let o = fdrelay(&[
        "eval",
        "--duplex",
        "hd-dual-mrc",
        "--mode",
        "dt",
        "--alpha",
        "0.3",
        "--trials",
        "20000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("MC-only"));
    let r = &read_csv(&out)[0];
    assert_eq!((r[7].as_str(), r[8].as_str()), ("", ""));
    assert!(num(&r[6]) > 0.0);
    assert_eq!(r[6], r[9]);
}

#[test]
fn config_file_values_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.cfg");
    fs::write(&good, "# relay link\neta = 0.5\nps_over_n0_db = 30\ngamma_th = 3\n").unwrap();
    let out = dir.path().join("a.csv");
    let o = fdrelay(&["eval", "--config", good.to_str().unwrap(), "--alpha", "0.3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let with_cfg = read_csv(&out)[0].clone();
    assert_eq!(with_cfg[1], "30");

    let plain = dir.path().join("b.csv");
    let o = fdrelay(&[
        "eval",
        "--snr-db",
        "30",
        "--alpha",
        "0.3",
        "--gamma-th-override",
        "3",
        "--out",
        plain.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    // Same threshold, lower efficiency: more outage.
    assert!(num(&read_csv(&plain)[0][7]) > num(&with_cfg[7]));

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "eta = 0.5\nbeta = 2\n").unwrap();
    let o = fdrelay(&["eval", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn sweep_rows_follow_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = fdrelay(&[
        "sweep",
        "--var",
        "lambda-r",
        "--range",
        "0.1:0.1:0.5",
        "--snr-db",
        "30",
        "--duplex",
        "fd-single,fd-dual",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 10);
    let lr: Vec<f64> = rows[..5].iter().map(|r| num(&r[1])).collect();
    assert!(lr.windows(2).all(|w| w[0] < w[1]));
    assert!(rows[..5].iter().all(|r| r[0] == "lambda_r" && r[2] == "fd-single"));
    // Stronger loopback never helps.
    let t: Vec<f64> = rows[..5].iter().map(|r| num(&r[6])).collect();
    assert!(t.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{t:?}");
    // No simulation was requested, so the simulation fields stay empty.
    assert!(rows.iter().all(|r| r[9..].iter().all(String::is_empty)));
}

#[test]
fn figure_two_markers_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.csv");
    let o = fdrelay(&["figure", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&out);
    let markers: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "alpha_star").collect();
    assert_eq!(markers.len(), 6);
    for m in markers {
        // The marker sits at the top of its own curve.
        let best = rows
            .iter()
            .filter(|r| r[0] == "alpha" && r[2..5] == m[2..5])
            .map(|r| num(&r[6]))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(num(&m[6]) >= best - 1e-12, "{m:?}");
    }
    let star =
        |d: &str| rows.iter().find(|r| r[0] == "alpha_star" && r[2] == d && r[3] == "df").map(|r| num(&r[5])).unwrap();
    assert!(star("hd-single") > star("fd-dual"));
}

#[test]
fn figure_one_uses_reported_splits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f1.csv");
    let o = fdrelay(&["figure", "1", "--snr-db", "30", "--trials", "20000", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let want = if r[4] == "delay-constrained" { "0.2" } else { "0.1" };
        assert_eq!(r[5], want);
        assert!(!r[9].is_empty());
    }
}

#[test]
fn figure_six_sweeps_rate_at_forty_db() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f6.csv");
    let o = fdrelay(&["figure", "6", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 6 * 48);
    assert!(rows.iter().all(|r| r[0] == "rc" && r[4] == "delay-constrained"));
    assert_eq!(num(&rows[47][1]), 12.0);
}

#[test]
fn figures_are_deterministic_given_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = fdrelay(&[
            "figure",
            "5",
            "--snr-db",
            "10",
            "--trials",
            "10000",
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv", "7");
    assert_eq!(a, run("b.csv", "7"));
    assert_ne!(a, run("c.csv", "8"));
}

#[test]
fn selftest_warns_when_underpowered() {
    let o = fdrelay(&["selftest", "--trials", "1000", "--only", "3,8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stderr(&o).contains("underpowered"));
    let lines: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("[PASS]")).map(String::from).collect();
    assert_eq!(lines.len(), 2);
    let again = fdrelay(&["selftest", "--trials", "1000", "--only", "3,8"]);
    let lines2: Vec<String> = stdout(&again).lines().filter(|l| l.starts_with('[')).map(String::from).collect();
    assert_eq!(lines, lines2);
}
