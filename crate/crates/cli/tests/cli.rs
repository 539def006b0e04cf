use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn scenario() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios/reference.scenario")
}

fn insarfopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_insarfopt"))
        .args(args)
        .env_remove("INSARFOPT_JOBS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden_header(kind: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/csv_headers.txt");
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{kind}: ")).map(str::to_owned))
        .unwrap()
}

fn read_csv(path: &Path) -> (String, Vec<csv::StringRecord>) {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.ends_with('\n'));
    let header = text.lines().next().unwrap().to_owned();
    let rows = csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect();
    (header, rows)
}

fn solve_into(dir: &Path, extra: &[&str]) -> Output {
    let s = scenario();
    let mut args = vec!["solve", s.to_str().unwrap(), "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    insarfopt(&args)
}

fn report_json(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("run_report.json")).unwrap()).unwrap()
}

#[test]
fn solve_writes_the_three_artifacts() {
    let tmp = TempDir::new().unwrap();
    let o = solve_into(tmp.path(), &["--mode", "proposed"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["run_report.json", "trace.csv", "schedules.csv"] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
    let v = report_json(tmp.path());
    assert!(v["coverage_m2"].as_f64().unwrap() > 0.0);
    assert_eq!(v["mode"], "proposed");
}

#[test]
fn missing_scenario_is_an_io_error_and_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = insarfopt(&["solve", "/nonexistent/x.scenario", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed to read"));
    assert!(!out.exists());
}

#[test]
fn vertical_benchmark_stacks_the_uavs() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&solve_into(tmp.path(), &["--mode", "benchmark1"])), 0);
    let v = report_json(tmp.path());
    let x1 = v["formation"]["q1"]["x"].as_f64().unwrap();
    let x2 = v["formation"]["q2"]["x"].as_f64().unwrap();
    assert!((x1 - x2).abs() <= 1e-6, "{x1} vs {x2}");
}

#[test]
fn infeasible_scenario_exits_2() {
    let tmp = TempDir::new().unwrap();
    let o = solve_into(tmp.path(), &["--set", "comm.p_com_max=10 dBm"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
    assert!(!tmp.path().join("run_report.json").exists());
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&insarfopt(&["bogus"])), 1);
    let s = scenario();
    assert_eq!(
        code(&insarfopt(&["solve", s.to_str().unwrap(), "--mode", "sideways"])),
        1
    );
    assert_eq!(
        code(&insarfopt(&["solve", s.to_str().unwrap(), "--set", "noequals"])),
        1
    );
    assert_eq!(code(&insarfopt(&["--help"])), 0);
}

#[test]
fn initial_point_flags_are_used() {
    let tmp = TempDir::new().unwrap();
    let o = solve_into(tmp.path(), &["--init-z1", "100", "--init-x2", "-60", "--init-z2", "90"]);
    assert_eq!(code(&o), 0);
    let v = report_json(tmp.path());
    assert_eq!(v["init_repaired"], false);
    assert_eq!(v["inner_trace"][0]["subproblem"], "init");
}

#[test]
fn repeated_solves_are_byte_identical() {
    let strip = |dir: &Path| {
        let mut v = report_json(dir);
        v.as_object_mut().unwrap().remove("metadata");
        serde_json::to_string(&v).unwrap()
    };
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(code(&solve_into(a.path(), &[])), 0);
    assert_eq!(code(&solve_into(b.path(), &[])), 0);
    assert_eq!(strip(a.path()), strip(b.path()));
    for f in ["trace.csv", "schedules.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap()
        );
    }
}

fn sweep(dir: &Path, param: &str, values: &str, modes: &str) -> Vec<csv::StringRecord> {
    let s = scenario();
    let o = insarfopt(&[
        "sweep",
        s.to_str().unwrap(),
        "--param",
        param,
        "--values",
        values,
        "--modes",
        modes,
        "--jobs",
        "4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.join("sweep.csv"));
    assert_eq!(header, golden_header("sweep"));
    rows
}

#[test]
fn power_sweep_has_one_row_per_value_and_mode() {
    let tmp = TempDir::new().unwrap();
    let rows = sweep(
        tmp.path(),
        "p_com_max",
        "10 dBm,0.5,1,5,10",
        "proposed,benchmark1,benchmark2",
    );
    assert_eq!(rows.len(), 15);
    let values = [0.01, 0.5, 1.0, 5.0, 10.0];
    let modes = ["proposed", "benchmark1", "benchmark2"];
    for (i, r) in rows.iter().enumerate() {
        assert!((r[0].parse::<f64>().unwrap() - values[i / 3]).abs() < 1e-12);
        assert_eq!(&r[1], modes[i % 3]);
    }
    // infeasible points are recorded, not fatal
    assert_eq!(&rows[0][5], "false");
    assert_eq!(&rows[0][2], "");
    let cov: Vec<f64> = rows
        .iter()
        .filter(|r| &r[1] == "proposed")
        .map(|r| r[2].parse().unwrap_or(0.0))
        .collect();
    assert!(cov.windows(2).all(|w| w[1] >= w[0] - 1e-6), "{cov:?}");
    assert!(cov[4] > 0.0);
}

#[test]
fn hoa_sweep_shows_the_trade_off() {
    let tmp = TempDir::new().unwrap();
    let rows = sweep(tmp.path(), "h_amb_max", "1.2,2.2", "proposed");
    let c: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(c[0] < c[1]);
    let loss = 100.0 * (c[1] - c[0]) / c[1];
    assert!((loss - 7.48).abs() <= 2.0, "{loss}");
}

#[test]
fn sweep_rejects_bad_values() {
    let tmp = TempDir::new().unwrap();
    let s = scenario();
    let o = insarfopt(&[
        "sweep",
        s.to_str().unwrap(),
        "--param",
        "p_com_max",
        "--values",
        "ten",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let o = insarfopt(&["sweep", s.to_str().unwrap(), "--param", "speed", "--values", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn oracle_on_the_default_grid() {
    let tmp = TempDir::new().unwrap();
    let s = scenario();
    let o = insarfopt(&[
        "oracle",
        s.to_str().unwrap(),
        "--dump-feasible",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("oracle.json")).unwrap()).unwrap();
    let feasible = v["feasible"].as_u64().unwrap() as usize;
    assert!(feasible > 0);
    assert!(v["best"]["coverage_m2"].as_f64().unwrap() > 0.0);
    let (_, rows) = read_csv(&tmp.path().join("feasible.csv"));
    assert_eq!(rows.len(), feasible);
}

#[test]
fn oracle_with_an_impossible_baseline_exits_2() {
    let tmp = TempDir::new().unwrap();
    let s = scenario();
    let o = insarfopt(&[
        "oracle",
        s.to_str().unwrap(),
        "--set",
        "thresholds.b_min=1e6",
        "--step",
        "5",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("oracle.json")).unwrap()).unwrap();
    assert!(v["best"].is_null());
    assert_eq!(v["feasible"], 0);
}

#[test]
fn oracle_axes_can_be_given_explicitly() {
    let tmp = TempDir::new().unwrap();
    let s = scenario();
    let o = insarfopt(&[
        "oracle",
        s.to_str().unwrap(),
        "--z1",
        "100:100:1",
        "--x2",
        "-80:-60:1",
        "--z2",
        "90:100:1",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("oracle.json")).unwrap()).unwrap();
    assert_eq!(v["evaluated"], 21 * 11);
    assert_eq!(code(&insarfopt(&["oracle", s.to_str().unwrap(), "--z1", "1:2"])), 1);
}

fn three_reports(root: &Path) -> [PathBuf; 3] {
    ["proposed", "benchmark1", "benchmark2"].map(|m| {
        let dir = root.join(m);
        assert_eq!(code(&solve_into(&dir, &["--mode", m])), 0);
        dir.join("run_report.json")
    })
}

#[test]
fn report_compares_runs() {
    let tmp = TempDir::new().unwrap();
    let [p, b1, b2] = three_reports(tmp.path());
    let out = tmp.path().join("cmp");
    let o = insarfopt(&[
        "report",
        p.to_str().unwrap(),
        b1.to_str().unwrap(),
        b2.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("coverage deltas"));
    let delta = |a: &str, b: &str| -> f64 {
        let line = text
            .lines()
            .find(|l| l.trim_start().starts_with(&format!("{a} - {b}:")))
            .unwrap();
        line.split(':')
            .nth(1)
            .unwrap()
            .trim()
            .trim_end_matches(" m²")
            .parse()
            .unwrap()
    };
    assert!(delta("proposed", "benchmark1") > 0.0);
    assert!(delta("proposed", "benchmark2") >= 0.0);

    let (header, rows) = read_csv(&out.join("report.csv"));
    assert_eq!(header, golden_header("report"));
    assert_eq!(rows.len(), 3);
    let (header, rows) = read_csv(&out.join("deltas.csv"));
    assert_eq!(header, golden_header("deltas"));
    assert_eq!(rows.len(), 3);
}

#[test]
fn single_report_has_no_delta_section() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&solve_into(tmp.path(), &[])), 0);
    let out = tmp.path().join("cmp");
    let rep = tmp.path().join("run_report.json");
    let o = insarfopt(&["report", rep.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(!text.contains("deltas"));
    assert!(!out.join("deltas.csv").exists());
    assert_eq!(read_csv(&out.join("report.csv")).1.len(), 1);
}

#[test]
fn reports_from_different_scenarios_are_refused() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&solve_into(&a, &[])), 0);
    assert_eq!(code(&solve_into(&b, &["--set", "thresholds.h_amb_max=2.2 m"])), 0);
    let o = insarfopt(&[
        "report",
        a.join("run_report.json").to_str().unwrap(),
        b.join("run_report.json").to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("scenario mismatch"));
    let missing = tmp.path().join("none.json");
    assert_eq!(code(&insarfopt(&["report", missing.to_str().unwrap()])), 1);
}

#[test]
fn jobs_can_come_from_the_environment() {
    let tmp = TempDir::new().unwrap();
    let s = scenario();
    let o = Command::new(env!("CARGO_BIN_EXE_insarfopt"))
        .args([
            "oracle",
            s.to_str().unwrap(),
            "--step",
            "5",
            "--out",
            tmp.path().to_str().unwrap(),
        ])
        .env("INSARFOPT_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_insarfopt"))
        .args([
            "oracle",
            s.to_str().unwrap(),
            "--step",
            "5",
            "--out",
            tmp.path().to_str().unwrap(),
        ])
        .env("INSARFOPT_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}
