use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use uis_bench::dist::CondIndepParams;
use uis_bench::io::{read_dists, read_report, write_dists, REPORT_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uis-bench")).args(args).output().expect("spawn uis-bench")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_writes_requested_rows_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let printed = ok(&["gen", "--family", "uniform", "--n", "109", "--seed", "7", "--out", p(&a)]);
    assert!(printed.trim().ends_with("distributions.csv"));
    ok(&["gen", "--family", "uniform", "--n", "109", "--seed", "7", "--out", p(&b)]);
    let fa = fs::read(a.join("distributions.csv")).unwrap();
    assert_eq!(fa, fs::read(b.join("distributions.csv")).unwrap());
    assert_eq!(read_dists(&fa[..]).unwrap().len(), 109);

    ok(&["gen", "--family", "cond_indep", "--n", "10", "--seed", "1", "--out", p(&a)]);
    let rows = read_dists(fs::File::open(a.join("distributions.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 10);
    for (_, d) in rows {
        let back = CondIndepParams::extract(&d).unwrap().expand();
        for (x, y) in back.atoms().iter().zip(d.atoms()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"seed": 3, "n_dists": 4, "family": "cond_indep"}"#).unwrap();
    ok(&["gen", "--config", p(&cfg), "--n", "6", "--out", p(dir.path())]);
    let rows = read_dists(fs::File::open(dir.path().join("distributions.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);

    fs::write(&cfg, r#"{"family": "beta"}"#).unwrap();
    assert!(!run(&["gen", "--config", p(&cfg), "--out", p(dir.path())]).status.success());
    assert!(!run(&["gen", "--family", "beta"]).status.success());
    assert!(!run(&["gen", "--n", "0", "--out", p(dir.path())]).status.success());
}

#[test]
fn oracle_prints_twelve_digits() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.csv");
    let d = CondIndepParams::new(0.5, 0.8, 0.2, 0.8, 0.2).unwrap().expand();
    let mut buf = Vec::new();
    write_dists(&mut buf, &[(0, uis_bench::dist::JointDist::uniform()), (1, d)]).unwrap();
    fs::write(&file, buf).unwrap();

    assert_eq!(ok(&["oracle", p(&file), "--e1", "0.75", "--e2", "0.25"]).lines().next(), Some("0,0.5"));
    let out = ok(&["oracle", p(&file), "--e1", "1", "--e2", "1"]);
    assert_eq!(out.lines().nth(1), Some("1,0.941176470588"));

    let bad = run(&["oracle", p(&file), "--e1", "1.5", "--e2", "0.5"]);
    assert_eq!(bad.status.code(), Some(2));

    // a point mass cannot reach soft evidence on E1
    let mut buf = Vec::new();
    write_dists(&mut buf, &[(5, uis_bench::dist::JointDist::point_mass(7))]).unwrap();
    fs::write(&file, buf).unwrap();
    let out = run(&["oracle", p(&file), "--e1", "0.5", "--e2", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("E1"));
}

#[test]
fn bench_single_and_degenerate_distributions() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.csv");
    let mut buf = Vec::new();
    write_dists(&mut buf, &[(42, uis_bench::dist::JointDist::uniform())]).unwrap();
    fs::write(&file, buf).unwrap();

    let out = run(&["bench", p(&file), "--out", p(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some(REPORT_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.starts_with("42,") && r.contains(",true,")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("summary skipped"));
}

#[test]
fn bench_parse_error_names_row() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.csv");
    fs::write(&file, "id,p000,p001,p010,p011,p100,p101,p110,p111\n0,0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125\n1,1,1,0,0,0,0,0,0\n").unwrap();
    let out = run(&["bench", p(&file), "--out", p(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"));
}

#[test]
fn bench_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen", "--family", "uniform", "--n", "6", "--seed", "11", "--out", p(d)]);
    let dists = d.join("distributions.csv");
    let printed =
        ok(&["bench", p(&dists), "--seed", "11", "--models", "LINR,WRST,INDP,PRSP,PWR,BST", "--out", p(d)]);
    assert!(printed.contains("mu") && printed.contains("INDP"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.as_object().unwrap().len(), 6);
    assert_eq!(summary["BST"]["mu"], 1.0);
    assert_eq!(summary["WRST"]["mu"], -1.0);
    assert_eq!(summary["LINR"]["mu_over_sigma"], "NaN");
    assert_eq!(summary["INDP"]["n_included"], 6);

    let report = fs::read(d.join("report.csv")).unwrap();
    assert_eq!(read_report(&report[..]).unwrap().len(), 6);
    let again = d.join("again");
    ok(&["report", p(&d.join("report.csv")), "--out", p(&again)]);
    assert_eq!(fs::read(again.join("summary.json")).unwrap(), fs::read(d.join("summary.json")).unwrap());
}

#[test]
fn bench_rejects_model_list_without_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen", "--n", "3", "--out", p(d)]);
    let out = run(&["bench", p(&d.join("distributions.csv")), "--models", "INDP,WRST", "--out", p(d)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("LINR"));
    assert_eq!(run(&["bench", "x.csv", "--models", "EMYCIN"]).status.code(), Some(2));
}
