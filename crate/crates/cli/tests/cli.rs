//! End-to-end runs of the `phvqe` binary on the committed fixtures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phvqe::CHEMICAL_ACCURACY;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn phvqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phvqe")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Rows as column vectors, header dropped.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn col(row: &[String], i: usize) -> f64 {
    row[i].parse().unwrap()
}

#[test]
fn uccsd_energy_at_equilibrium() {
    let csv = stdout(&phvqe(&["energy", "--fixtures", &fixture("h2_631g_0.592.fcidump")]));
    assert_eq!(
        csv.lines().next().unwrap(),
        "R_label,E_HF,E_VQE,E_diag,error,iterations,evaluations,params,one_qubit_gates,two_qubit_gates,D"
    );
    let r = &rows(&csv)[0];
    assert_eq!(r[0], "0.592");
    assert!(col(r, 4).abs() < 1e-8, "error {}", r[4]);
    assert_eq!(r[7], "15");
    assert!((col(r, 1) - -1.1075134818).abs() < 1e-9);
}

#[test]
fn ex1_entangler_reaches_chemical_accuracy() {
    let csv =
        stdout(&phvqe(&["energy", "--fixtures", &fixture("h2_631g_0.700.fcidump"), "--ansatz", "ex1", "--depth", "8"]));
    let r = &rows(&csv)[0];
    assert!(col(r, 4).abs() < CHEMICAL_ACCURACY, "error {}", r[4]);
    assert_eq!(r[7], "112");
    assert_eq!(r[10], "8");
}

#[test]
fn second_quantized_form_gives_the_same_energy() {
    let f = fixture("h2_631g_0.700.fcidump");
    let ph = stdout(&phvqe(&["energy", "--fixtures", &f]));
    let sq = stdout(&phvqe(&["energy", "--fixtures", &f, "--hamiltonian", "sq"]));
    let (a, b) = (&rows(&ph)[0], &rows(&sq)[0]);
    assert!((col(a, 2) - col(b, 2)).abs() < 1e-8);
    assert_eq!(a[3], b[3]);
}

#[test]
fn active_space_scans() {
    let pattern = format!("{},{}", fixture("h2_631g_0.[5-9]*.fcidump"), fixture("h2_631g_1.[0-4]*.fcidump"));
    let full = stdout(&phvqe(&["scan", "--fixtures", &pattern, "--active-occ", "2", "--active-virt", "6"]));
    let small = stdout(&phvqe(&["scan", "--fixtures", &pattern, "--active-occ", "2", "--active-virt", "2"]));
    let (full, small) = (rows(&full), rows(&small));
    let labels: Vec<f64> = full.iter().take_while(|r| !r[0].ends_with("error")).map(|r| col(r, 0)).collect();
    assert!(labels.len() >= 8);
    assert!(labels.windows(2).all(|w| w[0] < w[1]), "{labels:?}");

    let summary = |rs: &[Vec<String>], key: &str| rs.iter().find(|r| r[0] == key).map(|r| col(r, 4)).unwrap();
    assert!(summary(&full, "max_abs_error") < CHEMICAL_ACCURACY);
    assert!(summary(&small, "max_abs_error") > CHEMICAL_ACCURACY);
    // the truncated curve stays above and roughly parallel to the exact one
    assert!(summary(&small, "error_spread") < 2.0 * summary(&small, "mean_error"));
    assert!(small.iter().take(labels.len()).all(|r| col(r, 4) > 0.0));
}

#[test]
fn trotter_study_shape() {
    let csv = stdout(&phvqe(&["trotter", "--fixtures", &fixture("h2_631g_0.592.fcidump"), "--trotter", "1,2,4,8"]));
    assert_eq!(csv.lines().next().unwrap(), "n,replay_error,reopt_error");
    let rs = rows(&csv);
    assert_eq!(rs.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["1", "2", "4", "8"]);
    assert!(rs.windows(2).all(|w| col(&w[1], 1) <= col(&w[0], 1)));
    assert!(rs.iter().all(|r| col(r, 2) < 1e-8));
    assert!(col(&rs[0], 1) >= 100.0 * col(&rs[0], 2));
}

#[test]
fn single_value_trotter_means_a_range() {
    let csv = stdout(&phvqe(&["trotter", "--fixtures", &fixture("h2_631g_0.700.fcidump"), "--trotter", "3"]));
    assert_eq!(rows(&csv).len(), 3);
}

#[test]
fn manifest_replays_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let pattern = format!("{},{}", fixture("h2_631g_0.600.fcidump"), fixture("h2_631g_0.800.fcidump"));
    let first = phvqe(&[
        "scan",
        "--fixtures",
        &pattern,
        "--ansatz",
        "ex2",
        "--depth",
        "2",
        "--seed",
        "11",
        "--out",
        a.to_str().unwrap(),
    ]);
    stdout(&first);
    let manifest = a.join("manifest.txt");
    let text = fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("seed=11") && text.contains("fixture_sha256="), "{text}");
    stdout(&phvqe(&["scan", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]));
    assert_eq!(fs::read(a.join("scan.csv")).unwrap(), fs::read(b.join("scan.csv")).unwrap());
    assert_eq!(fs::read(&manifest).unwrap(), fs::read(b.join("manifest.txt")).unwrap());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, format!("fixtures={}\nansatz=ex2\ndepth=1\n", fixture("h2_631g_0.700.fcidump"))).unwrap();
    let csv = stdout(&phvqe(&["energy", "--config", cfg.to_str().unwrap(), "--depth", "2"]));
    let r = &rows(&csv)[0];
    assert_eq!(r[10], "2");
    assert_eq!(r[7], "30");
}

#[test]
fn changed_fixture_is_rejected_on_replay() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("h2_631g_0.700.fcidump");
    fs::copy(fixture("h2_631g_0.700.fcidump"), &copy).unwrap();
    let out = dir.path().join("out");
    stdout(&phvqe(&["energy", "--fixtures", copy.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    let mut text = fs::read_to_string(&copy).unwrap();
    text.push_str("  0.0 1 1 1 1\n");
    fs::write(&copy, text).unwrap();
    let replay = phvqe(&["energy", "--config", out.join("manifest.txt").to_str().unwrap()]);
    assert!(!replay.status.success());
    assert!(String::from_utf8_lossy(&replay.stderr).contains("changed since the manifest"));
}

fn assert_usage_error(out: &Output, needle: &str) {
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains(needle), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_usage_error(&phvqe(&["scan", "--fixtures", &fixture("h2_631g_0.700.fcidump")]), "at least two");
    assert_usage_error(&phvqe(&["energy", "--fixtures", &fixture("nothing_*.fcidump")]), "no fixture matches");
    assert_usage_error(
        &phvqe(&["energy", "--fixtures", &fixture("h2_631g_0.700.fcidump"), "--ansatz", "ry"]),
        "unknown ansatz",
    );
    assert_usage_error(
        &phvqe(&["trotter", "--fixtures", &fixture("h2_631g_0.700.fcidump"), "--ansatz", "ex1"]),
        "needs --ansatz uccsd",
    );
    assert_usage_error(&phvqe(&["energy"]), "no fixtures");
}

#[test]
fn unreadable_fixture_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad_1.0.fcidump");
    fs::write(&bad, "&FCI NORB=2,NELEC=2,&END\nnot a number 1 1 0 0\n").unwrap();
    let out = phvqe(&["energy", "--fixtures", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn scan_failure_keeps_completed_rows() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("h2_631g_0.700.fcidump"), dir.path().join("h2_0.700.fcidump")).unwrap();
    fs::write(dir.path().join("h2_0.900.fcidump"), "&FCI NORB=2,NELEC=2,&END\nbroken\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = phvqe(&[
        "scan",
        "--fixtures",
        dir.path().join("*.fcidump").to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let partial = fs::read_to_string(out_dir.join("scan.csv")).unwrap();
    let rs = rows(&partial);
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0][0], "0.700");
    assert!(Path::new(&out_dir.join("manifest.txt")).exists());
}
