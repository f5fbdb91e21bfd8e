use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn octorecon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octorecon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    (header, lines.map(|l| l.split(',').map(str::to_owned).collect()).collect())
}

/// 2048-bit code written next to a reconcile config that uses it.
fn small_code_setup(dir: &Path) -> PathBuf {
    let gen = write(
        dir,
        "gen.json",
        r#"{"n_vars": 2048, "n_checks": 1516,
            "var_fractions": [[2, 0.605], [3, 0.187], [4, 0.093], [7, 0.026], [10, 0.089]]}"#,
    );
    let alist = dir.join("small.alist");
    let out = octorecon(&[
        "gen-code",
        "--config",
        gen.to_str().unwrap(),
        "--seed",
        "17",
        "--out",
        alist.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    write(
        dir,
        "reconcile.json",
        r#"{"seed": 5, "code": "small.alist", "snr": [0.6, 1.5], "codewords": 20}"#,
    )
}

#[test]
fn chi_pdf_table_has_four_blocks_that_integrate_to_one() {
    let out = octorecon(&["chi-pdf"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header, ["n", "r", "density"]);
    assert_eq!(rows.len(), 4 * 400);
    for (block, n) in rows.chunks(400).zip(["1", "2", "4", "8"]) {
        assert!(block.iter().all(|r| r[0] == n));
        let pts: Vec<(f64, f64)> = block.iter().map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
        assert_eq!(pts[0].0, 0.0);
        assert_eq!(pts[399].0, 8.0);
        let integral: f64 = pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
        assert!((integral - 1.0).abs() < 1e-3, "n = {n}: {integral}");
    }
}

#[test]
fn chi_pdf_writes_to_out_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"dims": [8], "points": 11, "r_max": 5}"#);
    let out_path = dir.path().join("pdf.csv");
    let out = octorecon(&["chi-pdf", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let (_, rows) = csv_rows(&std::fs::read_to_string(out_path).unwrap());
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10][1], "5.0");
}

#[test]
fn reconcile_is_byte_identical_under_a_fixed_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = small_code_setup(dir.path());
    let cfg = cfg.to_str().unwrap();
    let a = octorecon(&["reconcile", "--config", cfg]);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = octorecon(&["reconcile", "--config", cfg]);
    assert_eq!(a.stdout, b.stdout);
    let (header, rows) = csv_rows(std::str::from_utf8(&a.stdout).unwrap());
    assert_eq!(
        header,
        ["snr", "codewords", "frame_errors", "fer", "beta", "leakage_bits", "mean_iterations"]
    );
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][5], (1516 + 64).to_string());
    // SNR 1.5 is far above threshold for this code
    assert_eq!(rows[1][2], "0");
    assert!(stderr(&a).contains("frame errors"));

    // --seed overrides the config
    let c = octorecon(&["reconcile", "--config", cfg, "--seed", "6"]);
    assert!(c.status.success());
    let d = octorecon(&["reconcile", "--config", cfg, "--seed", "6"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn gen_code_with_the_shipped_seed_reproduces_the_bundled_code() {
    let out = octorecon(&["gen-code", "--seed", "208676352"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::str::from_utf8(&out.stdout).unwrap(),
        octorecon::ldpc::SHIPPED_CODE_ALIST
    );
}

#[test]
fn unknown_keys_are_all_listed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "k.json",
        r#"{"chanel": {}, "channel": {"xi": 0.01, "loss": 0.2}, "distances": {"stop": 10}}"#,
    );
    let out = octorecon(&["keyrate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    for key in ["chanel", "channel.loss", "distances.stop"] {
        assert!(msg.contains(key), "{key} missing from: {msg}");
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let code = |args: &[&str]| octorecon(args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&[]), Some(1));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["chi-pdf", "--seed", "not-a-number"]), Some(1));

    let bad_grid = write(dir.path(), "grid.json", r#"{"points": 1}"#);
    assert_eq!(code(&["chi-pdf", "--config", bad_grid.to_str().unwrap()]), Some(1));

    // stochastic commands need a seed
    assert_eq!(code(&["reconcile"]), Some(2));
    assert_eq!(code(&["gen-code"]), Some(2));
    let bad_json = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(code(&["keyrate", "--config", bad_json.to_str().unwrap()]), Some(2));
    let bad_eta = write(dir.path(), "eta.json", r#"{"channel": {"eta": 2.0}}"#);
    assert_eq!(code(&["keyrate", "--config", bad_eta.to_str().unwrap()]), Some(2));

    let missing = dir.path().join("nope.json");
    assert_eq!(code(&["keyrate", "--config", missing.to_str().unwrap()]), Some(3));
    let no_code = write(dir.path(), "r.json", r#"{"seed": 1, "code": "absent.alist"}"#);
    let out = octorecon(&["reconcile", "--config", no_code.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("absent.alist"));
    let no_ref = write(dir.path(), "ref.json", r#"{"reference_csv": "absent.csv"}"#);
    assert_eq!(code(&["keyrate", "--config", no_ref.to_str().unwrap()]), Some(3));

    // valid but so large that the covariance matrix overflows
    let unphysical = write(dir.path(), "xi.json", r#"{"channel": {"xi": 1e200}, "distances": {"stop_km": 10}}"#);
    assert_eq!(code(&["keyrate", "--config", unphysical.to_str().unwrap()]), Some(4));
}

fn keyrate_csv(dir: &Path, name: &str, config: &str) -> Vec<Vec<f64>> {
    let cfg = write(dir, name, config);
    let out = octorecon(&["keyrate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header, ["km", "T", "SNR", "I", "chi_BE", "K_real"]);
    rows.iter().map(|r| r.iter().map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn perfect_reconciliation_dominates() {
    let dir = TempDir::new().unwrap();
    let grid = r#""distances": {"start_km": 0, "stop_km": 60, "step_km": 5}"#;
    let perfect = keyrate_csv(
        dir.path(),
        "p.json",
        &format!(r#"{{"efficiency": {{"kind": "constant", "beta": 1.0}}, {grid}}}"#),
    );
    let real = keyrate_csv(
        dir.path(),
        "r.json",
        &format!(r#"{{"efficiency": {{"kind": "constant", "beta": 0.95}}, {grid}}}"#),
    );
    assert_eq!(perfect.len(), 13);
    for (p, r) in perfect.iter().zip(&real) {
        assert!(p[5] > r[5], "{} km: {} vs {}", p[0], p[5], r[5]);
    }
}

#[test]
fn default_keyrate_crosses_zero_beyond_fifty_km_and_compares_to_a_reference() {
    let dir = TempDir::new().unwrap();
    let rows = keyrate_csv(dir.path(), "d.json", "{}");
    assert_eq!(rows.len(), 101);
    let at_50 = rows.iter().find(|r| r[0] == 50.0).unwrap();
    assert!(at_50[5] > 0.0);
    assert!(rows.last().unwrap()[5] <= 0.0);

    // a short-reach reference: same code, untrusted detector
    let reference = octorecon(&[
        "keyrate",
        "--config",
        write(dir.path(), "low.json", r#"{"detector": "untrusted"}"#)
            .to_str()
            .unwrap(),
        "--out",
        dir.path().join("ref.csv").to_str().unwrap(),
    ]);
    assert!(reference.status.success());
    let cfg = write(dir.path(), "cmp.json", r#"{"reference_csv": "ref.csv"}"#);
    let out = octorecon(&["keyrate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let msg = stderr(&out);
    assert!(msg.contains("K_real reaches zero at 52.9"), "{msg}");
    assert!(msg.contains("farther than the reference: true"), "{msg}");
}
