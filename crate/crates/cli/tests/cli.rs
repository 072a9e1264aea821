use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn critspectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critspectra"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path
}

fn simulate_small(dir: &Path, name: &str) -> PathBuf {
    simulate_at(dir, name, "\"critical\"")
}

fn simulate_at(dir: &Path, name: &str, beta2j: &str) -> PathBuf {
    let config = write_config(
        dir,
        &format!("seed = 11\n[simulation]\nside = 8\ntau = 256\nbeta2j = {beta2j}\nequilibration_steps = 50\n"),
    );
    let out = dir.join(name);
    let o = critspectra(&["simulate", "--config", p(&config), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn manifest_value(dir: &Path, key: &str) -> String {
    let text = fs::read_to_string(dir.join("manifest.txt")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from manifest"))
        .to_string()
}

#[test]
fn simulation_is_bitwise_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = simulate_small(dir.path(), "a");
    let b = simulate_small(dir.path(), "b");
    let read = |d: &Path| fs::read(d.join("series.csts")).unwrap();
    assert_eq!(sha256_hex(&read(&a)), sha256_hex(&read(&b)));
    assert_eq!(manifest_value(&a, "config_digest"), manifest_value(&b, "config_digest"));
}

#[test]
fn manifest_digest_matches_resolved_config() {
    let dir = TempDir::new().unwrap();
    let out = simulate_small(dir.path(), "run");
    let resolved = fs::read(out.join("config.resolved.toml")).unwrap();
    assert_eq!(manifest_value(&out, "config_digest"), sha256_hex(&resolved));
    assert_eq!(manifest_value(&out, "seed"), "11");
    assert_eq!(manifest_value(&out, "subcommand"), "simulate");
    let meta = fs::read_to_string(out.join("series.meta")).unwrap();
    assert!(meta.contains("tau"), "{meta}");
}

#[test]
fn missing_tau_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "seed = 1\n[simulation]\nside = 8\n");
    let o = critspectra(&["simulate", "--config", p(&config), "--out", p(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau"));
}

#[test]
fn spectrum_artifacts_and_subsample_determinism() {
    let dir = TempDir::new().unwrap();
    let sim = simulate_small(dir.path(), "sim");
    let input = sim.join("series.csts");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = critspectra(&[
            "spectrum", "--input", p(&input), "--out", p(&out), "--subsample", "0.5",
            "--window", "2,12", "--mp-overlay",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("s1"), run("s2"));
    for name in ["spectrum.csv", "zipf.csv", "density.csv", "spacing.csv", "sigma2.csv", "fit.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let spectrum = fs::read_to_string(a.join("spectrum.csv")).unwrap();
    let rows = spectrum.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 32);
    let density = fs::read_to_string(a.join("density.csv")).unwrap();
    assert!(density.contains("mp_density"));
    assert!(density.contains("model=MP"));
}

#[test]
fn emerging_requires_a_singular_matrix() {
    let dir = TempDir::new().unwrap();
    let sim = simulate_at(dir.path(), "sim", "0.05");
    let input = sim.join("series.csts");
    let out = dir.path().join("e");
    let o = critspectra(&["spectrum", "--input", p(&input), "--out", p(&out), "--power-map", "1.001"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));

    let o = critspectra(&[
        "spectrum", "--input", p(&input), "--out", p(&out), "--power-map", "1.001",
        "--tau-window", "N/4", "--observables", "emerging",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let emerging = fs::read_to_string(out.join("emerging.csv")).unwrap();
    let values = emerging.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(values, 64 - 15);
}

#[test]
fn oracle_warns_when_window_is_too_small() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let o = critspectra(&["oracle", "--dim", "2", "--side", "8", "--theta", "0.25", "--out", p(&out)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).to_lowercase().contains("window"));
    assert!(out.join("zipf.csv").exists());
    assert!(!out.join("fit.csv").exists());
}

#[test]
fn oracle_reports_theory() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let o = critspectra(&["oracle", "--dim", "2", "--side", "64", "--theta", "0.25", "--out", p(&out)]);
    assert!(o.status.success());
    let fit = fs::read_to_string(out.join("fit.csv")).unwrap();
    assert!(fit.contains("zeta_theory"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("theory=0.875"));
}

#[test]
fn rmt_baseline_writes_densities_and_rejects_full_rank() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r");
    let args = ["rmt-baseline", "--dim", "64", "--tau", "8", "--q", "1.001", "--replicas", "3", "--seed", "2"];
    let o = critspectra(&[&args[..], &["--out", p(&out)]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["emerging_density.csv", "emerging.csv", "mp_density.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let o = critspectra(&[
        "rmt-baseline", "--dim", "16", "--tau", "32", "--q", "1.001", "--seed", "2", "--out",
        p(&dir.path().join("bad")),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn study_writes_one_row_per_size() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "seed = 5\n[study]\nsizes = [6, 8]\nruns_per_size = 2\nbeta2j = 0.6\ntau_per_site = 2\nequilibration_steps = 20\nwindow = [2, 12]\n",
    );
    let out = dir.path().join("st");
    let o = critspectra(&["--jobs", "2", "study", "--config", p(&config), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("study.csv")).unwrap();
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("6,") && rows[1].starts_with("8,"));
    assert!(out.join("zipf_L8_run1.csv").exists());
}
