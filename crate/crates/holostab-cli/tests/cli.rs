use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holostab::io::read_csv;

fn holostab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holostab")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, cmd: &str, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec![cmd, "--out", out];
    args.extend_from_slice(extra);
    holostab(&args)
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn sweep_rows_ratios_and_reproducibility() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = ["--fbar-min", "3", "--fbar-max", "10", "--fbar-steps", "8"];
    assert!(run_in(&a, "sweep-ip1", &args).status.success());
    assert!(run_in(&b, "sweep-ip1", &args).status.success());
    let bytes = |d: &Path| std::fs::read(d.join("sweep_ip1.csv")).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    let (header, rows) = read_csv(&a.join("sweep_ip1.csv")).unwrap();
    assert_eq!(header, ["fbar", "sigma_min_numeric", "c_ip1_numeric", "ip1_bound", "ratio", "status"]);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert!((num(&r[4]) - 1.0).abs() <= 0.25, "{r:?}");
        assert_eq!(r[5], "ok");
    }
    let m = json(a.join("manifest.json"));
    assert_eq!(m["status"], "ok");
    assert!(m["timings"]["total_seconds"].as_f64().unwrap() > 0.0);
    assert_eq!(m["settings"]["grid_n"], 16384);
    assert_eq!(m["settings"]["support_n"], 64);
}

#[test]
fn default_sweep_has_nineteen_rows() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_in(tmp.path(), "sweep-ip1", &[]).status.success());
    let (_, rows) = read_csv(&tmp.path().join("sweep_ip1.csv")).unwrap();
    assert_eq!(rows.len(), 19);
}

#[test]
fn sweep_beyond_window_is_flagged_per_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), "sweep-ip1", &["--fbar-min", "14", "--fbar-max", "15", "--fbar-steps", "2"]);
    assert!(out.status.success());
    let (_, rows) = read_csv(&tmp.path().join("sweep_ip1.csv")).unwrap();
    assert!(rows.iter().all(|r| r[5] == "asymptotic" && r[1] == "NaN"));
}

#[test]
fn verify_passes_and_detects_sign_mutation() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = run_in(&tmp.path().join("clean"), "verify", &[]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 12);
    let bad = run_in(&tmp.path().join("mutated"), "verify", &["--mutate", "flip-ctf-phase-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1, "{failed:?}");
    assert!(failed[0].contains("ctf-forward::ctf_equals_real_part_form"));
    assert_eq!(json(tmp.path().join("mutated/manifest.json"))["status"], "verification_failed");
}

#[test]
fn bounds_lattice_rows_and_relations() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_in(tmp.path(), "bounds", &[]).status.success());
    let (header, rows) = read_csv(&tmp.path().join("bounds.csv")).unwrap();
    assert_eq!(header.len(), 14);
    assert_eq!(rows.len(), 41 * (1 + 3 * 3 + 3));
    let ip2 = |f: f64, m: &str| {
        rows.iter()
            .find(|r| r[0] == "IP2" && r[2] == "0" && r[3] == m && (num(&r[1]) - f).abs() <= 1e-9 * f)
            .map(|r| num(&r[4]))
    };
    for r in rows.iter().filter(|r| r[0] == "IP3") {
        let want = ip2(num(&r[1]), &r[3]);
        if let Some(w) = want {
            assert!((num(&r[4]) - w / 2f64.sqrt()).abs() <= 1e-12 * w);
        }
    }
    let tail: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r[0] == "IP2" && r[2] == "0" && r[3] == "1")
        .map(|r| (num(&r[1]).ln(), num(&r[4]).ln()))
        .collect();
    let (a, b) = (tail[tail.len() - 2], tail[tail.len() - 1]);
    assert!(((b.1 - a.1) / (b.0 - a.0) + 1.0).abs() < 1e-9);
}

#[test]
fn mode_is_normalized_supported_and_prolate_like() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_in(tmp.path(), "mode", &["--fbar", "10"]).status.success());
    let r = json(tmp.path().join("mode_report.json"));
    assert!(r["correlation"].as_f64().unwrap() >= 0.95);
    assert!((r["mode_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(r["outside_norm"].as_f64().unwrap(), 0.0);
    assert!(tmp.path().join("mode.fld").exists() && tmp.path().join("mode_demodulated.fld.json").exists());
}

#[test]
fn prolate_table_rows_and_nodes() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_in(tmp.path(), "prolate", &[]).status.success());
    let (_, rows) = read_csv(&tmp.path().join("prolate.csv")).unwrap();
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().all(|r| r[2] == r[7]));
}

fn write_config(dir: &Path, amplitude: f64) -> PathBuf {
    std::fs::create_dir_all(dir).unwrap();
    let path = dir.join("run.toml");
    let text = format!(
        "fbar = 10.0\nfbar2 = 30.0\nseed = 3\n\n[phantom]\nkind = \"gauss_blobs\"\ncount = 4\namplitude = {amplitude}\n\
         target = \"complex_h\"\nseed = 3\nmu_scale = 0.3\nsupport = {{ shape = \"ball\", diameter = 1.0, center = [0.0, 0.0] }}\n"
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn simulate_reconstruct_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let cfg = write_config(tmp.path(), 1.0);
    let cfg = cfg.to_str().unwrap();
    assert!(run_in(&sim, "simulate", &["--config", cfg]).status.success());
    let again = tmp.path().join("again");
    assert!(run_in(&again, "simulate", &["--config", cfg]).status.success());
    for name in ["phi.fld", "mu.fld", "contrast_1.fld", "contrast_2.fld", "hologram_1.fld"] {
        assert_eq!(std::fs::read(sim.join(name)).unwrap(), std::fs::read(again.join(name)).unwrap(), "{name}");
    }
    let rec = tmp.path().join("rec");
    let out = run_in(&rec, "reconstruct", &["--input", sim.to_str().unwrap(), "--reg", "1e-10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(rec.join("metrics.json"));
    assert_eq!(m["kind"], "two_distance");
    assert!(m["banded_error_phi"].as_f64().unwrap() <= 1e-4);
    assert!(m["banded_error_mu"].as_f64().unwrap() <= 1e-4);
    assert!(m["phi"]["relative_error"].is_number());
}

#[test]
fn nonlinear_divergence_is_quadratic() {
    let tmp = tempfile::tempdir().unwrap();
    let div = |amp: f64, name: &str| {
        let dir = tmp.path().join(name);
        let cfg = write_config(&dir, amp);
        assert!(run_in(&dir, "simulate", &["--config", cfg.to_str().unwrap()]).status.success());
        let r = json(dir.join("simulation.json"));
        r["nonlinear_minus_linear"][0].as_f64().unwrap()
    };
    let ratio = div(0.02, "b") / div(0.01, "a");
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn single_distance_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("single.toml");
    std::fs::write(&cfg, "distances = 1\nalpha = 0.3\nfbar = 10.0\n").unwrap();
    let sim = tmp.path().join("sim");
    assert!(run_in(&sim, "simulate", &["--config", cfg.to_str().unwrap()]).status.success());
    assert!(!sim.join("contrast_2.fld").exists());
    let rec = tmp.path().join("rec");
    assert!(run_in(&rec, "reconstruct", &["--input", sim.to_str().unwrap(), "--reg", "1e-12"]).status.success());
    let m = json(rec.join("metrics.json"));
    assert_eq!(m["kind"], "single");
    assert!(m["phi"]["residual"].as_f64().unwrap() < 1e-6);
    assert!(m["mu"].is_null());
}

#[test]
fn reconstruct_without_second_contrast_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    assert!(run_in(&sim, "simulate", &[]).status.success());
    std::fs::remove_file(sim.join("contrast_2.fld")).unwrap();
    let out = run_in(&tmp.path().join("rec"), "reconstruct", &["--input", sim.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing input"));
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "fbar_mni = 2.0\n").unwrap();
    let out = run_in(tmp.path(), "sweep-ip1", &["--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(holostab(&["sweep-ip1", "--fbar-min", "x"]).status.code(), Some(2));
    let missing = run_in(&tmp.path().join("r"), "reconstruct", &["--input", tmp.path().join("none").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    let threads = Command::new(env!("CARGO_BIN_EXE_holostab"))
        .args(["bounds", "--out", tmp.path().join("t").to_str().unwrap()])
        .env("HOLOSTAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}
