use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn cqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqed")).args(args).output().expect("failed to launch cqed")
}

fn run_with(dir: &Path, experiment: &str, config: &str, out: &str, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = dir.join(format!("{out}.json"));
    fs::write(&cfg, config).unwrap();
    let out_dir = dir.join(out);
    let mut args = vec![experiment, "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    (cqed(&args), out_dir)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(rows: &[Vec<String>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

const SMALL_GRID: &str = r#""grid": {"q1_min": -3, "q1_max": 3, "q2_min": -3, "q2_max": 3, "n1": 13, "n2": 13}"#;

#[test]
fn identical_configs_give_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("tomography", format!(r#"{{"alpha": [1, 0], "tomography": {{"angles": 12, "n_per_angle": 3000}}, {SMALL_GRID}}}"#)),
        ("direct-map", format!(r#"{{"state": {{"kind": "damped-cat", "t": 0.1}}, "direct": {{"n_shots": 200, "efficiency": 0.5}}, {SMALL_GRID}}}"#)),
        ("direct-monitor", r#"{"scan": {"t_max": 0.5, "steps": 6}, "direct": {"n_shots": 500}}"#.to_string()),
        ("decoherence-scan", r#"{"scan": {"t_max": 1.0, "steps": 5}}"#.to_string()),
    ];
    for (experiment, config) in &cases {
        let (a, dir_a) = run_with(tmp.path(), experiment, config, &format!("{experiment}-a"), &[]);
        let (b, dir_b) = run_with(tmp.path(), experiment, config, &format!("{experiment}-b"), &[]);
        assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(code(&b), 0);
        let mut csvs: Vec<_> = fs::read_dir(&dir_a)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|n| n.to_string_lossy().ends_with(".csv"))
            .collect();
        csvs.sort();
        assert!(!csvs.is_empty());
        for name in csvs {
            assert_eq!(fs::read(dir_a.join(&name)).unwrap(), fs::read(dir_b.join(&name)).unwrap(), "{experiment} {name:?}");
        }
        assert_eq!(manifest(&dir_a)["config_hash"], manifest(&dir_b)["config_hash"]);
    }
}

#[test]
fn seed_flag_changes_sampled_output() {
    let tmp = tempfile::tempdir().unwrap();
    let config = r#"{"scan": {"t_max": 0.2, "steps": 3}, "direct": {"n_shots": 500}}"#;
    let (_, a) = run_with(tmp.path(), "direct-monitor", config, "a", &["--seed", "5"]);
    let (_, b) = run_with(tmp.path(), "direct-monitor", config, "b", &["--seed", "6"]);
    assert_ne!(fs::read(a.join("monitor.csv")).unwrap(), fs::read(b.join("monitor.csv")).unwrap());
    assert_eq!(manifest(&a)["config"]["seed"], 5);
    assert_ne!(manifest(&a)["config_hash"], manifest(&b)["config_hash"]);
}

#[test]
fn invalid_configs_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    for (i, config) in [
        r#"{"alpha": [2, 0], "kapa": 1}"#,
        r#"{"direct": {"n_shots": 10, "shots": 3}}"#,
        r#"{"kappa": -1}"#,
        r#"{"direct": {"efficiency": 2}}"#,
        r#"{"alpha": "#,
    ]
    .iter()
    .enumerate()
    {
        let (o, _) = run_with(tmp.path(), "wigner-map", config, &format!("bad{i}"), &[]);
        assert_eq!(code(&o), 1, "{config}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let missing = cqed(&["wigner-map", "--config", "/nonexistent/config.json"]);
    assert_eq!(code(&missing), 1);
    assert_eq!(code(&cqed(&["no-such-experiment"])), 1);
}

#[test]
fn numerical_failures_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // Four angles are below the back-projection minimum.
    let (o, _) = run_with(tmp.path(), "tomography", r#"{"tomography": {"angles": 4, "n_per_angle": 100}}"#, "t", &[]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    // The resonant readout is only defined at the origin.
    let config = format!(r#"{{"direct": {{"variant": "resonant-2pi"}}, {SMALL_GRID}}}"#);
    let (o, _) = run_with(tmp.path(), "direct-map", &config, "d", &[]);
    assert_eq!(code(&o), 2);
}

#[test]
fn cat_and_mixture_maps_differ_in_the_fringes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, cat) = run_with(tmp.path(), "wigner-map", r#"{"alpha": [3, 0], "state": {"kind": "cat"}}"#, "cat", &[]);
    let (b, mixture) = run_with(tmp.path(), "wigner-map", r#"{"alpha": [3, 0], "state": {"kind": "mixture"}}"#, "mix", &[]);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    let (header, rows_c) = read_csv(&cat.join("wigner.csv"));
    assert_eq!(header, ["q1", "q2", "W"]);
    let (_, rows_m) = read_csv(&mixture.join("wigner.csv"));
    assert_eq!(rows_c.len(), rows_m.len());
    let mut sup = 0.0f64;
    for (rc, rm) in rows_c.iter().zip(&rows_m) {
        let (q1, q2): (f64, f64) = (rc[0].parse().unwrap(), rc[1].parse().unwrap());
        if q1.abs() <= 0.25 && q2.abs() <= 3.0 {
            sup = sup.max((rc[2].parse::<f64>().unwrap() - rm[2].parse::<f64>().unwrap()).abs());
        }
    }
    assert!(sup > 1.5, "fringe sup-difference {sup}");
    let header: serde_json::Value = serde_json::from_slice(&fs::read(cat.join("wigner.json")).unwrap()).unwrap();
    assert_eq!(header["provenance"], "computed");
    assert!(header["convention"].as_str().unwrap().contains("alpha = (q1 + i q2)/sqrt(2)"));
    assert_eq!(header["checks"]["within_bound"], true);
}

#[test]
fn decoherence_scan_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, dir) = run_with(tmp.path(), "decoherence-scan", r#"{"alpha": [2.2360679774997896, 0], "kappa": 1}"#, "scan", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.join("decoherence_scan.csv"));
    let k = header.iter().position(|h| h == "p_e2_given_e1").unwrap();
    let p = column(&rows, k);
    let t = column(&rows, 0);
    assert_eq!(rows.len(), 81);
    assert!((t[80] - 8.0).abs() < 1e-12);
    assert!(p[0] > 0.9999, "start {}", p[0]);
    assert!(p.iter().any(|x| (x - 0.5).abs() < 0.02), "no point near 1/2");
    assert!(p[80] < 0.02, "tail {}", p[80]);
    for w in p.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
}

#[test]
fn direct_map_matches_wigner_map() {
    let tmp = tempfile::tempdir().unwrap();
    let config = format!(r#"{{"state": {{"kind": "damped-cat", "t": 0.05}}, {SMALL_GRID}}}"#);
    let (_, direct) = run_with(tmp.path(), "direct-map", &config, "direct", &[]);
    let (_, computed) = run_with(tmp.path(), "wigner-map", &config, "computed", &[]);
    let (_, d) = read_csv(&direct.join("direct_map.csv"));
    let (_, w) = read_csv(&computed.join("wigner.csv"));
    for (a, b) in column(&d, 2).iter().zip(column(&w, 2)) {
        assert!((a - b).abs() < 1e-8);
    }
    let header: serde_json::Value = serde_json::from_slice(&fs::read(direct.join("direct_map.json")).unwrap()).unwrap();
    assert_eq!(header["provenance"], "measured-direct");
}

#[test]
fn monitor_csv_and_pacing_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let config = r#"{"scan": {"t_max": 0.3, "steps": 4}, "direct": {"n_shots": 400, "efficiency": 0.1, "shot_interval": 0.05}}"#;
    let (o, dir) = run_with(tmp.path(), "direct-monitor", config, "mon", &[]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let (header, rows) = read_csv(&dir.join("monitor.csv"));
    assert_eq!(header, ["t", "W0_exact", "W0_sampled", "stderr"]);
    assert_eq!(rows.len(), 4);
    assert!((column(&rows, 1)[0] - 2.0).abs() < 1e-10);
    assert!(rows.iter().all(|r| !r[2].is_empty() && !r[3].is_empty()));
    assert_eq!(manifest(&dir)["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn manifest_lists_every_artifact_with_checksum() {
    let tmp = tempfile::tempdir().unwrap();
    let config = format!(r#"{{"alpha": [1, 0], "tomography": {{"angles": 10, "n_per_angle": 2000}}, {SMALL_GRID}}}"#);
    let (o, dir) = run_with(tmp.path(), "tomography", &config, "tomo", &[]);
    assert_eq!(code(&o), 0);
    let m = manifest(&dir);
    let hash = m["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    let listed: Vec<&str> = m["artifacts"].as_array().unwrap().iter().map(|a| a["path"].as_str().unwrap()).collect();
    let mut on_disk: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
    for a in m["artifacts"].as_array().unwrap() {
        let bytes = fs::read(dir.join(a["path"].as_str().unwrap())).unwrap();
        let sha: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(a["sha256"], sha.as_str());
        assert_eq!(a["config_hash"], hash);
    }
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn prepare_cat_and_pauli_demo_run() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, dir) = run_with(tmp.path(), "prepare-cat", r#"{"alpha": [2, 0]}"#, "cat", &[]);
    assert_eq!(code(&o), 0);
    let s: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("summary.json")).unwrap()).unwrap();
    assert!((s["p_e"].as_f64().unwrap() + s["p_g"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(s["fidelity_g_to_even_cat"].as_f64().unwrap() > 1.0 - 1e-10);
    let (o, dir) = run_with(tmp.path(), "pauli-demo", "{}", "pauli", &[]);
    assert_eq!(code(&o), 0);
    let p: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("pauli.json")).unwrap()).unwrap();
    assert_eq!(p["tomography"]["marginals_only_incomplete"], true);
}

#[test]
fn selfcheck_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cqed(&["selfcheck", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let checks: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("selfcheck.json")).unwrap()).unwrap();
    assert!(checks.as_array().unwrap().iter().all(|c| c["pass"] == true));
}
