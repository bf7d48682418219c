use std::fs;
use std::process::Command;

fn sfs_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sfs"))
}

fn tiny_config(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("tiny.cfg");
    fs::write(
        &path,
        r#"{
  "architectures": [
    { "name": "srspm1", "r_m": 0.5, "gamma_f": 0.5328, "gamma_m": 0.7073 },
    { "name": "srspm4", "r_m": 0.5, "gamma_f": 0.1506, "gamma_m": 0.5173 }
  ],
  "workspace": { "phi_min_deg": 1.0, "phi_max_deg": 3.0, "delta_phi_deg": 1.0, "per_shell_target": 12 },
  "z0": 2.5,
  "solver": { "imag_tol": 1e-6, "residual_tol": 1e-8, "oracle": { "half_width": 4.0, "resolution": 0.01, "max_expansions": 4 } },
  "output": { "directory": "out", "dump_samples": false }
}"#,
    )
    .unwrap();
    path
}

#[test]
fn emit_default_config_round_trips() {
    let out = sfs_bin().arg("--emit-default-config").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["architectures"].as_array().unwrap().len(), 4);
    assert_eq!(parsed["z0"], 2.5);
    // identical to the bundled default.cfg
    assert_eq!(text, include_str!("../default.cfg"));
}

#[test]
fn sfs_subcommand_reports_radius() {
    let out = sfs_bin()
        .args(["sfs", "--arch", "srspm1", "--c", "0.0639,0.1107,0.2597", "--z0", "2.5"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["status"], "Safe");
    let radius = v["result"]["radius"].as_f64().unwrap();
    assert!((radius - 1.9461).abs() < 1e-3, "radius {radius}");
}

#[test]
fn sfs_oracle_check_agrees() {
    let out = sfs_bin()
        .args([
            "sfs",
            "--arch",
            "srspm1",
            "--c",
            "0.05,-0.03,0.1",
            "--oracle-check",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let radius = v["result"]["radius"].as_f64().unwrap();
    let oracle = v["oracle"]["distance"].as_f64().unwrap();
    assert!((radius - oracle).abs() <= 0.02, "radius {radius} oracle {oracle}");
}

#[test]
fn surface_subcommand_emits_16_coefficients() {
    let out = sfs_bin()
        .args(["surface", "--arch", "srspm1", "--c", "0,0,0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 16);
    assert_eq!(v["monomial_order"].as_array().unwrap().len(), 16);
    assert_eq!(v["monomial_order"][0], "x^2z");
    assert_eq!(v["monomial_order"][15], "1");
}

#[test]
fn sweep_writes_summary_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_dir = dir.path().join("results");
    let out = sfs_bin()
        .args(["sweep", "--arch", "srspm1"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .arg("--dump-samples")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("srspm1_summary.json")).unwrap())
            .unwrap();
    assert!(summary["r2"].as_f64().unwrap() > 0.0);
    let curve = fs::read_to_string(out_dir.join("srspm1_curve.csv")).unwrap();
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "phi_deg,per_shell_min,cumulative_min");
    assert_eq!(lines.len(), 4);
    // cumulative column nonincreasing
    let cums: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(cums.windows(2).all(|w| w[1] <= w[0]));
    assert!(out_dir.join("srspm1_samples.csv").exists());
    let radii = fs::read_to_string(out_dir.join("srspm1_radii.csv")).unwrap();
    assert_eq!(radii.lines().count(), summary["n_samples"].as_u64().unwrap() as usize + 1);
}

#[test]
fn compare_ranks_architectures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_dir = dir.path().join("results");
    let out = sfs_bin()
        .arg("compare")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("comparison.json")).unwrap())
            .unwrap();
    let ranking = table["ranking"].as_array().unwrap();
    assert_eq!(ranking.len(), 2);
    // srspm4 dominates srspm1 even on a coarse grid
    assert_eq!(ranking[0], "srspm4");
}

#[test]
fn dump_samples_has_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_dir = dir.path().join("samples");
    let out = sfs_bin()
        .arg("dump-samples")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(out_dir.join("samples.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "phi_deg,kx,ky,kz,c1,c2,c3");
    assert!(lines.len() > 3);
    for line in &lines[1..] {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 7);
        let k = (fields[1].powi(2) + fields[2].powi(2) + fields[3].powi(2)).sqrt();
        assert!((k - 1.0).abs() < 1e-9);
        let c = (fields[4].powi(2) + fields[5].powi(2) + fields[6].powi(2)).sqrt();
        let phi = fields[0].to_radians();
        assert!((c - (phi / 2.0).tan()).abs() < 1e-9);
    }
}

#[test]
fn distinct_exit_codes() {
    // missing subcommand -> usage error (2)
    let out = sfs_bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unknown architecture -> configuration error (3)
    let out = sfs_bin().args(["sfs", "--arch", "nope", "--c", "0,0,0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    // malformed --c -> configuration error (3)
    let out = sfs_bin().args(["sfs", "--arch", "srspm1", "--c", "1,2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    // unreadable config -> I/O error (4)
    let out = sfs_bin()
        .args(["sfs", "--arch", "srspm1", "--c", "0,0,0", "--config", "/nonexistent.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
