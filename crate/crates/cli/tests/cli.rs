use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn curvedyn(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvedyn"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("CURVEDYN_SEED")
        .output()
        .unwrap()
}

fn run_ok(args: &[&str], out: &Path) -> Output {
    let o = curvedyn(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn sha(path: &Path) -> String {
    format!("{:x}", Sha256::digest(std::fs::read(path).unwrap()))
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn kepler_trajectory_has_monotone_time() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["trajectory", "--system", "kepler", "--kappa", "1", "--k", "-1", "--t-end", "5"], dir.path());
    let rows = csv_rows(&dir.path().join("trajectory.csv"));
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|r| r.len() == 7));
    let t: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*t.last().unwrap(), 5.0);
}

#[test]
fn trajectory_is_byte_identical_for_a_fixed_seed() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["trajectory", "--system", "sw", "--kappa", "-0.3", "--k1", "0.1", "--seed", "11", "--t-end", "3"];
    run_ok(&args, a.path());
    run_ok(&args, b.path());
    for f in ["trajectory.csv", "conservation.json"] {
        assert_eq!(sha(&a.path().join(f)), sha(&b.path().join(f)), "{f}");
    }
    let mut other = args;
    other[8] = "12";
    run_ok(&other, c.path());
    assert_ne!(sha(&a.path().join("trajectory.csv")), sha(&c.path().join("trajectory.csv")));
}

#[test]
fn seed_falls_back_to_the_environment() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_ok(&["trajectory", "--system", "oscillator", "--kappa", "0.7", "--seed", "5", "--t-end", "1"], a.path());
    let o = Command::new(env!("CARGO_BIN_EXE_curvedyn"))
        .args(["trajectory", "--system", "oscillator", "--kappa", "0.7", "--t-end", "1", "--out"])
        .arg(b.path())
        .env("CURVEDYN_SEED", "5")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(sha(&a.path().join("trajectory.csv")), sha(&b.path().join("trajectory.csv")));
}

#[test]
fn oscillator_conservation_report_lists_nine_integrals() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["trajectory", "--system", "oscillator", "--kappa", "1", "--t-end", "5"], dir.path());
    let r = json(&dir.path().join("conservation.json"));
    assert_eq!(r["schema_version"], 1);
    assert!(r["metadata"]["rng"].as_str().unwrap().contains("ChaCha8"));
    assert_eq!(r["metadata"]["seed"], 0);
    let obs = r["observables"].as_array().unwrap();
    assert_eq!(obs.len(), 9);
    for o in obs.iter().chain([&r["energy"]]) {
        assert!(o["max_rel_drift"].as_f64().unwrap() < 1e-8, "{o}");
    }
    assert!(r["truncated"].is_null());
}

#[test]
fn csv_values_round_trip_at_17_digits() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["trajectory", "--system", "free", "--kappa", "0", "--state", "1,1,0.5,0.1,0.2,0.3", "--t-end", "1"], dir.path());
    let rows = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(rows[0][1..], ["1", "1", "0.5", "0.1", "0.2", "0.3"].map(|v| format!("{:.16e}", v.parse::<f64>().unwrap())));
    for cell in rows.iter().flatten() {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 18, "{cell}");
    }
}

#[test]
fn free_audit_passes() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["audit", "--system", "free", "--kappa", "0.7"], dir.path());
    let r = json(&dir.path().join("audit.json"));
    assert_eq!(r["passed"], true);
    assert!(r["identities"].as_array().unwrap().iter().all(|i| i["passed"] == true));
}

#[test]
fn kepler123_audit_reports_six_lambda_pairings() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_ok(
        &["audit", "--system", "kepler123", "--kappa", "-1", "--k", "-1", "--k1", "0.1", "--k2", "0.2", "--k3", "0.3"],
        dir.path(),
    );
    let r = json(&dir.path().join("audit.json"));
    assert_eq!(r["lambda_pairings"], 6);
    assert!(String::from_utf8_lossy(&o.stdout).contains("6 lambda pairings"));
}

#[test]
fn audit_is_reproducible_across_worker_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["audit", "--system", "oscillator", "--kappa", "-0.3", "--seed", "3", "--samples", "20"];
    run_ok(&[&args[..], &["--workers", "1"]].concat(), a.path());
    run_ok(&[&args[..], &["--workers", "4"]].concat(), b.path());
    let (ra, rb) = (json(&a.path().join("audit.json")), json(&b.path().join("audit.json")));
    assert_eq!(ra["identities"], rb["identities"]);
    assert_eq!(ra["fradkin"], rb["fradkin"]);
    assert_eq!(ra["independence"], rb["independence"]);
    assert_eq!(ra["fradkin"]["passed"], true);
}

#[test]
fn failing_audit_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = curvedyn(&["audit", "--system", "kepler", "--kappa", "1", "--identity-tol", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&dir.path().join("audit.json"))["passed"], false);
}

#[test]
fn potential_sweeps_keep_their_ordering() {
    let dir = tempfile::tempdir().unwrap();
    for system in ["oscillator", "kepler"] {
        run_ok(&["potential", "--system", system, "--kappas", "-1,0,1"], dir.path());
        let col = |k: &str| -> Vec<(f64, f64)> {
            csv_rows(&dir.path().join(format!("potential_{system}_kappa{k}.csv")))
                .iter()
                .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
                .collect()
        };
        let (m, z, p) = (col("-1"), col("0"), col("1"));
        assert_eq!(z.len(), 400);
        for i in 0..z.len() {
            assert!(p[i].1 > z[i].1 && z[i].1 > m[i].1, "{system} r={}", z[i].0);
        }
        if system == "kepler" {
            let rows = csv_rows(&dir.path().join("potential_kepler_kappa0.csv"));
            for r in rows {
                let x: f64 = r[0].parse().unwrap();
                assert_eq!(r[1], format!("{:.16e}", -1.0 / x));
            }
        }
    }
    let report = json(&dir.path().join("potential.json"));
    let far = &report["profiles"][0]["far_field"];
    assert!((far["v"].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn singular_points_become_sentinel_rows() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["potential", "--system", "oscillator", "--kappas", "1", "--r-min", "3", "--r-max", "3.5", "--points", "6"], dir.path());
    let rows = csv_rows(&dir.path().join("potential_oscillator_kappa1.csv"));
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().any(|r| r[1] == "NaN"));
}

#[test]
fn bertrand_orbits_close_and_others_report_open() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["closed-orbit", "--system", "oscillator", "--kappa", "-1"], dir.path());
    let r = json(&dir.path().join("closed_orbit.json"));
    assert_eq!(r["orbits"].as_array().unwrap().len(), 3);
    assert_eq!(r["passed"], true);
    // a slowly precessing orbit: no return within t_max
    let o = curvedyn(&["closed-orbit", "--system", "kepler", "--kappa", "0", "--state", "1,1.5707963267948966,0,0,0,0.9", "--t-max", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn emitted_config_reproduces_the_run() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["trajectory", "--system", "osc112", "--kappa", "0.5", "--k1", "0.1", "--seed", "9", "--t-end", "2"];
    let o = run_ok(&[&args[..], &["--emit-config"]].concat(), a.path());
    let cfg_path = a.path().join("run.json");
    std::fs::write(&cfg_path, &o.stdout).unwrap();
    let cfg = json(&cfg_path);
    assert_eq!(cfg["schema_version"], 1);
    assert_eq!(cfg["params"]["alpha"], 1.0);
    run_ok(&args, a.path());
    run_ok(&["trajectory", "--config", cfg_path.to_str().unwrap()], b.path());
    assert_eq!(sha(&a.path().join("trajectory.csv")), sha(&b.path().join("trajectory.csv")));
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"system\": \"kepler\",\n  \"samples\": \"many\"\n}\n").unwrap();
    let o = curvedyn(&["audit", "--config", p.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn listings() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_curvedyn")).arg("list-systems").current_dir(dir.path()).output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    for s in ["free", "oscillator", "sw", "osc112", "kepler", "kepler123"] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(s)), "{s}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_curvedyn")).arg("list-observables").output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 54);
    assert!(text.contains("KR1      degree 4"));
    let o = Command::new(env!("CARGO_BIN_EXE_curvedyn")).args(["list-observables", "--system", "kepler"]).output().unwrap();
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("integrals: J1 J2 J3 KRL1"));
}
