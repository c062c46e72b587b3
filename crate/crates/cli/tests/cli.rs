use std::process::{Command, Output};

fn fup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fup")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json stdout")
}

#[test]
fn cantor_measure_is_exact() {
    let o = fup(&["cantor", "measure", "-n", "3", "-L", "2/3"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["exact"], "16/81");
    assert_eq!(v["intervals"], 8);
}

#[test]
fn cantor_function_midpoint() {
    let v = json(&fup(&["cantor", "function", "-n", "6", "--x", "0.5"]));
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn porosity_and_density() {
    let o = fup(&["porosity", "certify", "-n", "4"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["status"], "verified");
    let v = json(&fup(&["density", "rho", "-n", "2", "--window", "0.5"]));
    assert!(v["value"].as_f64().unwrap() > 0.0);
    let o = fup(&["density", "subadd", "-n", "4", "--pairs", "500", "--seed", "3"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["seed"], 3);
}

#[test]
fn bounds_commands() {
    let v = json(&fup(&["bounds", "kappa", "-d", "2", "--x", "1"]));
    assert!((v["kappa"].as_f64().unwrap() - 1.892211).abs() < 1e-6);
    let v = json(&fup(&["bounds", "schedule", "--nu", "0.1111111111111111", "--h", "0.001"]));
    assert_eq!(v["n"], 3);
    assert!(fup(&["bounds", "improvement"]).status.success());
    let v = json(&fup(&["bounds", "table", "--set", "n_max=2"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn ops_commands() {
    let v = json(&fup(&["ops", "radial-spectrum", "--radius", "1", "--top", "2"]));
    assert!((v["norm"].as_f64().unwrap() - (1.0 - (-std::f64::consts::PI).exp())).abs() < 1e-13);
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("g.bin");
    let o = fup(&["ops", "gabor-norm", "-n", "1", "--spacing", "0.5", "--dump", dump.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(&dump).unwrap();
    assert_eq!(&bytes[..8], b"FUPMAT01");
    let o = fup(&["ops", "gabor-norm", "-n", "1", "--spacing", "0.05", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("matrix cap"));
}

#[test]
fn property_suites_exit_codes() {
    let o = fup(&["ops", "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = fup(&["ops", "verify", "--suites", "subadditivity_injected"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert!(v["suites"][0]["property"].as_str().unwrap().contains("subadditivity"));
    let o = fup(&["ops", "verify", "--suites", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["suites"].as_array().unwrap().is_empty());
}

#[test]
fn run_is_deterministic_and_honours_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": "gabor_fup", "n_max": 2, "seed": 4}"#).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = fup(&["run", "--config", cfg.to_str().unwrap(), "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    assert!(ta.starts_with(b"# experiment=gabor_fup seed=4\n"));
    let o = fup(&["run", "--config", cfg.to_str().unwrap(), "--set", "n_max=1", "--seed", "8"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# experiment=gabor_fup seed=8\n"));
    assert_eq!(text.lines().count(), 4);
    let o = fup(&["run", "radial_fup", "--set", "rule_coef=2", "--set", "growth_c1=0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("growth"));
}
