use fup_core::harness::*;
use fup_core::FupError;
use std::io::Write;

#[test]
fn radial_default_rows() {
    let cfg = ExperimentConfig::for_experiment("radial_fup").unwrap();
    let r = run_radial_fup(&cfg).unwrap();
    assert!(r.pass);
    assert_eq!(r.rows.len(), 9);
    // n = 0 row is the full disc of radius 1: norm = P(1, π) = 1 − e^{−π}
    let first = &r.rows[0];
    assert!((first.norm - (1.0 - (-std::f64::consts::PI).exp())).abs() < 1e-13);
    assert!(r.ratio_spread < 3.0);
    let csv = r.to_csv(&cfg).unwrap();
    assert!(csv.starts_with("# experiment=radial_fup seed=0\nn,R,norm,bound,asymptote,ratio,"));
}

#[test]
fn broken_growth_aborts() {
    let cfg = ExperimentConfig::resolve(Some("radial_fup"), None, &["growth_c2=1.0".into(), "rule_coef=1.5".into(), "growth_c1=0.5".into()]).unwrap();
    assert!(matches!(run_radial_fup(&cfg), Err(FupError::Growth { .. })));
}

#[test]
fn gabor_rows_and_condition_h() {
    let cfg = ExperimentConfig::resolve(Some("gabor_fup"), None, &["n_max=3".into()]).unwrap();
    let r = run_gabor_fup(&cfg).unwrap();
    assert_eq!(r.rows.iter().map(|x| x.points).collect::<Vec<_>>(), vec![4, 16, 64, 256]);
    assert!(r.rows.iter().all(|x| x.condition_h && x.pass));
    assert!(r.monotone && r.beta_hat > 0.0);
    assert!((r.rows[0].norm - 1.0).abs() < 0.5);
}

#[test]
fn matrix_cap_is_reported() {
    let cfg = ExperimentConfig::resolve(Some("gabor_fup"), None, &["n_min=4".into(), "n_max=4".into(), "matrix_cap=100".into()]).unwrap();
    match run_gabor_fup(&cfg) {
        Err(e @ FupError::MatrixCap { .. }) => assert!(e.to_string().contains("reduce the n range")),
        other => panic!("expected cap error, got {other:?}"),
    }
}

#[test]
fn csv_is_deterministic() {
    let cfg = ExperimentConfig::resolve(Some("gabor_fup"), None, &["n_max=3".into(), "seed=7".into()]).unwrap();
    let (a, _) = run_experiment(&cfg).unwrap();
    let (b, _) = run_experiment(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("# experiment=gabor_fup seed=7\n"));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(a.as_bytes());
    let ns: Vec<u32> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(ns, vec![0, 1, 2, 3]);
}

#[test]
fn config_precedence() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, r#"{{"experiment": "radial_fup", "n_max": 4, "seed": 3, "p": 1.0}}"#).unwrap();
    let c = ExperimentConfig::resolve(None, Some(f.path()), &[]).unwrap();
    assert_eq!((c.n_max, c.seed, c.p), (4, 3, 1.0));
    let c = ExperimentConfig::resolve(None, Some(f.path()), &["seed=9".into()]).unwrap();
    assert_eq!((c.n_max, c.seed), (4, 9));
    let c = ExperimentConfig::resolve(Some("gabor_fup"), Some(f.path()), &[]).unwrap();
    assert_eq!(c.experiment, "gabor_fup");
    assert_eq!(c.n_max, 4);
    let c = ExperimentConfig::resolve(Some("gabor_fup"), None, &[]).unwrap();
    assert_eq!(c.n_max, 5);
    assert!(ExperimentConfig::resolve(None, None, &["bogus=1".into()]).is_err());
    assert!(ExperimentConfig::resolve(None, None, &["novalue".into()]).is_err());
    assert!(ExperimentConfig::resolve(Some("nope"), None, &[]).is_err());
    let (k, v) = parse_override("alphabet=[0,1]").unwrap();
    assert_eq!(k, "alphabet");
    assert_eq!(v, serde_json::json!([0, 1]));
}

#[test]
fn property_suites() {
    let all = run_property_suites(&default_suites(), 1).unwrap();
    assert!(all.pass, "{:#?}", all);
    assert_eq!(all.suites.len(), DEFAULT_SUITES.len());
    let none = run_property_suites(&[], 1).unwrap();
    assert!(none.pass && none.suites.is_empty());
    let bad = run_property_suites(&[INJECTED_SUITE.to_string()], 1).unwrap();
    assert!(!bad.pass);
    assert!(bad.suites[0].property.contains("subadditivity"));
    assert!(run_property_suites(&["nope".to_string()], 1).is_err());
}
