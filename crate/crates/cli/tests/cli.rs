use holocalc_core::submanifold::{family_jet, write_jet_file};
use holocalc_core::symspace::{find_admissible, model_by_name};
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::Arc;

fn holocalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holocalc")).args(args).env_remove("HOLOCALC_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("holocalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(path: &PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn list_shows_catalog() {
    let o = holocalc(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("su3_so3 | ε=−1 | 8/3/5 | hermitian=false"));
    assert!(text.contains("quadric3 | ε=−1 | 10/4/6 | hermitian=true"));
    assert!(text.contains("euclid_su3_so3 | flat"));
}

#[test]
fn quadric_has_codimension_one() {
    let path = scratch("quadric.json");
    let o = holocalc(&["compute", "--model", "quadric3", "--c", "1", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&path);
    assert_eq!(v["hol"]["codim"], 1);
    assert_eq!(v["hermitian"], true);
    assert_eq!(v["model"], "quadric3");
    assert!(v["checks"]["lagrangian"]["pass"].as_bool().unwrap());
    for key in ["epsilon", "c", "dims", "hol", "checks", "tolerances", "seed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn totally_geodesic_member() {
    let path = scratch("tg.json");
    let o = holocalc(&["compute", "--model", "su3_so3", "--c", "0", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&path);
    assert_eq!(v["hol"]["extrinsic"], v["hol"]["plus"]);
    assert_eq!(v["hol"]["minus"], 0);
    assert_eq!(v["diagnostics"]["one_full"].as_f64(), Some(0.0));
}

#[test]
fn negative_scale_is_accepted() {
    let o = holocalc(&["compute", "--model", "grassmann33", "--c", "-0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(holocalc(&["compute", "--model", "unknown_model"]).status.code(), Some(2));
    assert_eq!(holocalc(&["compute", "--model", "sphere4", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(holocalc(&["compute", "--model", "sphere4", "--ode-step", "0"]).status.code(), Some(2));
    assert_eq!(holocalc(&["bogus"]).status.code(), Some(2));
    assert_eq!(holocalc(&["compute", "--jet-file", "/nonexistent/jet.txt"]).status.code(), Some(2));
    let bad = scratch("bad.jet");
    std::fs::write(&bad, "model sphere4\ntangent 1\n1 0\n").unwrap();
    assert_eq!(holocalc(&["compute", "--jet-file", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_all_passes_and_is_sorted() {
    let path = scratch("all.json");
    let o = holocalc(&["verify-all", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&path);
    assert_eq!(v["pass"], true);
    let models: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["model"].as_str().unwrap()).collect();
    let mut sorted = models.clone();
    sorted.sort();
    assert_eq!(models, sorted);
    assert_eq!(models.len(), 16);
}

#[test]
fn tight_tolerance_fails_with_exit_one() {
    assert_eq!(holocalc(&["verify-all", "--tol", "1e-15"]).status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_holocalc")).args(["verify-all"]).env("HOLOCALC_TOL", "1e-15").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_changes_residuals_not_verdicts() {
    let (a, b) = (scratch("seed1.json"), scratch("seed2.json"));
    assert_eq!(holocalc(&["verify-all", "--seed", "1", "--json", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(holocalc(&["verify-all", "--seed", "2", "--json", b.to_str().unwrap()]).status.code(), Some(0));
    let verdicts = |v: &Value| -> Vec<(String, bool)> {
        v["reports"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|r| {
                r["checks"].as_object().unwrap().iter().map(|(k, c)| (k.clone(), c["pass"].as_bool().unwrap())).collect::<Vec<_>>()
            })
            .collect()
    };
    let (va, vb) = (json(&a), json(&b));
    assert_eq!(verdicts(&va), verdicts(&vb));
    assert_eq!(va["seed"], 1);
}

#[test]
fn jet_file_round_trip() {
    let m = Arc::new(model_by_name("quadric3", 1e-9).unwrap());
    let x = find_admissible(&m).unwrap();
    let jet = family_jet(m, &x, 1.0).unwrap();
    let file = scratch("quadric.jet");
    std::fs::write(&file, write_jet_file(&jet)).unwrap();
    let out = scratch("custom.json");
    let o = holocalc(&["compute", "--jet-file", file.to_str().unwrap(), "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&out);
    assert_eq!(v["jet"], "custom");
    assert_eq!(v["hol"]["codim"], 1);
    assert_eq!(v["classification"]["expected_codim"], Value::Null);
}

#[test]
fn json_report_round_trips_through_core_types() {
    let path = scratch("rt.json");
    assert_eq!(holocalc(&["compute", "--model", "veronese", "--json", path.to_str().unwrap()]).status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let report = holocalc_core::report::VerificationReport::from_json(&text).unwrap();
    assert_eq!(report.to_json().trim_end(), text.trim_end());
    assert!([4, 6].contains(&report.hol.extrinsic));
}
