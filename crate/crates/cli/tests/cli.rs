use std::path::Path;
use std::process::{Command, Output};

fn entbound(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entbound")).current_dir(dir).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BELL: &str =
    r#"{"dimA":2,"dimB":2,"re":[[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]],"im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;

#[test]
fn measures_on_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bell.json"), BELL).unwrap();
    let o = entbound(dir.path(), &["measures", "--state", "bell.json", "--measures", "ei,en,em"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let values: Vec<f64> = v["results"].as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).collect();
    let ln2 = 2f64.ln();
    for (got, want) in values.iter().zip([2.0 * ln2, ln2, 1.5 * ln2]) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}

#[test]
fn malformed_state_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"dimA\": 2,\n \"dimB\": }").unwrap();
    let o = entbound(dir.path(), &["measures", "--state", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("line 2"), "{msg}");
}

#[test]
fn missing_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = entbound(dir.path(), &["measures", "--state", "nope.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope.json"));
}

#[test]
fn all_failed_sweep_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // Every point is below the convergence radius of the series.
    let o = entbound(dir.path(), &["sweep", "integrable", "--g", "0.5", "--mR", "1,2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| !l.ends_with(',')));
}

#[test]
fn manifest_records_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let args =
        ["--seed", "3", "sweep", "gaussian", "--sites", "40", "--regionA", "16..20", "--gap", "1..3", "--trials", "4", "--out", "g.csv"];
    assert!(entbound(p, &args).status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(p.join("g.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["command"], "sweep gaussian");
    assert_eq!(manifest["parameters"]["domain"]["domain"], "gaussian");
    assert_eq!(manifest["output_sha256"].as_str().unwrap().len(), 64);

    let o = entbound(p, &["sweep", "--manifest", "g.csv.manifest.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(o.stdout, std::fs::read(p.join("g.csv")).unwrap());

    let both = entbound(p, &["sweep", "--manifest", "g.csv.manifest.json", "gaussian", "--regionA", "0..2", "--gap", "1"]);
    assert_eq!(both.status.code(), Some(1));
}

#[test]
fn replay_rejects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("bell.json"), BELL).unwrap();
    assert!(entbound(p, &["measures", "--state", "bell.json", "--measures", "ei", "--out", "m.json"]).status.success());
    assert!(entbound(p, &["sweep", "--manifest", "m.json.manifest.json"]).status.success());
    std::fs::write(p.join("bell.json"), BELL.replace("0.5,0,0,0.5]", "0.5,0,0,0.4]")).unwrap();
    let o = entbound(p, &["sweep", "--manifest", "m.json.manifest.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("changed"), "{}", stderr(&o));
}

#[test]
fn csv_floats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = entbound(dir.path(), &["sweep", "cft", "--spectrum", "free-scalar-4d", "--ratio", "0.1..0.5:3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next().unwrap(), "ratio,value,tail_estimate,error");
    for row in rows {
        let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(format!("{value:.16e}"), row.split(',').nth(1).unwrap());
    }
}

#[test]
fn usage_errors_from_clap() {
    let dir = tempfile::tempdir().unwrap();
    let o = entbound(dir.path(), &["gaussian", "--regionA", "5..2", "--gap", "1"]);
    assert_ne!(o.status.code(), Some(0));
    let o = entbound(dir.path(), &["frobnicate"]);
    assert_ne!(o.status.code(), Some(0));
}
