use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn locext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locext")).args(args).output().unwrap()
}

fn locext_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_locext"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn build_then_ppt_check() {
    let built = locext(&["build", "--family", "3"]);
    assert_eq!(built.status.code(), Some(0));
    let cert = locext_stdin(&["ppt-check"], &built.stdout);
    assert_eq!(cert.status.code(), Some(0), "{}", stderr(&cert));
    let c = json(&cert);
    assert_eq!(c["certificate"], "ppt");
    assert_eq!(c["evidence"]["verdict"], "ppt");

    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "ppt.json");
    std::fs::write(&file, &cert.stdout).unwrap();
    assert_eq!(locext(&["verify", &file]).status.code(), Some(0));
}

#[test]
fn certify_rho4x5_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "sn.json");
    let o = locext(&["certify-sn", "--state", "rho4x5", "--k", "3", "--out", &file]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("SN = 3"));
    let cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(cert["verdict"]["exact"], 3);
    assert_eq!(cert["lower"]["evidence"]["power"], 4);

    let v = locext(&["verify", &file]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));

    // drop one Gröbner basis element
    let mut bad = cert.clone();
    let gb = bad["lower"]["evidence"]["groebner_basis"].as_array_mut().expect("basis list");
    gb.remove(gb.len() / 2);
    let tampered = path(dir.path(), "bad.json");
    std::fs::write(&tampered, serde_json::to_string(&bad).unwrap()).unwrap();
    let v = locext(&["verify", &tampered]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("reduction mismatch"), "{}", stdout(&v));
}

#[test]
fn every_emitted_certificate_replays() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &["certify-sn", "--state", "rho3x3"],
        &["certify-sn", "--state", "family:2"],
        &["certify-sn", "--state", "rho4x4"],
        &["certify-sn", "--state", "tiles"],
        &["ppt-check", "--state", "rho4x5"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let o = locext(args);
        assert!(matches!(o.status.code(), Some(0 | 1)), "{args:?}: {}", stderr(&o));
        let file = path(dir.path(), &format!("c{i}.json"));
        std::fs::write(&file, &o.stdout).unwrap();
        let v = locext(&["verify", &file]);
        assert_eq!(v.status.code(), Some(0), "{args:?}: {}", stdout(&v));
    }
}

#[test]
fn inconclusive_lower_bound_exits_one() {
    let o = locext(&["certify-sn", "--state", "rho4x5", "--k", "3", "--nmax", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["lower"].is_null());
}

#[test]
fn input_errors_name_the_field() {
    let o = locext(&["build", "--state", "nonexistent.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--state"));

    let o = locext_stdin(&["ppt-check"], br#"{"dim_a": 2, "dim_b": 2}"#);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("matrix"), "{}", stderr(&o));

    let o = locext(&["sample", "--dims", "3by3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--dims"));

    let o = locext(&["survey", "--case", "2x2:5,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--case"));

    let o = locext(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn extend_with_a_step_file() {
    let dir = tempfile::tempdir().unwrap();
    let step = path(dir.path(), "step.json");
    let e0: Vec<&str> = vec!["1", "0", "0"];
    let s = serde_json::json!({ "kind": "slocc", "side": "A", "phi": e0 });
    std::fs::write(&step, s.to_string()).unwrap();
    let o = locext(&["extend", "--state", "rho3x3", "--step", &step]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let st = json(&o);
    assert_eq!((st["dim_a"].as_u64(), st["dim_b"].as_u64()), (Some(4), Some(3)));

    let o = locext(&["extend", "--state", "rho3x3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!((r["dimension"].as_u64(), r["bound"].as_i64()), (Some(7), Some(3)));
}

#[test]
fn extremal_reports_each_pipeline_step() {
    let o = locext(&["extremal", "--state", "rho4x5"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3, "{text}");
    // the second step is not certified extremal in the PPT cone
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sample_and_survey() {
    let o = locext(&["sample", "--dims", "3x3", "--birank", "4,4", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["residual"].as_f64().unwrap() < 1e-9);

    let o = locext(&["survey", "--samples", "0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)[0]["converged"], 0);

    let o = locext(&["survey", "--samples", "5", "--case", "3x3:4,4", "--case", "3x3:5,6"]);
    let table = stdout(&o);
    assert!(table.contains("3:5") && table.contains("6:5"), "{table}");
}

#[test]
fn plot_formats() {
    let o = locext(&["plot", "--state", "rho3x3"]);
    assert!(stdout(&o).contains("|00> --- |11>"));
    let o = locext(&["plot", "--state", "tiles", "--format", "svg"]);
    assert!(stdout(&o).starts_with("<svg"));
}

#[test]
fn reproduce_is_deterministic() {
    let run = || {
        let o = locext(&["reproduce", "--samples", "10", "--seed", "4"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut m = json(&o);
        for r in m["results"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("seconds");
            // the family detail carries per-k timings
            let d = r["detail"].as_str().unwrap().split(" (").next().unwrap().to_owned();
            r["detail"] = d.into();
        }
        m
    };
    assert_eq!(run(), run());
}
