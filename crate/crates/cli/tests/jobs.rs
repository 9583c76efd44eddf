use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn kreg(job: &str, flags: &[&str]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_kreg"))
        .args(flags)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn kreg");
    child
        .stdin
        .take()
        .expect("stdin")
        .write_all(job.as_bytes())
        .expect("write job");
    child.wait_with_output().expect("kreg runs")
}

fn report(job: &str, flags: &[&str]) -> Value {
    let out = kreg(job, flags);
    let text = String::from_utf8(out.stdout).expect("utf-8");
    assert_eq!(out.status.code(), Some(0), "{text}");
    serde_json::from_str(&text).expect("json report")
}

fn failure(job: &str, flags: &[&str]) -> (i32, Value) {
    let out = kreg(job, flags);
    let body = serde_json::from_slice(&out.stdout).expect("json error");
    (out.status.code().expect("exit code"), body)
}

const F: &str = r#"{"divisor":[{"z":[0.3,0.2],"n":1},{"z":[-0.3,-0.2],"n":1},{"z":[0,0],"n":-2}]}"#;
const G: &str = r#"{"divisor":[{"z":[0.15,0.35],"n":1},{"z":[0.6,0.7],"n":1},{"z":[0.4,0.5],"n":-1},{"z":[0.35,0.55],"n":-1}]}"#;

fn curve_job(task: &str, grid: &str) -> String {
    format!(
        r#"{{"task":"{task}","payload":{{"cycle":{{"curve":{{"torus":{{"tau":[0,1]}},"functions":[{F},{G}]}}}}}},"grid":{grid}}}"#
    )
}

#[test]
fn steinberg_symbol_normalizes_to_zero() {
    let r = report(
        r#"{"task":"normalize","payload":{"element":[{"coef":1,"entries":[{"fn":"t"},{"fn":"1−t"}]}]}}"#,
        &[],
    );
    assert_eq!(r["result"]["result"], "zero");
    assert_eq!(r["result"]["normal_form"]["terms"], Value::Array(vec![]));
}

#[test]
fn nonzero_symbol_is_reported_with_its_normal_form() {
    let r = report(
        r#"{"task":"normalize","payload":{"element":[{"coef":1,"entries":[{"q":"2"},{"q":"3"}]}]}}"#,
        &[],
    );
    assert_eq!(r["result"]["result"], "unknown_nonzero");
    assert_eq!(r["result"]["normal_form"]["display"], "{2, 3}");
}

#[test]
fn reciprocity_defect_of_t_and_one_minus_t_is_one() {
    let r = report(r#"{"task":"reciprocity","payload":{"f":"t","g":"1−t"}}"#, &[]);
    assert_eq!(r["result"]["defect"], "1");
}

#[test]
fn tame_symbol_at_a_place_and_at_a_prime() {
    // {t, t−1} at t = 0: (−1)^0 · (t−1)|₀ = −1
    let r = report(
        r#"{"task":"tame","payload":{"element":[{"coef":1,"entries":[{"fn":"t"},{"fn":"t-1"}]}],"place":"0"}}"#,
        &[],
    );
    assert_eq!(r["result"]["del_nu"]["display"], "{-1}");
    // {12, 5} at p = 5: (−1)^0 · 12 mod 5 = 2
    let r = report(
        r#"{"task":"tame","payload":{"element":[{"coef":1,"entries":[{"q":"12"},{"q":"5"}]}],"prime":5}}"#,
        &[],
    );
    let terms = &r["result"]["del_nu"]["terms"];
    assert_eq!(terms[0]["entries"][0]["modp"], serde_json::json!([2, 5]));
}

#[test]
fn gersten_boundary_of_t_and_t_minus_one() {
    let r = report(
        r#"{"task":"gersten","payload":{"element":[{"coef":1,"entries":[{"fn":"t"},{"fn":"t-1"}]}]}}"#,
        &[],
    );
    let places: Vec<&str> = r["result"]["display"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["place"].as_str().unwrap())
        .collect();
    assert_eq!(places, ["0", "inf"]);
}

#[test]
fn steinberg_convergence_csv_decreases_strictly() {
    let dir = std::env::temp_dir().join(format!("kreg-converge-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("rows.csv");
    let r = report(
        r#"{"task":"converge","payload":{"test":"steinberg","tau":[0,1],"Ns":[64,128,256]}}"#,
        &["--csv", csv_path.to_str().unwrap()],
    );
    assert_eq!(r["result"]["rows"].as_array().unwrap().len(), 6);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["test", "form", "N", "delta", "value", "error_estimate"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    for form in ["dz+dzbar", "i(dz-dzbar)"] {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| &r[1] == form)
            .map(|r| r[4].parse::<f64>().unwrap().abs())
            .collect();
        assert_eq!(values.len(), 3);
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{form}: {values:?}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_echoes_payload_bytes_and_reruns_bit_exactly() {
    let job = curve_job("rlog", r#"{"N":32,"delta":0.01}"#).replace(r#""payload":{"#, r#""payload": {  "#);
    let first = kreg(&job, &["--threads", "1"]);
    let text = String::from_utf8(first.stdout).unwrap();
    let payload_start = job.find(r#"{  "cycle""#).unwrap();
    let payload = &job[payload_start..job.rfind(r#","grid""#).unwrap()];
    assert!(text.contains(payload), "payload not echoed verbatim");

    let r: Value = serde_json::from_str(&text).unwrap();
    let rerun_job = serde_json::to_string(&r["job"]).unwrap();
    let second: Value = report(&rerun_job, &["--threads", "1"]);
    assert_eq!(r["result"], second["result"]);
    assert_eq!(r["grid"], serde_json::json!({"N": 32, "delta": 0.01, "R": [60]}));
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert!(r["wall_time"].as_f64().unwrap() >= 0.0);
    let entries = r["result"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for e in entries {
        for key in ["input", "form_label", "value", "error_estimate", "grid"] {
            assert!(!e[key].is_null(), "missing {key}");
        }
    }
}

#[test]
fn job_file_flag_and_overrides() {
    let dir = std::env::temp_dir().join(format!("kreg-job-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("job.json");
    std::fs::write(&path, curve_job("rbeilinson", r#"{"N":64,"delta":0.01}"#)).unwrap();
    let r = report(
        "",
        &["--job", path.to_str().unwrap(), "--grid-N", "16", "--mask-delta", "0.02", "--lattice-R", "30"],
    );
    assert_eq!(r["grid"], serde_json::json!({"N": 16, "delta": 0.02, "R": [30]}));
    assert_eq!(r["overrides"]["lattice_R"], 30);
    assert_eq!(r["result"]["entries"][0]["grid"]["N"], 16);
    assert_eq!(r["result"]["kind"], "beilinson");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn descent_defect_vanishes() {
    let job = format!(
        r#"{{"task":"descent","payload":{{"torus":{{"tau":[0,1]}},"f":{F},"g":{G}}}}}"#
    );
    let r = report(&job, &[]);
    assert!(r["result"]["defect"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn schema_errors_exit_with_two() {
    for job in [
        "not json",
        r#"{"task":"normalize","payload":{"element":[]},"extra":true}"#,
        r#"{"task":"integrate","payload":{}}"#,
        r#"{"task":"normalize","payload":{"element":[],"bogus":1}}"#,
        r#"{"task":"tame","payload":{"element":[{"coef":1,"entries":[{"q":"2"}]}]}}"#,
        r#"{"task":"rlog","payload":{"cycle":{"points":{"samples":[{"values":[[2,0]]}]}}},"grid":{"N":7,"delta":0.1}}"#,
    ] {
        let (code, body) = failure(job, &[]);
        assert_eq!(code, 2, "{job}");
        assert_eq!(body["error"], "schema");
        assert!(body["detail"].is_string());
    }
}

#[test]
fn domain_errors_exit_with_three() {
    for job in [
        r#"{"task":"tame","payload":{"element":[{"coef":1,"entries":[{"q":"12"}]}],"prime":4}}"#,
        r#"{"task":"normalize","payload":{"element":[{"coef":1,"entries":[{"q":"0"}]}]}}"#,
        r#"{"task":"tame","payload":{"element":[{"coef":1,"entries":[{"q":"3"}]}],"place":"0"}}"#,
    ] {
        let (code, body) = failure(job, &[]);
        assert_eq!(code, 3, "{job}");
        assert_eq!(body["error"], "domain");
    }
}

#[test]
fn csv_is_refused_for_exact_tasks() {
    let (code, _) = failure(
        r#"{"task":"reciprocity","payload":{"f":"t","g":"t-2"}}"#,
        &["--csv", "/dev/null"],
    );
    assert_eq!(code, 2);
}
