use std::process::{Command, Output};

use uqdecomp::{decompose, validate, DistributionSpec, EngineConfig, Scale, SecondOrder64};

fn uqdecomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uqdecomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fields(line: &str) -> Vec<String> {
    line.split(',').map(str::to_string).collect()
}

#[test]
fn eval_inline_interval() {
    let out = stdout(&uqdecomp(&[
        "eval",
        r#"{"kind":"interval_uniform","lo":0,"hi":1}"#,
        "--name",
        "u",
    ]));
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("name,total,aleatoric,epistemic,alea_lower,alea_upper,error_bound")
    );
    let row = fields(lines.next().unwrap());
    assert_eq!(row[0], "u");
    let v: Vec<f64> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
    assert!((v[0] - 1.0).abs() < 1e-9);
    assert!((v[1] - 0.721_347_520).abs() < 1e-8);
    assert!((v[2] - 0.278_652_480).abs() < 1e-8);
    assert_eq!((v[3], v[4]), (0.0, 1.0));
    assert!(lines.next().is_none());
}

#[test]
fn eval_json_matches_library() {
    let spec = r#"{"kind":"mixture","weights":[0.4,0.6],"components":[
        {"kind":"dirichlet","alpha":[2,3,4]},
        {"kind":"ensemble","members":[[0.2,0.3,0.5],[0.6,0.2,0.2]]}]}"#;
    let out = stdout(&uqdecomp(&[
        "--format", "json", "--unit", "nats", "--raw", "eval", spec,
    ]));
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();

    let parsed: DistributionSpec = serde_json::from_str(spec).unwrap();
    let q: SecondOrder64 = validate(&parsed).unwrap();
    let config = EngineConfig {
        seed: 42,
        ..EngineConfig::default()
    };
    let t = decompose(&q, Scale::raw(uqdecomp::Unit::Nats), &config).unwrap();
    assert_eq!(json["total"].as_f64().unwrap(), t.total);
    assert_eq!(json["aleatoric"].as_f64().unwrap(), t.aleatoric);
    assert_eq!(json["epistemic"].as_f64().unwrap(), t.epistemic);
    assert_eq!(json["unit"], "nats");
    assert_eq!(json["normalized"], false);
}

#[test]
fn eval_reads_file_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    std::fs::write(&path, r#"{"kind":"point","theta":[0.5,0.5]}"#).unwrap();
    let out = stdout(&uqdecomp(&["eval", path.to_str().unwrap()]));
    assert_eq!(
        out.lines().nth(1),
        Some("input,1.00000000,1.00000000,0,1.00000000,1.00000000,0")
    );

    let mut child = Command::new(env!("CARGO_BIN_EXE_uqdecomp"))
        .args(["eval", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"kind":"point","theta":[1,0]}"#)
        .unwrap();
    let out = stdout(&child.wait_with_output().unwrap());
    assert_eq!(out.lines().nth(1), Some("input,0,0,0,0,0,0"));
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        vec!["eval", r#"{"kind":"point","theta":[0.5,0.4]}"#],
        vec!["eval", r#"{"kind":"dirichlet","alpha":[1,-1]}"#],
        vec!["eval", r#"{"kind":"unknown"}"#],
        vec!["eval", "/nonexistent/spec.json"],
        vec!["curve", "--schedule", "0,10,5"],
        vec!["curve", "--theta", "0.3,0.6"],
        vec!["curve", "--prior", "1,1,1"],
        vec!["--tol", "0", "panel"],
    ] {
        let out = uqdecomp(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn ensemble_matrix_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "# header\n0.5 0.5\n0.6 0.3\n").unwrap();
    let out = uqdecomp(&["ensemble", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn ensemble_single_member_has_no_epistemic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "0.1 0.6 0.3\n").unwrap();
    let out = stdout(&uqdecomp(&["ensemble", path.to_str().unwrap()]));
    let row = fields(out.lines().nth(1).unwrap());
    assert_eq!(row[0], "ensemble_M1_K3");
    assert_eq!(row[3], "0");
    assert_eq!(row[1], row[2]);
}

#[test]
fn ensemble_json_reports_shape() {
    let out = stdout(&uqdecomp(&[
        "--format",
        "json",
        "ensemble",
        r#"{"kind":"ensemble","members":[[0.2,0.8],[0.8,0.2]]}"#,
    ]));
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["members"], 2);
    assert_eq!(json["k"], 2);
    assert_eq!(json["total"].as_f64().unwrap(), 1.0);
}

#[test]
fn panel_reports_every_default_row() {
    let out = stdout(&uqdecomp(&["panel"]));
    let names: Vec<String> = out.lines().skip(1).map(|l| fields(l)[0].clone()).collect();
    assert_eq!(
        names,
        [
            "uniform_full",
            "dirac_half",
            "uniform_03_10",
            "uniform_03_07",
            "uniform_06_10",
            "dirac_mixture_01"
        ]
    );
    assert!(out
        .lines()
        .any(|l| l == "dirac_mixture_01,1.00000000,0,1.00000000,0,0,0"));
}

#[test]
fn panel_file_replaces_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("panels.json");
    std::fs::write(
        &path,
        r#"[{"name":"flat","spec":{"kind":"dirichlet","alpha":[1,1,1]}}]"#,
    )
    .unwrap();
    let out = stdout(&uqdecomp(&["panel", "--panels", path.to_str().unwrap()]));
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().nth(1).unwrap().starts_with("flat,1.00000000,"));

    std::fs::write(
        &path,
        r#"[{"name":"a,b","spec":{"kind":"point","theta":[1]}}]"#,
    )
    .unwrap();
    let out = uqdecomp(&["panel", "--panels", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn curve_respects_schedule_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = uqdecomp(&[
        "--out",
        path.to_str().unwrap(),
        "curve",
        "--schedule",
        "0,3,30",
        "--replications",
        "20",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let ns: Vec<String> = text.lines().skip(1).map(|l| fields(l)[0].clone()).collect();
    assert_eq!(ns, ["0", "3", "30"]);
}

#[test]
fn curve_depends_on_seed() {
    let a = stdout(&uqdecomp(&[
        "--seed",
        "1",
        "curve",
        "--schedule",
        "0,50",
        "--replications",
        "10",
    ]));
    let b = stdout(&uqdecomp(&[
        "--seed",
        "2",
        "curve",
        "--schedule",
        "0,50",
        "--replications",
        "10",
    ]));
    assert_eq!(a.lines().nth(1), b.lines().nth(1));
    assert_ne!(a.lines().nth(2), b.lines().nth(2));
}
