use std::f64::consts::PI;
use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;
use yamabe_cone::geometry::sphere_yamabe;

fn cli() -> Command {
    Command::cargo_bin("yamabe-cone").unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = cli().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn by_formula<'a>(records: &'a [Value], formula: &str) -> &'a Value {
    records.iter().find(|r| r["formula"] == formula).unwrap()
}

fn golden(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.extend(["tests", "golden", name]);
    std::fs::read_to_string(p).unwrap()
}

/// Same keys and strings, numbers equal to 1e-12 relative.
fn assert_json_close(a: &Value, b: &Value) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "{x} vs {y}");
        }
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(x.keys().collect::<Vec<_>>(), y.keys().collect::<Vec<_>>());
            for (k, v) in x {
                assert_json_close(v, &y[k]);
            }
        }
        _ => assert_eq!(a, b),
    }
}

#[test]
fn bound_s2xs2_example() {
    let recs = json_lines(&stdout_of(&["bound", "product:sphere:2,sphere:2", "--format", "json"]));
    let line = by_formula(&recs, "corollary1.4");
    let ratio = line["ratio"].as_f64().unwrap();
    let value = line["value"].as_f64().unwrap();
    assert!((ratio - 2.0 / 3.0).abs() <= 1e-12);
    let exact = (2.0f64 / 3.0).powf(0.4) * sphere_yamabe(5).unwrap();
    assert!((value - exact).abs() <= 1e-10 * exact);
    assert!((value - 67.2).abs() < 0.05);
    assert!((line["normalized_volume"].as_f64().unwrap() - 16.0 * PI * PI / 9.0).abs() < 1e-12);
}

#[test]
fn bound_cp2_and_sphere() {
    let recs = json_lines(&stdout_of(&["bound", "--manifold", "cp2"]));
    let line = by_formula(&recs, "corollary1.4");
    assert!((line["ratio"].as_f64().unwrap() - 0.75).abs() <= 1e-12);
    let exact = 0.75f64.powf(0.4) * sphere_yamabe(5).unwrap();
    assert!((line["value"].as_f64().unwrap() - exact).abs() <= 1e-10 * exact);
    let rv = by_formula(&recs, "rv");
    assert!((rv["value"].as_f64().unwrap() - 12.0 * 2f64.sqrt() * PI).abs() < 1e-10);

    let recs = json_lines(&stdout_of(&["bound", "--manifold", "sphere:4"]));
    assert_eq!(by_formula(&recs, "corollary1.4")["value"].as_f64().unwrap(), sphere_yamabe(5).unwrap());
    let ilias = by_formula(&recs, "ilias")["value"].as_f64().unwrap();
    assert!((ilias - sphere_yamabe(4).unwrap()).abs() < 1e-12 * ilias);
}

#[test]
fn bound_matches_golden() {
    let got = json_lines(&stdout_of(&["bound", "product:sphere:2,sphere:2"]));
    let want = json_lines(&golden("bound_s2xs2.jsonl"));
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert_json_close(g, w);
    }
}

#[test]
fn bound_csv_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp2.csv");
    cli().args(["bound", "cp2", "--format", "csv", "--output"]).arg(&path).assert().success().stdout("");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "manifold,target,formula,n,lambda,volume,normalized_volume,ratio,value,numerical,provenance"
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn bound_confirmation_attaches_minimizer() {
    let recs = json_lines(&stdout_of(&["bound", "cp2", "--confirm", "--grid", "2001"]));
    let line = by_formula(&recs, "corollary1.4");
    let num = line["numerical"].as_f64().unwrap();
    let value = line["value"].as_f64().unwrap();
    assert!((num - value).abs() / value < 5e-3);
}

#[test]
fn bound_errors_and_exit_codes() {
    cli().args(["bound", "torus:2"]).assert().code(2);
    cli().args(["bound", "sphere:2,sphere:2"]).assert().code(2);
    cli().args(["bound"]).assert().code(2);
    cli().args(["bound", "cp2", "--formula", "bogus"]).assert().code(2);
    cli().args(["bound", "product:cp2,sphere:2", "--formula", "rv"]).assert().code(3);

    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("catalog.json");
    std::fs::write(&cat, r#"[{"name":"rough","n":3,"lambda":2.0,"volume":5.0,"einstein":false}]"#).unwrap();
    cli().args(["bound", "rough", "--formula", "corollary1.4", "--catalog"]).arg(&cat).assert().code(3);
    let out = cli().args(["bound", "rough", "--catalog"]).arg(&cat).output().unwrap();
    assert!(out.status.success());
    let recs = json_lines(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(recs.last().unwrap()["formula"], "theorem1.2");
    cli().args(["minimize", "rough", "--catalog"]).arg(&cat).assert().code(3);

    std::fs::write(&cat, "not json").unwrap();
    cli().args(["bound", "rough", "--catalog"]).arg(&cat).assert().code(2);
}

#[test]
fn minimize_examples() {
    for (spec, exact) in [
        ("sphere:4", sphere_yamabe(5).unwrap()),
        ("sphere:2", sphere_yamabe(3).unwrap()),
        ("product:sphere:2,sphere:2", (2.0f64 / 3.0).powf(0.4) * sphere_yamabe(5).unwrap()),
    ] {
        let rec = json_lines(&stdout_of(&["minimize", "--manifold", spec, "--grid", "4001", "--domain", "12"]))
            .remove(0);
        let value = rec["value"].as_f64().unwrap();
        assert!((value - exact).abs() / exact < 5e-3, "{spec}: {value} vs {exact}");
        assert!(rec["rel_err"].as_f64().unwrap() < 5e-3);
        for key in ["n", "V", "scal", "value", "closed_form", "rel_err", "residual", "iterations"] {
            assert!(rec.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn minimize_writes_minimizer_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    cli().args(["minimize", "sphere:3", "--grid", "801", "--minimizer-csv"]).arg(&path).assert().success();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,value\n"));
    assert_eq!(text.lines().count(), 802);
}

#[test]
fn minimize_nonconvergence_prints_partial_record() {
    let out = cli().args(["minimize", "sphere:3", "--max-iterations", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    let rec = json_lines(&String::from_utf8(out.stdout).unwrap()).remove(0);
    assert_eq!(rec["iterations"], 2);
    assert!(rec["value"].as_f64().unwrap().is_finite());
}

#[test]
fn profile_examples() {
    let text = stdout_of(&["profile", "--manifold", "sphere:2", "--samples", "99"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "beta,cone_perimeter,sphere_perimeter,abs_diff");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 99);
    assert!(rows.iter().all(|r| r[3] <= 1e-10));
    let mid = rows.iter().find(|r| (r[0] - 0.5).abs() < 1e-12).unwrap();
    assert!((mid[1] - 2.0 / PI).abs() < 1e-10 && (mid[2] - 2.0 / PI).abs() < 1e-10);

    cli().args(["profile", "sphere:2", "--samples", "1"]).assert().code(2);
}

#[test]
fn profile_matches_golden() {
    let got = stdout_of(&["profile", "sphere:3", "--samples", "9"]);
    let want = golden("profile_s3_9.csv");
    let (mut g, mut w) = (got.lines(), want.lines());
    assert_eq!(g.next(), w.next());
    for (a, b) in g.zip(w) {
        for (x, y) in a.split(',').zip(b.split(',')) {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn verify_suites() {
    let text = stdout_of(&["verify", "--suite", "curvature"]);
    let recs = json_lines(&text);
    assert!(recs.iter().any(|r| r["check"] == "einstein_propagation" && r["passed"] == true));
    assert!(recs.iter().all(|r| r["passed"] == true));

    let recs = json_lines(&stdout_of(&["verify", "--suite", "stability", "--seed", "3"]));
    assert!(recs.iter().any(|r| r["check"] == "round_base_margin_zero" && r["passed"] == true));

    cli().args(["verify", "--suite", "nope"]).assert().code(2);
}

#[test]
fn verify_all_is_deterministic() {
    let a = stdout_of(&["verify", "--suite", "all", "--seed", "42"]);
    let b = stdout_of(&["verify", "--suite", "all", "--seed", "42"]);
    assert_eq!(a, b);
    assert!(json_lines(&a).iter().all(|r| r["passed"] == true));
    let csv = stdout_of(&["verify", "--suite", "stability", "--format", "csv"]);
    assert!(csv.starts_with("suite,check,passed,trials,worst,tolerance\n"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "manifold = \"cp2\"\nformat = \"csv\"\n").unwrap();
    let out = stdout_of(&["--config", cfg.to_str().unwrap(), "bound"]);
    assert!(out.starts_with("manifold,"));
    assert!(out.contains("cp2"));
    // flags win over the file
    let out = stdout_of(&["--config", cfg.to_str().unwrap(), "bound", "sphere:3", "--format", "json"]);
    assert!(json_lines(&out)[0]["manifold"] == "sphere:3");

    std::fs::write(&cfg, "colour = \"red\"\n").unwrap();
    cli().args(["--config", cfg.to_str().unwrap(), "bound", "cp2"]).assert().code(2);
}
