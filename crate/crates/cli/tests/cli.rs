use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn example(name: &str) -> String {
    root().join("examples").join(name).to_string_lossy().into_owned()
}

fn schema(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(root().join("schema").join(name)).unwrap()).unwrap()
}

fn dman(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dman"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    if let Err(e) = jsonschema::validate(&schema("report.schema.json"), &v) {
        panic!("report violates its schema: {e}\n{v:#}");
    }
    v
}

#[test]
fn identity_check_passes() {
    let out = dman(&["check", &example("identity.json")], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["ok"], json!(true));
    assert_eq!(r["morphisms"]["id"]["valid"], json!(true));
    assert_eq!(r["two_morphisms"]["id2"]["valid"], json!(true));
}

#[test]
fn x_squared_counts_zero() {
    let out = dman(&["count", &example("count_x2.json")], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["counts"]["x2"]["count"], json!(0));
    assert_eq!(r["counts"]["x2"]["replicas"].as_array().unwrap().len(), 15);
}

#[test]
fn point_over_line_has_vdim_minus_one() {
    let out = dman(&["fibre", &example("point_over_line.json")], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let w = &r["fibre_products"]["W"];
    assert_eq!(w["vdim"], json!(-1));
    assert_eq!(w["witnesses"][0]["left_projection"]["embedding"], json!(true));
    assert_eq!(w["witnesses"][0]["cotangent_exact"], json!(true));
}

#[test]
fn classification_of_worked_examples() {
    let out = dman(&["classify", &example("classify.json")], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["morphisms"]["square"]["witnesses"][0]["etale"], json!(false));
    assert_eq!(r["morphisms"]["flip"]["witnesses"][0]["etale"], json!(true));
}

#[test]
fn doubled_gluing_fails_only_section_compatibility() {
    let out = dman(&["glue", &example("glue_two_charts.json")], None);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["glue"]["identity"]["valid"], json!(true));
    let failed: Vec<&str> = r["glue"]["doubled"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["passed"] == json!(false))
        .map(|e| e["condition"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["section-compatibility mod I_s^2"]);
    assert_eq!(r["violations"].as_array().unwrap().len(), 1);
}

#[test]
fn union_and_intersection_counts() {
    let out = dman(&["count", &example("counts.json")], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["counts"]["cubic_pieces"]["count"], json!(1));
    assert_eq!(r["counts"]["cubic_pieces"]["components"].as_array().unwrap().len(), 3);
    assert_eq!(r["intersections"]["axes"]["count"], json!(-1));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for (cmd, file) in [("count", "counts.json"), ("glue", "glue_two_charts.json"), ("fibre", "counts.json")] {
        let a = dman(&[cmd, &example(file)], None);
        let b = dman(&[cmd, &example(file)], None);
        assert_eq!(a.stdout, b.stdout, "{cmd} {file}");
    }
}

#[test]
fn keys_are_sorted() {
    let out = dman(&["fibre", &example("point_over_line.json")], None);
    let text = String::from_utf8(out.stdout).unwrap();
    let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim()).collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
}

#[test]
fn stdin_is_accepted() {
    let doc = std::fs::read_to_string(example("identity.json")).unwrap();
    let out = dman(&["check", "-"], Some(&doc));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn examples_match_the_document_schema() {
    let s = schema("document.schema.json");
    for entry in std::fs::read_dir(root().join("examples")).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(jsonschema::is_valid(&s, &doc), "{}", path.display());
    }
}

fn error_of(doc: &str) -> (Option<i32>, Value) {
    let out = dman(&["check", "-"], Some(doc));
    (out.status.code(), report(&out)["error"].clone())
}

#[test]
fn parse_errors_carry_json_pointers() {
    let (code, e) = error_of(r#"{"models": [{"name": "X", "vars": ["x"], "rank": 1, "section": ["x^^2"]}]}"#);
    assert_eq!(code, Some(2));
    assert_eq!(e["path"], json!("/models/0/section/0"));

    let (_, e) = error_of(r#"{"models": [{"name": "X", "vars": ["x"], "rank": "one", "section": []}]}"#);
    assert_eq!(e["path"], json!("/models/0/rank"));

    let (_, e) = error_of(r#"{"morphisms": [{"name": "f", "source": "Q", "target": "Q", "map": [], "fhat": []}]}"#);
    assert_eq!(e["path"], json!("/morphisms/0/source"));

    let dup = r#"{"models": [
        {"name": "X", "vars": [], "rank": 0, "section": []},
        {"name": "X", "vars": [], "rank": 0, "section": []}]}"#;
    let (_, e) = error_of(dup);
    assert_eq!(e["path"], json!("/models/1/name"));

    let (_, e) = error_of(r#"{"models": [{"name": "X", "vars": ["x"], "rank": 1, "section": ["x"], "witnesses": [["1", "2"]]}]}"#);
    assert_eq!(e["path"], json!("/models/0/witnesses/0"));
}

#[test]
fn schema_and_loader_reject_the_same_documents() {
    let s = schema("document.schema.json");
    let bad = [
        r#"{"modelz": []}"#,
        r#"{"models": [{"name": "X", "vars": ["x"], "rank": 1}]}"#,
        r#"{"models": [{"name": "X", "vars": ["x"], "rank": 1, "section": ["x"], "extra": 1}]}"#,
        r#"{"counts": [{"name": "c"}]}"#,
    ];
    for doc in bad {
        let v: Value = serde_json::from_str(doc).unwrap();
        assert!(!jsonschema::is_valid(&s, &v), "{doc}");
        assert_eq!(dman(&["check", "-"], Some(doc)).status.code(), Some(2), "{doc}");
    }
}

#[test]
fn violations_exit_one() {
    let doc = r#"{
        "models": [{"name": "X", "vars": ["x"], "rank": 1, "section": ["x"]}],
        "morphisms": [{"name": "f", "source": "X", "target": "X", "map": ["x"], "fhat": [["2"]]}]
    }"#;
    let out = dman(&["check", "-"], Some(doc));
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["violations"][0]["condition"], json!("section-compatibility mod I_s^2"));
    assert_eq!(r["morphisms"]["f"]["residuals"][0]["normal_form"], json!("x"));
}

#[test]
fn groebner_cap_flag_is_honoured() {
    let doc = r#"{"models": [{"name": "X", "vars": ["x", "y", "z"], "rank": 2, "section": ["x^2 - y", "x^3 - z"]}]}"#;
    let out = dman(&["--max-groebner-steps", "1", "check", "-"], Some(doc));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reduction steps"));
    assert_eq!(dman(&["check", "-"], Some(doc)).status.code(), Some(0));
}

#[test]
fn text_format_and_usage_errors() {
    let out = dman(&["--format", "text", "count", &example("count_x2.json")], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("count x2: 0"));
    assert_eq!(dman(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(dman(&["check", "/nonexistent/doc.json"], None).status.code(), Some(2));
}

#[test]
fn laws_run_with_seed() {
    let out = dman(&["--seed", "3", "laws", "--cases", "5"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["seed"], json!(3));
    assert_eq!(r["suites"]["dman"]["interchange"]["cases"], json!(5));
}

#[test]
fn approximate_witnesses_use_the_tolerance_flag() {
    let doc = r#"{"models": [{"name": "X", "vars": ["x"], "rank": 1, "section": ["x"], "witnesses": [[0.001]]}]}"#;
    assert_eq!(dman(&["check", "-"], Some(doc)).status.code(), Some(1));
    assert_eq!(dman(&["--tolerance", "0.01", "check", "-"], Some(doc)).status.code(), Some(0));
}
