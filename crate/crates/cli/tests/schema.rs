use std::path::PathBuf;

use serde_json::Value;
use sleec_cli::cli_main;

const SCHEMA: &str = include_str!("../../../schemas/sleec.schema.json");

fn validate(def: &str, instance: &Value) {
    let mut schema: Value = serde_json::from_str(SCHEMA).unwrap();
    schema["$ref"] = Value::String(format!("#/$defs/{def}"));
    let v = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = v
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{def}: {errors:#?}");
}

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn json_out(args: &[&str]) -> Value {
    let mut out = Vec::new();
    let argv = std::iter::once("sleec").chain(args.iter().copied());
    cli_main(argv, &mut out, &mut Vec::new());
    serde_json::from_slice(&out).unwrap()
}

#[test]
fn parse_output_matches_schema() {
    validate(
        "parse_response",
        &json_out(&["parse", "--json", &corpus("assistive.sleec")]),
    );
    validate(
        "parse_response",
        &json_out(&["parse", "--json", &corpus("assistive_verbatim.sleec")]),
    );
}

#[test]
fn check_output_matches_schema() {
    for mode in ["raw", "filtered"] {
        let v = json_out(&["check", "--json", "--mode", mode, &corpus("assistive.sleec")]);
        assert_eq!(v["verdicts"].as_array().unwrap().len(), 13);
        validate("check_response", &v);
    }
    validate(
        "check_response",
        &json_out(&["check", "--json", &corpus("assistive_verbatim.sleec")]),
    );
}

#[test]
fn restrictive_witnesses_match_schema() {
    let src =
        "def_start\n event A\n event B\n measure ok: boolean\ndef_end\nrule_start\n r when A and ok then B\nrule_end\n\
purpose_start\n p when A then B within 2 seconds\npurpose_end\n";
    let dir = std::env::temp_dir().join(format!("sleec-schema-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("p.sleec");
    std::fs::write(&f, src).unwrap();
    let v = json_out(&["check", "--json", "--property", "restrictive", f.to_str().unwrap()]);
    std::fs::remove_dir_all(dir).unwrap();
    assert_eq!(v["verdicts"][0]["status"], "no_issue_within_bounds", "{v}");
    assert!(v["verdicts"][0]["witness"].is_array());
    validate("check_response", &v);
}

#[test]
fn rejects_foreign_shapes() {
    let mut schema: Value = serde_json::from_str(SCHEMA).unwrap();
    schema["$ref"] = Value::String("#/$defs/check_response".into());
    let v = jsonschema::validator_for(&schema).unwrap();
    assert!(!v.is_valid(&serde_json::json!({"verdicts": []})));
}
