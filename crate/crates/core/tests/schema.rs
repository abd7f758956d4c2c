use std::process::Command;

use serde_json::Value;

fn report(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_convexproj"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn every_command_matches_the_shipped_schema() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schemas/report.schema.json"
    ))
    .unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let runs: &[&[&str]] = &[
        &["distance", "--domain", "disk", "--x", "0,0", "--y", "0.5,0"],
        &[
            "distance", "--domain", "ball3", "--x", "0.1,0,0", "--y", "0.1,0,0",
        ],
        &["classify", "--domain", "psd3", "--samples", "200"],
        &["orbit", "--domain", "disk"],
        &["pingpong"],
        &["nscheck", "--domain", "disk", "--samples", "200"],
        &["rankreport", "--domain", "psd3", "--pairs", "100"],
        &["rankreport", "--domain", "ball3", "--pairs", "100"],
        &["rankreport", "--domain", "square", "--pairs", "100"],
        &["rankreport", "--domain", "cone_disk", "--pairs", "50"],
    ];
    for args in runs {
        let v = report(args);
        let errors: Vec<String> = validator
            .iter_errors(&v)
            .map(|e| format!("{e} at {}", e.instance_path()))
            .collect();
        assert!(errors.is_empty(), "{args:?}: {errors:#?}");
    }
}

#[test]
fn schema_rejects_a_wrong_version() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schemas/report.schema.json"
    ))
    .unwrap();
    let validator = jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap();
    let mut v = report(&["rankreport", "--domain", "simplex2", "--pairs", "20"]);
    assert!(validator.is_valid(&v));
    v["result"]["schema"] = Value::from("rankreport/0");
    assert!(!validator.is_valid(&v));
}
