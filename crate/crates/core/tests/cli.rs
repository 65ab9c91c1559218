//! End-to-end runs of the `qtiming` binary: exit codes, printed values,
//! CSV/JSON emission and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn schema(name: &str) -> serde_json::Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn qtiming(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtiming")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn assert_valid(schema_file: &str, path: &Path) {
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema(schema_file)).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

#[test]
fn timing_info_plus_and_eigenstate() {
    let h = data("qubit_hamiltonian.json");
    let o = qtiming(&["timing-info", "--input", data("plus.json").to_str().unwrap(), "--hamiltonian", h.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("timing information: 1.0000 bit"));
    let o = qtiming(&["timing-info", "--input", data("ground.json").to_str().unwrap(), "--hamiltonian", h.to_str().unwrap()]);
    assert!(stdout(&o).contains("timing information: 0.0000 bit"));
}

#[test]
fn malformed_and_missing_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dim\": 2, \"re\": [[1, 0]").unwrap();
    let o = qtiming(&["timing-info", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = qtiming(&["timing-info", "--input", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(qtiming(&["cloner-demo", "--unit", "furlongs"]).status.code(), Some(2));
    assert_eq!(qtiming(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn non_covariant_channel_exits_1() {
    // a Hadamard rotation does not commute with the qubit evolution
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("hadamard.json");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let body = serde_json::json!({"dim_in": 2, "dim_out": 2, "kraus": [{"re": [[s, s], [s, -s]], "im": [[0.0, 0.0], [0.0, 0.0]]}]});
    std::fs::write(&ch, body.to_string()).unwrap();
    let o = qtiming(&["extend-channel", "--input", ch.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cloner_demo_values_and_units() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cloner.json");
    let o = qtiming(&["cloner-demo", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("original orbit information: 1.0000 bit"), "{text}");
    assert!(text.contains("per-copy information: 0.3991 bit"), "{text}");
    assert_valid("cloner_demo.schema.json", &out);

    let nats = stdout(&qtiming(&["cloner-demo", "--unit", "nats"]));
    let line = nats.lines().find(|l| l.starts_with("per-copy")).unwrap();
    let v: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((v - 0.2766).abs() <= 1e-3, "{line}");

    let coarse = stdout(&qtiming(&["cloner-demo", "--samples", "8"]));
    let line = coarse.lines().find(|l| l.starts_with("per-copy")).unwrap();
    let v: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((v - 0.399).abs() <= 0.01, "{line}");
}

#[test]
fn bounds_verify_writes_one_row_per_instance() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bounds.csv");
    let o = qtiming(&["bounds-verify", "--instances", "1000", "--seed", "7", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("violations: 0"));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    for col in ["seed", "d_a", "d_b", "delta", "mi_bound", "fourth_moment_bound", "margin", "violations"] {
        assert!(headers.iter().any(|h| h == col), "missing column {col}");
    }
    assert_eq!(rdr.records().count(), 1000);
}

#[test]
fn extend_channel_amplitude_damping() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ext.json");
    let o = qtiming(&[
        "extend-channel",
        "--input",
        data("amplitude_damping.json").to_str().unwrap(),
        "--hamiltonian",
        data("qubit_hamiltonian.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("reconstruction error")).unwrap();
    let err: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(err < 1e-9, "{line}");
    assert_valid("extend_channel.schema.json", &out);
}

#[test]
fn broadcast_opt_equatorial_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bo.json");
    let o = qtiming(&["broadcast-opt", "--config", data("equatorial.json").to_str().unwrap(), "--restarts", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_valid("broadcast_opt.schema.json", &out);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let avg_bits = doc["result"]["avg"].as_f64().unwrap() / std::f64::consts::LN_2;
    assert!((0.45..=1.0 + 1e-9).contains(&avg_bits), "{avg_bits}");
    assert_eq!(doc["result"]["trace"]["restarts"], 4);
}

#[test]
fn thermo_suite_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("thermo.csv");
    let o = qtiming(&["thermo", "--instances", "50", "--kt", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert!(rdr.headers().unwrap().iter().any(|h| h == "kt_info_out"));
    assert_eq!(rdr.records().count(), 150);
}

#[test]
fn timing_info_json_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ti.json");
    let o = qtiming(&[
        "timing-info",
        "--input",
        data("plus.json").to_str().unwrap(),
        "--hamiltonian",
        data("qubit_hamiltonian.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_valid("timing_info.schema.json", &out);
}

#[test]
fn sample_inputs_validate() {
    for (schema_file, file) in [
        ("matrix.schema.json", "plus.json"),
        ("matrix.schema.json", "ground.json"),
        ("hamiltonian.schema.json", "qubit_hamiltonian.json"),
        ("channel.schema.json", "amplitude_damping.json"),
        ("channel.schema.json", "dephasing.json"),
    ] {
        assert_valid(schema_file, &data(file));
    }
}

#[test]
fn identical_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = qtiming(&["bounds-verify", "--instances", "200", "--seed", "3", "--out", p.to_str().unwrap()]);
        (o.stdout, std::fs::read(p).unwrap())
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let bo = |name: &str| {
        let p = dir.path().join(name);
        let o = qtiming(&["broadcast-opt", "--restarts", "2", "--dims", "2,2,1", "--seed", "5", "--out", p.to_str().unwrap()]);
        (o.stdout, std::fs::read(p).unwrap())
    };
    assert_eq!(bo("a.json"), bo("b.json"));
}
