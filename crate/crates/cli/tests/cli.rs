use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_qcircuit");

fn machine(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/machines").join(format!("{name}.tm"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json: Value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout:?}"));
    (out.status.code().unwrap(), json, stdout)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bell_state_amplitudes() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "bell.qc", "wires 2\nH 1\nX c+1 2\n");
    let (code, j, _) = run(&["simulate", s(&c), "--input", "0"]);
    assert_eq!(code, 0);
    assert_eq!(j["schema"], 1);
    let amps = j["results"]["amplitudes"].as_object().unwrap();
    assert_eq!(amps.keys().collect::<Vec<_>>(), ["00", "11"]);
    for v in amps.values() {
        assert_eq!(v[0].to_string(), "0.707106781187");
        assert_eq!(v[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn empty_circuit_keeps_basis_state() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "empty.qc", "wires 3\n");
    let (code, j, _) = run(&["simulate", s(&c), "--input", "5"]);
    assert_eq!(code, 0);
    let amps = j["results"]["amplitudes"].as_object().unwrap();
    assert_eq!(amps.len(), 1);
    assert_eq!(amps["101"][0], 1.0);
}

#[test]
fn plus_state_sampling() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "plus.qc", "wires 1\nH 1\n");
    let (code, j, _) = run(&["simulate", s(&c), "--measure", "1", "--shots", "10000", "--seed", "11"]);
    assert_eq!(code, 0);
    let f0 = j["results"]["frequencies"]["0"].as_f64().unwrap();
    assert!((f0 - 0.5).abs() < 0.02, "{f0}");
    let counts = &j["results"]["counts"];
    assert_eq!(counts["0"].as_u64().unwrap() + counts["1"].as_u64().unwrap(), 10000);
}

#[test]
fn output_is_deterministic() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "plus.qc", "wires 2\nH 1\nH 2\n");
    let a = run(&["simulate", s(&c), "--shots", "500", "--seed", "4"]).2;
    let b = run(&["simulate", s(&c), "--shots", "500", "--seed", "4"]).2;
    let other = run(&["simulate", s(&c), "--shots", "500", "--seed", "5"]).2;
    assert_eq!(a, b);
    assert_ne!(a, other);
}

#[test]
fn synthesize_cnot() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "cnot.mat", "dim 4\n1 0 0 0 0 0 0 0\n0 0 1 0 0 0 0 0\n0 0 0 0 0 0 1 0\n0 0 0 0 1 0 0 0\n");
    let out = d.path().join("cnot.qc");
    let (code, j, _) = run(&["synthesize", s(&m), "--out", s(&out)]);
    assert_eq!(code, 0);
    assert!(j["metrics"]["error"].as_f64().unwrap() <= 1e-9);
    assert_eq!(j["results"]["verified"], true);
    assert_eq!(j["artifacts"][0], s(&out));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("wires 2\n"));
    // the emitted circuit simulates back to CNOT on |10>
    let (_, sim, _) = run(&["simulate", s(&out), "--input", "2"]);
    let amps = sim["results"]["amplitudes"].as_object().unwrap();
    assert_eq!(amps.len(), 1);
    let z = &amps["11"];
    assert!((z[0].as_f64().unwrap().hypot(z[1].as_f64().unwrap()) - 1.0).abs() < 1e-9);
}

#[test]
fn synthesize_rejects_non_unitary() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "bad.mat", "dim 2\n1 0 1 0\n0 0 1 0\n");
    let (code, j, _) = run(&["synthesize", s(&m)]);
    assert_eq!(code, 2);
    assert_eq!(j["error"]["kind"], "input");
}

#[test]
fn approx_finds_s_from_t() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "s.mat", "dim 2\n1 0 0 0\n0 0 0 1\n");
    let (code, j, _) = run(&["approx", s(&m), "--set", "H,T", "--no-adjoints", "--max-len", "4", "--target-error", "1e-9"]);
    assert_eq!(code, 0);
    assert_eq!(j["results"]["word"], serde_json::json!(["T", "T"]));
    assert!(j["metrics"]["error"].as_f64().unwrap() < 1e-9);
    let (code, _, _) = run(&["approx", s(&m), "--set", "H", "--max-len", "2", "--target-error", "1e-3"]);
    assert_eq!(code, 3);
}

#[test]
fn revcomp_xor_table() {
    let d = TempDir::new().unwrap();
    let t = write(&d, "xor.tt", "0\n1\n1\n0\n");
    let (code, j, _) = run(&["revcomp", s(&t)]);
    assert_eq!(code, 0);
    let v = &j["results"]["verification"];
    assert_eq!(v["cases"], 8);
    assert_eq!(v["output_mismatches"], 0);
    assert_eq!(v["dirty_ancilla_cases"], 0);
    let circ = j["results"]["circuit"].as_str().unwrap();
    assert!(circ.starts_with("wires "));
}

#[test]
fn tm_successor_and_addition() {
    let (code, j, _) = run(&["tm", "run", s(&machine("successor")), "--input", "111", "--trace"]);
    assert_eq!(code, 0);
    assert_eq!(j["results"]["status"], "halted");
    assert_eq!(j["results"]["output"], 3);
    assert_eq!(j["metrics"]["steps"], 3);
    assert_eq!(j["metrics"]["max_cells"], 3);
    assert_eq!(j["results"]["trace"].as_array().unwrap().len(), 4);
    let (code, j, _) = run(&["tm", "run", s(&machine("addition")), "--unary", "3,5"]);
    assert_eq!(code, 0);
    assert_eq!(j["results"]["output"], 8);
    assert_eq!(j["results"]["input"], "1111#111111");
}

#[test]
fn tm_fuel_exhausted_and_stuck() {
    let (code, j, _) = run(&["tm", "run", s(&machine("right_mover")), "--input", "1", "--fuel", "10", "--report", "json"]);
    assert_eq!(code, 4);
    assert_eq!(j["results"]["status"], "fuel_exhausted");
    assert_eq!(j["metrics"]["steps"], 10);
    let d = TempDir::new().unwrap();
    let p = write(&d, "empty.tm", "states q1\nhalting qh\nstart q1\nalphabet 1\n");
    let (code, j, _) = run(&["tm", "run", s(&p), "--input", "1"]);
    assert_eq!(code, 5);
    assert_eq!(j["results"]["status"], "stuck");
    assert_eq!(j["metrics"]["steps"], 0);
}

#[test]
fn tm_nondeterministic_and_probabilistic() {
    let (code, j, _) = run(&["tm", "run", s(&machine("contains11_nd")), "--input", "0110", "--mode", "nd"]);
    assert_eq!(code, 0);
    assert_eq!(j["results"]["accepted"], true);
    let (_, j, _) = run(&["tm", "run", s(&machine("contains11_nd")), "--input", "0101", "--mode", "nd", "--dedup"]);
    assert_eq!(j["results"]["accepted"], false);
    let (code, j, _) = run(&["tm", "run", s(&machine("three_coins")), "--mode", "prob", "--seed", "9"]);
    assert_eq!(code, 0);
    assert_eq!(j["metrics"]["probability"], 0.125);
    let (code, j, _) = run(&["tm", "run", s(&machine("guess_bit")), "--mode", "det"]);
    assert_eq!(code, 2);
    assert!(j["error"]["message"].as_str().unwrap().contains("nondeterministic"));
}

#[test]
fn report_file_and_config() {
    let d = TempDir::new().unwrap();
    let cfg = write(&d, "run.cfg", "rng = chacha20\nfuel = 5\n");
    let rep = d.path().join("report.json");
    let (code, j, stdout) =
        run(&["tm", "run", s(&machine("right_mover")), "--config", s(&cfg), "--report", s(&rep)]);
    assert_eq!(code, 4);
    assert_eq!(j["metrics"]["fuel"], 5);
    assert_eq!(std::fs::read_to_string(&rep).unwrap(), stdout);
    let bad = write(&d, "bad.cfg", "colour = red\n");
    let (code, j, _) = run(&["tm", "run", s(&machine("successor")), "--config", s(&bad)]);
    assert_eq!((code, j["error"]["kind"].as_str().unwrap()), (2, "input"));
}

#[test]
fn error_objects_and_codes() {
    let (code, j, _) = run(&["simulate", "/nonexistent/circuit.qc"]);
    assert_eq!(code, 7);
    assert_eq!(j["error"]["kind"], "io");
    assert_eq!(j["exit_code"], 7);
    let (code, j, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert_eq!(j["error"]["kind"], "usage");
    let d = TempDir::new().unwrap();
    let c = write(&d, "bad.qc", "wires 2\nH 3\n");
    let (code, j, _) = run(&["simulate", s(&c)]);
    assert_eq!(code, 2);
    assert!(j["error"]["message"].as_str().unwrap().starts_with("line 2:"));
}
