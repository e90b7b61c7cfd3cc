//! Subcommand implementations. Each returns a report whose exit code is 0
//! only when the command's own verification passed.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use qcircuit::circuit::Circuit;
use qcircuit::gates::{self, GateSpec};
use qcircuit::linalg::{CMatrix, C64};
use qcircuit::qstate::{self, bitstring, QuantumRegister};
use qcircuit::revclassic::{self, TruthTable};
use qcircuit::rng::QRng;
use qcircuit::synth;
use qcircuit::turing::{self, OutputMode, RunResult, RunStatus, TuringMachine};

use crate::input::{parse_matrix, read_text, Config};
use crate::report::{exit, num, CliError, Digest256, RunReport};

fn inp(e: impl Display) -> CliError {
    CliError::input(e)
}

fn complex(z: C64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|&z| complex(z)).collect())).collect())
}

fn write_artifact(report: &mut RunReport, path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    report.artifacts.push(path.display().to_string());
    Ok(())
}

fn base_digest(cfg: &Config, seed: u64) -> Digest256 {
    let mut d = Digest256::default();
    d.add("config", format!("{cfg:?}").as_bytes());
    d.add("seed", &seed.to_le_bytes());
    d
}

pub struct SimulateArgs {
    pub circuit: PathBuf,
    pub input: Option<usize>,
    pub state: Option<PathBuf>,
    pub measure: Option<String>,
    pub shots: Option<usize>,
}

pub fn simulate(a: &SimulateArgs, cfg: &Config, seed: u64) -> Result<RunReport, CliError> {
    let text = read_text(&a.circuit)?;
    let circ = Circuit::parse(&text).map_err(inp)?;
    let n = circ.n_wires();
    let mut digest = base_digest(cfg, seed);
    digest.add("circuit", text.as_bytes());
    let input = match (&a.state, a.input) {
        (Some(_), Some(_)) => return Err(inp("give either --input or --state, not both")),
        (Some(p), None) => {
            let s = read_text(p)?;
            digest.add("state", s.as_bytes());
            QuantumRegister::parse_dump(&s, n).map_err(inp)?
        }
        (None, k) => {
            let k = k.unwrap_or(0);
            digest.add("input", &k.to_le_bytes());
            qstate::basis_state(n, k).map_err(inp)?
        }
    };
    let out = circ.run(&input).map_err(inp)?;
    let shots = a.shots.unwrap_or(cfg.shots);
    digest.add("measure", format!("{:?} {shots}", a.measure).as_bytes());

    let mut report = RunReport::new("simulate", digest);
    report.metric("n_wires", json!(n));
    report.metric("gate_count", json!(circ.len()));
    let mut amps = Map::new();
    let mut probs = Map::new();
    for (i, z) in out.amplitudes().entries().iter().enumerate() {
        if z.norm() > 1e-15 {
            amps.insert(bitstring(i, n), complex(*z));
            probs.insert(bitstring(i, n), num(z.norm_sqr()));
        }
    }
    report.result("amplitudes", Value::Object(amps));
    report.result("probabilities", Value::Object(probs));

    if shots > 0 || a.measure.is_some() {
        let spec = a.measure.as_deref().unwrap_or("all");
        let (labels, dist): (Vec<String>, Vec<f64>) = match spec {
            "all" => ((0..1 << n).map(|i| bitstring(i, n)).collect(), out.probabilities()),
            w => {
                let wire: usize = w
                    .parse()
                    .ok()
                    .filter(|&w| (1..=n).contains(&w))
                    .ok_or_else(|| inp(format!("--measure takes `all` or a wire in 1..={n}, found {w:?}")))?;
                (vec!["0".into(), "1".into()], out.marginal(wire).to_vec())
            }
        };
        let mut rng = QRng::new(cfg.rng, seed);
        let mut counts = vec![0usize; dist.len()];
        for _ in 0..shots {
            counts[qstate::sample(&dist, &mut rng).map_err(inp)?] += 1;
        }
        let mut c = Map::new();
        let mut f = Map::new();
        for (k, label) in labels.iter().enumerate() {
            if counts[k] > 0 {
                c.insert(label.clone(), json!(counts[k]));
                f.insert(label.clone(), num(counts[k] as f64 / shots as f64));
            }
        }
        report.metric("shots", json!(shots));
        report.result("measure", json!(spec));
        report.result("counts", Value::Object(c));
        report.result("frequencies", Value::Object(f));
    }
    Ok(report)
}

pub struct SynthesizeArgs {
    pub matrix: PathBuf,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn synthesize(a: &SynthesizeArgs, cfg: &Config, seed: u64) -> Result<RunReport, CliError> {
    let text = read_text(&a.matrix)?;
    let u = parse_matrix(&text)?;
    let tol = a.tol.unwrap_or(cfg.tol);
    let mut digest = base_digest(cfg, seed);
    digest.add("matrix", text.as_bytes());
    digest.add("tol", &tol.to_le_bytes());
    let res = synth::compile(&u).map_err(inp)?;
    let error = synth::error_metric(&u, &res.circuit.to_unitary()).map_err(inp)?;

    let mut report = RunReport::new("synthesize", digest);
    report.metric("n_qubits", json!(res.circuit.n_wires()));
    report.metric("factor_count", json!(res.factors.len()));
    report.metric("gate_count", json!(res.gate_count));
    report.metric("cnot_count", json!(res.cnot_count));
    report.metric("routed_gate_count", json!(res.routed.len()));
    report.metric("error", num(error));
    report.metric("tol", num(tol));
    let emitted = res.circuit.emit();
    match &a.out {
        Some(p) => write_artifact(&mut report, p, &emitted)?,
        None => report.result("circuit", json!(emitted)),
    }
    let ok = error <= tol && res.circuit.is_elementary();
    report.result("verified", json!(ok));
    if !ok {
        report.exit_code = exit::VERIFICATION;
    }
    Ok(report)
}

pub struct ApproxArgs {
    pub matrix: PathBuf,
    pub set: String,
    pub no_adjoints: bool,
    pub max_len: Option<usize>,
    pub target_error: Option<f64>,
}

pub fn approx(a: &ApproxArgs, cfg: &Config, seed: u64) -> Result<RunReport, CliError> {
    let text = read_text(&a.matrix)?;
    let u = parse_matrix(&text)?;
    let max_len = a.max_len.unwrap_or(cfg.max_len);
    if max_len > synth::MAX_WORD_LEN {
        return Err(inp(format!("--max-len is at most {}", synth::MAX_WORD_LEN)));
    }
    let mut set: Vec<GateSpec> = Vec::new();
    for name in a.set.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let g = gates::by_name(&name.to_ascii_uppercase(), &[]).ok_or_else(|| inp(format!("unknown gate {name:?}")))?;
        if !g.is_single_qubit() {
            return Err(inp(format!("gate {name:?} is not a single-qubit gate")));
        }
        set.push(g);
    }
    if !a.no_adjoints {
        set = synth::with_adjoints(&set);
    }
    let mut digest = base_digest(cfg, seed);
    digest.add("matrix", text.as_bytes());
    digest.add("set", format!("{} {} {max_len}", a.set, a.no_adjoints).as_bytes());
    let res = synth::approx_search(&u, &set, max_len).map_err(inp)?;
    // recompute the word independently of the table
    let mut product = CMatrix::identity(2);
    for g in &res.word {
        let gate = set.iter().find(|s| s.name() == g).expect("word uses set gates");
        product = product.matmul(gate.matrix()).map_err(inp)?;
    }
    let recomputed = synth::phase_invariant_error(&u, &product);

    let mut report = RunReport::new("approx", digest);
    report.metric("error", num(res.error));
    report.metric("word_len", json!(res.word.len()));
    report.metric("max_len", json!(max_len));
    report.result("word", json!(res.word));
    report.result("set", json!(set.iter().map(|g| g.name()).collect::<Vec<_>>()));
    report.result("matrix", matrix_json(&res.matrix));
    let mut ok = (recomputed - res.error).abs() <= 1e-9;
    if let Some(t) = a.target_error {
        report.metric("target_error", num(t));
        ok &= res.error <= t;
    }
    report.result("verified", json!(ok));
    if !ok {
        report.exit_code = exit::VERIFICATION;
    }
    Ok(report)
}

pub struct RevcompArgs {
    pub table: PathBuf,
    pub out: Option<PathBuf>,
}

pub fn revcomp(a: &RevcompArgs, cfg: &Config, seed: u64) -> Result<RunReport, CliError> {
    let text = read_text(&a.table)?;
    let table = TruthTable::parse(&text).map_err(inp)?;
    let mut digest = base_digest(cfg, seed);
    digest.add("table", text.as_bytes());
    let source = revclassic::synthesize_bool(&table).map_err(inp)?;
    let source_ok = TruthTable::of_circuit(&source).map_err(inp)? == table;
    let rev = revclassic::to_reversible(&source);
    let ones = (1usize << table.l()) - 1;
    let ys: Vec<usize> = if ones == 0 { vec![0] } else { vec![0, ones] };
    let check = revclassic::verify_reversible(&source, &rev, &ys).map_err(inp)?;

    let mut report = RunReport::new("revcomp", digest);
    report.metric("inputs", json!(table.k()));
    report.metric("outputs", json!(table.l()));
    report.metric("bool_gate_count", json!(source.nodes().len()));
    report.metric("gate_count", json!(rev.len()));
    report.metric("width", json!(rev.width()));
    if let Some(l) = rev.layout() {
        let range = |r: &std::ops::Range<usize>| json!([r.start, r.end.saturating_sub(1)]);
        report.result(
            "layout",
            json!({ "x": range(&l.x), "ancilla": range(&l.ancilla), "copy": range(&l.copy), "y": range(&l.y) }),
        );
    }
    report.result(
        "verification",
        json!({
            "cases": check.cases,
            "output_mismatches": check.output_mismatches,
            "dirty_ancilla_cases": check.dirty_ancilla_cases,
            "input_changed_cases": check.input_changed_cases,
            "y_values": ys,
            "source_matches_table": source_ok,
        }),
    );
    let emitted = rev.to_circuit().emit();
    match &a.out {
        Some(p) => write_artifact(&mut report, p, &emitted)?,
        None => report.result("circuit", json!(emitted)),
    }
    let ok = source_ok && check.passed();
    report.result("verified", json!(ok));
    if !ok {
        report.exit_code = exit::VERIFICATION;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmMode {
    Det,
    Nd,
    Prob,
}

pub struct TmArgs {
    pub program: PathBuf,
    pub input: Option<String>,
    pub unary: Option<String>,
    pub fuel: Option<u64>,
    pub mode: TmMode,
    pub dedup: bool,
    pub trace: bool,
}

fn status_code(s: RunStatus) -> i32 {
    match s {
        RunStatus::Halted => exit::OK,
        RunStatus::Stuck => exit::STUCK,
        RunStatus::FuelExhausted => exit::FUEL_EXHAUSTED,
    }
}

fn final_fields(report: &mut RunReport, m: &TuringMachine, r: &RunResult) {
    report.metric("steps", json!(r.config.steps()));
    report.metric("max_cells", json!(r.config.max_cells()));
    report.result("status", json!(r.status.as_str()));
    report.result("state", json!(m.state_name(r.config.state())));
    report.result("configuration", json!(m.describe(&r.config)));
    report.result("tape", json!(r.config.tape()));
    let out = turing::output_value(r, OutputMode::Standard).ok();
    report.result("output", json!(out));
    report.exit_code = status_code(r.status);
}

pub fn tm_run(a: &TmArgs, cfg: &Config, seed: u64) -> Result<RunReport, CliError> {
    let text = read_text(&a.program)?;
    let m = TuringMachine::parse(&text).map_err(inp)?;
    let word = match (&a.input, &a.unary) {
        (Some(_), Some(_)) => return Err(inp("give either --input or --unary, not both")),
        (Some(w), None) => w.clone(),
        (None, Some(u)) => {
            let values = u
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|e| inp(format!("bad --unary value {t:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            turing::encode_unary(&values)
        }
        (None, None) => String::new(),
    };
    let fuel = a.fuel.unwrap_or(cfg.fuel);
    let mut digest = base_digest(cfg, seed);
    digest.add("program", text.as_bytes());
    digest.add("input", word.as_bytes());
    digest.add("run", format!("{fuel} {:?} {}", a.mode, a.dedup).as_bytes());
    let mut report = RunReport::new("tm run", digest);
    report.metric("fuel", json!(fuel));
    report.result("input", json!(word));
    match a.mode {
        TmMode::Det => {
            report.result("mode", json!("det"));
            if a.trace {
                let (r, t) = turing::trace(&m, &word, fuel).map_err(inp)?;
                report.result("trace", json!(t.iter().map(|c| m.describe(c)).collect::<Vec<_>>()));
                final_fields(&mut report, &m, &r);
            } else {
                let r = turing::run(&m, &word, fuel).map_err(inp)?;
                final_fields(&mut report, &m, &r);
            }
        }
        TmMode::Prob => {
            report.result("mode", json!("prob"));
            let mut rng = QRng::new(cfg.rng, seed);
            let p = turing::run_prob(&m, &word, fuel, &mut rng).map_err(inp)?;
            final_fields(&mut report, &m, &p.result);
            report.metric("probability", num(p.probability));
            report.result("trace_probabilities", Value::Array(p.trace_probabilities.iter().map(|&x| num(x)).collect()));
            report.result("choices", json!(p.choices));
        }
        TmMode::Nd => {
            report.result("mode", json!("nd"));
            let rep = turing::run_nondet(&m, &word, fuel, a.dedup).map_err(inp)?;
            let desc = |cs: &[turing::Configuration]| -> Vec<Value> {
                cs.iter()
                    .map(|c| json!({ "configuration": m.describe(c), "depth": c.steps(), "max_cells": c.max_cells() }))
                    .collect()
            };
            report.metric("depth", json!(rep.frontier_sizes.len().saturating_sub(1)));
            report.metric("halted_count", json!(rep.halted.len()));
            report.metric("stuck_count", json!(rep.stuck));
            report.result("accepted", json!(rep.accepted));
            report.result("frontier_sizes", json!(rep.frontier_sizes));
            report.result("halted", Value::Array(desc(&rep.halted)));
            report.result("fuel_exhausted", json!(rep.fuel_exhausted));
            let status = if !rep.halted.is_empty() {
                RunStatus::Halted
            } else if rep.fuel_exhausted {
                RunStatus::FuelExhausted
            } else {
                RunStatus::Stuck
            };
            report.result("status", json!(status.as_str()));
            report.exit_code = status_code(status);
        }
    }
    Ok(report)
}
