//! Circuits as ordered gate sequences over a fixed number of wires,
//! evaluation to a unitary, state simulation and the line-oriented text
//! format.
//!
//! Text format:
//!
//! ```text
//! # Bell pair
//! wires 2
//! H 1
//! CNOT c+1 2
//! ```
//!
//! A step line is a gate token followed by controls (`c+w` conditions on 1,
//! `c-w` on 0) and target wires. Gate tokens are `X Y Z H S T SDG TDG SWAP
//! CNOT TOFFOLI`, `RX(t) RY(t) RZ(t) P(a) E(a)` and matrix literals
//! `U(re,im re,im; re,im re,im)` with one `;`-separated group per row.
//! `CNOT a b` and `TOFFOLI a b c` without explicit controls take the leading
//! wires as controls.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::gates::{self, apply_placed, place, Axis, ControlPattern, GateError, GateSpec, Pauli};
use crate::linalg::{c, random_unitary, CMatrix, CVector, LinalgError, C64};
use crate::qstate::{QStateError, QuantumRegister};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    State(#[from] QStateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("circuit has {expected} wires but the input has {found} qubits")]
    WidthMismatch { expected: usize, found: usize },
    #[error("a circuit needs at least one wire")]
    NoWires,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: GateError },
}

pub type Result<T, E = CircuitError> = std::result::Result<T, E>;

/// One gate application.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub gate: GateSpec,
    pub pattern: ControlPattern,
}

impl Step {
    /// An uncontrolled single-qubit gate.
    pub fn is_single_qubit(&self) -> bool {
        self.gate.dim() == 2 && self.pattern.controls().is_empty()
    }

    /// X on one target with a single condition-1 control.
    pub fn is_cnot(&self) -> bool {
        self.gate.name() == "X"
            && self.pattern.controls().len() == 1
            && self.pattern.conditions()[0]
            && self.pattern.targets().len() == 1
    }

    pub fn is_elementary(&self) -> bool {
        self.is_single_qubit() || self.is_cnot()
    }

    pub fn adjoint(&self) -> Step {
        Step { gate: self.gate.adjoint(), pattern: self.pattern.clone() }
    }

    /// Short label used for gate counts and in the text format.
    pub fn label(&self) -> String {
        let (name, _) = canonical_form(self);
        name
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_wires: usize,
    steps: Vec<Step>,
}

impl Circuit {
    pub fn new(n_wires: usize) -> Result<Self> {
        if n_wires == 0 {
            return Err(CircuitError::NoWires);
        }
        Ok(Circuit { n_wires, steps: Vec::new() })
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends a step after validating its wires against the circuit width.
    pub fn push(&mut self, gate: GateSpec, pattern: ControlPattern) -> Result<()> {
        pattern.check(&gate, self.n_wires)?;
        self.steps.push(Step { gate, pattern });
        Ok(())
    }

    pub fn push_step(&mut self, step: Step) -> Result<()> {
        self.push(step.gate, step.pattern)
    }

    /// Single-qubit gate on `wire`.
    pub fn apply1(&mut self, gate: GateSpec, wire: usize) -> Result<()> {
        self.push(gate, ControlPattern::on(&[wire])?)
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.push(gates::pauli(Pauli::X), ControlPattern::controlled(&[control], &[target])?)
    }

    /// Appends every step of `other` (same width).
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_wires != self.n_wires {
            return Err(CircuitError::WidthMismatch { expected: self.n_wires, found: other.n_wires });
        }
        self.steps.extend(other.steps.iter().cloned());
        Ok(())
    }

    /// Appends `other` with its wire `w` mapped to `wire_map[w - 1]`.
    pub fn embed(&mut self, other: &Circuit, wire_map: &[usize]) -> Result<()> {
        if wire_map.len() != other.n_wires {
            return Err(CircuitError::WidthMismatch { expected: other.n_wires, found: wire_map.len() });
        }
        for step in &other.steps {
            let p = &step.pattern;
            let map = |ws: &[usize]| ws.iter().map(|&w| wire_map[w - 1]).collect::<Vec<_>>();
            let pattern = ControlPattern::new(map(p.controls()), p.conditions().to_vec(), map(p.targets()))?;
            self.push(step.gate.clone(), pattern)?;
        }
        Ok(())
    }

    /// Reversed steps with adjoint gates.
    pub fn inverse(&self) -> Circuit {
        Circuit { n_wires: self.n_wires, steps: self.steps.iter().rev().map(Step::adjoint).collect() }
    }

    /// The circuit's unitary, first step as the rightmost factor. Built one
    /// column at a time by streaming each basis vector through the steps.
    pub fn to_unitary(&self) -> CMatrix {
        let dim = 1usize << self.n_wires;
        let mut m = CMatrix::zeros(dim, dim);
        let mut col = vec![C64::default(); dim];
        for j in 0..dim {
            col.iter_mut().for_each(|z| *z = C64::default());
            col[j] = c(1.0, 0.0);
            self.apply_in_place(&mut col);
            for (i, z) in col.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        m
    }

    /// Product of the fully placed step matrices. Quadratic in memory per
    /// factor; intended for small circuits and as an independent check.
    pub fn to_unitary_dense(&self) -> CMatrix {
        let dim = 1usize << self.n_wires;
        self.steps.iter().fold(CMatrix::identity(dim), |acc, s| {
            &place(&s.gate, &s.pattern, self.n_wires).expect("validated on push") * &acc
        })
    }

    fn apply_in_place(&self, amps: &mut [C64]) {
        for s in &self.steps {
            apply_placed(&s.gate, &s.pattern, self.n_wires, amps).expect("validated on push");
        }
    }

    /// Runs a normalized register through the circuit.
    pub fn run(&self, input: &QuantumRegister) -> Result<QuantumRegister> {
        let out = self.run_vector(input.amplitudes())?;
        Ok(QuantumRegister::new(out)?)
    }

    /// Runs an arbitrary (possibly unnormalized) amplitude vector.
    pub fn run_vector(&self, input: &CVector) -> Result<CVector> {
        let dim = 1usize << self.n_wires;
        if input.dim() != dim {
            let found = input.dim().trailing_zeros() as usize;
            return Err(CircuitError::WidthMismatch { expected: self.n_wires, found });
        }
        let mut amps = input.entries().to_vec();
        self.apply_in_place(&mut amps);
        Ok(CVector::new(amps)?)
    }

    /// True when every step is an uncontrolled single-qubit gate or a CNOT.
    pub fn is_elementary(&self) -> bool {
        self.steps.iter().all(Step::is_elementary)
    }

    /// Number of steps per label.
    pub fn counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for s in &self.steps {
            *m.entry(s.label()).or_insert(0) += 1;
        }
        m
    }

    pub fn cnot_count(&self) -> usize {
        self.steps.iter().filter(|s| s.is_cnot()).count()
    }

    /// Canonical text form.
    pub fn emit(&self) -> String {
        let mut out = format!("wires {}\n", self.n_wires);
        for s in &self.steps {
            let (name, pattern) = canonical_form(s);
            out.push_str(&name);
            for (&w, &cond) in pattern.controls().iter().zip(pattern.conditions()) {
                let _ = write!(out, " c{}{w}", if cond { '+' } else { '-' });
            }
            for &w in pattern.targets() {
                let _ = write!(out, " {w}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| CircuitError::Parse { line: line_no, message };
            let Some(circ) = circuit.as_mut() else {
                let mut parts = line.split_whitespace();
                match (parts.next(), parts.next(), parts.next()) {
                    (Some("wires"), Some(n), None) => {
                        let n: usize = n.parse().map_err(|_| perr(format!("bad wire count '{n}'")))?;
                        if n == 0 || n > 30 {
                            return Err(perr(format!("wire count {n} out of range 1..=30")));
                        }
                        circuit = Some(Circuit::new(n)?);
                        continue;
                    }
                    _ => return Err(perr("expected 'wires N' header".into())),
                }
            };
            let (gate_tok, rest) = split_gate_token(line).map_err(&perr)?;
            let (name, params) = split_params(gate_tok).map_err(&perr)?;
            let mut controls = Vec::new();
            let mut conditions = Vec::new();
            let mut targets = Vec::new();
            for tok in rest.split_whitespace() {
                let wire_of = |s: &str| s.parse::<usize>().map_err(|_| perr(format!("bad wire '{tok}'")));
                if let Some(w) = tok.strip_prefix("c+") {
                    controls.push(wire_of(w)?);
                    conditions.push(true);
                } else if let Some(w) = tok.strip_prefix("c-") {
                    controls.push(wire_of(w)?);
                    conditions.push(false);
                } else {
                    targets.push(wire_of(tok)?);
                }
            }
            for &w in controls.iter().chain(&targets) {
                if w == 0 || w > circ.n_wires {
                    return Err(CircuitError::Invalid {
                        line: line_no,
                        source: GateError::WireOutOfRange { wire: w, n_wires: circ.n_wires },
                    });
                }
            }
            let gate = match name {
                "CNOT" | "TOFFOLI" => {
                    let need = if name == "CNOT" { 1 } else { 2 };
                    if params.is_some() {
                        return Err(perr(format!("{name} takes no parameters")));
                    }
                    if controls.is_empty() && targets.len() == need + 1 {
                        let t = targets.pop().expect("non-empty");
                        controls = std::mem::take(&mut targets);
                        conditions = vec![true; need];
                        targets.push(t);
                    } else if controls.len() < need {
                        return Err(perr(format!("{name} needs {need} control(s)")));
                    }
                    gates::pauli(Pauli::X)
                }
                "U" => parse_matrix_literal(params).map_err(&perr)?,
                _ => {
                    let values = params
                        .map(|p| {
                            p.split(',')
                                .map(|x| x.trim().parse::<f64>().map_err(|_| perr(format!("bad number '{x}'"))))
                                .collect::<Result<Vec<_>>>()
                        })
                        .transpose()?
                        .unwrap_or_default();
                    gates::by_name(name, &values).ok_or_else(|| perr(format!("unknown gate '{gate_tok}'")))?
                }
            };
            let pattern = ControlPattern::new(controls, conditions, targets)
                .map_err(|source| CircuitError::Invalid { line: line_no, source })?;
            circ.push(gate, pattern).map_err(|e| match e {
                CircuitError::Gate(source) => CircuitError::Invalid { line: line_no, source },
                other => other,
            })?;
        }
        circuit.ok_or(CircuitError::Parse { line: 0, message: "missing 'wires N' header".into() })
    }
}

/// Splits off the gate token; a parenthesised argument may contain spaces.
fn split_gate_token(line: &str) -> std::result::Result<(&str, &str), String> {
    let mut depth = 0i32;
    for (i, ch) in line.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced ')'".into());
                }
            }
            ch if ch.is_whitespace() && depth == 0 => return Ok((&line[..i], &line[i..])),
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced '('".into());
    }
    Ok((line, ""))
}

fn split_params(tok: &str) -> std::result::Result<(&str, Option<&str>), String> {
    match tok.find('(') {
        None => Ok((tok, None)),
        Some(open) => {
            let inner = tok[open + 1..].strip_suffix(')').ok_or_else(|| format!("bad gate token '{tok}'"))?;
            Ok((&tok[..open], Some(inner)))
        }
    }
}

fn parse_matrix_literal(body: Option<&str>) -> std::result::Result<GateSpec, String> {
    let body = body.ok_or("U needs a matrix literal")?;
    let mut rows = Vec::new();
    for row in body.split(';') {
        let entries = row
            .split_whitespace()
            .map(|e| {
                let (re, im) = e.split_once(',').ok_or_else(|| format!("bad entry '{e}', expected re,im"))?;
                let re: f64 = re.parse().map_err(|_| format!("bad number '{re}'"))?;
                let im: f64 = im.parse().map_err(|_| format!("bad number '{im}'"))?;
                Ok(c(re, im))
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        rows.push(entries);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err("matrix literal is not square".into());
    }
    let m = CMatrix::new(n, n, rows.concat()).map_err(|e| e.to_string())?;
    GateSpec::unitary(m).map_err(|e| e.to_string())
}

/// Formats a float so it parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn matrix_literal(m: &CMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|z| format!("{},{}", fmt_f64(z.re), fmt_f64(z.im)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    format!("U({})", rows.join("; "))
}

/// Text label and pattern used on output. X with one or two condition-1
/// controls prints as CNOT/TOFFOLI; named gates whose matrix is not the
/// named one print as matrix literals.
fn canonical_form(step: &Step) -> (String, ControlPattern) {
    let g = &step.gate;
    let p = &step.pattern;
    let all_on = p.conditions().iter().all(|&b| b);
    if g.name() == "X" && p.targets().len() == 1 && all_on {
        match p.controls().len() {
            1 => return ("CNOT".into(), p.clone()),
            2 => return ("TOFFOLI".into(), p.clone()),
            _ => {}
        }
    }
    if matches!(g.name(), "CNOT" | "TOFFOLI") && p.targets().len() == g.n_qubits() {
        // fold the gate's own controls into the pattern
        let (ctl, tgt) = p.targets().split_at(p.targets().len() - 1);
        let mut controls = p.controls().to_vec();
        controls.extend_from_slice(ctl);
        let mut conditions = p.conditions().to_vec();
        conditions.extend(std::iter::repeat_n(true, ctl.len()));
        let folded = ControlPattern::new(controls, conditions, tgt.to_vec()).expect("distinct wires");
        return canonical_form(&Step { gate: gates::pauli(Pauli::X), pattern: folded });
    }
    let named = gates::by_name(g.name(), g.params()).filter(|n| n.matrix() == g.matrix());
    let label = match named {
        Some(_) if g.params().is_empty() => g.name().to_string(),
        Some(_) => {
            let ps: Vec<String> = g.params().iter().map(|&x| fmt_f64(x)).collect();
            format!("{}({})", g.name(), ps.join(","))
        }
        None => matrix_literal(g.matrix()),
    };
    (label, p.clone())
}

/// Random circuit over H, S, T, Paulis, rotations, CNOT, Toffoli and
/// controlled random single-qubit unitaries.
pub fn random_circuit<R: Rng + ?Sized>(n_wires: usize, len: usize, rng: &mut R) -> Circuit {
    let mut circ = Circuit::new(n_wires).expect("n_wires >= 1");
    for _ in 0..len {
        let mut wires: Vec<usize> = (1..=n_wires).collect();
        for i in (1..wires.len()).rev() {
            wires.swap(i, rng.random_range(0..=i));
        }
        let kind = rng.random_range(0..10);
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let gate = match kind {
            0 => gates::hadamard(),
            1 => gates::phase_s(),
            2 => gates::t_gate(),
            3 => gates::pauli(Pauli::X),
            4 => gates::pauli(Pauli::Y),
            5 => gates::rotation(Axis::X, theta),
            6 => gates::rotation(Axis::Y, theta),
            7 => gates::rotation(Axis::Z, theta),
            _ => GateSpec::unitary(random_unitary(2, rng)).expect("unitary"),
        };
        let n_ctrl = if n_wires == 1 { 0 } else { rng.random_range(0..n_wires.min(3)) };
        let controls = wires[1..1 + n_ctrl].to_vec();
        let conditions = (0..n_ctrl).map(|_| rng.random_bool(0.7)).collect();
        let pattern = ControlPattern::new(controls, conditions, vec![wires[0]]).expect("distinct");
        circ.push(gate, pattern).expect("in range");
    }
    circ
}
