//! Classical circuits: Boolean gate networks, truth tables, synthesis by
//! induction on the first input bit, and compilation to reversible
//! NOT/CNOT/Toffoli circuits with ancilla uncomputation.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::circuit::Circuit;
use crate::gates::{self, ControlPattern, Pauli};
use crate::linalg::{cr, CMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RevError {
    #[error("expected {expected} input bits, found {found}")]
    InputLength { expected: usize, found: usize },
    #[error("{op} takes {expected} inputs, found {found}")]
    Arity { op: BoolOp, expected: usize, found: usize },
    #[error("signal {0:?} does not refer to an existing input or node")]
    UnknownSignal(Signal),
    #[error("truth table has {0} rows, expected a power of two")]
    TableSize(usize),
    #[error("truth table row {row} has {found} output bits, expected {expected}")]
    RowWidth { row: usize, expected: usize, found: usize },
    #[error("truth table is not a bijection")]
    NotBijective,
    #[error("at most {max} input bits are supported, found {found}")]
    TooManyInputs { max: usize, found: usize },
    #[error("circuit width is {expected}, input has {found} bits")]
    Width { expected: usize, found: usize },
    #[error("wire {wire} outside 1..={width}")]
    WireOutOfRange { wire: usize, width: usize },
    #[error("wire {0} used twice in one gate")]
    WireCollision(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = RevError> = std::result::Result<T, E>;

/// Largest input width accepted by [`synthesize_bool`].
pub const MAX_SYNTH_INPUTS: usize = 12;

// ---------------------------------------------------------------------------
// Boolean circuits

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Nand,
    Not,
    Fanout,
    Const0,
    Const1,
}

impl BoolOp {
    pub fn arity(self) -> usize {
        match self {
            BoolOp::And | BoolOp::Or | BoolOp::Xor | BoolOp::Nand => 2,
            BoolOp::Not | BoolOp::Fanout => 1,
            BoolOp::Const0 | BoolOp::Const1 => 0,
        }
    }

    pub fn apply(self, x: &[bool]) -> bool {
        match self {
            BoolOp::And => x[0] && x[1],
            BoolOp::Or => x[0] || x[1],
            BoolOp::Xor => x[0] ^ x[1],
            BoolOp::Nand => !(x[0] && x[1]),
            BoolOp::Not => !x[0],
            BoolOp::Fanout => x[0],
            BoolOp::Const0 => false,
            BoolOp::Const1 => true,
        }
    }
}

impl fmt::Display for BoolOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoolOp::And => "AND",
            BoolOp::Or => "OR",
            BoolOp::Xor => "XOR",
            BoolOp::Nand => "NAND",
            BoolOp::Not => "NOT",
            BoolOp::Fanout => "FANOUT",
            BoolOp::Const0 => "CONST0",
            BoolOp::Const1 => "CONST1",
        };
        f.write_str(s)
    }
}

/// A wire in a Boolean circuit: a primary input or a node output (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Input(usize),
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolNode {
    pub op: BoolOp,
    pub inputs: Vec<Signal>,
}

/// Acyclic by construction: a node may only read inputs and earlier nodes.
/// An output may be read any number of times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolCircuit {
    n_in: usize,
    nodes: Vec<BoolNode>,
    outputs: Vec<Signal>,
}

impl BoolCircuit {
    pub fn new(n_in: usize) -> Self {
        BoolCircuit { n_in, nodes: Vec::new(), outputs: Vec::new() }
    }

    fn check(&self, s: Signal) -> Result<()> {
        let ok = match s {
            Signal::Input(i) => i < self.n_in,
            Signal::Node(j) => j < self.nodes.len(),
        };
        if ok {
            Ok(())
        } else {
            Err(RevError::UnknownSignal(s))
        }
    }

    pub fn add(&mut self, op: BoolOp, inputs: &[Signal]) -> Result<Signal> {
        if inputs.len() != op.arity() {
            return Err(RevError::Arity { op, expected: op.arity(), found: inputs.len() });
        }
        for &s in inputs {
            self.check(s)?;
        }
        self.nodes.push(BoolNode { op, inputs: inputs.to_vec() });
        Ok(Signal::Node(self.nodes.len() - 1))
    }

    pub fn set_outputs(&mut self, outputs: Vec<Signal>) -> Result<()> {
        for &s in &outputs {
            self.check(s)?;
        }
        self.outputs = outputs;
        Ok(())
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.outputs.len()
    }

    pub fn nodes(&self) -> &[BoolNode] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[Signal] {
        &self.outputs
    }

    pub fn eval(&self, input: &[bool]) -> Result<Vec<bool>> {
        if input.len() != self.n_in {
            return Err(RevError::InputLength { expected: self.n_in, found: input.len() });
        }
        let mut values = Vec::with_capacity(self.nodes.len());
        let get = |values: &[bool], s: Signal| match s {
            Signal::Input(i) => input[i],
            Signal::Node(j) => values[j],
        };
        for node in &self.nodes {
            let args: Vec<bool> = node.inputs.iter().map(|&s| get(&values, s)).collect();
            values.push(node.op.apply(&args));
        }
        Ok(self.outputs.iter().map(|&s| get(&values, s)).collect())
    }
}

pub fn eval_bool(c: &BoolCircuit, input: &[bool]) -> Result<Vec<bool>> {
    c.eval(input)
}

// ---------------------------------------------------------------------------
// Truth tables

/// `f: {0,1}^k -> {0,1}^l` as `2^k` output words. Input index and output
/// word both read the first bit as the most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    k: usize,
    l: usize,
    outputs: Vec<usize>,
}

impl TruthTable {
    pub fn new(k: usize, l: usize, outputs: Vec<usize>) -> Result<Self> {
        if outputs.len() != 1usize << k {
            return Err(RevError::TableSize(outputs.len()));
        }
        if let Some((row, _)) = outputs.iter().enumerate().find(|(_, &o)| l < usize::BITS as usize && o >> l != 0) {
            return Err(RevError::RowWidth { row, expected: l, found: usize::BITS as usize - outputs[row].leading_zeros() as usize });
        }
        Ok(TruthTable { k, l, outputs })
    }

    pub fn from_fn(k: usize, l: usize, f: impl FnMut(usize) -> usize) -> Result<Self> {
        Self::new(k, l, (0..1usize << k).map(f).collect())
    }

    /// Table of a Boolean circuit, by exhaustive evaluation.
    pub fn of_circuit(c: &BoolCircuit) -> Result<Self> {
        let k = c.n_in();
        let mut outputs = Vec::with_capacity(1 << k);
        for x in 0..1usize << k {
            outputs.push(from_bits(&c.eval(&to_bits(x, k))?));
        }
        Self::new(k, c.n_out(), outputs)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn get(&self, x: usize) -> usize {
        self.outputs[x]
    }

    /// Output bit `j` (0 = first) as a column of `2^k` values.
    pub fn column(&self, j: usize) -> Vec<bool> {
        self.outputs.iter().map(|&o| o >> (self.l - 1 - j) & 1 == 1).collect()
    }

    pub fn is_bijective(&self) -> bool {
        if self.k != self.l {
            return false;
        }
        let mut seen = vec![false; self.outputs.len()];
        for &o in &self.outputs {
            if std::mem::replace(&mut seen[o], true) {
                return false;
            }
        }
        true
    }

    /// One bit string per line, `2^k` lines; blank lines and `#` comments
    /// are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut width = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| RevError::Parse { line: i + 1, message };
            if !line.chars().all(|ch| ch == '0' || ch == '1') {
                return Err(parse_err(format!("expected a bit string, found {line:?}")));
            }
            match width {
                None => width = Some(line.len()),
                Some(w) if w != line.len() => {
                    return Err(parse_err(format!("row has {} bits, previous rows have {w}", line.len())))
                }
                _ => {}
            }
            if line.len() >= usize::BITS as usize {
                return Err(parse_err("row too wide".into()));
            }
            rows.push(usize::from_str_radix(line, 2).expect("checked digits"));
        }
        if rows.is_empty() || !rows.len().is_power_of_two() {
            return Err(RevError::TableSize(rows.len()));
        }
        let k = rows.len().trailing_zeros() as usize;
        Self::new(k, width.unwrap_or(0), rows)
    }

    pub fn emit(&self) -> String {
        self.outputs.iter().map(|&o| format!("{}\n", crate::qstate::bitstring(o, self.l))).collect()
    }
}

pub fn to_bits(x: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| x >> (n - 1 - i) & 1 == 1).collect()
}

pub fn from_bits(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

/// Permutation matrix of a bijective table: column `x` has its single 1 in
/// row `f(x)`.
pub fn classical_matrix(f: &TruthTable) -> Result<CMatrix> {
    if !f.is_bijective() {
        return Err(RevError::NotBijective);
    }
    let n = f.outputs.len();
    let mut m = CMatrix::zeros(n, n);
    for (x, &y) in f.outputs.iter().enumerate() {
        m[(y, x)] = cr(1.0);
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Synthesis

/// Builds a circuit for every output bit by induction on the first input:
/// `f(x0, rest) = (NOT x0 AND f0(rest)) XOR (x0 AND f1(rest))` with
/// `f0 = f(0, .)` and `f1 = f(1, .)`. One-bit functions are a wire, a NOT,
/// AND with a constant-0 ancilla, or OR with a constant-1 ancilla.
pub fn synthesize_bool(f: &TruthTable) -> Result<BoolCircuit> {
    if f.k > MAX_SYNTH_INPUTS {
        return Err(RevError::TooManyInputs { max: MAX_SYNTH_INPUTS, found: f.k });
    }
    let mut c = BoolCircuit::new(f.k);
    let vars: Vec<Signal> = (0..f.k).map(Signal::Input).collect();
    let mut nots: Vec<Option<Signal>> = vec![None; f.k];
    let mut outs = Vec::with_capacity(f.l);
    for j in 0..f.l {
        outs.push(synth_column(&mut c, &f.column(j), &vars, &mut nots)?);
    }
    c.set_outputs(outs)?;
    Ok(c)
}

fn synth_column(c: &mut BoolCircuit, col: &[bool], vars: &[Signal], nots: &mut [Option<Signal>]) -> Result<Signal> {
    let k = vars.len();
    let depth = nots.len() - k;
    if k == 0 {
        return c.add(if col[0] { BoolOp::Const1 } else { BoolOp::Const0 }, &[]);
    }
    let x = vars[0];
    if k == 1 {
        return match (col[0], col[1]) {
            (false, true) => Ok(x),
            (true, false) => not_of(c, x, depth, nots),
            (false, false) => {
                let zero = c.add(BoolOp::Const0, &[])?;
                c.add(BoolOp::And, &[x, zero])
            }
            (true, true) => {
                let one = c.add(BoolOp::Const1, &[])?;
                c.add(BoolOp::Or, &[x, one])
            }
        };
    }
    let (c0, c1) = col.split_at(col.len() / 2);
    let f0 = synth_column(c, c0, &vars[1..], nots)?;
    let f1 = synth_column(c, c1, &vars[1..], nots)?;
    let nx = not_of(c, x, depth, nots)?;
    let a = c.add(BoolOp::And, &[nx, f0])?;
    let b = c.add(BoolOp::And, &[x, f1])?;
    c.add(BoolOp::Xor, &[a, b])
}

fn not_of(c: &mut BoolCircuit, x: Signal, idx: usize, nots: &mut [Option<Signal>]) -> Result<Signal> {
    if let Some(s) = nots[idx] {
        return Ok(s);
    }
    let s = c.add(BoolOp::Not, &[x])?;
    nots[idx] = Some(s);
    Ok(s)
}

// ---------------------------------------------------------------------------
// Reversible circuits

/// Reversible gates on 1-based wires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevGate {
    Not(usize),
    Cnot { control: usize, target: usize },
    Toffoli { c1: usize, c2: usize, target: usize },
    Fredkin { control: usize, a: usize, b: usize },
}

impl RevGate {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            RevGate::Not(w) => vec![w],
            RevGate::Cnot { control, target } => vec![control, target],
            RevGate::Toffoli { c1, c2, target } => vec![c1, c2, target],
            RevGate::Fredkin { control, a, b } => vec![control, a, b],
        }
    }

    fn apply(&self, bits: &mut [bool]) {
        let b = |w: usize| w - 1;
        match *self {
            RevGate::Not(w) => bits[b(w)] ^= true,
            RevGate::Cnot { control, target } => bits[b(target)] ^= bits[b(control)],
            RevGate::Toffoli { c1, c2, target } => bits[b(target)] ^= bits[b(c1)] && bits[b(c2)],
            RevGate::Fredkin { control, a, b: bw } => {
                if bits[b(control)] {
                    bits.swap(b(a), b(bw));
                }
            }
        }
    }
}

/// Register map of a compiled circuit: input `x`, ancillas, a copy of `x`
/// and the output register `y`, in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevLayout {
    pub x: Range<usize>,
    pub ancilla: Range<usize>,
    pub copy: Range<usize>,
    pub y: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevCircuit {
    width: usize,
    steps: Vec<RevGate>,
    layout: Option<RevLayout>,
}

impl RevCircuit {
    pub fn new(width: usize) -> Self {
        RevCircuit { width, steps: Vec::new(), layout: None }
    }

    pub fn push(&mut self, g: RevGate) -> Result<()> {
        let wires = g.wires();
        for (i, &w) in wires.iter().enumerate() {
            if w == 0 || w > self.width {
                return Err(RevError::WireOutOfRange { wire: w, width: self.width });
            }
            if wires[..i].contains(&w) {
                return Err(RevError::WireCollision(w));
            }
        }
        self.steps.push(g);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn steps(&self) -> &[RevGate] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn layout(&self) -> Option<&RevLayout> {
        self.layout.as_ref()
    }

    /// Every gate is its own inverse, so the inverse is the reversed list.
    pub fn inverse(&self) -> RevCircuit {
        let mut steps = self.steps.clone();
        steps.reverse();
        RevCircuit { width: self.width, steps, layout: self.layout.clone() }
    }

    pub fn eval(&self, input: &[bool]) -> Result<Vec<bool>> {
        if input.len() != self.width {
            return Err(RevError::Width { expected: self.width, found: input.len() });
        }
        let mut bits = input.to_vec();
        for g in &self.steps {
            g.apply(&mut bits);
        }
        Ok(bits)
    }

    /// The permutation of `{0,1}^width` the circuit computes, as a table.
    pub fn permutation(&self) -> Result<TruthTable> {
        let w = self.width;
        if w > MAX_SYNTH_INPUTS + 8 {
            return Err(RevError::TooManyInputs { max: MAX_SYNTH_INPUTS + 8, found: w });
        }
        let mut outputs = Vec::with_capacity(1 << w);
        for x in 0..1usize << w {
            outputs.push(from_bits(&self.eval(&to_bits(x, w))?));
        }
        TruthTable::new(w, w, outputs)
    }

    /// The same gates as a quantum circuit: X, CNOT, Toffoli, controlled SWAP.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.width.max(1)).expect("width >= 1");
        for g in &self.steps {
            let (gate, pat) = match *g {
                RevGate::Not(w) => (gates::pauli(Pauli::X), ControlPattern::on(&[w])),
                RevGate::Cnot { control, target } => {
                    (gates::pauli(Pauli::X), ControlPattern::controlled(&[control], &[target]))
                }
                RevGate::Toffoli { c1, c2, target } => {
                    (gates::pauli(Pauli::X), ControlPattern::controlled(&[c1, c2], &[target]))
                }
                RevGate::Fredkin { control, a, b } => (gates::swap(), ControlPattern::controlled(&[control], &[a, b])),
            };
            c.push(gate, pat.expect("validated wires")).expect("validated wires");
        }
        c
    }
}

pub fn eval_reversible(c: &RevCircuit, input: &[bool]) -> Result<Vec<bool>> {
    c.eval(input)
}

/// Gate-count bound of [`to_reversible`]:
/// `REV_C * nodes + 2 * n_in + n_out`.
pub const REV_C: usize = 12;

/// Compiles `x -> f(x)` into `(x, 0, 0, y) -> (x, 0, 0, y XOR f(x))`.
///
/// Forward: copy `x`, then lower each node onto its own fresh ancilla
/// (NAND as NOT + Toffoli, AND as Toffoli, OR by De Morgan, XOR and FANOUT
/// as CNOTs, NOT as CNOT + NOT). CNOT the results into `y`, then replay the
/// forward segment in reverse to clear ancillas and copy.
pub fn to_reversible(c: &BoolCircuit) -> RevCircuit {
    let (n_in, n_nodes, n_out) = (c.n_in(), c.nodes().len(), c.n_out());
    let x = 1..n_in + 1;
    let ancilla = x.end..x.end + n_nodes;
    let copy = ancilla.end..ancilla.end + n_in;
    let y = copy.end..copy.end + n_out;
    let width = y.end - 1;
    let wire = |s: Signal| match s {
        Signal::Input(i) => copy.start + i,
        Signal::Node(j) => ancilla.start + j,
    };
    let mut fwd = RevCircuit::new(width);
    let mut push = |g: RevGate| fwd.push(g).expect("layout wires are valid");
    for i in 0..n_in {
        push(RevGate::Cnot { control: x.start + i, target: copy.start + i });
    }
    for (j, node) in c.nodes().iter().enumerate() {
        let z = ancilla.start + j;
        let ins: Vec<usize> = node.inputs.iter().map(|&s| wire(s)).collect();
        let same = ins.len() == 2 && ins[0] == ins[1];
        match node.op {
            BoolOp::Const0 => {}
            BoolOp::Const1 => push(RevGate::Not(z)),
            BoolOp::Fanout => push(RevGate::Cnot { control: ins[0], target: z }),
            BoolOp::Not => {
                push(RevGate::Cnot { control: ins[0], target: z });
                push(RevGate::Not(z));
            }
            BoolOp::Xor if same => {}
            BoolOp::Xor => {
                push(RevGate::Cnot { control: ins[0], target: z });
                push(RevGate::Cnot { control: ins[1], target: z });
            }
            BoolOp::And | BoolOp::Or if same => push(RevGate::Cnot { control: ins[0], target: z }),
            BoolOp::And => push(RevGate::Toffoli { c1: ins[0], c2: ins[1], target: z }),
            BoolOp::Nand if same => {
                push(RevGate::Cnot { control: ins[0], target: z });
                push(RevGate::Not(z));
            }
            BoolOp::Nand => {
                push(RevGate::Not(z));
                push(RevGate::Toffoli { c1: ins[0], c2: ins[1], target: z });
            }
            BoolOp::Or => {
                push(RevGate::Not(ins[0]));
                push(RevGate::Not(ins[1]));
                push(RevGate::Not(z));
                push(RevGate::Toffoli { c1: ins[0], c2: ins[1], target: z });
                push(RevGate::Not(ins[0]));
                push(RevGate::Not(ins[1]));
            }
        }
    }
    let mut out = RevCircuit::new(width);
    out.steps.extend_from_slice(&fwd.steps);
    for (k, &s) in c.outputs().iter().enumerate() {
        out.steps.push(RevGate::Cnot { control: wire(s), target: y.start + k });
    }
    out.steps.extend(fwd.steps.iter().rev());
    out.layout = Some(RevLayout { x, ancilla, copy, y });
    out
}

/// Outcome of checking a compiled circuit against its source on every
/// input `x` and the given `y` register values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevVerification {
    pub cases: usize,
    pub output_mismatches: usize,
    pub dirty_ancilla_cases: usize,
    pub input_changed_cases: usize,
}

impl RevVerification {
    pub fn passed(&self) -> bool {
        self.output_mismatches == 0 && self.dirty_ancilla_cases == 0 && self.input_changed_cases == 0
    }
}

pub fn verify_reversible(source: &BoolCircuit, rev: &RevCircuit, y_values: &[usize]) -> Result<RevVerification> {
    let layout = rev.layout().cloned().unwrap_or(RevLayout {
        x: 1..source.n_in() + 1,
        ancilla: source.n_in() + 1..rev.width() + 1 - source.n_out(),
        copy: 0..0,
        y: rev.width() + 1 - source.n_out()..rev.width() + 1,
    });
    let (k, l) = (source.n_in(), source.n_out());
    let mut report = RevVerification { cases: 0, output_mismatches: 0, dirty_ancilla_cases: 0, input_changed_cases: 0 };
    for x in 0..1usize << k {
        let fx = from_bits(&source.eval(&to_bits(x, k))?);
        for &y in y_values {
            let mut bits = vec![false; rev.width()];
            for (i, b) in to_bits(x, k).into_iter().enumerate() {
                bits[layout.x.start - 1 + i] = b;
            }
            for (i, b) in to_bits(y, l).into_iter().enumerate() {
                bits[layout.y.start - 1 + i] = b;
            }
            let out = rev.eval(&bits)?;
            let bits_of = |r: &Range<usize>| &out[r.start.saturating_sub(1)..r.end.saturating_sub(1)];
            report.cases += 1;
            if from_bits(bits_of(&layout.y)) != y ^ fx {
                report.output_mismatches += 1;
            }
            if bits_of(&layout.ancilla).iter().chain(bits_of(&layout.copy)).any(|&b| b) {
                report.dirty_ancilla_cases += 1;
            }
            if from_bits(bits_of(&layout.x)) != x {
                report.input_changed_cases += 1;
            }
        }
    }
    Ok(report)
}
