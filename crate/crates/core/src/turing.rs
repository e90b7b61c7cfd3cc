//! Turing machines over quintuple programs: deterministic runs,
//! breadth-first nondeterministic exploration and weighted probabilistic
//! runs, with step and space counters and unary numeric I/O.
//!
//! The blank `_` marks the tape ends and never appears in input words;
//! `#` is the usual separator. An instantaneous description is stored as
//! the tape left of the head and the tape from the scanned cell on, with
//! blanks beyond the used region trimmed.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::Rng;
use thiserror::Error;

pub const BLANK: char = '_';
pub const SEPARATOR: char = '#';

const WEIGHT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("symbol {0:?} is not in the tape alphabet")]
    UnknownSymbol(char),
    #[error("state {0:?} is both a machine state and a halting state")]
    OverlappingStates(String),
    #[error("start state {0:?} is not a machine state")]
    BadStart(String),
    #[error("the blank may not be an input symbol")]
    BlankInAlphabet,
    #[error("input words may not contain the blank")]
    BlankInInput,
    #[error("instruction {0} is listed twice")]
    DuplicateInstruction(String),
    #[error("no instructions may leave halting state {0:?}")]
    TransitionFromHalting(String),
    #[error("machine is nondeterministic at ({state}, {symbol})")]
    Nondeterministic { state: String, symbol: char },
    #[error("weight {weight} of {instruction} is outside [0, 1]")]
    BadWeight { instruction: String, weight: f64 },
    #[error("weights at ({state}, {symbol}) sum to {sum}, expected 1")]
    WeightSum { state: String, symbol: char, sum: f64 },
    #[error("a decider needs halting states qy and qn and no others")]
    NotADecider,
    #[error("malformed tape: {0}")]
    Malformed(String),
}

pub type Result<T, E = TmError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    L,
    R,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
        })
    }
}

/// `q S S' q' M` with an optional probability weight (1 by default).
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub state: usize,
    pub read: char,
    pub write: char,
    pub next: usize,
    pub mv: Move,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuringMachine {
    /// Machine states `Q` followed by halting states `Q_h`.
    names: Vec<String>,
    n_machine: usize,
    start: usize,
    input_alphabet: BTreeSet<char>,
    tape_alphabet: BTreeSet<char>,
    program: Vec<Instruction>,
    index: BTreeMap<(usize, char), Vec<usize>>,
}

/// Declarative description of a machine, as read from program text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MachineSpec {
    pub states: Vec<String>,
    pub halting: Vec<String>,
    pub start: String,
    pub input_alphabet: Vec<char>,
    /// Extra tape symbols beyond the input alphabet and the blank.
    pub tape_symbols: Vec<char>,
    /// `(q, S, S', q', M, weight)`.
    pub program: Vec<(String, char, char, String, Move, Option<f64>)>,
}

impl TuringMachine {
    pub fn new(spec: &MachineSpec) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        for s in &spec.states {
            if !names.contains(s) {
                names.push(s.clone());
            }
        }
        let n_machine = names.len();
        for h in &spec.halting {
            if names[..n_machine].contains(h) {
                return Err(TmError::OverlappingStates(h.clone()));
            }
            if !names.contains(h) {
                names.push(h.clone());
            }
        }
        let start = names[..n_machine]
            .iter()
            .position(|s| *s == spec.start)
            .ok_or_else(|| TmError::BadStart(spec.start.clone()))?;
        if spec.input_alphabet.contains(&BLANK) {
            return Err(TmError::BlankInAlphabet);
        }
        let input_alphabet: BTreeSet<char> = spec.input_alphabet.iter().copied().collect();
        let mut tape_alphabet = input_alphabet.clone();
        tape_alphabet.extend(spec.tape_symbols.iter().copied());
        tape_alphabet.insert(BLANK);
        let lookup = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| TmError::UnknownState(s.to_string()));
        let mut program = Vec::with_capacity(spec.program.len());
        let mut index: BTreeMap<(usize, char), Vec<usize>> = BTreeMap::new();
        for (q, read, write, next, mv, weight) in &spec.program {
            let state = lookup(q)?;
            if state >= n_machine {
                return Err(TmError::TransitionFromHalting(q.clone()));
            }
            let next = lookup(next)?;
            for sym in [*read, *write] {
                if !tape_alphabet.contains(&sym) {
                    return Err(TmError::UnknownSymbol(sym));
                }
            }
            let ins = Instruction { state, read: *read, write: *write, next, mv: *mv, weight: weight.unwrap_or(1.0) };
            let text = format!("{q} {read} {write} {} {mv}", names[next]);
            if !(0.0..=1.0).contains(&ins.weight) {
                return Err(TmError::BadWeight { instruction: text, weight: ins.weight });
            }
            let slot = index.entry((state, *read)).or_default();
            if slot.iter().any(|&i| {
                let o: &Instruction = &program[i];
                (o.write, o.next, o.mv) == (ins.write, ins.next, ins.mv)
            }) {
                return Err(TmError::DuplicateInstruction(text));
            }
            slot.push(program.len());
            program.push(ins);
        }
        Ok(TuringMachine { names, n_machine, start, input_alphabet, tape_alphabet, program, index })
    }

    /// Program text: `states`, `halting`, `start`, `alphabet` and optional
    /// `tape` header lines, then one quintuple `q S S' q' M [weight]` per
    /// line. `;` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = MachineSpec::default();
        let mut seen_start = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split(';').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| TmError::Parse { line: i + 1, message };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let symbols = |toks: &[&str]| -> Result<Vec<char>> {
                toks.iter()
                    .map(|t| {
                        let mut cs = t.chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) => Ok(c),
                            _ => Err(err(format!("symbols are single characters, found {t:?}"))),
                        }
                    })
                    .collect()
            };
            match toks[0] {
                "states" => spec.states.extend(toks[1..].iter().map(|s| s.to_string())),
                "halting" => spec.halting.extend(toks[1..].iter().map(|s| s.to_string())),
                "start" => {
                    if toks.len() != 2 {
                        return Err(err("start takes one state".into()));
                    }
                    spec.start = toks[1].to_string();
                    seen_start = true;
                }
                "alphabet" => spec.input_alphabet.extend(symbols(&toks[1..])?),
                "tape" => spec.tape_symbols.extend(symbols(&toks[1..])?),
                _ => {
                    if toks.len() != 5 && toks.len() != 6 {
                        return Err(err(format!("expected a quintuple `q S S' q' M [weight]`, found {line:?}")));
                    }
                    let syms = symbols(&toks[1..3])?;
                    let mv = match toks[4] {
                        "L" => Move::L,
                        "R" => Move::R,
                        other => return Err(err(format!("move must be L or R, found {other:?}"))),
                    };
                    let weight = match toks.get(5) {
                        Some(w) => Some(w.parse::<f64>().map_err(|e| err(format!("bad weight {w:?}: {e}")))?),
                        None => None,
                    };
                    spec.program.push((toks[0].to_string(), syms[0], syms[1], toks[3].to_string(), mv, weight));
                }
            }
        }
        if !seen_start {
            return Err(TmError::Parse { line: 0, message: "missing start line".into() });
        }
        Self::new(&spec)
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_halting(&self, s: usize) -> bool {
        s >= self.n_machine
    }

    pub fn machine_states(&self) -> &[String] {
        &self.names[..self.n_machine]
    }

    pub fn halting_states(&self) -> &[String] {
        &self.names[self.n_machine..]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn input_alphabet(&self) -> &BTreeSet<char> {
        &self.input_alphabet
    }

    pub fn tape_alphabet(&self) -> &BTreeSet<char> {
        &self.tape_alphabet
    }

    pub fn program(&self) -> &[Instruction] {
        &self.program
    }

    /// No two instructions share `(q, S)`.
    pub fn is_deterministic(&self) -> bool {
        self.index.values().all(|v| v.len() <= 1)
    }

    fn require_deterministic(&self) -> Result<()> {
        match self.index.iter().find(|(_, v)| v.len() > 1) {
            Some(((q, s), _)) => Err(TmError::Nondeterministic { state: self.names[*q].clone(), symbol: *s }),
            None => Ok(()),
        }
    }

    /// Every `(q, S)` with instructions has weights summing to 1.
    pub fn check_weights(&self) -> Result<()> {
        for ((q, s), ids) in &self.index {
            let sum: f64 = ids.iter().map(|&i| self.program[i].weight).sum();
            if (sum - 1.0).abs() > WEIGHT_EPS {
                return Err(TmError::WeightSum { state: self.names[*q].clone(), symbol: *s, sum });
            }
        }
        Ok(())
    }

    pub fn instructions_for(&self, c: &Configuration) -> impl Iterator<Item = &Instruction> + '_ {
        self.index.get(&(c.state, c.scanned())).into_iter().flatten().map(|&i| &self.program[i])
    }

    /// `q1 w` with the head on the first symbol (a blank for the empty
    /// word). Every symbol must be a non-blank tape symbol.
    pub fn initial(&self, input: &str) -> Result<Configuration> {
        for ch in input.chars() {
            if ch == BLANK {
                return Err(TmError::BlankInInput);
            }
            if !self.tape_alphabet.contains(&ch) {
                return Err(TmError::UnknownSymbol(ch));
            }
        }
        let mut right: Vec<char> = input.chars().collect();
        if right.is_empty() {
            right.push(BLANK);
        }
        Ok(Configuration { left: Vec::new(), right, state: self.start, steps: 0, max_cells: 1, pos: 0, lo: 0, hi: 0 })
    }

    /// Instantaneous description `L q R`, state in brackets.
    pub fn describe(&self, c: &Configuration) -> String {
        let l: String = c.left.iter().collect();
        let r: String = c.right.iter().collect();
        format!("{l}[{}]{r}", self.names[c.state])
    }
}

/// An instantaneous description plus step and space counters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    left: Vec<char>,
    right: Vec<char>,
    state: usize,
    steps: u64,
    max_cells: u64,
    pos: i64,
    lo: i64,
    hi: i64,
}

impl Configuration {
    pub fn left(&self) -> &[char] {
        &self.left
    }

    /// Never empty; the first symbol is the scanned one.
    pub fn right(&self) -> &[char] {
        &self.right
    }

    pub fn scanned(&self) -> char {
        self.right[0]
    }

    pub fn state(&self) -> usize {
        self.state
    }

    /// Rewrite steps applied so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Distinct tape cells the head has scanned.
    pub fn max_cells(&self) -> u64 {
        self.max_cells
    }

    /// Tape contents with outer blanks removed.
    pub fn tape(&self) -> String {
        let s: String = self.left.iter().chain(&self.right).collect();
        s.trim_matches(BLANK).to_string()
    }

    /// The description without counters, for detecting repeats.
    pub fn key(&self) -> (Vec<char>, Vec<char>, usize) {
        (self.left.clone(), self.right.clone(), self.state)
    }

    fn apply(&self, ins: &Instruction) -> Configuration {
        let mut left = self.left.clone();
        let mut right = self.right.clone();
        right[0] = ins.write;
        let pos = match ins.mv {
            Move::R => {
                left.push(right.remove(0));
                if right.is_empty() {
                    right.push(BLANK);
                }
                self.pos + 1
            }
            Move::L => {
                let cell = left.pop().unwrap_or(BLANK);
                right.insert(0, cell);
                self.pos - 1
            }
        };
        let lead = left.iter().take_while(|&&c| c == BLANK).count();
        left.drain(..lead);
        while right.len() > 1 && right.last() == Some(&BLANK) {
            right.pop();
        }
        let (lo, hi) = (self.lo.min(pos), self.hi.max(pos));
        Configuration {
            left,
            right,
            state: ins.next,
            steps: self.steps + 1,
            max_cells: (hi - lo + 1) as u64,
            pos,
            lo,
            hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    /// Terminal in a halting state.
    Halted,
    /// Terminal in a machine state: no instruction matches.
    Stuck,
    FuelExhausted,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Halted => "halted",
            RunStatus::Stuck => "stuck",
            RunStatus::FuelExhausted => "fuel_exhausted",
        }
    }

    pub fn is_terminal(self) -> bool {
        self != RunStatus::FuelExhausted
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    pub config: Configuration,
}

/// One deterministic rewrite, or `None` if the description is terminal.
pub fn step(m: &TuringMachine, c: &Configuration) -> Result<Option<Configuration>> {
    m.require_deterministic()?;
    Ok(m.instructions_for(c).next().map(|ins| c.apply(ins)))
}

fn terminal_status(m: &TuringMachine, c: &Configuration) -> RunStatus {
    if m.is_halting(c.state) {
        RunStatus::Halted
    } else {
        RunStatus::Stuck
    }
}

/// Runs a deterministic machine for at most `fuel` steps.
pub fn run(m: &TuringMachine, input: &str, fuel: u64) -> Result<RunResult> {
    run_traced(m, input, fuel, None)
}

/// Every description of a deterministic run, initial one first.
pub fn trace(m: &TuringMachine, input: &str, fuel: u64) -> Result<(RunResult, Vec<Configuration>)> {
    let mut all = Vec::new();
    let r = run_traced(m, input, fuel, Some(&mut all))?;
    Ok((r, all))
}

fn run_traced(m: &TuringMachine, input: &str, fuel: u64, mut keep: Option<&mut Vec<Configuration>>) -> Result<RunResult> {
    m.require_deterministic()?;
    let mut c = m.initial(input)?;
    loop {
        if let Some(k) = keep.as_deref_mut() {
            k.push(c.clone());
        }
        let next = m.instructions_for(&c).next().map(|ins| c.apply(ins));
        match next {
            None => return Ok(RunResult { status: terminal_status(m, &c), config: c }),
            Some(_) if c.steps >= fuel => return Ok(RunResult { status: RunStatus::FuelExhausted, config: c }),
            Some(n) => c = n,
        }
    }
}

/// Parses a program text and runs it: the universal machine's contract.
pub fn interpret(description: &str, input: &str, fuel: u64) -> Result<RunResult> {
    run(&TuringMachine::parse(description)?, input, fuel)
}

// ---------------------------------------------------------------------------
// Numeric I/O

/// `(n1, ..., nd)` as `1^{n1+1} # ... # 1^{nd+1}`.
pub fn encode_unary(values: &[u64]) -> String {
    values.iter().map(|&n| "1".repeat(n as usize + 1)).collect::<Vec<_>>().join(&SEPARATOR.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    /// A single block of 1s on an otherwise blank tape.
    Standard,
    /// Number of 1s, ignoring every other symbol.
    Lenient,
}

/// Reads `n` from a tape holding `n + 1` ones.
pub fn decode_unary(tape: &str, mode: OutputMode) -> Result<u64> {
    let trimmed = tape.trim_matches(BLANK);
    if mode == OutputMode::Standard && (trimmed.is_empty() || trimmed.chars().any(|c| c != '1')) {
        return Err(TmError::Malformed(format!("{tape:?} is not a single block of 1s")));
    }
    let ones = trimmed.chars().filter(|&c| c == '1').count() as u64;
    ones.checked_sub(1).ok_or_else(|| TmError::Malformed(format!("{tape:?} contains no 1")))
}

/// Splits `1^{a+1} # 1^{b+1} # ...` back into a tuple.
pub fn decode_tuple(tape: &str) -> Result<Vec<u64>> {
    tape.trim_matches(BLANK).split(SEPARATOR).map(|block| decode_unary(block, OutputMode::Standard)).collect()
}

/// Output of a halted run. In standard mode the machine must also scan
/// the leftmost 1 of the block.
pub fn output_value(r: &RunResult, mode: OutputMode) -> Result<u64> {
    if r.status != RunStatus::Halted {
        return Err(TmError::Malformed(format!("run ended with status {}", r.status)));
    }
    if mode == OutputMode::Standard && r.config.left.iter().any(|&c| c != BLANK) {
        return Err(TmError::Malformed("head is not on the leftmost symbol".into()));
    }
    decode_unary(&r.config.tape(), mode)
}

/// Result of running a decider.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    Stuck,
    FuelExhausted,
}

fn decider_states(m: &TuringMachine) -> Result<(usize, usize)> {
    let h = m.halting_states();
    if h.len() != 2 {
        return Err(TmError::NotADecider);
    }
    match (m.state_id("qy"), m.state_id("qn")) {
        (Some(y), Some(n)) if m.is_halting(y) && m.is_halting(n) => Ok((y, n)),
        _ => Err(TmError::NotADecider),
    }
}

pub fn decide(m: &TuringMachine, word: &str, fuel: u64) -> Result<Decision> {
    let (yes, _) = decider_states(m)?;
    let r = run(m, word, fuel)?;
    Ok(match r.status {
        RunStatus::Halted if r.config.state == yes => Decision::Yes,
        RunStatus::Halted => Decision::No,
        RunStatus::Stuck => Decision::Stuck,
        RunStatus::FuelExhausted => Decision::FuelExhausted,
    })
}

// ---------------------------------------------------------------------------
// Nondeterministic exploration

#[derive(Debug, Clone)]
pub struct NondetReport {
    /// Whether any branch halted in the accepting state (`qy`, or any
    /// halting state if the machine has no `qy`).
    pub accepted: bool,
    /// Halting descriptions in the accepting state, in breadth-first order.
    pub accepting: Vec<Configuration>,
    /// Every halting description, in breadth-first order.
    pub halted: Vec<Configuration>,
    /// Branches that got stuck in a machine state.
    pub stuck: usize,
    /// Live descriptions at each depth; entry 0 is the initial one.
    pub frontier_sizes: Vec<usize>,
    /// True if fuel ran out with branches still live.
    pub fuel_exhausted: bool,
}

/// Breadth-first traversal of the computation tree to depth `fuel`.
/// With `dedup`, descriptions already seen (ignoring counters) are pruned.
pub fn run_nondet(m: &TuringMachine, input: &str, fuel: u64, dedup: bool) -> Result<NondetReport> {
    let accept: Vec<usize> = match m.state_id("qy") {
        Some(y) if m.is_halting(y) => vec![y],
        _ => (0..m.names.len()).filter(|&s| m.is_halting(s)).collect(),
    };
    let mut report = NondetReport {
        accepted: false,
        accepting: Vec::new(),
        halted: Vec::new(),
        stuck: 0,
        frontier_sizes: Vec::new(),
        fuel_exhausted: false,
    };
    let mut seen = HashSet::new();
    let mut frontier = vec![m.initial(input)?];
    if dedup {
        seen.insert(frontier[0].key());
    }
    let mut depth = 0;
    while !frontier.is_empty() {
        report.frontier_sizes.push(frontier.len());
        let mut next = Vec::new();
        for c in &frontier {
            let mut moved = false;
            for ins in m.instructions_for(c) {
                moved = true;
                if depth >= fuel {
                    break;
                }
                let n = c.apply(ins);
                if !dedup || seen.insert(n.key()) {
                    next.push(n);
                }
            }
            if !moved {
                if m.is_halting(c.state) {
                    if accept.contains(&c.state) {
                        report.accepting.push(c.clone());
                    }
                    report.halted.push(c.clone());
                } else {
                    report.stuck += 1;
                }
            } else if depth >= fuel {
                report.fuel_exhausted = true;
            }
        }
        if depth >= fuel {
            break;
        }
        frontier = next;
        depth += 1;
    }
    report.accepted = !report.accepting.is_empty();
    Ok(report)
}

// ---------------------------------------------------------------------------
// Probabilistic runs

#[derive(Debug, Clone, PartialEq)]
pub struct ProbRun {
    pub result: RunResult,
    /// Product of the weights of the chosen instructions.
    pub probability: f64,
    /// Probability of the path prefix after each step.
    pub trace_probabilities: Vec<f64>,
    /// Index of the chosen instruction among those matching, per step.
    pub choices: Vec<usize>,
}

/// One sampled path; at each step an instruction matching `(q, S)` is
/// chosen with its weight.
pub fn run_prob<R: Rng + ?Sized>(m: &TuringMachine, input: &str, fuel: u64, rng: &mut R) -> Result<ProbRun> {
    m.check_weights()?;
    let mut c = m.initial(input)?;
    let mut probability = 1.0;
    let mut trace_probabilities = Vec::new();
    let mut choices = Vec::new();
    loop {
        let options: Vec<&Instruction> = m.instructions_for(&c).collect();
        if options.is_empty() {
            let status = terminal_status(m, &c);
            return Ok(ProbRun { result: RunResult { status, config: c }, probability, trace_probabilities, choices });
        }
        if c.steps >= fuel {
            let result = RunResult { status: RunStatus::FuelExhausted, config: c };
            return Ok(ProbRun { result, probability, trace_probabilities, choices });
        }
        let (k, ins) = if options.len() == 1 {
            (0, options[0])
        } else {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = options.len() - 1;
            for (i, o) in options.iter().enumerate() {
                acc += o.weight;
                if u < acc && o.weight > 0.0 {
                    pick = i;
                    break;
                }
            }
            while options[pick].weight == 0.0 && pick > 0 {
                pick -= 1;
            }
            (pick, options[pick])
        };
        probability *= ins.weight;
        trace_probabilities.push(probability);
        choices.push(k);
        c = c.apply(ins);
    }
}

// ---------------------------------------------------------------------------
// Corpus

/// Machines shipped with the library, as program text.
pub mod corpus {
    pub const SUCCESSOR: &str = include_str!("../machines/successor.tm");
    pub const ADDITION: &str = include_str!("../machines/addition.tm");
    pub const PARITY: &str = include_str!("../machines/parity.tm");
    pub const RIGHT_MOVER: &str = include_str!("../machines/right_mover.tm");
    pub const GUESS_BIT: &str = include_str!("../machines/guess_bit.tm");
    pub const CONTAINS11_ND: &str = include_str!("../machines/contains11_nd.tm");
    pub const CONTAINS11_DET: &str = include_str!("../machines/contains11_det.tm");
    pub const FAIR_COIN: &str = include_str!("../machines/fair_coin.tm");
    pub const THREE_COINS: &str = include_str!("../machines/three_coins.tm");

    pub const ALL: [(&str, &str); 9] = [
        ("successor", SUCCESSOR),
        ("addition", ADDITION),
        ("parity", PARITY),
        ("right_mover", RIGHT_MOVER),
        ("guess_bit", GUESS_BIT),
        ("contains11_nd", CONTAINS11_ND),
        ("contains11_det", CONTAINS11_DET),
        ("fair_coin", FAIR_COIN),
        ("three_coins", THREE_COINS),
    ];
}
