//! Unitary synthesis: single-qubit ZY and ABC decompositions, controlled
//! gate constructions, two-level factorization, Gray-code routing, lowering
//! to single-qubit + CNOT circuits, the operator-norm error metric,
//! primitivity of two-qubit gates and word search over a discrete gate set.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Step};
use crate::gates::{self, Axis, ControlPattern, GateError, GateSpec, Pauli};
use crate::linalg::{
    c, cr, principal_sqrt, random_state, spectral_norm, sqrt_unitary2, tensor_vec, CMatrix, CVector,
    LinalgError, C64, EPS_UNITARY,
};
use crate::qstate::{is_decomposable, QuantumRegister};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("dimension {0} is not a power of two (at least 2)")]
    NotPowerOfTwo(usize),
    #[error("expected a {expected}x{expected} matrix, found {rows}x{cols}")]
    Shape { expected: usize, rows: usize, cols: usize },
    #[error("two-level factor needs distinct levels, got {0} twice")]
    SameLevels(usize),
    #[error("invalid Gray-code path: {0}")]
    BadPath(String),
    #[error("empty gate set")]
    EmptyGateSet,
    #[error("word length {0} exceeds the limit of {MAX_WORD_LEN}")]
    WordTooLong(usize),
}

pub type Result<T, E = SynthError> = std::result::Result<T, E>;

fn require_2x2_unitary(u: &CMatrix) -> Result<()> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(SynthError::Shape { expected: 2, rows: u.rows(), cols: u.cols() });
    }
    u.require_unitary(EPS_UNITARY)?;
    Ok(())
}

fn rz(t: f64) -> CMatrix {
    gates::rotation(Axis::Z, t).matrix().clone()
}

fn ry(t: f64) -> CMatrix {
    gates::rotation(Axis::Y, t).matrix().clone()
}

fn pauli_x() -> CMatrix {
    gates::pauli(Pauli::X).matrix().clone()
}

// ---------------------------------------------------------------------------
// Single-qubit decompositions

/// `U = e^{i alpha} R_z(beta) R_y(gamma) R_z(delta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZYFactors {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl ZYFactors {
    pub fn reconstruct(&self) -> CMatrix {
        (&(&rz(self.beta) * &ry(self.gamma)) * &rz(self.delta)).scale(C64::from_polar(1.0, self.alpha))
    }
}

/// ZY decomposition with `gamma` in `[0, pi]`. When `gamma` is 0 or pi only
/// `beta + delta` (resp. `beta - delta`) is determined and `beta` is set to 0.
pub fn zy_decompose(u: &CMatrix) -> Result<ZYFactors> {
    require_2x2_unitary(u)?;
    let alpha = u.det2().arg() / 2.0;
    let w = u.scale(C64::from_polar(1.0, -alpha));
    let (a, b) = (w[(0, 0)], w[(1, 0)]);
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let (beta, delta) = if b.norm() < 1e-12 {
        (0.0, -2.0 * a.arg())
    } else if a.norm() < 1e-12 {
        (0.0, -2.0 * b.arg())
    } else {
        (b.arg() - a.arg(), -a.arg() - b.arg())
    };
    Ok(ZYFactors { alpha, beta, gamma, delta })
}

/// `A B C = I` and `e^{i alpha} A X B X C = U`.
#[derive(Clone, Debug)]
pub struct AbcFactors {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub alpha: f64,
}

pub fn abc_decompose(u: &CMatrix) -> Result<AbcFactors> {
    let ZYFactors { alpha, beta, gamma, delta } = zy_decompose(u)?;
    Ok(AbcFactors {
        a: &rz(beta) * &ry(gamma / 2.0),
        b: &ry(-gamma / 2.0) * &rz(-(delta + beta) / 2.0),
        c: rz((delta - beta) / 2.0),
        alpha,
    })
}

fn push_controlled_u(circ: &mut Circuit, u: &CMatrix, control: usize, target: usize) -> Result<()> {
    let f = abc_decompose(u)?;
    circ.apply1(GateSpec::unitary(f.c)?, target)?;
    circ.cnot(control, target)?;
    circ.apply1(GateSpec::unitary(f.b)?, target)?;
    circ.cnot(control, target)?;
    circ.apply1(GateSpec::unitary(f.a)?, target)?;
    circ.apply1(gates::phase_e(f.alpha), control)?;
    Ok(())
}

/// `Lambda_1(U)` on (control 1, target 2) as six elementary steps.
pub fn controlled_u_circuit(u: &CMatrix) -> Result<Circuit> {
    let mut circ = Circuit::new(2)?;
    push_controlled_u(&mut circ, u, 1, 2)?;
    Ok(circ)
}

// ---------------------------------------------------------------------------
// Multiply controlled gates

/// High-level `Lambda_m(U)` on `controls -> target`. Emits singly controlled
/// `V`-type gates, CNOTs and Toffolis; `spares` are wires that may be
/// borrowed in any state and are returned unchanged.
fn lambda_steps(circ: &mut Circuit, u: &CMatrix, controls: &[usize], target: usize, spares: &[usize]) -> Result<()> {
    let m = controls.len();
    match m {
        0 => circ.apply1(GateSpec::unitary(u.clone())?, target)?,
        1 => circ.push(GateSpec::unitary(u.clone())?, ControlPattern::controlled(controls, &[target])?)?,
        _ => {
            let v = sqrt_unitary2(u)?;
            let last = controls[m - 1];
            let head = &controls[..m - 1];
            let mut spares_t = spares.to_vec();
            spares_t.push(target);
            circ.push(GateSpec::unitary(v.clone())?, ControlPattern::controlled(&[last], &[target])?)?;
            mcx_steps(circ, head, last, &spares_t)?;
            circ.push(GateSpec::unitary(v.adjoint())?, ControlPattern::controlled(&[last], &[target])?)?;
            mcx_steps(circ, head, last, &spares_t)?;
            let mut spares_l = spares.to_vec();
            spares_l.push(last);
            lambda_steps(circ, &v, head, target, &spares_l)?;
        }
    }
    Ok(())
}

fn toffoli_step(circ: &mut Circuit, c1: usize, c2: usize, t: usize) -> Result<()> {
    circ.push(gates::pauli(Pauli::X), ControlPattern::controlled(&[c1, c2], &[t])?)?;
    Ok(())
}

/// `Lambda_k(X)` from Toffolis using borrowed wires: a chain of 4(k-2)
/// Toffolis with k-2 spares, a split into four smaller gates with one spare,
/// and the `V` recursion otherwise.
fn mcx_steps(circ: &mut Circuit, controls: &[usize], target: usize, spares: &[usize]) -> Result<()> {
    let k = controls.len();
    match k {
        0 => return Ok(circ.apply1(gates::pauli(Pauli::X), target)?),
        1 => return Ok(circ.cnot(controls[0], target)?),
        2 => return toffoli_step(circ, controls[0], controls[1], target),
        _ => {}
    }
    if spares.len() >= k - 2 {
        let a = &spares[..k - 2];
        let cc = controls;
        let top = |circ: &mut Circuit| toffoli_step(circ, cc[k - 1], a[k - 3], target);
        let link = |circ: &mut Circuit, j: usize| toffoli_step(circ, cc[j], a[j - 2], a[j - 1]);
        for _ in 0..2 {
            top(circ)?;
            for j in (2..k - 1).rev() {
                link(circ, j)?;
            }
            toffoli_step(circ, cc[0], cc[1], a[0])?;
            for j in 2..k - 1 {
                link(circ, j)?;
            }
        }
        return Ok(());
    }
    if let Some((&a, rest)) = spares.split_first() {
        let m1 = k.div_ceil(2);
        let (c1, c2) = controls.split_at(m1);
        let mut b_controls = c2.to_vec();
        b_controls.push(a);
        let a_spares: Vec<usize> = c2.iter().copied().chain([target]).chain(rest.iter().copied()).collect();
        let b_spares: Vec<usize> = c1.iter().copied().chain(rest.iter().copied()).collect();
        for _ in 0..2 {
            mcx_steps(circ, &b_controls, target, &b_spares)?;
            mcx_steps(circ, c1, a, &a_spares)?;
        }
        return Ok(());
    }
    lambda_steps(circ, &pauli_x(), controls, target, &[])
}

/// `Lambda_2(U)` on wires (c1 = 1, c2 = 2, target = 3) as three controlled
/// `V` gates and two CNOTs, `V^2 = U`.
pub fn lambda2_circuit(u: &CMatrix) -> Result<Circuit> {
    require_2x2_unitary(u)?;
    let mut circ = Circuit::new(3)?;
    lambda_steps(&mut circ, u, &[1, 2], 3, &[])?;
    Ok(circ)
}

/// `Lambda_2(U)` lowered to single-qubit gates and CNOTs (20 steps).
pub fn lambda2_elementary(u: &CMatrix) -> Result<Circuit> {
    lower(&lambda2_circuit(u)?)
}

/// Quadratic coefficient of the `lambda_n_circuit` gate-count bound
/// `LAMBDA_N_C2 * (m + 1)^2 + LAMBDA_N_C1`. Each recursion level costs two
/// controlled `V` gates (12) and two Toffoli networks of at most `8k`
/// Toffolis (20 gates each), which sums to below `160 (m + 1)^2`.
pub const LAMBDA_N_C2: usize = 160;
pub const LAMBDA_N_C1: usize = 0;

/// Per-factor coefficient of the compile bound: one routed two-level factor
/// lowers to at most `ROUTE_C * n^2` gates for `n <= 4` (measured maximum
/// 431 at `n = 4`).
pub const ROUTE_C: usize = 30;

/// Gate-count envelope for `compile` on `n` qubits:
/// `ROUTE_C * n^2 * N(N-1)/2` with `N = 2^n`, inside `O(n^2 4^n)`.
pub fn compile_gate_bound(n: usize) -> usize {
    let dim = 1usize << n;
    ROUTE_C * n * n * dim * (dim - 1) / 2
}

/// `Lambda_m(U)` on wires `1..=m` (controls) and `m + 1` (target), lowered
/// to single-qubit gates and CNOTs and peephole-merged. `m = 1` is the
/// six-step construction.
pub fn lambda_n_circuit(u: &CMatrix, m: usize) -> Result<Circuit> {
    require_2x2_unitary(u)?;
    if m == 1 {
        return controlled_u_circuit(u);
    }
    let mut circ = Circuit::new(m + 1)?;
    let controls: Vec<usize> = (1..=m).collect();
    lambda_steps(&mut circ, u, &controls, m + 1, &[])?;
    Ok(peephole(&lower(&circ)?))
}

/// `Lambda_k(X)` on controls `1..=k`, target `k + 1` and `n_spares` borrowed
/// wires after it, before lowering (Toffolis kept).
pub fn mcx_circuit(k: usize, n_spares: usize) -> Result<Circuit> {
    let mut circ = Circuit::new(k + 1 + n_spares)?;
    let controls: Vec<usize> = (1..=k).collect();
    let spares: Vec<usize> = (k + 2..=k + 1 + n_spares).collect();
    mcx_steps(&mut circ, &controls, k + 1, &spares)?;
    Ok(circ)
}

// ---------------------------------------------------------------------------
// Lowering and peephole

fn is_x(g: &GateSpec) -> bool {
    g.name() == "X" || *g.matrix() == pauli_x()
}

/// Rewrites every step into uncontrolled single-qubit gates and CNOTs.
pub fn lower(circ: &Circuit) -> Result<Circuit> {
    let n = circ.n_wires();
    let mut out = Circuit::new(n)?;
    for step in circ.steps() {
        lower_step(&mut out, step)?;
    }
    Ok(out)
}

fn lower_step(out: &mut Circuit, step: &Step) -> Result<()> {
    let n = out.n_wires();
    let gate = &step.gate;
    let pat = &step.pattern;
    if step.is_elementary() {
        return Ok(out.push_step(step.clone())?);
    }
    if gate.dim() > 2 {
        return lower_multi_qubit(out, step);
    }
    let target = pat.targets()[0];
    let negated: Vec<usize> =
        pat.controls().iter().zip(pat.conditions()).filter(|(_, &on)| !on).map(|(&w, _)| w).collect();
    for &w in &negated {
        out.apply1(gates::pauli(Pauli::X), w)?;
    }
    let controls = pat.controls();
    match controls.len() {
        0 => unreachable!("uncontrolled single-qubit steps are elementary"),
        1 if is_x(gate) => out.cnot(controls[0], target)?,
        1 => push_controlled_u(out, gate.matrix(), controls[0], target)?,
        _ => {
            let spares: Vec<usize> = (1..=n).filter(|w| *w != target && !controls.contains(w)).collect();
            let mut high = Circuit::new(n)?;
            if is_x(gate) {
                mcx_steps(&mut high, controls, target, &spares)?;
            } else {
                lambda_steps(&mut high, gate.matrix(), controls, target, &spares)?;
            }
            if controls.len() == 2 && !is_x(gate) {
                // lambda_steps emits only singly controlled gates here
                for s in high.steps() {
                    lower_step(out, s)?;
                }
            } else if controls.len() == 2 {
                let c2 = lambda2_circuit(&pauli_x())?;
                let map = [controls[0], controls[1], target];
                let mut tmp = Circuit::new(n)?;
                tmp.embed(&c2, &map)?;
                for s in tmp.steps() {
                    lower_step(out, s)?;
                }
            } else {
                for s in high.steps() {
                    lower_step(out, s)?;
                }
            }
        }
    }
    for &w in &negated {
        out.apply1(gates::pauli(Pauli::X), w)?;
    }
    Ok(())
}

fn lower_multi_qubit(out: &mut Circuit, step: &Step) -> Result<()> {
    let gate = &step.gate;
    let pat = &step.pattern;
    if matches!(gate.name(), "CNOT" | "TOFFOLI") {
        let (ctl, tgt) = pat.targets().split_at(pat.targets().len() - 1);
        let mut controls = pat.controls().to_vec();
        controls.extend_from_slice(ctl);
        let mut conditions = pat.conditions().to_vec();
        conditions.extend(std::iter::repeat_n(true, ctl.len()));
        let folded = Step { gate: gates::pauli(Pauli::X), pattern: ControlPattern::new(controls, conditions, tgt.to_vec())? };
        return lower_step(out, &folded);
    }
    if gate.name() == "SWAP" && pat.controls().is_empty() {
        let (a, b) = (pat.targets()[0], pat.targets()[1]);
        out.cnot(a, b)?;
        out.cnot(b, a)?;
        out.cnot(a, b)?;
        return Ok(());
    }
    // generic: synthesize the controlled gate on its own wires
    let negated: Vec<usize> =
        pat.controls().iter().zip(pat.conditions()).filter(|(_, &on)| !on).map(|(&w, _)| w).collect();
    for &w in &negated {
        out.apply1(gates::pauli(Pauli::X), w)?;
    }
    let full = gates::controlled(gate, pat.controls().len());
    let wires: Vec<usize> = pat.controls().iter().chain(pat.targets()).copied().collect();
    let sub = compile(full.matrix())?;
    out.embed(&sub.circuit, &wires)?;
    for &w in &negated {
        out.apply1(gates::pauli(Pauli::X), w)?;
    }
    Ok(())
}

/// Merges runs of single-qubit gates on the same wire, drops products that
/// are exactly the identity (within 1e-14) and cancels back-to-back equal
/// CNOTs.
pub fn peephole(circ: &Circuit) -> Circuit {
    let n = circ.n_wires();
    let mut out = Circuit::new(n).expect("n >= 1");
    let mut pending: Vec<Option<(CMatrix, Step, usize)>> = vec![None; n + 1];
    let id = CMatrix::identity(2);

    fn flush(out: &mut Circuit, pending: &mut [Option<(CMatrix, Step, usize)>], w: usize, id: &CMatrix) {
        if let Some((m, first, count)) = pending[w].take() {
            if m.approx_eq(id, 1e-14) {
                return;
            }
            let step = if count == 1 {
                first
            } else {
                let gate = GateSpec::unitary(m).expect("product of unitaries");
                Step { gate, pattern: first.pattern }
            };
            out.push_step(step).expect("same width");
        }
    }

    for step in circ.steps() {
        if step.is_single_qubit() {
            let w = step.pattern.targets()[0];
            pending[w] = Some(match pending[w].take() {
                None => (step.gate.matrix().clone(), step.clone(), 1),
                Some((m, first, count)) => (step.gate.matrix() * &m, first, count + 1),
            });
            continue;
        }
        for w in step.pattern.wires() {
            flush(&mut out, &mut pending, w, &id);
        }
        if step.is_cnot() && out.steps().last() == Some(step) {
            out = drop_last(out);
            continue;
        }
        out.push_step(step.clone()).expect("same width");
    }
    for w in 1..=n {
        flush(&mut out, &mut pending, w, &id);
    }
    out
}

fn drop_last(circ: Circuit) -> Circuit {
    let mut out = Circuit::new(circ.n_wires()).expect("n >= 1");
    let k = circ.len();
    for s in &circ.steps()[..k - 1] {
        out.push_step(s.clone()).expect("same width");
    }
    out
}

// ---------------------------------------------------------------------------
// Two-level factorization

/// A unitary acting on basis levels `p < q` only, with block
/// `[[T_pp, T_pq], [T_qp, T_qq]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLevelFactor {
    pub p: usize,
    pub q: usize,
    pub block: CMatrix,
}

impl TwoLevelFactor {
    pub fn new(p: usize, q: usize, block: CMatrix) -> Result<Self> {
        if p == q {
            return Err(SynthError::SameLevels(p));
        }
        require_2x2_unitary(&block)?;
        if p < q {
            Ok(TwoLevelFactor { p, q, block })
        } else {
            let x = pauli_x();
            Ok(TwoLevelFactor { p: q, q: p, block: &(&x * &block) * &x })
        }
    }

    pub fn expand(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::identity(dim);
        let idx = [self.p, self.q];
        for (i, &r) in idx.iter().enumerate() {
            for (j, &cc) in idx.iter().enumerate() {
                m[(r, cc)] = self.block[(i, j)];
            }
        }
        m
    }

    pub fn is_trivial(&self, eps: f64) -> bool {
        self.block.approx_eq(&CMatrix::identity(2), eps)
    }
}

/// Product of expanded factors, first factor leftmost.
pub fn multiply_factors(factors: &[TwoLevelFactor], dim: usize) -> CMatrix {
    let mut m = CMatrix::identity(dim);
    for f in factors {
        // right-multiplication by a two-level matrix touches two columns
        for r in 0..dim {
            let (a, b) = (m[(r, f.p)], m[(r, f.q)]);
            m[(r, f.p)] = a * f.block[(0, 0)] + b * f.block[(1, 0)];
            m[(r, f.q)] = a * f.block[(0, 1)] + b * f.block[(1, 1)];
        }
    }
    m
}

const ELIM_EPS: f64 = 1e-14;

/// Factors `U = F_1 F_2 ... F_k` into two-level unitaries, `k <= N(N-1)/2`.
///
/// Row `N` is cleared right to left by column operations on `(j, N)`, then
/// the leading block is treated the same way. The remaining diagonal is
/// folded into the leftmost factor touching each level; levels no factor
/// touches are paired into diagonal factors.
pub fn two_level_factorize(u: &CMatrix) -> Result<Vec<TwoLevelFactor>> {
    let n = u.require_square()?;
    if n < 2 {
        return Err(SynthError::NotPowerOfTwo(n));
    }
    u.require_unitary(EPS_UNITARY)?;
    let mut w = u.clone();
    let mut applied: Vec<TwoLevelFactor> = Vec::new();
    for k in (1..n).rev() {
        for j in (0..k).rev() {
            let a = w[(k, j)];
            if a.norm() <= ELIM_EPS {
                continue;
            }
            let b = w[(k, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let block = CMatrix::from_rows(&[vec![b / r, a.conj() / r], vec![-a / r, b.conj() / r]]);
            for row in 0..n {
                let (x, y) = (w[(row, j)], w[(row, k)]);
                w[(row, j)] = x * block[(0, 0)] + y * block[(1, 0)];
                w[(row, k)] = x * block[(0, 1)] + y * block[(1, 1)];
            }
            w[(k, j)] = C64::default();
            applied.push(TwoLevelFactor { p: j, q: k, block });
        }
    }
    // U T_1 ... T_m = D, so U = D T_m^dag ... T_1^dag
    let mut factors: Vec<TwoLevelFactor> = applied
        .into_iter()
        .rev()
        .map(|t| TwoLevelFactor { p: t.p, q: t.q, block: t.block.adjoint() })
        .collect();
    let diag: Vec<C64> = (0..n).map(|i| w[(i, i)] / w[(i, i)].norm()).collect();
    let mut loose = Vec::new();
    for (i, &d) in diag.iter().enumerate() {
        if (d - cr(1.0)).norm() <= ELIM_EPS {
            continue;
        }
        match factors.iter_mut().find(|f| f.p == i || f.q == i) {
            Some(f) => {
                let row = if f.p == i { 0 } else { 1 };
                for col in 0..2 {
                    f.block[(row, col)] *= d;
                }
            }
            None => loose.push(i),
        }
    }
    let mut extra = Vec::new();
    for pair in loose.chunks(2) {
        let (p, q) = match pair {
            [p, q] => (*p, *q),
            [p] => (*p, if *p == 0 { 1 } else { 0 }),
            _ => unreachable!(),
        };
        let (dp, dq) = (diag[p], if pair.len() == 2 { diag[q] } else { cr(1.0) });
        let (lo, hi, dlo, dhi) = if p < q { (p, q, dp, dq) } else { (q, p, dq, dp) };
        extra.push(TwoLevelFactor { p: lo, q: hi, block: CMatrix::diagonal(&[dlo, dhi]) });
    }
    extra.extend(factors);
    Ok(extra)
}

// ---------------------------------------------------------------------------
// Gray-code routing

fn bit(index: usize, wire: usize, n: usize) -> bool {
    index >> (n - wire) & 1 == 1
}

fn differing_wires(a: usize, b: usize, n: usize) -> Vec<usize> {
    (1..=n).filter(|&w| bit(a, w, n) != bit(b, w, n)).collect()
}

/// Codes from `s` towards `t`, flipping differing bits from the most
/// significant wire down, ending at the first code one flip away from `t`.
pub fn gray_path(s: usize, t: usize, n: usize) -> Vec<usize> {
    let mut path = vec![s];
    let mut cur = s;
    let diffs = differing_wires(s, t, n);
    for &w in diffs.iter().take(diffs.len().saturating_sub(1)) {
        cur ^= 1 << (n - w);
        path.push(cur);
    }
    path
}

fn conditioned_pattern(code: usize, skip: usize, n: usize, target: usize) -> Result<ControlPattern> {
    let controls: Vec<usize> = (1..=n).filter(|&w| w != skip).collect();
    let conditions = controls.iter().map(|&w| bit(code, w, n)).collect();
    Ok(ControlPattern::new(controls, conditions, vec![target])?)
}

/// Circuit for a two-level factor on `n` qubits using the canonical path.
pub fn gray_route(f: &TwoLevelFactor, n: usize) -> Result<Circuit> {
    gray_route_with_path(f, n, &gray_path(f.p, f.q, n))
}

/// Circuit for a two-level factor along a caller-chosen path
/// `s = g_0, g_1, ..., g_m` where consecutive codes differ in one bit and
/// `g_m` differs from `t` in one bit.
pub fn gray_route_with_path(f: &TwoLevelFactor, n: usize, path: &[usize]) -> Result<Circuit> {
    let dim = 1usize << n;
    let (s, t) = (f.p, f.q);
    if f.q >= dim {
        return Err(LinalgError::IndexOutOfRange { index: f.q, dim }.into());
    }
    if path.first() != Some(&s) {
        return Err(SynthError::BadPath(format!("path must start at {s}")));
    }
    for pair in path.windows(2) {
        if differing_wires(pair[0], pair[1], n).len() != 1 {
            return Err(SynthError::BadPath(format!("{} and {} differ in more than one bit", pair[0], pair[1])));
        }
    }
    if path.contains(&t) {
        return Err(SynthError::BadPath("path visits the target level".into()));
    }
    let last = *path.last().expect("non-empty");
    let final_diff = differing_wires(last, t, n);
    if final_diff.len() != 1 {
        return Err(SynthError::BadPath(format!("{last} is not adjacent to {t}")));
    }
    let mut circ = Circuit::new(n)?;
    let mut swaps = Vec::new();
    for pair in path.windows(2) {
        let w = differing_wires(pair[0], pair[1], n)[0];
        let step = Step { gate: gates::pauli(Pauli::X), pattern: conditioned_pattern(pair[0], w, n, w)? };
        swaps.push(step);
    }
    for s in &swaps {
        circ.push_step(s.clone())?;
    }
    let w = final_diff[0];
    let x = pauli_x();
    let block = if bit(last, w, n) { &(&x * &f.block) * &x } else { f.block.clone() };
    circ.push(GateSpec::unitary(block)?, conditioned_pattern(t, w, n, w)?)?;
    for s in swaps.iter().rev() {
        circ.push_step(s.clone())?;
    }
    Ok(circ)
}

// ---------------------------------------------------------------------------
// Full compilation

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub factors: Vec<TwoLevelFactor>,
    /// Gray-routed circuit with generalized controlled gates.
    pub routed: Circuit,
    /// Single-qubit + CNOT circuit.
    pub circuit: Circuit,
    pub gate_count: usize,
    pub cnot_count: usize,
    pub reconstruction_error: f64,
}

/// Two-level factorization, Gray routing, lowering and peephole merging.
pub fn compile(u: &CMatrix) -> Result<SynthesisResult> {
    let dim = u.require_square()?;
    if dim < 2 || !dim.is_power_of_two() {
        return Err(SynthError::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    let factors = two_level_factorize(u)?;
    let mut routed = Circuit::new(n)?;
    for f in factors.iter().rev() {
        routed.append(&gray_route(f, n)?)?;
    }
    let circuit = peephole(&lower(&routed)?);
    let reconstruction_error = error_metric(u, &circuit.to_unitary())?;
    Ok(SynthesisResult {
        gate_count: circuit.len(),
        cnot_count: circuit.cnot_count(),
        factors,
        routed,
        circuit,
        reconstruction_error,
    })
}

/// `E(U, V) = max_psi |(U - V) psi|`, the largest singular value of `U - V`.
pub fn error_metric(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.rows() != v.rows() || u.cols() != v.cols() {
        return Err(LinalgError::DimensionMismatch { expected: u.rows(), found: v.rows() }.into());
    }
    Ok(spectral_norm(&(u - v)))
}

/// `min_phi E(U, e^{i phi} V)` for 2x2 unitaries. With `V^dag U` having
/// eigenphases `Delta` apart, the minimum is `2 sin(Delta / 4)`.
pub fn phase_invariant_error(u: &CMatrix, v: &CMatrix) -> f64 {
    let w = &v.adjoint() * u;
    let s = principal_sqrt(w.det2());
    let (a, b) = (w[(0, 0)] / s, w[(1, 0)] / s);
    let omega = (b.norm_sqr() + a.im * a.im).sqrt().atan2(a.re);
    let delta = (2.0 * omega).min(2.0 * PI - 2.0 * omega);
    2.0 * (delta / 4.0).sin()
}

// ---------------------------------------------------------------------------
// Primitivity

/// Classification of a two-qubit gate.
#[derive(Clone, Debug)]
pub enum Primitivity {
    /// `V = S (x) T`.
    Product { s: CMatrix, t: CMatrix },
    /// `V = (S (x) T) SWAP`.
    SwapProduct { s: CMatrix, t: CMatrix },
    Imprimitive,
}

impl Primitivity {
    pub fn is_primitive(&self) -> bool {
        !matches!(self, Primitivity::Imprimitive)
    }
}

/// Splits a 4x4 matrix as `S (x) T` when its rearrangement
/// `M[(i1 j1), (i2 j2)] = V[(i1 i2), (j1 j2)]` has rank one within `eps`.
pub fn tensor_factors(v: &CMatrix, eps: f64) -> Option<(CMatrix, CMatrix)> {
    let mut m = CMatrix::zeros(4, 4);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    m[(2 * i1 + j1, 2 * i2 + j2)] = v[(2 * i1 + i2, 2 * j1 + j2)];
                }
            }
        }
    }
    let (mut a, mut b) = (0, 0);
    for i in 0..4 {
        for j in 0..4 {
            if m[(i, j)].norm() > m[(a, b)].norm() {
                (a, b) = (i, j);
            }
        }
    }
    let pivot = m[(a, b)];
    if pivot.norm() == 0.0 {
        return None;
    }
    for i in 0..4 {
        for j in 0..4 {
            if (m[(i, j)] - m[(i, b)] * m[(a, j)] / pivot).norm() > eps {
                return None;
            }
        }
    }
    let mut s = CMatrix::zeros(2, 2);
    let mut t = CMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            s[(i, j)] = m[(2 * i + j, b)];
            t[(i, j)] = m[(a, 2 * i + j)] / pivot;
        }
    }
    // rescale so both factors are unitary
    let k = (s[(0, 0)].norm_sqr() + s[(1, 0)].norm_sqr()).sqrt();
    Some((s.scale(cr(1.0 / k)), t.scale(cr(k))))
}

pub fn classify_primitive(v: &CMatrix, eps: f64) -> Result<Primitivity> {
    if v.rows() != 4 || v.cols() != 4 {
        return Err(SynthError::Shape { expected: 4, rows: v.rows(), cols: v.cols() });
    }
    v.require_unitary(EPS_UNITARY)?;
    if let Some((s, t)) = tensor_factors(v, eps) {
        return Ok(Primitivity::Product { s, t });
    }
    let swapped = v * gates::swap().matrix();
    if let Some((s, t)) = tensor_factors(&swapped, eps) {
        return Ok(Primitivity::SwapProduct { s, t });
    }
    Ok(Primitivity::Imprimitive)
}

pub fn is_primitive(v: &CMatrix, eps: f64) -> Result<bool> {
    Ok(classify_primitive(v, eps)?.is_primitive())
}

/// A product input whose image under a gate is entangled.
#[derive(Clone, Debug)]
pub struct EntanglingWitness {
    pub first: CVector,
    pub second: CVector,
    pub image: CVector,
    /// `2 |psi_00 psi_11 - psi_01 psi_10|` of the image.
    pub concurrence: f64,
}

fn concurrence(psi: &CVector) -> f64 {
    2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm()
}

/// Searches the six cardinal Bloch states on each qubit, then `samples`
/// random product states, for the input whose image is most entangled.
/// Returns `None` if no image is entangled (as for primitive gates).
pub fn entangling_witness<R: Rng + ?Sized>(v: &CMatrix, samples: usize, rng: &mut R) -> Option<EntanglingWitness> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cardinal: Vec<CVector> = [
        [cr(1.0), cr(0.0)],
        [cr(0.0), cr(1.0)],
        [cr(h), cr(h)],
        [cr(h), cr(-h)],
        [cr(h), c(0.0, h)],
        [cr(h), c(0.0, -h)],
    ]
    .iter()
    .map(|e| CVector::new(e.to_vec()).expect("finite"))
    .collect();
    let mut candidates: Vec<(CVector, CVector)> = Vec::new();
    for a in &cardinal {
        for b in &cardinal {
            candidates.push((a.clone(), b.clone()));
        }
    }
    for _ in 0..samples {
        candidates.push((random_state(2, rng), random_state(2, rng)));
    }
    let mut best: Option<EntanglingWitness> = None;
    for (a, b) in candidates {
        let image = v.apply(&tensor_vec(&a, &b)).ok()?;
        let conc = concurrence(&image);
        if best.as_ref().is_none_or(|w| conc > w.concurrence) {
            best = Some(EntanglingWitness { first: a, second: b, image, concurrence: conc });
        }
    }
    best.filter(|w| {
        QuantumRegister::normalize(w.image.clone())
            .map(|q| !is_decomposable(&q, 1e-8).is_product())
            .unwrap_or(false)
    })
}

// ---------------------------------------------------------------------------
// Discrete-set approximation

pub const MAX_WORD_LEN: usize = 14;

/// `H`, `S` and `T`.
pub fn standard_set() -> Vec<GateSpec> {
    vec![gates::hadamard(), gates::phase_s(), gates::t_gate()]
}

/// The set plus each adjoint whose matrix is not already present, sorted by
/// name.
pub fn with_adjoints(set: &[GateSpec]) -> Vec<GateSpec> {
    let mut out: Vec<GateSpec> = set.to_vec();
    for g in set {
        let adj = g.adjoint();
        if !out.iter().any(|h| h.matrix().approx_eq(adj.matrix(), 1e-14)) {
            out.push(adj);
        }
    }
    out.sort_by(|a, b| a.name().cmp(b.name()));
    out
}

/// Key of a 2x2 unitary up to global phase: the first column of its SU(2)
/// representative with the sign fixed, rounded to 1e-9.
fn phase_key(m: &CMatrix) -> [i64; 4] {
    let s = principal_sqrt(m.det2());
    let (a, b) = (m[(0, 0)] / s, m[(1, 0)] / s);
    let mut xs = [a.re, a.im, b.re, b.im];
    if let Some(&first) = xs.iter().find(|x| x.abs() > 1e-7) {
        if first < 0.0 {
            xs.iter_mut().for_each(|x| *x = -*x);
        }
    }
    xs.map(|x| (x * 1e9).round() as i64)
}

/// Every distinct (up to phase) product of at most `max_len` generators,
/// each stored with its shortest, lexicographically first word.
#[derive(Clone, Debug)]
pub struct ApproxTable {
    generators: Vec<GateSpec>,
    max_len: usize,
    words: Vec<Vec<u8>>,
    matrices: Vec<CMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxResult {
    /// Gate names; the word `g1 g2 ...` denotes the product `g1 g2 ...`.
    pub word: Vec<String>,
    pub error: f64,
    pub matrix: CMatrix,
}

impl ApproxResult {
    pub fn word_string(&self) -> String {
        self.word.concat()
    }
}

impl ApproxTable {
    /// Breadth-first enumeration. `generators` are used as given; see
    /// [`with_adjoints`] to close the set under inversion.
    pub fn build(generators: &[GateSpec], max_len: usize) -> Result<Self> {
        if generators.is_empty() {
            return Err(SynthError::EmptyGateSet);
        }
        if max_len > MAX_WORD_LEN {
            return Err(SynthError::WordTooLong(max_len));
        }
        for g in generators {
            require_2x2_unitary(g.matrix())?;
        }
        let mut seen: HashMap<[i64; 4], ()> = HashMap::new();
        let id = CMatrix::identity(2);
        seen.insert(phase_key(&id), ());
        let mut words: Vec<Vec<u8>> = vec![vec![]];
        let mut matrices = vec![id];
        let mut layer = 0..1;
        for _ in 0..max_len {
            let start = words.len();
            for idx in layer.clone() {
                for (gi, g) in generators.iter().enumerate() {
                    let m = &matrices[idx] * g.matrix();
                    let key = phase_key(&m);
                    if seen.insert(key, ()).is_none() {
                        let mut w = words[idx].clone();
                        w.push(gi as u8);
                        words.push(w);
                        matrices.push(m);
                    }
                }
            }
            layer = start..words.len();
            if layer.is_empty() {
                break;
            }
        }
        Ok(ApproxTable { generators: generators.to_vec(), max_len, words, matrices })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Best word of length at most `max_len` (capped at the table's own).
    pub fn best(&self, target: &CMatrix, max_len: usize) -> Result<ApproxResult> {
        require_2x2_unitary(target)?;
        let mut best: Option<(f64, usize)> = None;
        for (i, (w, m)) in self.words.iter().zip(&self.matrices).enumerate() {
            if w.len() > max_len {
                break;
            }
            let e = phase_invariant_error(target, m);
            // entries are ordered by length then word, so strict improvement
            // keeps the shortest, lexicographically first minimizer
            if best.is_none_or(|(be, _)| e < be - 1e-15) {
                best = Some((e, i));
            }
        }
        let (error, i) = best.expect("table contains the empty word");
        Ok(ApproxResult {
            word: self.words[i].iter().map(|&g| self.generators[g as usize].name().to_string()).collect(),
            error,
            matrix: self.matrices[i].clone(),
        })
    }
}

/// Best word over `gate_set` (plus adjoints) of length at most `max_len`,
/// compared up to global phase.
pub fn approx_search(target: &CMatrix, gate_set: &[GateSpec], max_len: usize) -> Result<ApproxResult> {
    if gate_set.is_empty() {
        return Err(SynthError::EmptyGateSet);
    }
    ApproxTable::build(&with_adjoints(gate_set), max_len)?.best(target, max_len)
}
