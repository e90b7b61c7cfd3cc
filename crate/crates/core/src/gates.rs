//! Gate constructors, controlled gates and placement of small gates on an
//! n-wire register.
//!
//! Wires are 1-based and wire 1 is the most significant bit of the basis
//! index. A k-qubit gate placed on targets `t1..tk` sees `t1` as the most
//! significant bit of its own 2^k-dimensional index.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use thiserror::Error;

use crate::linalg::{c, cis, cr, CMatrix, LinalgError, C64, EPS_UNITARY};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("wire {0} is used more than once")]
    WireCollision(usize),
    #[error("wire {wire} out of range 1..={n_wires}")]
    WireOutOfRange { wire: usize, n_wires: usize },
    #[error("gate acts on {expected} qubits but {found} targets were given")]
    ArityMismatch { expected: usize, found: usize },
    #[error("{controls} controls but {conditions} condition bits")]
    ConditionCount { controls: usize, conditions: usize },
    #[error("rotation axis has norm {0}, expected 1")]
    NonUnitAxis(f64),
    #[error("gate matrix must be 2^k x 2^k with k >= 1, found {0}x{1}")]
    BadGateShape(usize, usize),
    #[error("a gate needs at least one target wire")]
    NoTargets,
}

pub type Result<T, E = GateError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Plus,
    Minus,
}

/// A named unitary with its real parameters (radians).
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    name: String,
    matrix: CMatrix,
    params: Vec<f64>,
}

impl GateSpec {
    /// An arbitrary unitary, named `U`.
    pub fn unitary(matrix: CMatrix) -> Result<Self> {
        Self::named("U", matrix, vec![])
    }

    /// A named unitary of dimension 2^k, k >= 1.
    pub fn named(name: impl Into<String>, matrix: CMatrix, params: Vec<f64>) -> Result<Self> {
        let (r, cl) = (matrix.rows(), matrix.cols());
        if r != cl || r < 2 || !r.is_power_of_two() {
            return Err(GateError::BadGateShape(r, cl));
        }
        matrix.require_unitary(EPS_UNITARY)?;
        Ok(GateSpec { name: name.into(), matrix, params })
    }

    fn fixed(name: &str, matrix: CMatrix, params: Vec<f64>) -> Self {
        GateSpec { name: name.to_string(), matrix, params }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.matrix.rows().trailing_zeros() as usize
    }

    /// The inverse gate, keeping symbolic names where one exists.
    pub fn adjoint(&self) -> GateSpec {
        let p = |k: usize| self.params.get(k).copied().unwrap_or(0.0);
        match self.name.as_str() {
            "X" | "Y" | "Z" | "H" | "SWAP" | "I" | "CNOT" | "TOFFOLI" => self.clone(),
            "S" => GateSpec::fixed("SDG", self.matrix.adjoint(), vec![]),
            "SDG" => phase_s(),
            "T" => GateSpec::fixed("TDG", self.matrix.adjoint(), vec![]),
            "TDG" => t_gate(),
            "RX" => rotation(Axis::X, -p(0)),
            "RY" => rotation(Axis::Y, -p(0)),
            "RZ" => rotation(Axis::Z, -p(0)),
            "P" => phase_p(-p(0)),
            "E" => phase_e(-p(0)),
            _ => GateSpec::fixed("U", self.matrix.adjoint(), vec![]),
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        self.dim() == 2
    }
}

fn m2(a: C64, b: C64, cc: C64, d: C64) -> CMatrix {
    CMatrix::from_rows(&[vec![a, b], vec![cc, d]])
}

pub fn identity_gate() -> GateSpec {
    GateSpec::fixed("I", CMatrix::identity(2), vec![])
}

pub fn pauli(which: Pauli) -> GateSpec {
    let (o, l, i) = (cr(0.0), cr(1.0), c(0.0, 1.0));
    match which {
        Pauli::X => GateSpec::fixed("X", m2(o, l, l, o), vec![]),
        Pauli::Y => GateSpec::fixed("Y", m2(o, -i, i, o), vec![]),
        Pauli::Z => GateSpec::fixed("Z", m2(l, o, o, -l), vec![]),
    }
}

pub fn hadamard() -> GateSpec {
    let h = cr(FRAC_1_SQRT_2);
    GateSpec::fixed("H", m2(h, h, h, -h), vec![])
}

pub fn phase_s() -> GateSpec {
    GateSpec::fixed("S", CMatrix::diagonal(&[cr(1.0), c(0.0, 1.0)]), vec![])
}

pub fn t_gate() -> GateSpec {
    GateSpec::fixed("T", CMatrix::diagonal(&[cr(1.0), cis(FRAC_PI_4)]), vec![])
}

/// `R_a(theta) = exp(-i theta sigma_a / 2)` in closed form.
pub fn rotation(axis: Axis, theta: f64) -> GateSpec {
    let (s, co) = (theta / 2.0).sin_cos();
    let (matrix, name) = match axis {
        Axis::X => (m2(cr(co), c(0.0, -s), c(0.0, -s), cr(co)), "RX"),
        Axis::Y => (m2(cr(co), cr(-s), cr(s), cr(co)), "RY"),
        Axis::Z => (CMatrix::diagonal(&[cis(-theta / 2.0), cis(theta / 2.0)]), "RZ"),
    };
    GateSpec::fixed(name, matrix, vec![theta])
}

/// Rotation by `alpha` about the unit axis `n`:
/// `cos(alpha/2) I - i sin(alpha/2) (nx X + ny Y + nz Z)`.
pub fn rotation_general(n: [f64; 3], alpha: f64) -> Result<GateSpec> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > EPS_UNITARY {
        return Err(GateError::NonUnitAxis(norm));
    }
    let (s, co) = (alpha / 2.0).sin_cos();
    let mi = c(0.0, -s);
    let matrix = m2(
        cr(co) + mi * n[2],
        mi * c(n[0], -n[1]),
        mi * c(n[0], n[1]),
        cr(co) - mi * n[2],
    );
    Ok(GateSpec::fixed("U", matrix, vec![n[0], n[1], n[2], alpha]))
}

/// Global phase `P(alpha) = e^{i alpha} I`.
pub fn phase_p(alpha: f64) -> GateSpec {
    GateSpec::fixed("P", CMatrix::diagonal(&[cis(alpha), cis(alpha)]), vec![alpha])
}

/// Relative phase `E(alpha) = diag(1, e^{i alpha}) = P(alpha/2) R_z(alpha)`.
pub fn phase_e(alpha: f64) -> GateSpec {
    GateSpec::fixed("E", CMatrix::diagonal(&[cr(1.0), cis(alpha)]), vec![alpha])
}

pub fn swap() -> GateSpec {
    GateSpec::fixed(
        "SWAP",
        CMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
        vec![],
    )
}

/// `Lambda_m(U)`: identity except the trailing block, which is `U`.
pub fn controlled(u: &GateSpec, m: usize) -> GateSpec {
    let k = u.dim();
    let dim = k << m;
    let mut matrix = CMatrix::identity(dim);
    let off = dim - k;
    for i in 0..k {
        for j in 0..k {
            matrix[(off + i, off + j)] = u.matrix[(i, j)];
        }
    }
    let name = match (u.name.as_str(), m) {
        (_, 0) => u.name.clone(),
        ("X", 1) => "CNOT".to_string(),
        ("X", 2) => "TOFFOLI".to_string(),
        _ => "U".to_string(),
    };
    GateSpec { name, matrix, params: u.params.clone() }
}

pub fn cnot() -> GateSpec {
    controlled(&pauli(Pauli::X), 1)
}

pub fn toffoli() -> GateSpec {
    controlled(&pauli(Pauli::X), 2)
}

/// Deutsch gate `Lambda_2(i R_x(pi alpha))`. Universality needs `alpha`
/// irrational, which no floating-point value is; any real is accepted.
pub fn deutsch_gate(alpha: f64) -> GateSpec {
    let u = rotation(Axis::X, PI * alpha).matrix.scale(c(0.0, 1.0));
    let mut g = controlled(&GateSpec::fixed("U", u, vec![]), 2);
    g.params = vec![alpha];
    g
}

/// Barenco's two-qubit gate `A(phi, alpha, theta)`.
pub fn barenco_gate(phi: f64, alpha: f64, theta: f64) -> GateSpec {
    let (s, co) = theta.sin_cos();
    let mi = c(0.0, -1.0);
    let block = m2(
        cis(alpha) * co,
        mi * cis(alpha - phi) * s,
        mi * cis(alpha + phi) * s,
        cis(alpha) * co,
    );
    let mut g = controlled(&GateSpec::fixed("U", block, vec![]), 1);
    g.params = vec![phi, alpha, theta];
    g
}

/// Spin-1/2 raising and lowering operators. These are not unitary.
pub fn spin_ladder(which: Ladder) -> CMatrix {
    match which {
        Ladder::Plus => CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
        Ladder::Minus => CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]),
    }
}

/// Looks up a parameterless gate or a one-parameter rotation/phase by name.
pub fn by_name(name: &str, params: &[f64]) -> Option<GateSpec> {
    let one = || params.first().copied();
    let g = match (name, params.len()) {
        ("I", 0) => identity_gate(),
        ("X", 0) => pauli(Pauli::X),
        ("Y", 0) => pauli(Pauli::Y),
        ("Z", 0) => pauli(Pauli::Z),
        ("H", 0) => hadamard(),
        ("S", 0) => phase_s(),
        ("T", 0) => t_gate(),
        ("SDG", 0) => phase_s().adjoint(),
        ("TDG", 0) => t_gate().adjoint(),
        ("SWAP", 0) => swap(),
        ("CNOT", 0) => cnot(),
        ("TOFFOLI", 0) => toffoli(),
        ("RX", 1) => rotation(Axis::X, one()?),
        ("RY", 1) => rotation(Axis::Y, one()?),
        ("RZ", 1) => rotation(Axis::Z, one()?),
        ("P", 1) => phase_p(one()?),
        ("E", 1) => phase_e(one()?),
        _ => return None,
    };
    Some(g)
}

// ---------------------------------------------------------------------------
// Placement

/// Control wires with their required values, plus the target wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlPattern {
    controls: Vec<usize>,
    conditions: Vec<bool>,
    targets: Vec<usize>,
}

impl ControlPattern {
    pub fn new(controls: Vec<usize>, conditions: Vec<bool>, targets: Vec<usize>) -> Result<Self> {
        if controls.len() != conditions.len() {
            return Err(GateError::ConditionCount { controls: controls.len(), conditions: conditions.len() });
        }
        if targets.is_empty() {
            return Err(GateError::NoTargets);
        }
        let mut seen = std::collections::BTreeSet::new();
        for &w in controls.iter().chain(&targets) {
            if w == 0 {
                return Err(GateError::WireOutOfRange { wire: 0, n_wires: 0 });
            }
            if !seen.insert(w) {
                return Err(GateError::WireCollision(w));
            }
        }
        Ok(ControlPattern { controls, conditions, targets })
    }

    /// Uncontrolled gate on `targets`.
    pub fn on(targets: &[usize]) -> Result<Self> {
        Self::new(vec![], vec![], targets.to_vec())
    }

    /// Gate on `targets` conditioned on every control being 1.
    pub fn controlled(controls: &[usize], targets: &[usize]) -> Result<Self> {
        Self::new(controls.to_vec(), vec![true; controls.len()], targets.to_vec())
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn conditions(&self) -> &[bool] {
        &self.conditions
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Every wire the pattern touches.
    pub fn wires(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(&self.targets).copied()
    }

    pub fn check(&self, gate: &GateSpec, n_wires: usize) -> Result<()> {
        if gate.n_qubits() != self.targets.len() {
            return Err(GateError::ArityMismatch { expected: gate.n_qubits(), found: self.targets.len() });
        }
        if let Some(wire) = self.wires().find(|&w| w > n_wires) {
            return Err(GateError::WireOutOfRange { wire, n_wires });
        }
        Ok(())
    }

    /// Bit masks over an n-wire index: (control mask, required control
    /// bits, per-target masks with the first target first).
    pub(crate) fn masks(&self, n_wires: usize) -> (usize, usize, Vec<usize>) {
        let bit = |w: usize| 1usize << (n_wires - w);
        let mut cmask = 0;
        let mut cval = 0;
        for (&w, &cond) in self.controls.iter().zip(&self.conditions) {
            cmask |= bit(w);
            if cond {
                cval |= bit(w);
            }
        }
        (cmask, cval, self.targets.iter().map(|&w| bit(w)).collect())
    }
}

/// Scatters local index `r` (first target most significant) over the
/// target masks.
fn spread(r: usize, tmasks: &[usize]) -> usize {
    let k = tmasks.len();
    tmasks.iter().enumerate().fold(0, |acc, (pos, &m)| if r >> (k - 1 - pos) & 1 == 1 { acc | m } else { acc })
}

/// Full 2^n x 2^n matrix of `gate` acting under `pattern`.
pub fn place(gate: &GateSpec, pattern: &ControlPattern, n_wires: usize) -> Result<CMatrix> {
    pattern.check(gate, n_wires)?;
    let dim = 1usize << n_wires;
    let (cmask, cval, tmasks) = pattern.masks(n_wires);
    let tall: usize = tmasks.iter().sum();
    let k = gate.dim();
    let offsets: Vec<usize> = (0..k).map(|r| spread(r, &tmasks)).collect();
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        if col & cmask != cval {
            m[(col, col)] = cr(1.0);
            continue;
        }
        let base = col & !tall;
        let local = offsets.iter().position(|&o| o == col & tall).expect("target bits");
        for (r, &o) in offsets.iter().enumerate() {
            m[(base | o, col)] = gate.matrix[(r, local)];
        }
    }
    Ok(m)
}

/// Applies `gate` under `pattern` to a state vector in place, touching only
/// the amplitudes selected by the control condition.
pub fn apply_placed(gate: &GateSpec, pattern: &ControlPattern, n_wires: usize, amps: &mut [C64]) -> Result<()> {
    pattern.check(gate, n_wires)?;
    let dim = 1usize << n_wires;
    if amps.len() != dim {
        return Err(LinalgError::DimensionMismatch { expected: dim, found: amps.len() }.into());
    }
    let (cmask, cval, tmasks) = pattern.masks(n_wires);
    let tall: usize = tmasks.iter().sum();
    let k = gate.dim();
    let offsets: Vec<usize> = (0..k).map(|r| spread(r, &tmasks)).collect();
    let g = gate.matrix.data();
    let mut local = vec![C64::default(); k];
    for base in 0..dim {
        if base & tall != 0 || base & cmask != cval {
            continue;
        }
        for (slot, &o) in local.iter_mut().zip(&offsets) {
            *slot = amps[base | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            let row = &g[r * k..(r + 1) * k];
            amps[base | o] = row.iter().zip(&local).map(|(a, b)| a * b).sum();
        }
    }
    Ok(())
}
