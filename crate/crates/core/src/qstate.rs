//! n-qubit register states, Bloch coordinates, decomposability testing and
//! the three measurement postulates (projective, general, POVM).
//!
//! Basis index `i` encodes the bit string `x1 x2 ... xn` as
//! `x1 2^(n-1) + ... + xn`: qubit 1 is the most significant bit.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::linalg::{
    c, cr, hermitian_eigenvalues, inner, tensor_vec, CMatrix, CVector, LinalgError, Projector, C64,
    EPS_UNITARY,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QStateError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("dimension {dim} is not 2^{n_qubits}")]
    BadDimension { dim: usize, n_qubits: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("expected a single qubit, found {0} qubits")]
    NotSingleQubit(usize),
    #[error("measurement operators are incomplete (deviation {deviation:e})")]
    Incomplete { deviation: f64 },
    #[error("projectors {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("effect {index} is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { index: usize, eigenvalue: f64 },
    #[error("eigenvalue and projector counts differ ({eigenvalues} vs {projectors})")]
    LabelCount { eigenvalues: usize, projectors: usize },
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("state dump line {line}: {message}")]
    DumpParse { line: usize, message: String },
}

pub type Result<T, E = QStateError> = std::result::Result<T, E>;

/// Formats `index` as an `n`-character bit string, qubit 1 first.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|w| if index >> (n_qubits - 1 - w) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a bit string (qubit 1 first) into a basis index.
pub fn parse_bitstring(bits: &str) -> Option<usize> {
    if bits.is_empty() || bits.len() > 63 {
        return None;
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QStateError::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A normalized n-qubit state over the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumRegister {
    n_qubits: usize,
    amplitudes: CVector,
}

impl QuantumRegister {
    /// Wraps amplitudes after checking dimension and normalization.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.dim())?;
        if n_qubits == 0 {
            return Err(QStateError::BadDimension { dim: 1, n_qubits: 0 });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > EPS_UNITARY {
            return Err(QStateError::NotNormalized { norm });
        }
        Ok(QuantumRegister { n_qubits, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalize(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        let normed = amplitudes.normalized().ok_or(QStateError::NotNormalized { norm })?;
        Self::new(normed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    /// `|alpha_i|^2` for every basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.entries().iter().map(|z| z.norm_sqr()).collect()
    }

    /// `|self> (x) |other>`, self on the more significant qubits.
    pub fn tensor(&self, other: &QuantumRegister) -> QuantumRegister {
        QuantumRegister {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes: tensor_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// Probability of reading 0 and 1 on `qubit` (1-based).
    pub fn marginal(&self, qubit: usize) -> [f64; 2] {
        assert!(qubit >= 1 && qubit <= self.n_qubits, "qubit out of range");
        let shift = self.n_qubits - qubit;
        let mut p = [0.0; 2];
        for (i, z) in self.amplitudes.entries().iter().enumerate() {
            p[(i >> shift) & 1] += z.norm_sqr();
        }
        p
    }

    /// Up-to-global-phase fidelity `|<self|other>|`.
    pub fn overlap(&self, other: &QuantumRegister) -> f64 {
        inner(&self.amplitudes, &other.amplitudes).map(|z| z.norm()).unwrap_or(0.0)
    }

    /// Text dump: one `index bitstring re im` line per nonzero amplitude.
    pub fn dump(&self) -> String {
        dump_amplitudes(&self.amplitudes, self.n_qubits)
    }

    /// Parses the dump format back into a register of `n_qubits` qubits.
    /// Missing indices are zero; the bit string must agree with the index.
    pub fn parse_dump(text: &str, n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut amps = vec![C64::default(); dim];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| QStateError::DumpParse { line: lineno + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", fields.len())));
            }
            let index: usize = fields[0].parse().map_err(|_| err(format!("bad index '{}'", fields[0])))?;
            if index >= dim {
                return Err(err(format!("index {index} out of range")));
            }
            if fields[1] != bitstring(index, n_qubits) {
                return Err(err(format!("bit string '{}' does not match index {index}", fields[1])));
            }
            let re: f64 = fields[2].parse().map_err(|_| err(format!("bad real part '{}'", fields[2])))?;
            let im: f64 = fields[3].parse().map_err(|_| err(format!("bad imaginary part '{}'", fields[3])))?;
            amps[index] = c(re, im);
        }
        Self::new(CVector::new(amps)?)
    }
}

pub(crate) fn dump_amplitudes(v: &CVector, n_qubits: usize) -> String {
    let mut out = String::new();
    for (i, z) in v.entries().iter().enumerate() {
        if z.norm() > 0.0 {
            let _ = writeln!(out, "{i} {} {} {}", bitstring(i, n_qubits), z.re, z.im);
        }
    }
    out
}

/// Computational basis state `|k>_n`.
pub fn basis_state(n_qubits: usize, k: usize) -> Result<QuantumRegister> {
    if n_qubits == 0 || n_qubits > 30 {
        return Err(QStateError::BadDimension { dim: 0, n_qubits });
    }
    let dim = 1usize << n_qubits;
    if k >= dim {
        return Err(QStateError::IndexOutOfRange { index: k, n_qubits });
    }
    Ok(QuantumRegister { n_qubits, amplitudes: CVector::basis(dim, k)? })
}

// ---------------------------------------------------------------------------
// Bloch sphere

/// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`, with the dropped global
/// phase `gamma` kept for exact reconstruction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl BlochPoint {
    /// The state with the global phase dropped.
    pub fn to_state(&self) -> QuantumRegister {
        let amps = vec![cr((self.theta / 2.0).cos()), C64::from_polar((self.theta / 2.0).sin(), self.phi)];
        QuantumRegister { n_qubits: 1, amplitudes: CVector::new(amps).expect("finite angles") }
    }

    /// Cartesian point on the unit sphere.
    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Bloch angles of a single qubit. At either pole `phi` is set to 0.
pub fn bloch(q: &QuantumRegister) -> Result<BlochPoint> {
    if q.n_qubits != 1 {
        return Err(QStateError::NotSingleQubit(q.n_qubits));
    }
    let (a, b) = (q.amplitudes[0], q.amplitudes[1]);
    let theta = 2.0 * b.norm().atan2(a.norm());
    let half = theta / 2.0;
    if half.sin() < EPS_UNITARY {
        return Ok(BlochPoint { theta, phi: 0.0, gamma: a.arg() });
    }
    if half.cos() < EPS_UNITARY {
        return Ok(BlochPoint { theta, phi: 0.0, gamma: b.arg() });
    }
    let gamma = a.arg();
    let phi = (b.arg() - gamma).rem_euclid(2.0 * PI);
    // rem_euclid can return exactly 2 pi for tiny negative inputs.
    let phi = if phi >= 2.0 * PI { 0.0 } else { phi };
    Ok(BlochPoint { theta, phi, gamma })
}

// ---------------------------------------------------------------------------
// Decomposability

/// Outcome of the product-state test.
#[derive(Clone, Debug)]
pub enum Decomposability {
    /// Single-qubit factors, qubit 1 first, whose tensor product reproduces
    /// the input (the global phase sits in the first factor).
    Product(Vec<CVector>),
    /// The cut between `qubit` and the qubits after it has Schmidt rank 2.
    /// `block` is a 2x2 amplitude sub-block of that cut with nonzero
    /// determinant, taken from `columns` of the reshaped matrix.
    Entangled { qubit: usize, block: CMatrix, columns: (usize, usize) },
}

impl Decomposability {
    pub fn is_product(&self) -> bool {
        matches!(self, Decomposability::Product(_))
    }
}

/// Splits `psi` (dim 2m) across its leading qubit. Returns the leading
/// factor, the remainder and the second singular value of the 2 x m
/// reshape.
///
/// The singular values come from the Gram matrix `G = A A^dag` of the
/// reshape `A`. `det G` is evaluated as `|a|^2 |b_perp|^2`, where `a` is the
/// longer row and `b_perp` the other row's component orthogonal to it, which
/// avoids the cancellation of `G00 G11 - |G01|^2`.
fn split_leading(psi: &[C64]) -> (CVector, CVector, f64) {
    let half = psi.len() / 2;
    let rows = [&psi[..half], &psi[half..]];
    let norms = [
        rows[0].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        rows[1].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
    ];
    let (big, small) = if norms[0] >= norms[1] { (0, 1) } else { (1, 0) };
    let u: Vec<C64> = rows[big].iter().map(|z| z / norms[big]).collect();
    let proj: C64 = u.iter().zip(rows[small]).map(|(x, y)| x.conj() * y).sum();
    let perp_sq: f64 = u.iter().zip(rows[small]).map(|(x, y)| (y - proj * x).norm_sqr()).sum();
    let g00 = norms[0] * norms[0];
    let g11 = norms[1] * norms[1];
    let det = norms[big] * norms[big] * perp_sq;
    let tr = g00 + g11;
    let g01 = proj * norms[big];
    let lambda_max = tr / 2.0 + (((g00 - g11) / 2.0).powi(2) + g01.norm_sqr()).sqrt();
    let sigma2 = if lambda_max > 0.0 { (det / lambda_max).max(0.0).sqrt() } else { 0.0 };
    let mut lead = [C64::default(); 2];
    lead[big] = cr(norms[big]);
    lead[small] = proj;
    (
        CVector::new(lead.to_vec()).expect("finite"),
        CVector::new(u).expect("finite"),
        sigma2,
    )
}

fn rank_two_block(psi: &[C64]) -> (CMatrix, (usize, usize)) {
    let half = psi.len() / 2;
    let mut best = (0.0, (0, 0));
    for j in 0..half {
        for k in (j + 1)..half {
            let det = psi[j] * psi[half + k] - psi[k] * psi[half + j];
            if det.norm() > best.0 {
                best = (det.norm(), (j, k));
            }
        }
    }
    let (j, k) = best.1;
    let block = CMatrix::from_rows(&[vec![psi[j], psi[k]], vec![psi[half + j], psi[half + k]]]);
    (block, (j, k))
}

/// Tests whether `q` is a tensor product of single-qubit states.
///
/// Each cut (qubit k versus the remaining qubits of the already-split
/// remainder) must have its second singular value below `eps`.
pub fn is_decomposable(q: &QuantumRegister, eps: f64) -> Decomposability {
    let mut factors = Vec::with_capacity(q.n_qubits);
    let mut rest = q.amplitudes.clone();
    for qubit in 1..q.n_qubits {
        let (lead, remainder, sigma2) = split_leading(rest.entries());
        if sigma2 > eps {
            let (block, columns) = rank_two_block(rest.entries());
            return Decomposability::Entangled { qubit, block, columns };
        }
        factors.push(lead);
        rest = remainder;
    }
    factors.push(rest);
    Decomposability::Product(factors)
}

// ---------------------------------------------------------------------------
// Measurement

/// One branch of a measurement.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub index: usize,
    /// Eigenvalue label of a projective measurement.
    pub eigenvalue: Option<f64>,
    pub probability: f64,
    /// Normalized post-measurement state; absent when the probability is 0.
    pub post_state: Option<QuantumRegister>,
}

/// An observable `O = sum_i lambda_i P_i` given by its spectral projectors.
#[derive(Clone, Debug)]
pub struct ProjectiveMeasurement {
    eigenvalues: Vec<f64>,
    projectors: Vec<Projector>,
}

impl ProjectiveMeasurement {
    /// Checks completeness (`sum P_i = I`) and pairwise orthogonality.
    pub fn new(eigenvalues: Vec<f64>, projectors: Vec<Projector>) -> Result<Self> {
        if eigenvalues.len() != projectors.len() {
            return Err(QStateError::LabelCount { eigenvalues: eigenvalues.len(), projectors: projectors.len() });
        }
        let dim = projectors.first().ok_or(QStateError::Incomplete { deviation: 1.0 })?.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for p in &projectors {
            if p.dim() != dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, found: p.dim() }.into());
            }
            sum = &sum + p.matrix();
        }
        let deviation = sum.max_abs_diff(&CMatrix::identity(dim));
        if deviation > EPS_UNITARY {
            return Err(QStateError::Incomplete { deviation });
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                if (projectors[i].matrix() * projectors[j].matrix()).max_abs() > EPS_UNITARY {
                    return Err(QStateError::NotOrthogonal(i, j));
                }
            }
        }
        Ok(ProjectiveMeasurement { eigenvalues, projectors })
    }

    /// Measurement of all qubits in the computational basis; outcome `k` has
    /// eigenvalue `k`.
    pub fn computational(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let projectors = (0..dim).map(|k| Projector::from_subset(dim, [k]).expect("in range")).collect();
        ProjectiveMeasurement { eigenvalues: (0..dim).map(|k| k as f64).collect(), projectors }
    }

    /// Measurement of one qubit (1-based) in the Z basis, eigenvalues +1/-1.
    pub fn single_qubit_z(n_qubits: usize, qubit: usize) -> Self {
        let dim = 1usize << n_qubits;
        let shift = n_qubits - qubit;
        let zero = Projector::from_subset(dim, (0..dim).filter(|i| (i >> shift) & 1 == 0)).expect("in range");
        let one = Projector::from_subset(dim, (0..dim).filter(|i| (i >> shift) & 1 == 1)).expect("in range");
        ProjectiveMeasurement { eigenvalues: vec![1.0, -1.0], projectors: vec![zero, one] }
    }

    /// Rank-one projectors onto an orthonormal basis, labelled 0, 1, ...
    pub fn in_basis(basis: &[CVector]) -> Result<Self> {
        let projectors = basis
            .iter()
            .map(|v| Projector::onto_span(std::slice::from_ref(v)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new((0..basis.len()).map(|k| k as f64).collect(), projectors)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    /// The observable `sum_i lambda_i P_i`.
    pub fn observable(&self) -> CMatrix {
        let dim = self.projectors[0].dim();
        self.projectors
            .iter()
            .zip(&self.eigenvalues)
            .fold(CMatrix::zeros(dim, dim), |acc, (p, &l)| &acc + &p.matrix().scale(cr(l)))
    }
}

fn expectation(q: &QuantumRegister, m: &CMatrix) -> Result<C64> {
    let mv = m.apply(&q.amplitudes)?;
    Ok(inner(&q.amplitudes, &mv)?)
}

fn post_state(q: &QuantumRegister, m: &CMatrix, p: f64) -> Result<Option<QuantumRegister>> {
    if p <= 0.0 {
        return Ok(None);
    }
    let image = m.apply(&q.amplitudes)?.scale(cr(1.0 / p.sqrt()));
    Ok(Some(QuantumRegister { n_qubits: q.n_qubits, amplitudes: image }))
}

/// Projective measurement: `p(lambda_i) = <psi|P_i|psi>`, post-state
/// `P_i|psi> / sqrt(p)`.
pub fn measure_projective(q: &QuantumRegister, m: &ProjectiveMeasurement) -> Result<Vec<MeasurementOutcome>> {
    m.projectors
        .iter()
        .zip(&m.eigenvalues)
        .enumerate()
        .map(|(index, (p, &eigenvalue))| {
            let probability = expectation(q, p.matrix())?.re.max(0.0);
            Ok(MeasurementOutcome {
                index,
                eigenvalue: Some(eigenvalue),
                probability,
                post_state: post_state(q, p.matrix(), probability)?,
            })
        })
        .collect()
}

fn completeness_deviation<'a>(ops: impl Iterator<Item = &'a CMatrix>, dim: usize) -> f64 {
    let sum = ops.fold(CMatrix::zeros(dim, dim), |acc, m| &acc + m);
    sum.max_abs_diff(&CMatrix::identity(dim))
}

/// General measurement with operators `M_k`: `p(k) = <psi|M_k^dag M_k|psi>`,
/// post-state `M_k|psi> / sqrt(p(k))`. Requires `sum M_k^dag M_k = I`.
pub fn measure_general(q: &QuantumRegister, ops: &[CMatrix]) -> Result<Vec<MeasurementOutcome>> {
    let dim = q.dim();
    for m in ops {
        if m.rows() != dim || m.cols() != dim {
            return Err(LinalgError::DimensionMismatch { expected: dim, found: m.rows() }.into());
        }
    }
    let gram: Vec<CMatrix> = ops.iter().map(|m| &m.adjoint() * m).collect();
    let deviation = completeness_deviation(gram.iter(), dim);
    if ops.is_empty() || deviation > EPS_UNITARY {
        return Err(QStateError::Incomplete { deviation: if ops.is_empty() { 1.0 } else { deviation } });
    }
    ops.iter()
        .zip(&gram)
        .enumerate()
        .map(|(index, (m, g))| {
            let probability = expectation(q, g)?.re.max(0.0);
            Ok(MeasurementOutcome { index, eigenvalue: None, probability, post_state: post_state(q, m, probability)? })
        })
        .collect()
}

/// POVM with effects `E_k`: only the probabilities `<psi|E_k|psi>` are
/// defined, there is no post-measurement state.
pub fn measure_povm(q: &QuantumRegister, effects: &[CMatrix]) -> Result<Vec<f64>> {
    let dim = q.dim();
    for (index, e) in effects.iter().enumerate() {
        if e.rows() != dim || e.cols() != dim {
            return Err(LinalgError::DimensionMismatch { expected: dim, found: e.rows() }.into());
        }
        let vals = hermitian_eigenvalues(e)?;
        if let Some(&min) = vals.first() {
            if min < -EPS_UNITARY {
                return Err(QStateError::NotPositive { index, eigenvalue: min });
            }
        }
    }
    let deviation = completeness_deviation(effects.iter(), dim);
    if effects.is_empty() || deviation > EPS_UNITARY {
        return Err(QStateError::Incomplete { deviation: if effects.is_empty() { 1.0 } else { deviation } });
    }
    effects.iter().map(|e| Ok(expectation(q, e)?.re.max(0.0))).collect()
}

/// Draws an outcome index from `probabilities` by inverse-CDF sampling.
pub fn sample<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> Result<usize> {
    if probabilities.is_empty() {
        return Err(QStateError::InvalidDistribution("empty".into()));
    }
    if probabilities.iter().any(|p| !p.is_finite() || *p < -1e-12) {
        return Err(QStateError::InvalidDistribution("negative or non-finite weight".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(QStateError::InvalidDistribution(format!("weights sum to {total}")));
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last_nonzero = k;
        acc += p;
        if u < acc {
            return Ok(k);
        }
    }
    Ok(last_nonzero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_state, tensor_mat};
    use crate::rng::QRng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn reg(xs: &[C64]) -> QuantumRegister {
        QuantumRegister::new(CVector::new(xs.to_vec()).unwrap()).unwrap()
    }

    fn plus() -> QuantumRegister {
        reg(&[cr(FRAC_1_SQRT_2), cr(FRAC_1_SQRT_2)])
    }

    #[test]
    fn basis_state_examples() {
        let s = basis_state(4, 9).unwrap();
        assert_eq!(bitstring(9, 4), "1001");
        assert_eq!(s.amplitude(9), cr(1.0));
        let s = basis_state(3, 5).unwrap();
        let expect = CVector::from_real(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.amplitudes(), &expect);
        assert_eq!(basis_state(1, 0).unwrap().amplitudes(), &CVector::from_real(&[1.0, 0.0]).unwrap());
        assert!(matches!(basis_state(2, 4), Err(QStateError::IndexOutOfRange { .. })));
        assert_eq!(parse_bitstring("1001"), Some(9));
        assert_eq!(parse_bitstring("10a1"), None);
    }

    #[test]
    fn normalization_is_enforced() {
        let v = CVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(QuantumRegister::new(v.clone()), Err(QStateError::NotNormalized { .. })));
        assert!(QuantumRegister::normalize(v).is_ok());
        assert!(matches!(
            QuantumRegister::new(CVector::from_real(&[1.0, 0.0, 0.0]).unwrap()),
            Err(QStateError::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn bloch_examples() {
        let p0 = bloch(&basis_state(1, 0).unwrap()).unwrap();
        assert_eq!((p0.theta, p0.phi), (0.0, 0.0));
        assert_eq!(p0.cartesian()[2], 1.0);
        let p1 = bloch(&basis_state(1, 1).unwrap()).unwrap();
        assert!((p1.theta - PI).abs() < 1e-15 && p1.phi == 0.0);
        assert!((p1.cartesian()[2] + 1.0).abs() < 1e-15);
        let pp = bloch(&plus()).unwrap();
        assert!((pp.theta - PI / 2.0).abs() < 1e-15 && pp.phi.abs() < 1e-15);
        assert!(matches!(bloch(&basis_state(2, 0).unwrap()), Err(QStateError::NotSingleQubit(2))));
    }

    #[test]
    fn bloch_round_trip_on_grid() {
        for i in 1..20 {
            for j in 0..24 {
                let theta = PI * i as f64 / 20.0;
                let phi = 2.0 * PI * j as f64 / 24.0;
                let gamma = 0.37 * j as f64;
                let state = BlochPoint { theta, phi, gamma: 0.0 }.to_state();
                let shifted = QuantumRegister::new(state.amplitudes().scale(C64::from_polar(1.0, gamma))).unwrap();
                let back = bloch(&shifted).unwrap();
                assert!((back.theta - theta).abs() < 1e-12);
                let dphi = (back.phi - phi).rem_euclid(2.0 * PI);
                assert!(dphi < 1e-12 || 2.0 * PI - dphi < 1e-12, "phi {phi} -> {}", back.phi);
                assert!(back.to_state().overlap(&shifted) >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn decomposability_examples() {
        let bell = reg(&[cr(FRAC_1_SQRT_2), cr(0.0), cr(0.0), cr(FRAC_1_SQRT_2)]);
        match is_decomposable(&bell, 1e-10) {
            Decomposability::Entangled { qubit, block, .. } => {
                assert_eq!(qubit, 1);
                assert!(block.det2().norm() > 0.4);
            }
            other => panic!("bell state reported as {other:?}"),
        }
        let psi = reg(&[cr(0.0), cr(FRAC_1_SQRT_2), cr(FRAC_1_SQRT_2), cr(0.0)]);
        assert!(!is_decomposable(&psi, 1e-10).is_product());

        match is_decomposable(&basis_state(2, 1).unwrap(), 1e-10) {
            Decomposability::Product(f) => {
                assert!(f[0].approx_eq(&CVector::from_real(&[1.0, 0.0]).unwrap(), 1e-15));
                assert!(f[1].approx_eq(&CVector::from_real(&[0.0, 1.0]).unwrap(), 1e-15));
            }
            other => panic!("|01> reported as {other:?}"),
        }
    }

    #[test]
    fn random_products_decompose_and_reconstruct() {
        let mut rng = QRng::seeded(17);
        for n in 2..=5 {
            for _ in 0..20 {
                let singles: Vec<CVector> = (0..n).map(|_| random_state(2, &mut rng)).collect();
                let full = singles.iter().skip(1).fold(singles[0].clone(), |acc, v| tensor_vec(&acc, v));
                let q = QuantumRegister::new(full.clone()).unwrap();
                let Decomposability::Product(factors) = is_decomposable(&q, 1e-10) else {
                    panic!("product state not recognised");
                };
                let rec = factors.iter().skip(1).fold(factors[0].clone(), |acc, v| tensor_vec(&acc, v));
                assert!(rec.approx_eq(&full, 1e-10));
            }
        }
    }

    #[test]
    fn projective_measurement_examples() {
        let alpha = c(0.6, 0.0);
        let beta = c(0.0, 0.8);
        let q = reg(&[alpha, beta]);
        let out = measure_projective(&q, &ProjectiveMeasurement::computational(1)).unwrap();
        assert!((out[0].probability - 0.36).abs() < 1e-15);
        assert!((out[1].probability - 0.64).abs() < 1e-15);

        let pm = ProjectiveMeasurement::in_basis(&[
            CVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap(),
            CVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap(),
        ])
        .unwrap();
        let out = measure_projective(&basis_state(1, 0).unwrap(), &pm).unwrap();
        assert!((out[0].probability - 0.5).abs() < 1e-15);
        assert!((out[1].probability - 0.5).abs() < 1e-15);

        // re-measuring the post state repeats the outcome
        let post = out[1].post_state.clone().unwrap();
        let again = measure_projective(&post, &pm).unwrap();
        assert!((again[1].probability - 1.0).abs() < 1e-14);

        let incomplete = ProjectiveMeasurement::new(vec![0.0], vec![Projector::from_subset(2, [0]).unwrap()]);
        assert!(matches!(incomplete, Err(QStateError::Incomplete { .. })));
    }

    #[test]
    fn general_measurement_examples() {
        let mut rng = QRng::seeded(4);
        let pm = ProjectiveMeasurement::computational(2);
        let ops: Vec<CMatrix> = pm.projectors().iter().map(|p| p.matrix().clone()).collect();
        for _ in 0..100 {
            let q = QuantumRegister::new(random_state(4, &mut rng)).unwrap();
            let a = measure_projective(&q, &pm).unwrap();
            let b = measure_general(&q, &ops).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x.probability - y.probability).abs() < 1e-14);
            }
        }
        let q = QuantumRegister::new(random_state(2, &mut rng)).unwrap();
        let out = measure_general(&q, &[CMatrix::identity(2)]).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-14);
        assert!(out[0].post_state.as_ref().unwrap().amplitudes().approx_eq(q.amplitudes(), 1e-14));

        let x_half = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).scale(cr(FRAC_1_SQRT_2));
        for _ in 0..20 {
            let q = QuantumRegister::new(random_state(2, &mut rng)).unwrap();
            let out = measure_general(&q, &[x_half.clone(), x_half.clone()]).unwrap();
            assert!((out[0].probability - 0.5).abs() < 1e-14);
            assert!((out[1].probability - 0.5).abs() < 1e-14);
        }
        assert!(matches!(measure_general(&q, &[x_half]), Err(QStateError::Incomplete { .. })));
    }

    #[test]
    fn povm_examples() {
        let effects = [
            Projector::from_subset(2, [0]).unwrap().matrix().clone(),
            Projector::from_subset(2, [1]).unwrap().matrix().clone(),
        ];
        let p = measure_povm(&plus(), &effects).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert_eq!(measure_povm(&plus(), &[CMatrix::identity(2)]).unwrap().len(), 1);
        let two = CMatrix::identity(2).scale(cr(2.0));
        assert!(matches!(measure_povm(&plus(), &[two]), Err(QStateError::Incomplete { .. })));
        let neg = CMatrix::diagonal(&[cr(2.0), cr(-1.0)]);
        let comp = CMatrix::diagonal(&[cr(-1.0), cr(2.0)]);
        assert!(matches!(measure_povm(&plus(), &[neg, comp]), Err(QStateError::NotPositive { .. })));
    }

    #[test]
    fn measuring_one_factor_keeps_other_marginal() {
        let mut rng = QRng::seeded(23);
        for _ in 0..50 {
            let a = QuantumRegister::new(random_state(2, &mut rng)).unwrap();
            let b = QuantumRegister::new(random_state(2, &mut rng)).unwrap();
            let q = a.tensor(&b);
            let before = q.marginal(2);
            for out in measure_projective(&q, &ProjectiveMeasurement::single_qubit_z(2, 1)).unwrap() {
                if let Some(post) = out.post_state {
                    let after = post.marginal(2);
                    assert!((after[0] - before[0]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampling() {
        let mut rng = QRng::seeded(1);
        assert_eq!(sample(&[0.0, 0.0, 1.0], &mut rng).unwrap(), 2);
        let a = sample(&[0.3, 0.7], &mut QRng::seeded(8)).unwrap();
        let b = sample(&[0.3, 0.7], &mut QRng::seeded(8)).unwrap();
        assert_eq!(a, b);
        let n = 100_000;
        let ones = (0..n).filter(|_| sample(&[0.5, 0.5], &mut rng).unwrap() == 1).count();
        assert!((ones as f64 / n as f64 - 0.5).abs() < 0.02);
        assert!(sample(&[0.5, 0.6], &mut rng).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let q = reg(&[cr(0.6), cr(0.0), c(0.0, -0.8), cr(0.0)]);
        let text = q.dump();
        assert_eq!(text, "0 00 0.6 0\n2 10 0 -0.8\n");
        assert_eq!(QuantumRegister::parse_dump(&text, 2).unwrap(), q);
        assert!(matches!(
            QuantumRegister::parse_dump("1 00 1 0", 2),
            Err(QStateError::DumpParse { line: 1, .. })
        ));
    }

    #[test]
    fn unitary_preserves_norm() {
        let mut rng = QRng::seeded(2);
        for _ in 0..20 {
            let u = crate::linalg::random_unitary(8, &mut rng);
            let q = QuantumRegister::new(random_state(8, &mut rng)).unwrap();
            let out = u.apply(q.amplitudes()).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
        let _ = tensor_mat(&CMatrix::identity(2), &CMatrix::identity(2));
    }
}
