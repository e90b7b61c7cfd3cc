//! Dense complex linear algebra over `f64` pairs.
//!
//! Everything here is sized for desk-scale problems (dimension 64 and
//! below): storage is row-major and dense, and comparisons use the
//! entrywise max-abs norm.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub type C64 = Complex<f64>;

/// Tolerance for unitarity, normalization and general matrix comparisons.
pub const EPS_UNITARY: f64 = 1e-10;
/// Residual norm below which Gram-Schmidt declares the input rank deficient.
pub const EPS_RANK: f64 = 1e-8;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// `e^{i theta}`
#[inline]
pub fn cis(theta: f64) -> C64 {
    Complex::from_polar(1.0, theta)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape {rows}x{cols} does not match {len} entries")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("empty vector or matrix")]
    Empty,
    #[error("non-finite entry")]
    NonFinite,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("vectors are linearly dependent (residual {residual:e} at input {index})")]
    RankDeficient { index: usize, residual: f64 },
    #[error("matrix is not normal (deviation {deviation:e})")]
    NotNormal { deviation: f64 },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not hermitean (deviation {deviation:e})")]
    NotHermitean { deviation: f64 },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

// ---------------------------------------------------------------------------
// Vectors

/// A column vector of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    entries: Vec<C64>,
}

impl CVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(LinalgError::Empty);
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(CVector { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| cr(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "zero-dimensional vector");
        CVector { entries: vec![C64::default(); dim] }
    }

    /// Unit vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(LinalgError::IndexOutOfRange { index: k, dim });
        }
        let mut v = Self::zeros(dim);
        v.entries[k] = cr(1.0);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns `v / |v|`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<CVector> {
        let n = self.norm();
        if n == 0.0 {
            return None;
        }
        Some(self.scale(cr(1.0 / n)))
    }

    pub fn scale(&self, k: C64) -> CVector {
        CVector { entries: self.entries.iter().map(|z| z * k).collect() }
    }

    pub fn conj(&self) -> CVector {
        CVector { entries: self.entries.iter().map(|z| z.conj()).collect() }
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CVector, eps: f64) -> bool {
        self.dim() == other.dim() && self.max_abs_diff(other) <= eps
    }

    fn zip_with(&self, other: &CVector, f: impl Fn(C64, C64) -> C64) -> CVector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        CVector {
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.entries[i]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// `<a|b> = sum_i conj(a_i) b_i`, antilinear in the first slot.
pub fn inner(a: &CVector, b: &CVector) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.entries.iter().zip(&b.entries).map(|(x, y)| x.conj() * y).sum())
}

/// Direct product with the left factor varying slowest:
/// `(a0,a1) (x) (b0,b1) = (a0 b0, a0 b1, a1 b0, a1 b1)`.
pub fn tensor_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.entries {
        for y in &b.entries {
            out.push(x * y);
        }
    }
    CVector { entries: out }
}

/// `|x><y|`, i.e. `M_ij = x_i conj(y_j)`.
pub fn outer(x: &CVector, y: &CVector) -> CMatrix {
    let mut m = CMatrix::zeros(x.dim(), y.dim());
    for i in 0..x.dim() {
        for j in 0..y.dim() {
            m[(i, j)] = x[i] * y[j].conj();
        }
    }
    m
}

/// Inductive Gram-Schmidt orthonormalization.
///
/// The first output is `v1/|v1|`; each later output is the input minus its
/// projections onto the previous outputs, normalized. A residual norm below
/// [`EPS_RANK`] is reported as rank deficiency.
pub fn gram_schmidt(vs: &[CVector]) -> Result<Vec<CVector>> {
    let mut basis: Vec<CVector> = Vec::with_capacity(vs.len());
    for (index, v) in vs.iter().enumerate() {
        if let Some(first) = vs.first() {
            if v.dim() != first.dim() {
                return Err(LinalgError::DimensionMismatch { expected: first.dim(), found: v.dim() });
            }
        }
        let mut w = v.clone();
        for e in &basis {
            let k = inner(e, &w)?;
            w = &w - &e.scale(k);
        }
        let residual = w.norm();
        if residual < EPS_RANK {
            return Err(LinalgError::RankDeficient { index, residual });
        }
        basis.push(w.scale(cr(1.0 / residual)));
    }
    Ok(basis)
}

// ---------------------------------------------------------------------------
// Matrices

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty);
        }
        if rows * cols != data.len() {
            return Err(LinalgError::BadShape { rows, cols, len: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from complex rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let cols = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        CMatrix::new(r, cols, rows.concat()).expect("valid matrix rows")
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| cr(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        CMatrix { rows, cols, data: vec![C64::default(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(1.0);
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector { entries: (0..self.rows).map(|i| self[(i, j)]).collect() }
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, k: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if self.cols != v.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: v.dim() });
        }
        let entries = (0..self.rows)
            .map(|i| self.row(i).iter().zip(v.entries()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(CVector { entries })
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, eps: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= eps
    }

    /// `max |(M^dag M - I)_ij|`, or infinity for non-square input.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&CMatrix::identity(self.rows))
    }

    pub fn is_unitary(&self, eps: f64) -> bool {
        self.unitarity_deviation() <= eps
    }

    pub fn require_unitary(&self, eps: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation <= eps {
            Ok(())
        } else {
            Err(LinalgError::NotUnitary { deviation })
        }
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitean(&self, eps: f64) -> bool {
        self.hermiticity_deviation() <= eps
    }

    pub fn normality_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let a = self.adjoint();
        (&a * self).max_abs_diff(&(self * &a))
    }

    pub fn is_normal(&self, eps: f64) -> bool {
        self.normality_deviation() <= eps
    }

    /// Determinant of a 2x2 matrix.
    pub fn det2(&self) -> C64 {
        assert!(self.rows == 2 && self.cols == 2, "det2 on non-2x2 matrix");
        self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)]
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Matrix product; panics on mismatched shapes. Use [`CMatrix::matmul`] for a
/// fallible version.
impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Mul<&CVector> for &CMatrix {
    type Output = CVector;
    fn mul(self, rhs: &CVector) -> CVector {
        self.apply(rhs).expect("matrix-vector shape mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(cr(-1.0))
    }
}

/// Conjugate transpose, `(A^dag)_ij = conj(A_ji)`.
pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Kronecker product in block form `A (x) B = (a11 B  a12 B; a21 B  a22 B)`.
pub fn tensor_mat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == C64::default() {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    m[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    m
}

/// Kronecker product of a sequence, left factor most significant.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(CMatrix::identity(1), |acc, f| tensor_mat(&acc, f))
}

// ---------------------------------------------------------------------------
// Projectors

/// A hermitean idempotent operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
    /// Basis indices spanned, when built from computational basis vectors.
    subset: Option<BTreeSet<usize>>,
}

impl Projector {
    /// `P = sum_{i in subset} |i><i|`.
    pub fn from_subset(dim: usize, subset: impl IntoIterator<Item = usize>) -> Result<Self> {
        let subset: BTreeSet<usize> = subset.into_iter().collect();
        let mut matrix = CMatrix::zeros(dim, dim);
        for &i in &subset {
            if i >= dim {
                return Err(LinalgError::IndexOutOfRange { index: i, dim });
            }
            matrix[(i, i)] = cr(1.0);
        }
        Ok(Projector { matrix, subset: Some(subset) })
    }

    /// Projector onto the span of the given vectors; they are orthonormalized
    /// first, so any linearly independent family is accepted.
    pub fn onto_span(vectors: &[CVector]) -> Result<Self> {
        let basis = gram_schmidt(vectors)?;
        let dim = basis.first().ok_or(LinalgError::Empty)?.dim();
        let mut matrix = CMatrix::zeros(dim, dim);
        for v in &basis {
            matrix = &matrix + &outer(v, v);
        }
        Ok(Projector { matrix, subset: None })
    }

    /// Wraps an explicit matrix after checking hermiticity and idempotency.
    pub fn from_matrix(matrix: CMatrix, eps: f64) -> Result<Self> {
        matrix.require_square()?;
        let deviation = matrix.hermiticity_deviation();
        if deviation > eps {
            return Err(LinalgError::NotHermitean { deviation });
        }
        let idem = (&matrix * &matrix).max_abs_diff(&matrix);
        if idem > eps {
            return Err(LinalgError::NotHermitean { deviation: idem });
        }
        Ok(Projector { matrix, subset: None })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn subset(&self) -> Option<&BTreeSet<usize>> {
        self.subset.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

// ---------------------------------------------------------------------------
// Spectral helpers

/// Eigen-decomposition of a 2x2 normal matrix.
#[derive(Clone, Debug)]
pub struct Eig2 {
    pub values: [C64; 2],
    pub vectors: [CVector; 2],
}

impl Eig2 {
    /// `sum_k f(lambda_k) |v_k><v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(C64) -> C64) -> CMatrix {
        let p0 = outer(&self.vectors[0], &self.vectors[0]).scale(f(self.values[0]));
        let p1 = outer(&self.vectors[1], &self.vectors[1]).scale(f(self.values[1]));
        &p0 + &p1
    }
}

/// Rotates `v` by a global phase so its first non-negligible entry is real
/// and positive.
fn fix_phase(v: CVector) -> CVector {
    match v.entries().iter().find(|z| z.norm() > 1e-12) {
        Some(z) => {
            let ph = z.conj() / z.norm();
            v.scale(ph)
        }
        None => v,
    }
}

/// Kernel direction of `A - lambda I` for a 2x2 `A`, picking the better
/// conditioned of the two row-derived candidates.
fn eigvec2(a: &CMatrix, lambda: C64) -> CVector {
    let (a00, a01, a10, a11) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let c1 = CVector { entries: vec![a01, lambda - a00] };
    let c2 = CVector { entries: vec![lambda - a11, a10] };
    let pick = if c1.norm() >= c2.norm() { c1 } else { c2 };
    pick.normalized().expect("non-degenerate eigenvector")
}

/// Solves the secular equation `det(A - lambda I) = 0` for a normal 2x2
/// matrix and returns orthonormal eigenvectors.
///
/// Degenerate spectra return the computational basis `(e0, e1)`. Eigenvector
/// phases are fixed so that the first non-negligible component is real
/// positive.
pub fn eig2_normal(a: &CMatrix, eps: f64) -> Result<Eig2> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(LinalgError::DimensionMismatch { expected: 2, found: a.rows().max(a.cols()) });
    }
    let deviation = a.normality_deviation();
    if deviation > eps {
        return Err(LinalgError::NotNormal { deviation });
    }
    // Work with the traceless part N = A - (tr/2) I; its eigenvalues are
    // +-sqrt(-det N) and, N being normal, their gap is comparable to |N|.
    let half_tr = a.trace() / 2.0;
    let n = a - &CMatrix::identity(2).scale(half_tr);
    let n_scale = n.max_abs();
    if n_scale <= 1e-14 * a.max_abs().max(1.0) {
        return Ok(Eig2 {
            values: [half_tr, half_tr],
            vectors: [CVector::basis(2, 0)?, CVector::basis(2, 1)?],
        });
    }
    let ns = n.scale(cr(1.0 / n_scale));
    let d = principal_sqrt(ns[(0, 0)] * ns[(0, 0)] + ns[(0, 1)] * ns[(1, 0)]);
    let values = [half_tr + d * n_scale, half_tr - d * n_scale];
    let v0 = fix_phase(eigvec2(&ns, d));
    let raw = eigvec2(&ns, -d);
    let k = inner(&v0, &raw)?;
    let v1 = (&raw - &v0.scale(k)).normalized().unwrap_or_else(|| {
        CVector { entries: vec![-v0[1].conj(), v0[0].conj()] }
    });
    Ok(Eig2 { values, vectors: [v0, fix_phase(v1)] })
}

/// Principal square root with the argument taken in `(-pi, pi]`, so the
/// negative real axis maps to `+i sqrt(r)` regardless of the sign of zero.
pub fn principal_sqrt(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        return C64::default();
    }
    let mut theta = z.im.atan2(z.re);
    if theta <= -std::f64::consts::PI + 1e-15 || (z.re < 0.0 && z.im.abs() <= 1e-15 * r) {
        theta = std::f64::consts::PI;
    }
    Complex::from_polar(r.sqrt(), theta / 2.0)
}

/// Square root `V` of a 2x2 unitary with `V^2 = U`, built from the spectral
/// decomposition with principal-branch roots of the eigenvalues.
pub fn sqrt_unitary2(u: &CMatrix) -> Result<CMatrix> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(LinalgError::DimensionMismatch { expected: 2, found: u.rows().max(u.cols()) });
    }
    u.require_unitary(EPS_UNITARY)?;
    let eig = eig2_normal(u, EPS_UNITARY)?;
    let eig = Eig2 {
        values: [eig.values[0] / eig.values[0].norm(), eig.values[1] / eig.values[1].norm()],
        vectors: eig.vectors,
    };
    Ok(eig.reconstruct_with(principal_sqrt))
}

/// Eigenvalues of a hermitean matrix by cyclic complex Jacobi rotations,
/// sorted ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.require_square()?;
    let deviation = m.hermiticity_deviation();
    let scale = m.max_abs().max(1.0);
    if deviation > 1e-9 * scale {
        return Err(LinalgError::NotHermitean { deviation });
    }
    let mut a = m.clone();
    let off = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s
    };
    let total: f64 = a.data().iter().map(|z| z.norm_sqr()).sum();
    for _sweep in 0..100 {
        if off(&a) <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g < 1e-300 {
                    continue;
                }
                let e = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // A <- A J with J = [[c, s], [-s conj(e), c conj(e)]] on (p, q)
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cs - aiq * e.conj() * sn;
                    a[(i, q)] = aip * sn + aiq * e.conj() * cs;
                }
                // A <- J^dag A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cs - aqj * e * sn;
                    a[(q, j)] = apj * sn + aqj * e * cs;
                }
                a[(p, q)] = C64::default();
                a[(q, p)] = C64::default();
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    Ok(vals)
}

/// Largest singular value, `sqrt(lambda_max(M^dag M))`.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let gram = &m.adjoint() * m;
    let vals = hermitian_eigenvalues(&gram).expect("gram matrix is hermitean");
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// Random sampling

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly distributed unit vector (normalized complex Gaussian).
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector { entries: (0..dim).map(|_| gaussian_c64(rng)).collect() };
        if let Some(n) = v.normalized() {
            return n;
        }
    }
}

/// Haar-distributed unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    loop {
        let cols: Vec<CVector> = (0..n)
            .map(|_| CVector { entries: (0..n).map(|_| gaussian_c64(rng)).collect() })
            .collect();
        if let Ok(q) = gram_schmidt(&cols) {
            let mut m = CMatrix::zeros(n, n);
            for (j, col) in q.iter().enumerate() {
                for i in 0..n {
                    m[(i, j)] = col[i];
                }
            }
            return m;
        }
    }
}
