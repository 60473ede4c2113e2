//! Dense complex Hermitian linear algebra.
//!
//! Everything the protocol needs from operator theory lives here: validated
//! Hermitian and unitary matrices, sorted eigendecompositions, spectral
//! functions (Heaviside with the `Θ(0) = 1/2` convention, sign), Heisenberg
//! evolution and the direct-sum / tensor-product constructions.
//!
//! The eigensolver is nalgebra's tridiagonal QR for complex Hermitian input.
//! Operators in scope are small (a few hundred rows at most), so all storage
//! is dense.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance for the Hermitian symmetry check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default relative threshold below which an eigenvalue counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;
/// Tolerance on `‖U†U − 1‖` when validating unitaries.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on state normalization accepted at construction.
pub const NORM_TOL: f64 = 1e-9;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_square(m: &CMatrix) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows == 0 || rows != cols {
        return Err(Error::BadShape { rows, cols });
    }
    Ok(rows)
}

fn check_finite(m: &CMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `(M + M†) / 2`
fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A dense complex self-adjoint operator.
///
/// The stored matrix is exactly Hermitian: inputs are checked against
/// [`HERMITIAN_TOL`] relative to their largest entry and then symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m, "Hermitian matrix")?;
        let scale = max_abs_entry(&m);
        let asymmetry = max_abs_entry(&(&m - m.adjoint()));
        let tolerance = HERMITIAN_TOL * scale;
        if asymmetry > tolerance {
            return Err(Error::NotHermitian { asymmetry, tolerance });
        }
        Ok(Self { m: hermitize(&m) })
    }

    /// Wraps a matrix known to be Hermitian up to rounding.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m: hermitize(&m) }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadShape { rows: n, cols: row.len() });
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = c(x, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&x| c(x, 0.0))));
        Self::new(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: CMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.scale(s) }
    }

    /// `a·self + b·other`
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: self.m.scale(a) + other.m.scale(b) })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Entrywise complex conjugate (the transpose), again Hermitian.
    pub fn conj(&self) -> Self {
        Self { m: self.m.map(|z| z.conj()) }
    }

    /// `⟨ψ|M|ψ⟩`
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let v = psi.amplitudes();
        (v.adjoint() * &self.m * v)[(0, 0)].re
    }

    /// `tr(Mρ)`
    pub fn expectation_mixed(&self, rho: &DensityMatrix) -> f64 {
        trace_product(&self.m, rho.matrix())
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_entry(&(&self.m - &other.m))
    }

    /// True when every entry has imaginary part below `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.m.iter().all(|z| z.im.abs() <= tol)
    }
}

/// `Re tr(AB)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A validated unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    m: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = check_square(&m)?;
        check_finite(&m, "unitary matrix")?;
        let deviation = max_abs_entry(&(m.adjoint() * &m - CMatrix::identity(n, n)));
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { m })
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m }
    }

    /// Diagonal unitary `diag(e^{iθ_0}, e^{iθ_1}, …)`.
    pub fn diagonal_phases(phases: &[f64]) -> Self {
        let d = CVector::from_iterator(phases.len(), phases.iter().map(|&p| C64::from_polar(1.0, p)));
        Self { m: CMatrix::from_diagonal(&d) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn conj(&self) -> Self {
        Self { m: self.m.map(|z| z.conj()) }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: &self.m * &other.m })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            out *= &self.m;
        }
        Self { m: out }
    }

    /// Largest entry of `U†U − 1`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs_entry(&(self.m.adjoint() * &self.m - CMatrix::identity(n, n)))
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), psi.dim())?;
        Ok(StateVector { v: &self.m * psi.amplitudes() })
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Largest `|λ|`, the operator norm.
    pub fn spectral_norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn vector(&self, i: usize) -> StateVector {
        StateVector { v: self.eigenvectors.column(i).into_owned() }
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn top_vector(&self) -> StateVector {
        self.vector(self.dim() - 1)
    }

    /// Absolute threshold `zero_tol·max(1, ‖M‖)` used to classify zero
    /// eigenvalues.
    pub fn zero_threshold(&self, zero_tol: f64) -> f64 {
        zero_tol * self.spectral_norm().max(1.0)
    }

    /// `Σ_i w(λ_i) v_i v_i†`.
    pub fn spectral_function(&self, w: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let wj = w(lambda);
            scaled.column_mut(j).scale_mut(wj);
        }
        let m = scaled * self.eigenvectors.adjoint();
        debug_assert_eq!(m.nrows(), n);
        HermitianMatrix::from_trusted(m)
    }

    /// `Σ λ_i v_i v_i†`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.spectral_function(|x| x)
    }

    /// Eigenvalues merged into clusters whose members lie within
    /// `rel_tol·max(1, ‖M‖)` of their neighbour. Returns `(value, multiplicity)`.
    pub fn clustered(&self, rel_tol: f64) -> Vec<(f64, usize)> {
        cluster_sorted(&self.eigenvalues, rel_tol * self.spectral_norm().max(1.0))
    }
}

/// Groups an ascending list into runs separated by more than `abs_tol`;
/// each run is represented by its mean.
pub(crate) fn cluster_sorted(values: &[f64], abs_tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new(); // (sum, count, last)
    for &x in values {
        match out.last_mut() {
            Some((sum, count, last)) if x - *last <= abs_tol => {
                *sum += x;
                *count += 1;
                *last = x;
            }
            _ => out.push((x, 1, x)),
        }
    }
    out.into_iter().map(|(s, n, _)| (s / n as f64, n)).collect()
}

/// Eigendecomposition with eigenvalues sorted ascending.
pub fn eig_hermitian(m: &HermitianMatrix) -> EigenSystem {
    let n = m.dim();
    let eig = m.matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    EigenSystem { eigenvalues, eigenvectors }
}

fn check_zero_tol(zero_tol: f64) -> Result<()> {
    if zero_tol.is_finite() && zero_tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("zero_tol must be finite and ≥ 0, got {zero_tol}")))
    }
}

/// `Θ(M)`: projector onto the positive eigenspace plus half the kernel
/// projector.
pub fn heaviside(m: &HermitianMatrix, zero_tol: f64) -> Result<HermitianMatrix> {
    check_zero_tol(zero_tol)?;
    Ok(heaviside_of(&eig_hermitian(m), zero_tol))
}

pub(crate) fn heaviside_of(eig: &EigenSystem, zero_tol: f64) -> HermitianMatrix {
    let thr = eig.zero_threshold(zero_tol);
    eig.spectral_function(|x| {
        if x > thr {
            1.0
        } else if x < -thr {
            0.0
        } else {
            0.5
        }
    })
}

/// `sgn(M) = 2Θ(M) − 1`.
pub fn sign_op(m: &HermitianMatrix, zero_tol: f64) -> Result<HermitianMatrix> {
    check_zero_tol(zero_tol)?;
    let eig = eig_hermitian(m);
    let thr = eig.zero_threshold(zero_tol);
    Ok(eig.spectral_function(|x| {
        if x > thr {
            1.0
        } else if x < -thr {
            -1.0
        } else {
            0.0
        }
    }))
}

/// `e^{−iHt}`, built from the eigendecomposition of `H`.
pub fn propagator(h: &HermitianMatrix, t: f64) -> UnitaryMatrix {
    let eig = eig_hermitian(h);
    let mut scaled = eig.eigenvectors.clone();
    for (j, &e) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -e * t);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    UnitaryMatrix::from_trusted(scaled * eig.eigenvectors.adjoint())
}

/// `U† M U`.
pub fn conjugate_by(m: &HermitianMatrix, u: &UnitaryMatrix) -> Result<HermitianMatrix> {
    check_dims(m.dim(), u.dim())?;
    Ok(HermitianMatrix::from_trusted(u.matrix().adjoint() * m.matrix() * u.matrix()))
}

/// Heisenberg-picture evolution `e^{iHt} M e^{−iHt}`.
pub fn evolve_heisenberg(m: &HermitianMatrix, h: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    check_dims(m.dim(), h.dim())?;
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time"));
    }
    conjugate_by(m, &propagator(h, t))
}

/// Block-diagonal `A ⊕ B`.
pub fn direct_sum(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix { m: block_diag(a.matrix(), b.matrix()) }
}

pub(crate) fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut m = CMatrix::zeros(na + nb, na + nb);
    m.view_mut((0, 0), (na, na)).copy_from(a);
    m.view_mut((na, na), (nb, nb)).copy_from(b);
    m
}

pub fn direct_sum_unitary(a: &UnitaryMatrix, b: &UnitaryMatrix) -> UnitaryMatrix {
    UnitaryMatrix { m: block_diag(a.matrix(), b.matrix()) }
}

/// Tensor product `A ⊗ B`.
pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix { m: a.matrix().kronecker(b.matrix()) }
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    v: CVector,
}

impl StateVector {
    /// Accepts amplitudes normalized within [`NORM_TOL`] and renormalizes them.
    pub fn new(v: CVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::BadShape { rows: 0, cols: 1 });
        }
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("state vector"));
        }
        let norm = v.norm();
        let deviation = (norm - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { v: v.unscale(norm) })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self { v: v.unscale(norm) })
    }

    /// `|i⟩`, the computational basis state.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::InvalidParameter(format!("basis index {i} out of range for dim {dim}")));
        }
        let mut v = CVector::zeros(dim);
        v[i] = c(1.0, 0.0);
        Ok(Self { v })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.v
    }

    /// `|⟨self|other⟩|`
    pub fn overlap(&self, other: &Self) -> f64 {
        self.v.dotc(&other.v).norm()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { m: &self.v * self.v.adjoint() }
    }
}

/// Tolerance on density-matrix trace and positivity.
pub const DENSITY_TOL: f64 = 1e-9;

/// A unit-trace positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(m)?;
        let deviation = (h.trace() - 1.0).abs();
        if deviation > DENSITY_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        let min_eigenvalue = eig_hermitian(&h).min();
        if min_eigenvalue < -DENSITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { m: h.into_matrix() })
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m: hermitize(&m) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim).unscale(dim as f64) }
    }

    /// `Σ w_i ρ_i` for non-negative weights summing to one.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            check_dims(dim, rho.dim())?;
            if !(w.is_finite() && *w >= -DENSITY_TOL) {
                return Err(Error::InvalidParameter(format!("negative mixture weight {w}")));
            }
            total += w;
            m += rho.matrix().scale(w.max(0.0));
        }
        let deviation = (total - 1.0).abs();
        if deviation > DENSITY_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { m: m.unscale(total) })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn conj(&self) -> Self {
        Self { m: self.m.map(|z| z.conj()) }
    }

    /// `ρ ⊗ σ` for another density matrix `σ`.
    pub fn kron(&self, other: &DensityMatrix) -> Self {
        Self { m: self.m.kronecker(&other.m) }
    }
}

/// Either a pure or a mixed state; every scoring routine accepts both.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(s) => s.dim(),
            State::Mixed(r) => r.dim(),
        }
    }

    pub fn expectation(&self, op: &HermitianMatrix) -> Result<f64> {
        check_dims(op.dim(), self.dim())?;
        Ok(match self {
            State::Pure(s) => op.expectation(s),
            State::Mixed(r) => op.expectation_mixed(r),
        })
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(s) => s.to_density(),
            State::Mixed(r) => r.clone(),
        }
    }
}

impl From<StateVector> for State {
    fn from(s: StateVector) -> Self {
        State::Pure(s)
    }
}

impl From<DensityMatrix> for State {
    fn from(r: DensityMatrix) -> Self {
        State::Mixed(r)
    }
}

// ---------------------------------------------------------------------------
// JSON forms. Field names are fixed: {"dim", "re", "im"}.

/// Wire form of a square complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
        Self { dim: n, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        let rows_ok = self.re.len() == n && self.im.len() == n && self.re.iter().chain(self.im.iter()).all(|r| r.len() == n);
        if n == 0 || !rows_ok {
            return Err(Error::Malformed(format!("matrix JSON rows do not match dim {n}")));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| c(self.re[i][j], self.im[i][j])))
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(&self.m).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let m = j.to_matrix().map_err(serde::de::Error::custom)?;
        HermitianMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(&self.m).serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let m = j.to_matrix().map_err(serde::de::Error::custom)?;
        UnitaryMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Wire form of a state vector: `{"dim", "re": [...], "im": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorJson { dim: self.dim(), re: self.v.iter().map(|z| z.re).collect(), im: self.v.iter().map(|z| z.im).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = VectorJson::deserialize(d)?;
        if j.re.len() != j.dim || j.im.len() != j.dim {
            return Err(serde::de::Error::custom("state JSON length does not match dim"));
        }
        let v = CVector::from_iterator(j.dim, j.re.iter().zip(&j.im).map(|(&r, &i)| c(r, i)));
        StateVector::new(v).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(&self.m).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let m = j.to_matrix().map_err(serde::de::Error::custom)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
