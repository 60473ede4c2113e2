//! Uniformly precessing observable pairs.
//!
//! A [`PrecessingPair`] bundles `(X, Y)` with the dynamics that rotates them
//! and the three probed observables `X_k = X(t_k)`, `Y_k = Y(t_k)`. The
//! built-in families are the four-level construction, spin-`j` angular
//! momentum and the clock observable (a shift-operator quadrature with the
//! four-level block appended).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    c, conjugate_by, direct_sum, direct_sum_unitary, evolve_heisenberg, CMatrix, CVector, HermitianMatrix, StateVector, UnitaryMatrix, C64,
};

/// Tolerance used when constructors assert the precession condition.
pub const PRECESSION_TOL: f64 = 1e-9;

/// `(cos(2πk/3), sin(2πk/3))` for the three probing times.
pub fn probe_angles() -> [(f64, f64); 3] {
    let mut out = [(1.0, 0.0); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let a = 2.0 * PI * k as f64 / 3.0;
        *slot = (a.cos(), a.sin());
    }
    // exact values keep the k = 0 row bit-identical
    out[0] = (1.0, 0.0);
    out
}

fn default_omega() -> f64 {
    1.0
}

/// The dynamics generating the precession.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evolver {
    /// Continuous evolution under `H`; probing times `t_k = 2πk/(3ω)`.
    Hamiltonian {
        hamiltonian: HermitianMatrix,
        #[serde(default = "default_omega")]
        omega: f64,
    },
    /// One discrete step `X ↦ U†XU` per probing time.
    Unitary { unitary: UnitaryMatrix },
    /// Probed observables supplied directly, no generating dynamics.
    Tabulated { x: [HermitianMatrix; 3], y: [HermitianMatrix; 3] },
}

impl Evolver {
    pub fn dim(&self) -> usize {
        match self {
            Evolver::Hamiltonian { hamiltonian, .. } => hamiltonian.dim(),
            Evolver::Unitary { unitary } => unitary.dim(),
            Evolver::Tabulated { x, .. } => x[0].dim(),
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Evolver::Hamiltonian { .. })
    }

    /// `M(t_k)` for `k ∈ {0, 1, 2}`.
    fn probe(&self, m: &HermitianMatrix, k: usize) -> Result<HermitianMatrix> {
        match self {
            Evolver::Hamiltonian { hamiltonian, omega } => {
                let t = 2.0 * PI * k as f64 / (3.0 * omega);
                evolve_heisenberg(m, hamiltonian, t)
            }
            Evolver::Unitary { unitary } => conjugate_by(m, &unitary.pow(k as u32)),
            Evolver::Tabulated { .. } => unreachable!("tabulated pairs carry their probes"),
        }
    }
}

/// Which construction produced a pair.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    FourLevel {
        x_plus: f64,
        x_minus: f64,
    },
    Spin {
        j: f64,
    },
    Clock {
        n: usize,
        l: f64,
        x_plus: f64,
        x_minus: f64,
    },
    Raw,
    /// Encoding into a real Hilbert space (doubles the dimension).
    RealEncoded(Box<Family>),
    /// Grassmannian embedding `X ⊗ 1_n`.
    Grassmann {
        inner: Box<Family>,
        n: usize,
    },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::FourLevel { x_plus, x_minus } => format!("four_level(x_plus={x_plus}, x_minus={x_minus})"),
            Family::Spin { j } => format!("spin(j={j})"),
            Family::Clock { n, l, x_plus, x_minus } => {
                format!("clock(N={n}, l={l}, x_plus={x_plus}, x_minus={x_minus})")
            }
            Family::Raw => "raw".to_string(),
            Family::RealEncoded(inner) => format!("real[{}]", inner.label()),
            Family::Grassmann { inner, n } => format!("grassmann{n}[{}]", inner.label()),
        }
    }
}

/// The observables at the three probing times.
#[derive(Clone, Debug, PartialEq)]
pub struct Probes {
    pub x: [HermitianMatrix; 3],
    pub y: [HermitianMatrix; 3],
}

/// A pair `(X, Y)` with its evolver and probed observables.
#[derive(Clone, Debug)]
pub struct PrecessingPair {
    x: HermitianMatrix,
    y: HermitianMatrix,
    evolver: Evolver,
    family: Family,
    probes: Probes,
}

impl PrecessingPair {
    /// Builds a pair and asserts the precession condition at [`PRECESSION_TOL`].
    pub fn new(x: HermitianMatrix, y: HermitianMatrix, evolver: Evolver, family: Family) -> Result<Self> {
        let pair = Self::new_unverified(x, y, evolver, family)?;
        let report = verify_precession(&pair, PRECESSION_TOL);
        if !report.pass {
            return Err(Error::BrokenPrecession { residual: report.max_residual, tolerance: report.threshold });
        }
        Ok(pair)
    }

    /// Builds a pair checking only dimensions. Used to inspect user input
    /// that may not precess.
    pub fn new_unverified(x: HermitianMatrix, y: HermitianMatrix, evolver: Evolver, family: Family) -> Result<Self> {
        let dim = x.dim();
        for found in [y.dim(), evolver.dim()] {
            if found != dim {
                return Err(Error::DimensionMismatch { expected: dim, found });
            }
        }
        if let Evolver::Hamiltonian { omega, .. } = &evolver {
            if !(omega.is_finite() && *omega > 0.0) {
                return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
            }
        }
        let probes = match &evolver {
            Evolver::Tabulated { x: xs, y: ys } => {
                for m in xs.iter().chain(ys.iter()) {
                    if m.dim() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
                    }
                }
                Probes { x: xs.clone(), y: ys.clone() }
            }
            ev => Probes { x: [x.clone(), ev.probe(&x, 1)?, ev.probe(&x, 2)?], y: [y.clone(), ev.probe(&y, 1)?, ev.probe(&y, 2)?] },
        };
        Ok(Self { x, y, evolver, family, probes })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn x(&self) -> &HermitianMatrix {
        &self.x
    }

    pub fn y(&self) -> &HermitianMatrix {
        &self.y
    }

    pub fn evolver(&self) -> &Evolver {
        &self.evolver
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn probes(&self) -> &Probes {
        &self.probes
    }

    /// `X_k`
    pub fn x_at(&self, k: usize) -> &HermitianMatrix {
        &self.probes.x[k]
    }

    /// `Y_k`
    pub fn y_at(&self, k: usize) -> &HermitianMatrix {
        &self.probes.y[k]
    }

    /// A `raw` family description reproducing this pair.
    pub fn to_raw_spec(&self) -> FamilySpec {
        FamilySpec::Raw { x: self.x.clone(), y: self.y.clone(), evolver: Box::new(self.evolver.clone()) }
    }
}

/// Precession residual report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecessionReport {
    /// Largest Frobenius residual over the three times and both rows.
    pub max_residual: f64,
    /// `tol·‖X_0‖` the residual is compared against.
    pub threshold: f64,
    pub pass: bool,
}

/// Checks `X_k = cos(2πk/3)X_0 + sin(2πk/3)Y_0` and
/// `Y_k = cos(2πk/3)Y_0 − sin(2πk/3)X_0` for `k = 0, 1, 2`.
pub fn verify_precession(pair: &PrecessingPair, tol: f64) -> PrecessionReport {
    let probes = pair.probes();
    let (x0, y0) = (&probes.x[0], &probes.y[0]);
    let mut max_residual: f64 = 0.0;
    for (k, (cs, sn)) in probe_angles().into_iter().enumerate() {
        let want_x = x0.scale(cs).matrix() + y0.scale(sn).matrix();
        let want_y = y0.scale(cs).matrix() - x0.scale(sn).matrix();
        let rx = (probes.x[k].matrix() - want_x).norm();
        let ry = (probes.y[k].matrix() - want_y).norm();
        max_residual = max_residual.max(rx).max(ry);
    }
    let threshold = tol * x0.norm();
    PrecessionReport { max_residual, threshold, pass: max_residual <= threshold }
}

fn check_four_level_params(x_plus: f64, x_minus: f64) -> Result<()> {
    if !(x_plus.is_finite() && x_minus.is_finite() && x_plus > 0.0 && x_minus > x_plus) {
        return Err(Error::InvalidParameter(format!(
            "four-level family needs x_minus > x_plus > 0, got x_plus={x_plus}, x_minus={x_minus}"
        )));
    }
    Ok(())
}

/// `(X, Y)` of the four-level construction in the basis `|0⟩..|3⟩`.
fn four_level_matrices(x_plus: f64, x_minus: f64) -> (CMatrix, CMatrix) {
    let outer = (x_plus * x_minus).sqrt();
    let inner = x_minus - x_plus;
    // ⟨n|X|n+1⟩ for n = 0, 1, 2
    let couplings = [outer, inner, outer];
    let mut x = CMatrix::zeros(4, 4);
    let mut y = CMatrix::zeros(4, 4);
    for (n, &a) in couplings.iter().enumerate() {
        x[(n, n + 1)] = c(a, 0.0);
        x[(n + 1, n)] = c(a, 0.0);
        y[(n, n + 1)] = c(0.0, -a);
        y[(n + 1, n)] = c(0.0, a);
    }
    (x, y)
}

/// `exp(−i(2π/3) Σ_n n|n⟩⟨n|)` on `dim` levels.
fn ladder_step(dim: usize) -> UnitaryMatrix {
    let phases: Vec<f64> = (0..dim).map(|n| -2.0 * PI * n as f64 / 3.0).collect();
    UnitaryMatrix::diagonal_phases(&phases)
}

/// The four-level pair with spectrum `{−x₋, −x₊, x₊, x₋}`, evolving under
/// `H = diag(0, 1, 2, 3)` (ω = 1).
pub fn make_four_level(x_plus: f64, x_minus: f64) -> Result<PrecessingPair> {
    check_four_level_params(x_plus, x_minus)?;
    let (x, y) = four_level_matrices(x_plus, x_minus);
    let hamiltonian = HermitianMatrix::diagonal(&[0.0, 1.0, 2.0, 3.0])?;
    PrecessingPair::new(
        HermitianMatrix::new(x)?,
        HermitianMatrix::new(y)?,
        Evolver::Hamiltonian { hamiltonian, omega: 1.0 },
        Family::FourLevel { x_plus, x_minus },
    )
}

/// Validates `j` and returns `2j`.
pub fn spin_twice(j: f64) -> Result<usize> {
    let two_j = 2.0 * j;
    if !(two_j.is_finite() && two_j >= 1.0 && (two_j - two_j.round()).abs() < 1e-12) {
        return Err(Error::InvalidParameter(format!("j must be a positive half-integer, got {j}")));
    }
    Ok(two_j.round() as usize)
}

/// `(J_x, J_y, J_z)` for spin `j` in the basis `m = j, j−1, …, −j`, ħ = 1.
pub fn spin_matrices(j: f64) -> Result<[HermitianMatrix; 3]> {
    let two_j = spin_twice(j)?;
    let dim = two_j + 1;
    let j = two_j as f64 / 2.0;
    let m_of = |i: usize| j - i as f64;
    let mut jx = CMatrix::zeros(dim, dim);
    let mut jy = CMatrix::zeros(dim, dim);
    for i in 1..dim {
        // ⟨m+1|J₊|m⟩ with m = m_of(i); row i−1 holds m+1
        let m = m_of(i);
        let a = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        jx[(i - 1, i)] = c(a / 2.0, 0.0);
        jx[(i, i - 1)] = c(a / 2.0, 0.0);
        jy[(i - 1, i)] = c(0.0, -a / 2.0);
        jy[(i, i - 1)] = c(0.0, a / 2.0);
    }
    let jz: Vec<f64> = (0..dim).map(m_of).collect();
    Ok([HermitianMatrix::new(jx)?, HermitianMatrix::new(jy)?, HermitianMatrix::diagonal(&jz)?])
}

/// Spin-`j` angular momentum `(J_x, J_y)` precessing under `H = −J_z`.
pub fn make_spin(j: f64) -> Result<PrecessingPair> {
    let [jx, jy, jz] = spin_matrices(j)?;
    let j = spin_twice(j)? as f64 / 2.0;
    PrecessingPair::new(jx, jy, Evolver::Hamiltonian { hamiltonian: jz.scale(-1.0), omega: 1.0 }, Family::Spin { j })
}

fn check_clock_n(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(6) {
        return Err(Error::InvalidParameter(format!("N must be a positive multiple of 6, got {n}")));
    }
    Ok(())
}

/// Default four-level parameters matching the clock's extremal outcomes:
/// `x₋ = l`, `x₊ = l·cos(2π(⌈N/4⌉ − 1)/N)`.
pub fn clock_default_params(n: usize, l: f64) -> Result<(f64, f64)> {
    check_clock_n(n)?;
    let quarter = n.div_ceil(4);
    let x_plus = l * (2.0 * PI * (quarter - 1) as f64 / n as f64).cos();
    Ok((x_plus, l))
}

/// `(l/2)(S† + S)` and `(l/2i)(S† − S)` for the `N`-site shift operator.
fn shift_quadratures(n: usize, l: f64) -> (CMatrix, CMatrix) {
    let mut cx = CMatrix::zeros(n, n);
    let mut cy = CMatrix::zeros(n, n);
    for a in 0..n {
        // S|a⟩ = |a+1 mod N⟩, so S† has ⟨a|S†|a+1⟩ = 1
        let b = (a + 1) % n;
        cx[(a, b)] += c(l / 2.0, 0.0);
        cx[(b, a)] += c(l / 2.0, 0.0);
        cy[(a, b)] += c(0.0, -l / 2.0);
        cy[(b, a)] += c(0.0, l / 2.0);
    }
    (cx, cy)
}

/// The clock observable `C_x = (l/2)(S_N† + S_N) ⊕ X`,
/// `C_y = (l/2i)(S_N† − S_N) ⊕ Y`, with the discrete step
/// `exp(−i(2π/3)Σ n|n⟩⟨n|)` acting on each block separately.
pub fn make_clock(n: usize, l: f64, x_plus: f64, x_minus: f64) -> Result<PrecessingPair> {
    check_clock_n(n)?;
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidParameter(format!("clock hand length must be positive, got {l}")));
    }
    check_four_level_params(x_plus, x_minus)?;
    let (cx, cy) = shift_quadratures(n, l);
    let (x, y) = four_level_matrices(x_plus, x_minus);
    let big_x = direct_sum(&HermitianMatrix::new(cx)?, &HermitianMatrix::new(x)?);
    let big_y = direct_sum(&HermitianMatrix::new(cy)?, &HermitianMatrix::new(y)?);
    let unitary = direct_sum_unitary(&ladder_step(n), &ladder_step(4));
    PrecessingPair::new(big_x, big_y, Evolver::Unitary { unitary }, Family::Clock { n, l, x_plus, x_minus })
}

/// Clock with the default four-level parameters.
pub fn make_clock_default(n: usize, l: f64) -> Result<PrecessingPair> {
    let (x_plus, x_minus) = clock_default_params(n, l)?;
    make_clock(n, l, x_plus, x_minus)
}

/// `|ψ_n⟩ ∝ Σ_{n'} e^{i2πnn'/N}|n'⟩` on the clock block, zero on the
/// appended four-level block.
pub fn clock_fourier_state(n_sites: usize, n: usize) -> Result<StateVector> {
    check_clock_n(n_sites)?;
    if n >= n_sites {
        return Err(Error::InvalidParameter(format!("Fourier index {n} out of range for N={n_sites}")));
    }
    let norm = 1.0 / (n_sites as f64).sqrt();
    let mut v = CVector::zeros(n_sites + 4);
    for site in 0..n_sites {
        // reduce the phase index mod N before converting to an angle
        let idx = (n * site) % n_sites;
        v[site] = C64::from_polar(norm, 2.0 * PI * idx as f64 / n_sites as f64);
    }
    StateVector::normalized(v)
}

/// `(|0⟩ − |3⟩)/√2` on the four-level block.
pub fn optimal_state(pair: &PrecessingPair) -> Result<StateVector> {
    let offset = match pair.family() {
        Family::FourLevel { .. } => 0,
        Family::Clock { n, .. } => *n,
        other => {
            return Err(Error::UnsupportedFamily {
                family: other.label(),
                reason: "the optimal state is defined for the four-level and clock families".into(),
            })
        }
    };
    let mut v = CVector::zeros(pair.dim());
    v[offset] = c(FRAC_1_SQRT_2, 0.0);
    v[offset + 3] = c(-FRAC_1_SQRT_2, 0.0);
    StateVector::new(v)
}

/// Serializable description of a pair, the single input format for the CLI
/// and files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    FourLevel {
        x_plus: f64,
        x_minus: f64,
    },
    Spin {
        j: f64,
    },
    Clock {
        #[serde(rename = "N")]
        n: usize,
        #[serde(default = "default_omega")]
        l: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_plus: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_minus: Option<f64>,
    },
    Raw {
        #[serde(rename = "X")]
        x: HermitianMatrix,
        #[serde(rename = "Y")]
        y: HermitianMatrix,
        evolver: Box<Evolver>,
    },
}

impl FamilySpec {
    /// Builds the pair; raw input is checked for precession.
    pub fn build(&self) -> Result<PrecessingPair> {
        match self {
            FamilySpec::Raw { x, y, evolver } => PrecessingPair::new(x.clone(), y.clone(), (**evolver).clone(), Family::Raw),
            other => other.build_unverified(),
        }
    }

    /// Builds the pair without rejecting raw input that fails to precess.
    pub fn build_unverified(&self) -> Result<PrecessingPair> {
        match self {
            FamilySpec::FourLevel { x_plus, x_minus } => make_four_level(*x_plus, *x_minus),
            FamilySpec::Spin { j } => make_spin(*j),
            FamilySpec::Clock { n, l, x_plus, x_minus } => {
                let (dp, dm) = clock_default_params(*n, *l)?;
                make_clock(*n, *l, x_plus.unwrap_or(dp), x_minus.unwrap_or(dm))
            }
            FamilySpec::Raw { x, y, evolver } => PrecessingPair::new_unverified(x.clone(), y.clone(), (**evolver).clone(), Family::Raw),
        }
    }
}
