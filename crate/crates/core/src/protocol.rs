//! The precession protocol: spectrum, the spectrum-dependent upper bound,
//! `P3` scoring, the vanishing-mean-sum check, the three-level dimension
//! witness, the classical clock baseline and the real / Grassmannian
//! embeddings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{Evolver, Family, PrecessingPair, Probes};
use crate::spectral::{
    c, cluster_sorted, eig_hermitian, heaviside_of, CMatrix, DensityMatrix, HermitianMatrix, State, StateVector, UnitaryMatrix,
    DEFAULT_ZERO_TOL,
};

/// Tsirelson's classical bound on `P3`.
pub const CLASSICAL_BOUND: f64 = 2.0 / 3.0;
/// Absolute tolerance on scores for the violation / saturation flags.
pub const SCORE_TOL: f64 = 1e-9;

/// The set of outcomes of `X` over the probing times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumInfo {
    /// Distinct outcomes, strictly ascending; a zero outcome is stored as `0.0`.
    pub outcomes: Vec<f64>,
    /// Smallest positive outcome.
    pub x_plus: Option<f64>,
    /// `−min{x < 0}`, the magnitude of the most negative outcome.
    pub x_minus: Option<f64>,
    pub has_zero: bool,
}

impl SpectrumInfo {
    /// Builds the spectrum from a list of outcomes (any order, duplicates
    /// allowed); values within `zero_tol·max(1, max|x|)` of zero count as
    /// zero and neighbours within the same distance are merged.
    pub fn from_outcomes(values: &[f64], zero_tol: f64) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite outcome".into()));
        }
        let scale = values.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        let thr = zero_tol * scale;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let outcomes: Vec<f64> = cluster_sorted(&sorted, thr).into_iter().map(|(x, _)| if x.abs() <= thr { 0.0 } else { x }).collect();
        let has_zero = outcomes.contains(&0.0);
        let x_plus = outcomes.iter().copied().find(|&x| x > 0.0);
        let x_minus = outcomes.first().copied().filter(|&x| x < 0.0).map(|x| -x);
        Ok(Self { outcomes, x_plus, x_minus, has_zero })
    }

    /// A spectrum described only by its bound-relevant data.
    pub fn from_extremes(x_plus: Option<f64>, x_minus: Option<f64>, has_zero: bool) -> Result<Self> {
        for v in x_plus.iter().chain(x_minus.iter()) {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidSpectrum(format!("x_plus and x_minus must be positive, got {v}")));
            }
        }
        let mut outcomes = Vec::new();
        outcomes.extend(x_minus.map(|m| -m));
        if has_zero {
            outcomes.push(0.0);
        }
        outcomes.extend(x_plus);
        Ok(Self { outcomes, x_plus, x_minus, has_zero })
    }
}

/// Spectrum of a pair: the union of the eigenvalues of `X_0, X_1, X_2`.
///
/// Fails with [`Error::BrokenPrecession`] when the probed observables do not
/// share one spectrum, which unitary evolution guarantees.
pub fn spectrum(pair: &PrecessingPair, zero_tol: f64) -> Result<SpectrumInfo> {
    let eigs: Vec<Vec<f64>> = pair.probes().x.iter().map(|m| eig_hermitian(m).eigenvalues).collect();
    let scale = eigs[0].iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let tolerance = zero_tol.max(1e-12) * scale;
    let residual = eigs[1..].iter().flat_map(|e| e.iter().zip(&eigs[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
    if residual > tolerance {
        return Err(Error::BrokenPrecession { residual, tolerance });
    }
    let all: Vec<f64> = eigs.concat();
    SpectrumInfo::from_outcomes(&all, zero_tol)
}

/// Upper bound on `P3` for any theory in which the means of `X_0, X_1, X_2`
/// sum to zero: `(1 + x₊/x₋)⁻¹` when `x₊ < x₋` or zero is not an outcome,
/// `1/2` otherwise (including one-sided spectra).
pub fn general_bound(spec: &SpectrumInfo) -> Result<f64> {
    match (spec.x_plus, spec.x_minus) {
        (None, None) if !spec.has_zero => Err(Error::InvalidSpectrum("empty spectrum".into())),
        (Some(xp), Some(xm)) if xp < xm || !spec.has_zero => Ok(1.0 / (1.0 + xp / xm)),
        _ => Ok(0.5),
    }
}

/// Result of scoring a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub p3: f64,
    /// `⟨Θ(X_k)⟩` for `k = 0, 1, 2`.
    pub per_time: [f64; 3],
    pub classical_bound: f64,
    pub general_bound: f64,
    pub violates_classical: bool,
    pub saturates_general: bool,
}

/// The Heaviside operators `Θ(X_k)` of a pair together with its bound,
/// for repeated scoring.
#[derive(Clone, Debug)]
pub struct ScoreOperators {
    pub theta: [HermitianMatrix; 3],
    pub spectrum: SpectrumInfo,
    pub general_bound: f64,
}

impl ScoreOperators {
    pub fn new(pair: &PrecessingPair, zero_tol: f64) -> Result<Self> {
        if !(zero_tol.is_finite() && zero_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("zero_tol must be finite and ≥ 0, got {zero_tol}")));
        }
        let spectrum = spectrum(pair, zero_tol)?;
        let general_bound = general_bound(&spectrum)?;
        let theta = pair.probes().x.clone().map(|m| heaviside_of(&eig_hermitian(&m), zero_tol));
        Ok(Self { theta, spectrum, general_bound })
    }

    pub fn dim(&self) -> usize {
        self.theta[0].dim()
    }

    /// `(⟨Θ(X_0)⟩, ⟨Θ(X_1)⟩, ⟨Θ(X_2)⟩)`.
    pub fn tuple(&self, state: &State) -> Result<[f64; 3]> {
        Ok([state.expectation(&self.theta[0])?, state.expectation(&self.theta[1])?, state.expectation(&self.theta[2])?])
    }

    pub fn score(&self, state: &State) -> Result<ScoreReport> {
        self.score_with_tol(state, SCORE_TOL)
    }

    /// Like [`score`](Self::score) with a custom tolerance for the flags.
    pub fn score_with_tol(&self, state: &State, score_tol: f64) -> Result<ScoreReport> {
        let per_time = self.tuple(state)?;
        let p3 = per_time.iter().sum::<f64>() / 3.0;
        Ok(ScoreReport {
            p3,
            per_time,
            classical_bound: CLASSICAL_BOUND,
            general_bound: self.general_bound,
            violates_classical: p3 > CLASSICAL_BOUND + score_tol,
            saturates_general: (p3 - self.general_bound).abs() <= score_tol,
        })
    }

    /// `Q3 = (1/3) Σ_k Θ(X_k)`.
    pub fn q3(&self) -> HermitianMatrix {
        let m = (self.theta[0].matrix() + self.theta[1].matrix() + self.theta[2].matrix()) / c(3.0, 0.0);
        HermitianMatrix::from_trusted(m)
    }
}

/// Scores a pure or mixed state: `P3 = (1/3) Σ_k ⟨Θ(X_k)⟩`.
pub fn p3_score(pair: &PrecessingPair, state: &State) -> Result<ScoreReport> {
    if state.dim() != pair.dim() {
        return Err(Error::DimensionMismatch { expected: pair.dim(), found: state.dim() });
    }
    ScoreOperators::new(pair, DEFAULT_ZERO_TOL)?.score(state)
}

/// `Q3 = (1/3) Σ_k Θ(X_k)`, whose expectation is the score.
pub fn score_operator(pair: &PrecessingPair) -> Result<HermitianMatrix> {
    Ok(ScoreOperators::new(pair, DEFAULT_ZERO_TOL)?.q3())
}

/// Largest achievable `P3` (top eigenvalue of `Q3`) and a maximizing state.
pub fn max_p3(pair: &PrecessingPair) -> Result<(f64, StateVector)> {
    let eig = eig_hermitian(&score_operator(pair)?);
    Ok((eig.max(), eig.top_vector()))
}

/// `max_s |Σ_k ⟨X_k⟩_s|`, zero for every valid pair.
pub fn check_mean_sum_zero(pair: &PrecessingPair, states: &[State]) -> Result<f64> {
    mean_sum_residual(pair.probes(), states)
}

pub(crate) fn mean_sum_residual(probes: &Probes, states: &[State]) -> Result<f64> {
    let sum = HermitianMatrix::from_trusted(probes.x[0].matrix() + probes.x[1].matrix() + probes.x[2].matrix());
    states.iter().map(|s| s.expectation(&sum).map(f64::abs)).try_fold(0.0_f64, |acc, r| r.map(|v| acc.max(v)))
}

/// Outcome of the energy-level dimension witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionWitness {
    /// Distinct eigenvalues of the Hamiltonian.
    pub distinct_levels: usize,
    /// `(λ_min, λ_max)` of `Q3`.
    pub p3_range: (f64, f64),
    /// Both ends of the range equal 1/2.
    pub trivial: bool,
}

/// Relative tolerance for clustering Hamiltonian eigenvalues into levels.
pub const LEVEL_TOL: f64 = 1e-9;

/// Counts energy levels and reports the range of achievable scores. A
/// system with at most three distinct levels can only score 1/2; a
/// nontrivial range there is reported as an error.
pub fn dimension_witness(pair: &PrecessingPair) -> Result<DimensionWitness> {
    let Evolver::Hamiltonian { hamiltonian, .. } = pair.evolver() else {
        return Err(Error::UnsupportedFamily {
            family: pair.family().label(),
            reason: "the dimension witness needs a continuous (Hamiltonian) evolver".into(),
        });
    };
    let distinct_levels = eig_hermitian(hamiltonian).clustered(LEVEL_TOL).len();
    let q3 = eig_hermitian(&score_operator(pair)?);
    let p3_range = (q3.min(), q3.max());
    let trivial = (p3_range.0 - 0.5).abs() <= SCORE_TOL && (p3_range.1 - 0.5).abs() <= SCORE_TOL;
    if distinct_levels <= 3 && !trivial {
        return Err(Error::InvalidSpectrum(format!("{distinct_levels} energy levels but P3 ranges over [{}, {}]", p3_range.0, p3_range.1)));
    }
    Ok(DimensionWitness { distinct_levels, p3_range, trivial })
}

/// Best score of a classical `N`-division clock hand, by enumerating the
/// pointer positions. The score is linear in the distribution over
/// positions, so no mixture beats the best deterministic position.
pub fn classical_clock_max_p3(n: usize) -> Result<f64> {
    if n == 0 || !n.is_multiple_of(6) {
        return Err(Error::InvalidParameter(format!("N must be a positive multiple of 6, got {n}")));
    }
    // 2Θ(cos(2πm/N)) ∈ {0, 1, 2}, decided in integers
    let doubled_theta = |m: usize| -> usize {
        let q = 4 * (m % n);
        if q < n || q > 3 * n {
            2
        } else if q == n || q == 3 * n {
            1
        } else {
            0
        }
    };
    let best = (0..n).map(|pos| (0..3).map(|k| doubled_theta(pos + k * n / 3)).sum::<usize>()).max().unwrap_or(0);
    Ok(best as f64 / 6.0)
}

/// `A ↦ A⊗|i⟩⟨i| + A*⊗|−i⟩⟨−i|`, which equals `Re(A)⊗1 + Im(A)⊗J`
/// with `J = [[0, 1], [−1, 0]]` in the computational basis.
fn real_encode(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            out[(2 * i, 2 * j)] = c(z.re, 0.0);
            out[(2 * i + 1, 2 * j + 1)] = c(z.re, 0.0);
            out[(2 * i, 2 * j + 1)] = c(z.im, 0.0);
            out[(2 * i + 1, 2 * j)] = c(-z.im, 0.0);
        }
    }
    out
}

fn real_encode_h(m: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_trusted(real_encode(m.matrix()))
}

/// Encodes a pair into quantum theory over real Hilbert spaces. Observables
/// and unitaries become real matrices of twice the dimension; a Hamiltonian
/// `H` becomes `H⊗|i⟩⟨i| − H*⊗|−i⟩⟨−i|`, so that `e^{−iH_enc t}` is the
/// encoded propagator.
pub fn embed_real(pair: &PrecessingPair) -> Result<PrecessingPair> {
    let evolver = match pair.evolver() {
        Evolver::Hamiltonian { hamiltonian, omega } => {
            // i·enc(−iH) = H⊗P₊ − H*⊗P₋
            let minus_i_h = hamiltonian.matrix() * c(0.0, -1.0);
            let generator = real_encode(&minus_i_h) * c(0.0, 1.0);
            Evolver::Hamiltonian { hamiltonian: HermitianMatrix::from_trusted(generator), omega: *omega }
        }
        Evolver::Unitary { unitary } => Evolver::Unitary { unitary: UnitaryMatrix::new(real_encode(unitary.matrix()))? },
        Evolver::Tabulated { x, y } => {
            Evolver::Tabulated { x: x.clone().map(|m| real_encode_h(&m)), y: y.clone().map(|m| real_encode_h(&m)) }
        }
    };
    PrecessingPair::new(real_encode_h(pair.x()), real_encode_h(pair.y()), evolver, Family::RealEncoded(Box::new(pair.family().clone())))
}

/// `ρ ↦ (ρ⊗|i⟩⟨i| + ρ*⊗|−i⟩⟨−i|)/2`, a real density matrix.
pub fn real_encode_state(state: &State) -> DensityMatrix {
    let rho = state.to_density();
    DensityMatrix::from_trusted(real_encode(rho.matrix()) / c(2.0, 0.0))
}

fn kron_identity(m: &CMatrix, n: usize) -> CMatrix {
    m.kronecker(&CMatrix::identity(n, n))
}

/// Grassmannian embedding: `X ↦ X⊗1_n`, `U ↦ U⊗1_n` (`H ↦ H⊗1_n`).
pub fn embed_grassmann(pair: &PrecessingPair, n: usize) -> Result<PrecessingPair> {
    if n == 0 {
        return Err(Error::InvalidParameter("Grassmann multiplicity must be ≥ 1".into()));
    }
    let lift = |m: &HermitianMatrix| HermitianMatrix::from_trusted(kron_identity(m.matrix(), n));
    let evolver = match pair.evolver() {
        Evolver::Hamiltonian { hamiltonian, omega } => Evolver::Hamiltonian { hamiltonian: lift(hamiltonian), omega: *omega },
        Evolver::Unitary { unitary } => Evolver::Unitary { unitary: UnitaryMatrix::new(kron_identity(unitary.matrix(), n))? },
        Evolver::Tabulated { x, y } => Evolver::Tabulated { x: x.clone().map(|m| lift(&m)), y: y.clone().map(|m| lift(&m)) },
    };
    PrecessingPair::new(lift(pair.x()), lift(pair.y()), evolver, Family::Grassmann { inner: Box::new(pair.family().clone()), n })
}

/// `ρ ↦ ρ⊗1_n/n`.
pub fn grassmann_encode_state(state: &State, n: usize) -> DensityMatrix {
    let rho = state.to_density();
    DensityMatrix::from_trusted(kron_identity(rho.matrix(), n) / c(n as f64, 0.0))
}
