//! Numerics for the three-time precession protocol: uniformly precessing
//! observables, the spectrum-dependent score bound, quantum scores and the
//! geometry of achievable probability tuples.

pub mod error;
pub mod observables;
pub mod probspace;
pub mod protocol;
pub mod random;
pub mod repro;
pub mod spectral;

pub use error::{Error, Result};
pub use observables::{Evolver, Family, FamilySpec, PrecessingPair, PrecessionReport, Probes};
pub use probspace::{Direction, Polytope, ProbPoint, QuantumBody, RayResult};
pub use protocol::{DimensionWitness, ScoreOperators, ScoreReport, SpectrumInfo};
pub use spectral::{CMatrix, CVector, DensityMatrix, EigenSystem, HermitianMatrix, State, StateVector, UnitaryMatrix, C64};
