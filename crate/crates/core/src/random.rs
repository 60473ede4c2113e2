//! Seeded random states, unitaries and ladder-Hamiltonian pairs.
//!
//! All generators take an explicit RNG; [`rng_from_seed`] gives the
//! deterministic stream used by the CLI and the test suites.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::observables::{Evolver, Family, PrecessingPair};
use crate::spectral::{c, CMatrix, CVector, HermitianMatrix, StateVector, UnitaryMatrix, C64};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream for sweep index `index`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    StateVector::normalized(v).expect("a Gaussian vector is non-zero with probability one")
}

/// Hermitian matrix with Gaussian entries (GUE up to scale).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let g = ginibre(dim, dim, rng);
    HermitianMatrix::from_trusted(&g + g.adjoint())
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    UnitaryMatrix::from_trusted(q)
}

/// A random pair precessing under a ladder Hamiltonian.
///
/// `multiplicities[n]` is the degeneracy of level `E_0 + n` (ω = 1). The
/// lowering operator `A` couples level `n+1` to level `n` through a random
/// complex block; `X = A + A†`, `Y = −i(A − A†)`. Everything is finally
/// rotated by a Haar-random unitary so no basis is privileged.
pub fn random_ladder_pair<R: Rng + ?Sized>(multiplicities: &[usize], rng: &mut R) -> Result<PrecessingPair> {
    if multiplicities.is_empty() || multiplicities.contains(&0) {
        return Err(Error::InvalidParameter("ladder multiplicities must be positive".into()));
    }
    let dim: usize = multiplicities.iter().sum();
    let offsets: Vec<usize> = multiplicities
        .iter()
        .scan(0, |acc, &m| {
            let start = *acc;
            *acc += m;
            Some(start)
        })
        .collect();
    let e0: f64 = rng.random_range(-2.0..2.0);
    let mut energies = Vec::with_capacity(dim);
    for (n, &m) in multiplicities.iter().enumerate() {
        energies.extend(std::iter::repeat_n(e0 + n as f64, m));
    }
    let mut a = CMatrix::zeros(dim, dim);
    for n in 0..multiplicities.len().saturating_sub(1) {
        let block = ginibre(multiplicities[n], multiplicities[n + 1], rng);
        a.view_mut((offsets[n], offsets[n + 1]), block.shape()).copy_from(&block);
    }
    let x = &a + a.adjoint();
    let y = (&a - a.adjoint()) * c(0.0, -1.0);
    let v = random_unitary(dim, rng);
    let rotate = |m: &CMatrix| v.matrix() * m * v.matrix().adjoint();
    let h = CMatrix::from_diagonal(&CVector::from_iterator(dim, energies.iter().map(|&e| c(e, 0.0))));
    PrecessingPair::new(
        HermitianMatrix::from_trusted(rotate(&x)),
        HermitianMatrix::from_trusted(rotate(&y)),
        Evolver::Hamiltonian { hamiltonian: HermitianMatrix::from_trusted(rotate(&h)), omega: 1.0 },
        Family::Raw,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = rng_from_seed(1);
        for dim in [1, 2, 5, 9] {
            assert!(random_unitary(dim, &mut rng).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn ladder_pairs_precess() {
        let mut rng = rng_from_seed(2);
        for mults in [&[1, 1, 1][..], &[2, 1, 3], &[1, 2, 2, 1], &[1]] {
            let pair = random_ladder_pair(mults, &mut rng).unwrap();
            assert_eq!(pair.dim(), mults.iter().sum::<usize>());
        }
        assert!(random_ladder_pair(&[1, 0, 1], &mut rng).is_err());
    }

    #[test]
    fn substreams_are_deterministic_and_distinct() {
        let a: f64 = substream(5, 3).random();
        let b: f64 = substream(5, 3).random();
        let d: f64 = substream(5, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, d);
    }
}
