use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::geometry::{facet_dist, Direction};
use super::simplex::ExitLp;
use crate::error::{Error, Result};
use crate::observables::PrecessingPair;
use crate::protocol::ScoreOperators;
use crate::random::substream;
use crate::spectral::{c, eig_hermitian, DensityMatrix, HermitianMatrix, StateVector, DEFAULT_ZERO_TOL};

/// Default bracket tolerance for [`QuantumBody::ray_max`].
pub const DEFAULT_RAY_TOL: f64 = 1e-6;
/// Polar × azimuthal resolution of the seeding grid.
pub const GRID_SHAPE: (usize, usize) = (32, 64);
const SEEDS_PER_RAY: usize = 12;
const MAX_CUTS: usize = 400;
const CENTER_TOL: f64 = 1e-9;

/// Image of a pure state in tuple space.
#[derive(Clone, Debug)]
pub struct SupportPoint {
    /// `λ_max(Σ_k u_k Θ(X_k))`.
    pub h: f64,
    pub tuple: [f64; 3],
    pub state: StateVector,
}

/// The convex set of achievable tuples `(⟨Θ(X₀)⟩, ⟨Θ(X₁)⟩, ⟨Θ(X₂)⟩)`.
///
/// Its support function is an exact eigenvalue computation; everything
/// else is built from that oracle.
#[derive(Debug)]
pub struct QuantumBody {
    theta: [HermitianMatrix; 3],
    center: [f64; 3],
    center_reanchored: bool,
    grid: OnceLock<Vec<(Vector3<f64>, SupportPoint)>>,
}

/// Two-sided bracket on the extent of the body along a ray from the center.
#[derive(Clone, Debug, Serialize)]
pub struct RayResult {
    pub direction: Direction,
    /// Achieved by `witness`.
    pub r_lower: f64,
    /// Certified by a supporting hyperplane.
    pub r_upper: f64,
    #[serde(skip)]
    pub witness: DensityMatrix,
    /// Tuple of `witness`, computed from the state.
    pub tuple: [f64; 3],
    /// Ray origin; the maximally mixed tuple.
    pub center: [f64; 3],
    pub center_reanchored: bool,
    pub converged: bool,
    pub oracle_calls: usize,
}

impl RayResult {
    pub fn gap(&self) -> f64 {
        self.r_upper - self.r_lower
    }
}

impl QuantumBody {
    pub fn new(pair: &PrecessingPair) -> Result<Self> {
        Self::with_zero_tol(pair, DEFAULT_ZERO_TOL)
    }

    pub fn with_zero_tol(pair: &PrecessingPair, zero_tol: f64) -> Result<Self> {
        let ops = ScoreOperators::new(pair, zero_tol)?;
        let mixed = DensityMatrix::maximally_mixed(pair.dim()).into();
        let center = ops.tuple(&mixed)?;
        let center_reanchored = center.iter().any(|x| (x - 0.5).abs() > CENTER_TOL);
        Ok(Self { theta: ops.theta, center, center_reanchored, grid: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.theta[0].dim()
    }

    /// Image of the maximally mixed state, `(1/2, 1/2, 1/2)` for the
    /// built-in families.
    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    /// True when the mixed-state tuple is not `(1/2, 1/2, 1/2)`, so rays
    /// start from the mixed-state image instead.
    pub fn center_reanchored(&self) -> bool {
        self.center_reanchored
    }

    pub fn theta(&self) -> &[HermitianMatrix; 3] {
        &self.theta
    }

    pub fn tuple_of(&self, psi: &StateVector) -> [f64; 3] {
        [0, 1, 2].map(|k| self.theta[k].expectation(psi))
    }

    pub fn tuple_of_mixed(&self, rho: &DensityMatrix) -> [f64; 3] {
        [0, 1, 2].map(|k| self.theta[k].expectation_mixed(rho))
    }

    /// `h(u) = max_ρ u·tuple(ρ)` and a pure maximizer.
    pub fn support(&self, u: [f64; 3]) -> Result<SupportPoint> {
        if u.iter().any(|x| !x.is_finite()) || u.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidParameter("support direction must be finite and non-zero".into()));
        }
        Ok(self.support_unchecked(Vector3::from(u)))
    }

    fn support_unchecked(&self, u: Vector3<f64>) -> SupportPoint {
        let m = self.theta[0].matrix() * c(u[0], 0.0) + self.theta[1].matrix() * c(u[1], 0.0) + self.theta[2].matrix() * c(u[2], 0.0);
        let eig = eig_hermitian(&HermitianMatrix::from_trusted(m));
        let state = eig.top_vector();
        SupportPoint { h: eig.max(), tuple: self.tuple_of(&state), state }
    }

    fn grid(&self) -> &[(Vector3<f64>, SupportPoint)] {
        self.grid.get_or_init(|| {
            let (nt, np) = GRID_SHAPE;
            (0..nt * np)
                .into_par_iter()
                .map(|idx| {
                    let theta = PI * ((idx / np) as f64 + 0.5) / nt as f64;
                    let phi = 2.0 * PI * (idx % np) as f64 / np as f64;
                    let u = Direction::from_angles(theta, phi).vec();
                    (u, self.support_unchecked(u))
                })
                .collect()
        })
    }

    /// Largest `r` with `center + r·n̂` achievable, bracketed to `tol`.
    ///
    /// Upper bounds come from the gauge dual `(h(u) − u·c)/(u·n̂)`; lower
    /// bounds from mixtures of support maximizers. A cutting-plane loop
    /// alternates the two: the exit point of the ray from the hull of known
    /// maximizers gives the lower bound, and that hull facet's normal is the
    /// next support query.
    pub fn ray_max(&self, dir: Direction, tol: f64) -> Result<RayResult> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidParameter(format!("ray tolerance must be positive, got {tol}")));
        }
        let n = dir.vec();
        let (e1, e2) = orthonormal_complement(n);
        let cen = Vector3::from(self.center);

        let mut lp = ExitLp::new();
        let mut states: Vec<StateVector> = Vec::new();
        let mut tuples: Vec<Vector3<f64>> = Vec::new();
        let mut r_upper = f64::INFINITY;
        let mut calls = 0usize;

        let mut add = |sp: &SupportPoint, lp: &mut ExitLp| {
            let d = Vector3::from(sp.tuple) - cen;
            lp.push(d.dot(&n), [d.dot(&e1), d.dot(&e2)]);
            states.push(sp.state.clone());
            tuples.push(Vector3::from(sp.tuple));
        };

        // seed with the best grid normals, then the ray direction itself
        let mut ranked: Vec<(f64, &SupportPoint)> = self
            .grid()
            .iter()
            .filter_map(|(u, sp)| {
                let un = u.dot(&n);
                (un > 0.05).then(|| ((sp.h - u.dot(&cen)) / un, sp))
            })
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (g, sp) in ranked.iter().take(SEEDS_PER_RAY) {
            r_upper = r_upper.min(*g);
            add(sp, &mut lp);
        }
        let sp = self.support_unchecked(n);
        calls += 1;
        r_upper = r_upper.min(sp.h - n.dot(&cen));
        add(&sp, &mut lp);

        let mut exit = lp.solve();
        let mut converged = false;
        for _ in 0..MAX_CUTS {
            if r_upper - exit.value <= tol {
                converged = true;
                break;
            }
            let u = n - e1 * exit.tilt[0] - e2 * exit.tilt[1];
            let sp = self.support_unchecked(u);
            calls += 1;
            // u·n = 1 by construction
            r_upper = r_upper.min(sp.h - u.dot(&cen));
            if r_upper - exit.value <= tol {
                converged = true;
                break;
            }
            add(&sp, &mut lp);
            exit = lp.solve();
        }

        let mut parts: Vec<(f64, DensityMatrix)> = exit.weights.iter().map(|&(j, w)| (w, states[j].to_density())).collect();
        let rest = 1.0 - exit.weights.iter().map(|w| w.1).sum::<f64>();
        if rest > 0.0 {
            parts.push((rest, DensityMatrix::maximally_mixed(self.dim())));
        }
        let witness = if parts.is_empty() { DensityMatrix::maximally_mixed(self.dim()) } else { DensityMatrix::mixture(&parts)? };
        let tuple = self.tuple_of_mixed(&witness);
        let r_lower = exit.value.max(0.0);
        // a bracket crossed by rounding is closed rather than inverted
        let r_upper = r_upper.max(r_lower);
        Ok(RayResult {
            direction: dir,
            r_lower,
            r_upper,
            witness,
            tuple,
            center: self.center,
            center_reanchored: self.center_reanchored,
            converged,
            oracle_calls: calls,
        })
    }

    /// One [`RayResult`] per direction of [`surface_directions`], in order.
    pub fn sample_surface(&self, n_directions: usize, seed: u64, tol: f64) -> Result<Vec<RayResult>> {
        let dirs = surface_directions(n_directions, seed)?;
        // build the cache once, outside the parallel sweep
        let _ = self.grid();
        dirs.into_par_iter().map(|d| self.ray_max(d, tol)).collect()
    }
}

fn orthonormal_complement(n: Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if n[0].abs() < 0.6 { Vector3::x() } else { Vector3::y() };
    let e1 = (pick - n * n.dot(&pick)).normalize();
    (e1, n.cross(&e1))
}

/// Sampling directions: the eight cube diagonals (which point at the
/// classical vertices and at the symmetric `(1,1,1)` axis), then antipodal
/// pairs from a Fibonacci lattice on the hemisphere around `(1,1,1)/√3`.
/// Consecutive entries are antipodal, so an even count gives a cloud
/// symmetric under `p ↦ (1,1,1) − p`. The seed only shuffles the order in
/// which lattice pairs are emitted.
pub fn surface_directions(n_directions: usize, seed: u64) -> Result<Vec<Direction>> {
    if n_directions == 0 {
        return Err(Error::InvalidParameter("need at least one direction".into()));
    }
    let mut dirs: Vec<Direction> = Vec::with_capacity(n_directions + 1);
    for v in [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]] {
        let d = Direction::new(v)?;
        dirs.push(d);
        dirs.push(d.neg());
    }
    let pairs = n_directions.saturating_sub(dirs.len()).div_ceil(2);
    if pairs > 0 {
        let pole = Direction::diagonal().vec();
        let (e1, e2) = orthonormal_complement(pole);
        let golden = PI * (3.0 - 5f64.sqrt());
        let mut order: Vec<usize> = (0..pairs).collect();
        if seed != 0 {
            order.shuffle(&mut substream(seed, 0));
        }
        for i in order {
            let z = (i as f64 + 0.5) / pairs as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            let v = pole * z + e1 * (rho * phi.cos()) + e2 * (rho * phi.sin());
            let d = Direction::new(v.into())?;
            dirs.push(d);
            dirs.push(d.neg());
        }
    }
    dirs.truncate(n_directions);
    Ok(dirs)
}

/// `λ_max(Σ_k u_k Θ(X_k))` and its eigenvector.
pub fn support_function(pair: &PrecessingPair, u: [f64; 3]) -> Result<(f64, StateVector)> {
    let sp = QuantumBody::new(pair)?.support(u)?;
    Ok((sp.h, sp.state))
}

pub fn ray_max(pair: &PrecessingPair, dir: Direction, tol: f64) -> Result<RayResult> {
    QuantumBody::new(pair)?.ray_max(dir, tol)
}

pub fn sample_surface(pair: &PrecessingPair, n_directions: usize, seed: u64, tol: f64) -> Result<Vec<RayResult>> {
    QuantumBody::new(pair)?.sample_surface(n_directions, seed, tol)
}

pub const CSV_HEADER: &str = "idx,nx,ny,nz,r_lower,r_upper,p0,p1,p2,facet_dist";

/// Writes the point cloud, one row per ray, 17 significant digits.
pub fn write_csv<W: Write>(mut out: W, results: &[RayResult]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (idx, r) in results.iter().enumerate() {
        let [nx, ny, nz] = r.direction.vector();
        let [p0, p1, p2] = r.tuple;
        let fields = [nx, ny, nz, r.r_lower, r.r_upper, p0, p1, p2, facet_dist(r.tuple)];
        let row: Vec<String> = fields.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{idx},{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{make_four_level, make_spin};
    use approx::assert_abs_diff_eq;

    #[test]
    fn support_examples() {
        let pair = make_four_level(1.0, 3.0).unwrap();
        assert_abs_diff_eq!(support_function(&pair, [1.0, 0.0, 0.0]).unwrap().0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(support_function(&pair, [1.0; 3]).unwrap().0, 2.25, epsilon = 1e-12);
        assert_abs_diff_eq!(support_function(&pair, [-1.0; 3]).unwrap().0, -0.75, epsilon = 1e-12);
        assert!(support_function(&pair, [0.0; 3]).is_err());
    }

    #[test]
    fn diagonal_ray_four_level() {
        let pair = make_four_level(1.0, 3.0).unwrap();
        let r = ray_max(&pair, Direction::diagonal(), 1e-9).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.r_lower, 3f64.sqrt() / 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.r_upper, 3f64.sqrt() / 4.0, epsilon = 1e-9);
        for k in 0..3 {
            assert_abs_diff_eq!(r.tuple[k], 0.5 + r.r_lower / 3f64.sqrt(), epsilon = 1e-9);
        }
    }

    #[test]
    fn flat_body_spin_one() {
        let pair = make_spin(1.0).unwrap();
        let body = QuantumBody::new(&pair).unwrap();
        for d in [Direction::diagonal(), Direction::diagonal().neg()] {
            let r = body.ray_max(d, 1e-9).unwrap();
            assert!(r.converged);
            assert_abs_diff_eq!(r.r_upper, 0.0, epsilon = 1e-9);
        }
        // in-plane direction: the body is a planar region, reached edge-on
        let r = body.ray_max(Direction::new([1.0, -1.0, 0.0]).unwrap(), 1e-7).unwrap();
        assert!(r.converged, "gap {}", r.gap());
        assert!(r.r_lower > 0.1);
    }

    #[test]
    fn directions_are_antipodal_pairs() {
        let dirs = surface_directions(40, 7).unwrap();
        assert_eq!(dirs.len(), 40);
        for pair in dirs.chunks(2) {
            let s = pair[0].vec() + pair[1].vec();
            assert!(s.norm() < 1e-15);
        }
        assert_eq!(surface_directions(3, 0).unwrap().len(), 3);
        assert!(surface_directions(0, 0).is_err());
        let a = surface_directions(30, 1).unwrap();
        let b = surface_directions(30, 2).unwrap();
        let key = |d: &Direction| d.vector().map(|x| (x * 1e12).round() as i64);
        let mut ka: Vec<_> = a.iter().map(key).collect();
        let mut kb: Vec<_> = b.iter().map(key).collect();
        ka.sort();
        kb.sort();
        assert_eq!(ka, kb, "the seed changes order only");
    }

    #[test]
    fn csv_layout() {
        let pair = make_spin(1.5).unwrap();
        let res = sample_surface(&pair, 4, 0, 1e-6).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &res).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1].split(',').count(), 10);
        assert!(lines[1].starts_with("0,5.7735026918962"));
    }
}
