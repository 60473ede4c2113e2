use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on coordinates of a probability tuple.
pub const COORD_TOL: f64 = 1e-12;

/// A tuple of three probabilities `(⟨Θ(X₀)⟩, ⟨Θ(X₁)⟩, ⟨Θ(X₂)⟩)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct ProbPoint([f64; 3]);

impl ProbPoint {
    /// Validates each coordinate against `[0, 1]` (with [`COORD_TOL`] slack,
    /// then clamped).
    pub fn new(p: [f64; 3]) -> Result<Self> {
        for &x in &p {
            if !x.is_finite() {
                return Err(Error::NonFinite("probability tuple"));
            }
            if !(-COORD_TOL..=1.0 + COORD_TOL).contains(&x) {
                return Err(Error::InvalidParameter(format!("probability {x} outside [0, 1]")));
            }
        }
        Ok(Self(p.map(|x| x.clamp(0.0, 1.0))))
    }

    pub fn center() -> Self {
        Self([0.5; 3])
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    pub fn p3(&self) -> f64 {
        self.0.iter().sum::<f64>() / 3.0
    }

    pub fn reflect(&self) -> Self {
        Self(self.0.map(|x| 1.0 - x))
    }

    pub(crate) fn vec(&self) -> Vector3<f64> {
        Vector3::from(self.0)
    }
}

impl TryFrom<[f64; 3]> for ProbPoint {
    type Error = Error;
    fn try_from(p: [f64; 3]) -> Result<Self> {
        Self::new(p)
    }
}

impl From<ProbPoint> for [f64; 3] {
    fn from(p: ProbPoint) -> Self {
        p.0
    }
}

/// Signed distance from `p` to the nearer of the two nontrivial facets
/// `Σp = 2` and `Σp = 1` of the classical polytope; positive outside.
pub fn facet_dist(p: [f64; 3]) -> f64 {
    let s: f64 = p.iter().sum();
    ((s - 2.0) / 3f64.sqrt()).max((1.0 - s) / 3f64.sqrt())
}

/// A unit vector in tuple space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    n: [f64; 3],
}

impl Direction {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = Vector3::from(v).norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidParameter("direction must be a finite non-zero vector".into()));
        }
        Ok(Self { n: v.map(|x| x / norm) })
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self { n: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()] }
    }

    /// The symmetric direction `(1, 1, 1)/√3`.
    pub fn diagonal() -> Self {
        Self::new([1.0; 3]).expect("non-zero")
    }

    pub fn vector(&self) -> [f64; 3] {
        self.n
    }

    /// `(θ, φ)` with `θ ∈ [0, π]`, `φ ∈ (−π, π]`.
    pub fn angles(&self) -> (f64, f64) {
        (self.n[2].clamp(-1.0, 1.0).acos(), self.n[1].atan2(self.n[0]))
    }

    pub fn neg(&self) -> Self {
        Self { n: self.n.map(|x| -x) }
    }

    pub(crate) fn vec(&self) -> Vector3<f64> {
        Vector3::from(self.n)
    }
}

/// A half-space `normal · p ≤ offset` with unit outward normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl Facet {
    pub fn slack(&self, p: [f64; 3]) -> f64 {
        self.offset - Vector3::from(self.normal).dot(&Vector3::from(p))
    }
}

/// Convex hull of finitely many probability tuples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polytope {
    vertices: Vec<ProbPoint>,
    facets: Vec<Facet>,
}

const FACET_TOL: f64 = 1e-12;

impl Polytope {
    /// Builds the hull; facets are found by enumerating vertex triples.
    /// The hull must be three-dimensional.
    pub fn from_vertices(vertices: Vec<ProbPoint>) -> Result<Self> {
        let pts: Vec<Vector3<f64>> = vertices.iter().map(ProbPoint::vec).collect();
        let mut facets: Vec<Facet> = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                for k in j + 1..pts.len() {
                    let normal = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
                    let len = normal.norm();
                    if len < 1e-12 {
                        continue;
                    }
                    let mut normal = normal / len;
                    let mut offset = normal.dot(&pts[i]);
                    let side = |n: &Vector3<f64>, o: f64| pts.iter().map(|p| n.dot(p) - o).collect::<Vec<f64>>();
                    let d = side(&normal, offset);
                    let above = d.iter().any(|&x| x > FACET_TOL);
                    let below = d.iter().any(|&x| x < -FACET_TOL);
                    if above && below {
                        continue;
                    }
                    if !below {
                        // everything lies on the positive side: flip outward
                        if !above {
                            continue; // all coplanar, not a facet of a solid
                        }
                        normal = -normal;
                        offset = -offset;
                    }
                    let f = Facet { normal: normal.into(), offset };
                    let dup = facets
                        .iter()
                        .any(|g| (Vector3::from(g.normal) - Vector3::from(f.normal)).norm() < 1e-9 && (g.offset - f.offset).abs() < 1e-9);
                    if !dup {
                        facets.push(f);
                    }
                }
            }
        }
        if facets.len() < 4 {
            return Err(Error::InvalidParameter("polytope vertices must span three dimensions".into()));
        }
        Ok(Self { vertices, facets })
    }

    pub fn vertices(&self) -> &[ProbPoint] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Membership by facet inequalities, each relaxed by `tol`.
    pub fn contains(&self, p: [f64; 3], tol: f64) -> bool {
        self.facets.iter().all(|f| f.slack(p) >= -tol)
    }

    /// Largest violation of a facet inequality (≤ 0 inside).
    pub fn violation(&self, p: [f64; 3]) -> f64 {
        self.facets.iter().map(|f| -f.slack(p)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Maximum of a linear functional over the polytope.
    pub fn maximize(&self, w: [f64; 3]) -> f64 {
        let w = Vector3::from(w);
        self.vertices.iter().map(|v| w.dot(&v.vec())).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn cube_vertices() -> impl Iterator<Item = [f64; 3]> {
    (0..8u8).map(|b| [(b & 1) as f64, ((b >> 1) & 1) as f64, ((b >> 2) & 1) as f64])
}

fn point(p: [f64; 3]) -> ProbPoint {
    ProbPoint::new(p).expect("in the unit cube")
}

/// The full probability cube `[0, 1]³`.
pub fn full_cube() -> Polytope {
    Polytope::from_vertices(cube_vertices().map(point).collect()).expect("cube is solid")
}

/// Deterministic classical strategies: the cube minus `(0,0,0)` and `(1,1,1)`.
pub fn classical_polytope() -> Polytope {
    let verts = cube_vertices().filter(|p| p != &[0.0; 3] && p != &[1.0; 3]).map(point).collect();
    Polytope::from_vertices(verts).expect("classical polytope is solid")
}

/// Classical polytope extended by the symmetric points `(g, g, g)` and
/// `(1−g, 1−g, 1−g)`, where `g` is the general bound of the `N`-division clock.
pub fn clock_hull(n: usize, general_bound: f64) -> Result<Polytope> {
    if n == 0 || !n.is_multiple_of(6) {
        return Err(Error::InvalidParameter(format!("N must be a positive multiple of 6, got {n}")));
    }
    if !(general_bound > 0.5 && general_bound <= 1.0) {
        return Err(Error::InvalidParameter(format!("general bound must lie in (1/2, 1], got {general_bound}")));
    }
    let g = general_bound;
    let mut verts: Vec<ProbPoint> = classical_polytope().vertices;
    verts.push(point([g; 3]));
    verts.push(point([1.0 - g; 3]));
    Polytope::from_vertices(verts)
}

/// Euclidean distance from `p` to the convex hull of `cloud`, by Wolfe's
/// minimum-norm-point algorithm applied to `cloud − p`.
pub fn hull_distance(cloud: &[[f64; 3]], p: [f64; 3]) -> Result<f64> {
    if cloud.is_empty() {
        return Err(Error::InvalidParameter("empty point cloud".into()));
    }
    let p = Vector3::from(p);
    let shifted: Vec<Vector3<f64>> = cloud.iter().map(|q| Vector3::from(*q) - p).collect();
    Ok(min_norm_point(&shifted).norm())
}

fn affine_min_norm(pts: &[Vector3<f64>], corral: &[usize]) -> Option<DVector<f64>> {
    let m = corral.len();
    let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
    for (r, &i) in corral.iter().enumerate() {
        for (s, &j) in corral.iter().enumerate() {
            a[(r, s)] = pts[i].dot(&pts[j]);
        }
        a[(r, m)] = 1.0;
        a[(m, r)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    a.lu().solve(&rhs).map(|sol| sol.rows(0, m).into_owned())
}

fn min_norm_point(pts: &[Vector3<f64>]) -> Vector3<f64> {
    let scale = pts.iter().map(|q| q.norm_squared()).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-13 * scale;
    let start = (0..pts.len()).min_by(|&i, &j| pts[i].norm_squared().total_cmp(&pts[j].norm_squared())).expect("non-empty");
    let mut corral = vec![start];
    let mut w = vec![1.0];
    let combo = |corral: &[usize], w: &[f64]| corral.iter().zip(w).map(|(&i, &wi)| pts[i] * wi).sum::<Vector3<f64>>();
    for _ in 0..1000 {
        let x = combo(&corral, &w);
        let (j, qx) = (0..pts.len()).map(|j| (j, pts[j].dot(&x))).min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty");
        if x.norm_squared() - qx <= eps || corral.contains(&j) || corral.len() >= 4 {
            return x;
        }
        corral.push(j);
        w.push(0.0);
        loop {
            let Some(alpha) = affine_min_norm(pts, &corral) else { return x };
            if alpha.iter().all(|&a| a > 1e-14) {
                w = alpha.iter().copied().collect();
                break;
            }
            let theta = w
                .iter()
                .zip(alpha.iter())
                .filter(|(_, &a)| a <= 1e-14)
                .map(|(&wi, &a)| wi / (wi - a))
                .fold(f64::INFINITY, f64::min)
                .clamp(0.0, 1.0);
            for (wi, &a) in w.iter_mut().zip(alpha.iter()) {
                *wi = (1.0 - theta) * *wi + theta * a;
            }
            let keep: Vec<bool> = w.iter().map(|&wi| wi > 1e-14).collect();
            corral = corral.iter().zip(&keep).filter(|(_, &k)| k).map(|(&i, _)| i).collect();
            w = w.iter().zip(&keep).filter(|(_, &k)| k).map(|(&wi, _)| wi).collect();
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|wi| *wi /= total);
        }
    }
    combo(&corral, &w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cube_membership() {
        let cube = full_cube();
        assert_eq!(cube.vertices().len(), 8);
        assert_eq!(cube.facets().len(), 6);
        assert!(cube.contains([1.0, 1.0, 1.0], 1e-12));
        assert!(cube.contains([0.5; 3], 1e-12));
        assert!(!cube.contains([1.1, 0.0, 0.0], 1e-12));
    }

    #[test]
    fn classical_polytope_shape() {
        let c = classical_polytope();
        assert_eq!(c.vertices().len(), 6);
        // six cube faces cut down plus the two nontrivial facets
        assert_eq!(c.facets().len(), 8);
        assert!(c.contains([1.0, 1.0, 0.0], 1e-12));
        assert!(!c.contains([1.0, 1.0, 1.0], 1e-12));
        assert!(!c.contains([0.75; 3], 1e-12));
        assert_abs_diff_eq!(c.maximize([1.0 / 3.0; 3]), 2.0 / 3.0, epsilon = 1e-15);
        let nontrivial = c.facets().iter().any(|f| {
            (Vector3::from(f.normal) - Vector3::from([1.0; 3]) / 3f64.sqrt()).norm() < 1e-12 && (f.offset - 2.0 / 3f64.sqrt()).abs() < 1e-12
        });
        assert!(nontrivial);
    }

    #[test]
    fn clock_hull_cases() {
        let g = 1.0 / (1.0 + (7.0 * std::f64::consts::PI / 15.0).cos());
        let h = clock_hull(60, g).unwrap();
        assert_eq!(h.vertices().len(), 8);
        assert!(h.contains([0.905; 3], 1e-12));
        assert!(h.contains([0.9; 3], 1e-12));
        assert!(!h.contains([0.91; 3], 1e-12));
        for v in classical_polytope().vertices() {
            assert!(h.contains(v.coords(), 1e-12));
        }
        for v in h.vertices() {
            assert!(h.facets().iter().all(|f| f.slack(v.coords()) >= -1e-12));
        }
        let full = clock_hull(60, 1.0).unwrap();
        assert_eq!(full.facets().len(), 6);
        assert!(full.contains([1.0; 3], 1e-12));
        assert!(clock_hull(60, 0.5).is_err());
        assert!(clock_hull(10, 0.9).is_err());
    }

    #[test]
    fn facet_distance_sign() {
        assert!(facet_dist([0.75; 3]) > 0.0);
        assert!(facet_dist([0.25; 3]) > 0.0);
        assert!(facet_dist([0.5; 3]) < 0.0);
        assert_abs_diff_eq!(facet_dist([1.0, 1.0, 0.0]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn probpoint_validation() {
        assert!(ProbPoint::new([0.0, 1.0, 0.5]).is_ok());
        assert_eq!(ProbPoint::new([-1e-13, 1.0, 0.5]).unwrap().coords()[0], 0.0);
        assert!(ProbPoint::new([1.1, 0.0, 0.0]).is_err());
        assert!(ProbPoint::new([f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn direction_angles_round_trip() {
        let d = Direction::from_angles(1.1, -2.0);
        let (t, p) = d.angles();
        assert_abs_diff_eq!(t, 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(p, -2.0, epsilon = 1e-12);
        assert!(Direction::new([0.0; 3]).is_err());
    }

    #[test]
    fn hull_distance_examples() {
        let cube: Vec<[f64; 3]> = cube_vertices().collect();
        assert_abs_diff_eq!(hull_distance(&cube, [0.3, 0.2, 0.9]).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hull_distance(&cube, [2.0, 0.5, 0.5]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hull_distance(&cube, [2.0, 2.0, 2.0]).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
        // distance to a triangle's interior
        let tri = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_abs_diff_eq!(hull_distance(&tri, [0.0; 3]).unwrap(), 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        let seg = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        assert_abs_diff_eq!(hull_distance(&seg, [0.5, 1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-12);
    }
}
