//! Exit point of a ray from the convex hull of a finite point set.
//!
//! Points are given relative to the ray origin, in a frame whose third axis
//! is the ray direction: point `j` has height `a_j` along the ray and planar
//! offset `b_j`. The ray origin itself is always available (weight `μ`).
//! The program
//!
//! ```text
//! maximize Σ λ_j a_j   s.t.  Σ λ_j b_j = 0,  Σ λ_j + μ = 1,  λ, μ ≥ 0
//! ```
//!
//! is solved by a revised simplex on three rows. Two artificial columns
//! fixed at zero seed a feasible basis, which also copes with point sets
//! whose planar offsets are collinear (flat bodies seen edge-on).

use nalgebra::{Matrix3, Vector3};

const PIVOT_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Col {
    Point(usize),
    Origin,
    Artificial(usize),
}

/// Solution of the exit-point program.
#[derive(Clone, Debug)]
pub(crate) struct ExitPoint {
    /// Height of the exit point along the ray.
    pub value: f64,
    /// Nonzero weights `(point index, λ)`; the origin receives `1 − Σ λ`.
    pub weights: Vec<(usize, f64)>,
    /// Dual `(y₁, y₂)`: every point satisfies `a_j − y·b_j ≤ value`.
    pub tilt: [f64; 2],
}

#[derive(Clone, Debug)]
pub(crate) struct ExitLp {
    heights: Vec<f64>,
    offsets: Vec<[f64; 2]>,
    basis: [Col; 3],
}

impl ExitLp {
    pub fn new() -> Self {
        Self { heights: Vec::new(), offsets: Vec::new(), basis: [Col::Artificial(0), Col::Artificial(1), Col::Origin] }
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn push(&mut self, height: f64, offset: [f64; 2]) -> usize {
        self.heights.push(height);
        self.offsets.push(offset);
        self.heights.len() - 1
    }

    fn column(&self, col: Col) -> Vector3<f64> {
        match col {
            Col::Point(j) => Vector3::new(self.offsets[j][0], self.offsets[j][1], 1.0),
            Col::Origin => Vector3::new(0.0, 0.0, 1.0),
            Col::Artificial(i) => {
                let mut v = Vector3::zeros();
                v[i] = 1.0;
                v
            }
        }
    }

    fn cost(&self, col: Col) -> f64 {
        match col {
            Col::Point(j) => self.heights[j],
            _ => 0.0,
        }
    }

    fn basis_inverse(&self) -> Option<Matrix3<f64>> {
        let b = Matrix3::from_columns(&self.basis.map(|c| self.column(c)));
        b.try_inverse()
    }

    /// Solves from the current basis (warm start) with Bland's rule.
    pub fn solve(&mut self) -> ExitPoint {
        let rhs = Vector3::new(0.0, 0.0, 1.0);
        for _ in 0..MAX_PIVOTS {
            let Some(binv) = self.basis_inverse() else {
                // lost the basis to rounding; restart from the trivial one
                self.basis = [Col::Artificial(0), Col::Artificial(1), Col::Origin];
                continue;
            };
            let x = binv * rhs;
            let cb = Vector3::from(self.basis.map(|c| self.cost(c)));
            let y = binv.transpose() * cb;

            let mut entering = None;
            let candidates = (0..self.len()).map(Col::Point).chain(std::iter::once(Col::Origin));
            for col in candidates {
                if self.basis.contains(&col) {
                    continue;
                }
                if self.cost(col) - y.dot(&self.column(col)) > PIVOT_TOL {
                    entering = Some(col);
                    break;
                }
            }
            let Some(entering) = entering else {
                return self.extract(&x, &y);
            };

            let d = binv * self.column(entering);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..3 {
                let ratio = match self.basis[i] {
                    Col::Artificial(_) if d[i].abs() > PIVOT_TOL => 0.0,
                    Col::Artificial(_) => continue,
                    _ if d[i] > PIVOT_TOL => x[i].max(0.0) / d[i],
                    _ => continue,
                };
                let better = match leave {
                    None => true,
                    Some((k, best)) => ratio < best - 1e-15 || (ratio <= best + 1e-15 && self.rank(i) < self.rank(k)),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((i, _)) => self.basis[i] = entering,
                // unbounded cannot happen: Σλ ≤ 1 bounds every column
                None => return self.extract(&x, &y),
            }
        }
        let binv = self.basis_inverse().unwrap_or_else(Matrix3::identity);
        let x = binv * rhs;
        let cb = Vector3::from(self.basis.map(|c| self.cost(c)));
        let y = binv.transpose() * cb;
        self.extract(&x, &y)
    }

    fn rank(&self, row: usize) -> usize {
        match self.basis[row] {
            Col::Artificial(i) => i,
            Col::Point(j) => 2 + j,
            Col::Origin => usize::MAX,
        }
    }

    fn extract(&self, x: &Vector3<f64>, y: &Vector3<f64>) -> ExitPoint {
        let weights: Vec<(usize, f64)> = self
            .basis
            .iter()
            .zip(x.iter())
            .filter_map(|(col, &w)| match col {
                Col::Point(j) if w > 0.0 => Some((*j, w)),
                _ => None,
            })
            .collect();
        let value = weights.iter().map(|&(j, w)| w * self.heights[j]).sum();
        ExitPoint { value, weights, tilt: [y[0], y[1]] }
    }
}
