//! Geometry of achievable probability tuples: the cube, the classical
//! polytope, the clock hull and the quantum body with its ray brackets.

mod body;
mod geometry;
mod simplex;

pub use body::{
    ray_max, sample_surface, support_function, surface_directions, write_csv, QuantumBody, RayResult, SupportPoint, CSV_HEADER,
    DEFAULT_RAY_TOL, GRID_SHAPE,
};
pub use geometry::{
    classical_polytope, clock_hull, facet_dist, full_cube, hull_distance, Direction, Facet, Polytope, ProbPoint, COORD_TOL,
};
