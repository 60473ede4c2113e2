//! The reproduction table: each headline number recomputed, compared with
//! its reference value and timed.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::observables::{
    make_clock_default, make_four_level, make_spin, optimal_state, verify_precession, PrecessingPair, PRECESSION_TOL,
};
use crate::probspace::{classical_polytope, clock_hull, full_cube, hull_distance, QuantumBody, DEFAULT_RAY_TOL};
use crate::protocol::{
    check_mean_sum_zero, classical_clock_max_p3, dimension_witness, embed_grassmann, embed_real, general_bound, grassmann_encode_state,
    max_p3, p3_score, real_encode_state, score_operator, spectrum, ScoreOperators,
};
use crate::random::{random_ladder_pair, random_state, rng_from_seed};
use crate::spectral::{eig_hermitian, State, DEFAULT_ZERO_TOL};

/// Best known upper bound on the harmonic-oscillator score.
pub const OSCILLATOR_BOUND: f64 = 0.730822;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub reference: &'static str,
    pub measured: String,
    pub seconds: f64,
    pub time_limit: f64,
    pub pass: bool,
}

struct Check {
    ok: bool,
    measured: String,
}

type Runner = fn() -> Result<Check>;

const CRITERIA: [(u8, &str, &str, f64, Runner); 11] = [
    (1, "spin-3/2 maximum", "max P3 = 3/4", 0.1, spin_max),
    (2, "bound saturation", "max P3(FourLevel) = (1+x+/x-)^-1", 5.0, saturation),
    (3, "clock bound", "(1+cos(7pi/15))^-1 ~ 0.905", 1.0, clock_bound),
    (4, "oscillator comparison", "P3 >= 0.731 > 0.730822", 0.1, oscillator),
    (5, "classical baseline", "2/3 for N = 6, 12, 60", 0.1, classical),
    (6, "dimension witness", "P3 = 1/2 with <= 3 levels", 10.0, witness),
    (7, "bound soundness", "P3 <= general bound", 30.0, soundness),
    (8, "precession and vanishing mean sum", "residuals <= 1e-9", 5.0, precession),
    (9, "probability-space geometry", "Fig. 1 surface, clock hull inside Q", 180.0, geometry),
    (10, "embeddings", "real and Grassmann keep P3", 1.0, embeddings),
    (11, "reflection symmetry", "lambda_min + lambda_max = 1", 1.0, reflection),
];

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| run_entry(*c)).collect()
}

/// Runs criterion `id` (1-based), if it exists.
pub fn run_one(id: u8) -> Option<CriterionOutcome> {
    CRITERIA.iter().find(|c| c.0 == id).map(|c| run_entry(*c))
}

fn run_entry((id, title, reference, time_limit, f): (u8, &'static str, &'static str, f64, Runner)) -> CriterionOutcome {
    let start = Instant::now();
    let check = f().unwrap_or_else(|e| Check { ok: false, measured: format!("error: {e}") });
    let seconds = start.elapsed().as_secs_f64();
    CriterionOutcome { id, title, reference, measured: check.measured, seconds, time_limit, pass: check.ok && seconds < time_limit }
}

fn spin_max() -> Result<Check> {
    let (p, _) = max_p3(&make_spin(1.5)?)?;
    Ok(Check { ok: (p - 0.75).abs() <= 1e-9, measured: format!("{p:.12}") })
}

fn saturation() -> Result<Check> {
    let mut rng = rng_from_seed(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let xp: f64 = rng.random_range(0.05..5.0);
        let xm = xp * rng.random_range(1.01..20.0);
        let (p, _) = max_p3(&make_four_level(xp, xm)?)?;
        worst = worst.max((p - 1.0 / (1.0 + xp / xm)).abs());
    }
    Ok(Check { ok: worst <= 1e-9, measured: format!("max deviation {worst:.2e}") })
}

fn clock_bound() -> Result<Check> {
    let pair = make_clock_default(60, 1.0)?;
    let g = general_bound(&spectrum(&pair, DEFAULT_ZERO_TOL)?)?;
    let closed = 1.0 / (1.0 + (7.0 * PI / 15.0).cos());
    let score = p3_score(&pair, &optimal_state(&pair)?.into())?.p3;
    let ok = (g - closed).abs() <= 1e-12 && (score - g).abs() <= 1e-9 && (g - 0.905).abs() < 5e-4;
    Ok(Check { ok, measured: format!("bound {g:.12}, optimal score {score:.12}") })
}

fn oscillator() -> Result<Check> {
    let pair = make_four_level(1.0, 2.72)?;
    let p = p3_score(&pair, &optimal_state(&pair)?.into())?.p3;
    let margin = p - OSCILLATOR_BOUND;
    Ok(Check { ok: p >= 0.731 && margin > 0.0, measured: format!("{p:.12}, {margin:.2e} above the oscillator bound") })
}

fn classical() -> Result<Check> {
    let values = [6, 12, 60].map(classical_clock_max_p3);
    let mut ok = true;
    let mut parts = Vec::new();
    for v in values {
        let v = v?;
        ok &= v == 2.0 / 3.0;
        parts.push(format!("{v:.15}"));
    }
    Ok(Check { ok, measured: parts.join(", ") })
}

fn witness() -> Result<Check> {
    let mut pairs: Vec<PrecessingPair> = vec![make_spin(0.5)?, make_spin(1.0)?];
    let mut rng = rng_from_seed(6);
    for _ in 0..50 {
        let mults: Vec<usize> = (0..3).map(|_| rng.random_range(1..=3)).collect();
        pairs.push(random_ladder_pair(&mults, &mut rng)?);
    }
    let mut worst: f64 = 0.0;
    for pair in &pairs {
        let w = dimension_witness(pair)?;
        worst = worst.max((w.p3_range.0 - 0.5).abs()).max((w.p3_range.1 - 0.5).abs());
    }
    Ok(Check { ok: worst <= 1e-9, measured: format!("{} pairs, max |P3 - 1/2| {worst:.2e}", pairs.len()) })
}

fn soundness() -> Result<Check> {
    let pairs = [make_four_level(1.0, 3.0)?, make_spin(1.5)?, make_clock_default(12, 1.0)?];
    let mut rng = rng_from_seed(7);
    let mut worst = f64::NEG_INFINITY;
    for pair in &pairs {
        let ops = ScoreOperators::new(pair, DEFAULT_ZERO_TOL)?;
        for _ in 0..1000 {
            let r = ops.score(&random_state(pair.dim(), &mut rng).into())?;
            worst = worst.max(r.p3 - r.general_bound);
        }
    }
    Ok(Check { ok: worst <= 1e-9, measured: format!("max P3 - bound {worst:.4}") })
}

/// The built-in families checked by criterion 8.
pub fn builtin_pairs() -> Result<Vec<PrecessingPair>> {
    let mut out = vec![make_four_level(1.0, 3.0)?, make_four_level(1.0, 2.72)?, make_four_level(0.3, 7.0)?];
    for j in [0.5, 1.0, 1.5, 2.0, 2.5] {
        out.push(make_spin(j)?);
    }
    for n in [6, 12, 60] {
        out.push(make_clock_default(n, 1.0)?);
    }
    Ok(out)
}

fn precession() -> Result<Check> {
    let mut rng = rng_from_seed(8);
    let mut worst_prec: f64 = 0.0;
    let mut worst_mean: f64 = 0.0;
    let mut ok = true;
    for pair in builtin_pairs()? {
        let rep = verify_precession(&pair, PRECESSION_TOL);
        ok &= rep.pass;
        worst_prec = worst_prec.max(rep.max_residual / pair.probes().x[0].norm());
        let states: Vec<State> = (0..100).map(|_| random_state(pair.dim(), &mut rng).into()).collect();
        let m = check_mean_sum_zero(&pair, &states)?;
        let scale = eig_hermitian(pair.x()).spectral_norm().max(1.0);
        ok &= m <= 1e-9 * scale;
        worst_mean = worst_mean.max(m / scale);
    }
    Ok(Check { ok, measured: format!("precession {worst_prec:.1e}, mean sum {worst_mean:.1e}") })
}

fn geometry() -> Result<Check> {
    let spin = QuantumBody::new(&make_spin(1.5)?)?;
    let cloud = spin.sample_surface(500, 0, DEFAULT_RAY_TOL)?;
    let max_gap = cloud.iter().map(|r| r.gap()).fold(0.0, f64::max);
    let max_p3 = cloud.iter().map(|r| r.tuple.iter().sum::<f64>() / 3.0).fold(0.0, f64::max);
    let cube = full_cube();
    let classical = classical_polytope();
    let in_cube = cloud.iter().all(|r| cube.contains(r.tuple, 1e-9));
    let outside_c = cloud.iter().filter(|r| !classical.contains(r.tuple, 1e-9)).count();

    let clock = make_clock_default(60, 1.0)?;
    let g = general_bound(&spectrum(&clock, DEFAULT_ZERO_TOL)?)?;
    let body = QuantumBody::new(&clock)?;
    let points: Vec<[f64; 3]> = body.sample_surface(200, 0, DEFAULT_RAY_TOL)?.iter().map(|r| r.tuple).collect();
    let mut worst_vertex: f64 = 0.0;
    for v in clock_hull(60, g)?.vertices() {
        worst_vertex = worst_vertex.max(hull_distance(&points, v.coords())?);
    }
    let ok = max_gap <= 1e-4 && (max_p3 - 0.75).abs() <= 1e-4 && in_cube && outside_c > 0 && worst_vertex <= 1e-3;
    Ok(Check {
        ok,
        measured: format!("gap {max_gap:.1e}, max P3 {max_p3:.6}, {outside_c} beyond C, clock vertex distance {worst_vertex:.1e}"),
    })
}

fn embeddings() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for pair in [make_four_level(1.0, 3.0)?, make_clock_default(12, 1.0)?] {
        let state: State = optimal_state(&pair)?.into();
        let base = p3_score(&pair, &state)?.p3;
        let real = p3_score(&embed_real(&pair)?, &real_encode_state(&state).into())?.p3;
        let grass = p3_score(&embed_grassmann(&pair, 2)?, &grassmann_encode_state(&state, 2).into())?.p3;
        worst = worst.max((real - base).abs()).max((grass - base).abs());
    }
    Ok(Check { ok: worst <= 1e-9, measured: format!("max deviation {worst:.1e}") })
}

fn reflection() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for pair in [make_four_level(1.0, 3.0)?, make_four_level(0.4, 1.7)?, make_clock_default(12, 1.0)?, make_clock_default(60, 1.0)?] {
        let eig = eig_hermitian(&score_operator(&pair)?);
        worst = worst.max((eig.min() + eig.max() - 1.0).abs());
    }
    Ok(Check { ok: worst <= 1e-9, measured: format!("max |sum - 1| {worst:.1e}") })
}
