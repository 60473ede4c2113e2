//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use precess_core::observables::{
    make_clock_default, make_four_level, make_spin, optimal_state, verify_precession, PrecessingPair, PRECESSION_TOL,
};
use precess_core::probspace::{classical_polytope, clock_hull, full_cube, QuantumBody};
use precess_core::protocol::{
    check_mean_sum_zero, classical_clock_max_p3, dimension_witness, embed_grassmann, embed_real, general_bound, grassmann_encode_state,
    max_p3, p3_score, real_encode_state, score_operator, spectrum, ScoreOperators,
};
use precess_core::random::{random_ladder_pair, random_state, rng_from_seed};
use precess_core::spectral::{eig_hermitian, DEFAULT_ZERO_TOL};
use precess_core::State;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, f64, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spin_three_halves() -> Outcome {
    let (p, psi) = max_p3(&make_spin(1.5).unwrap()).unwrap();
    let direct = p3_score(&make_spin(1.5).unwrap(), &psi.into()).unwrap().p3;
    check((p - 0.75).abs() <= 1e-9 && (direct - 0.75).abs() <= 1e-9, format!("max P3 = {p:.12}"))
}

fn saturation() -> Outcome {
    let mut rng = rng_from_seed(0xACE);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let xp: f64 = rng.random_range(0.01..10.0);
        let xm = xp * rng.random_range(1.0001..100.0);
        let (p, _) = max_p3(&make_four_level(xp, xm).unwrap()).unwrap();
        worst = worst.max((p - 1.0 / (1.0 + xp / xm)).abs());
    }
    check(worst <= 1e-9, format!("max |max P3 - (1+x+/x-)^-1| = {worst:.2e}"))
}

fn clock_bound() -> Outcome {
    let pair = make_clock_default(60, 1.0).unwrap();
    let spec = spectrum(&pair, DEFAULT_ZERO_TOL).unwrap();
    let g = general_bound(&spec).unwrap();
    let closed = 1.0 / (1.0 + (7.0 * PI / 15.0).cos());
    let score = p3_score(&pair, &optimal_state(&pair).unwrap().into()).unwrap().p3;
    let ok = (g - closed).abs() <= 1e-12 && (score - closed).abs() <= 1e-9 && format!("{g:.3}") == "0.905";
    check(ok, format!("bound {g:.12}, closed form {closed:.12}, optimal score {score:.12}"))
}

fn oscillator() -> Outcome {
    let pair = make_four_level(1.0, 2.72).unwrap();
    let p = p3_score(&pair, &optimal_state(&pair).unwrap().into()).unwrap().p3;
    let closed = 2.72 / 3.72;
    let margin = p - 0.730822;
    check(p >= 0.731 && margin > 0.0 && (p - closed).abs() <= 1e-12, format!("P3 = {p:.12}"))
}

fn classical() -> Outcome {
    let v: Vec<f64> = [6, 12, 60].iter().map(|&n| classical_clock_max_p3(n).unwrap()).collect();
    check(v.iter().all(|&x| x == 2.0 / 3.0), format!("{v:?}"))
}

fn witness() -> Outcome {
    let mut pairs = vec![make_spin(0.5).unwrap(), make_spin(1.0).unwrap()];
    let mut rng = rng_from_seed(0x3);
    for _ in 0..50 {
        let mults = [rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3)];
        pairs.push(random_ladder_pair(&mults, &mut rng).unwrap());
    }
    let mut worst: f64 = 0.0;
    for pair in &pairs {
        let w = dimension_witness(pair).unwrap();
        assert!(w.distinct_levels <= 3);
        worst = worst.max((w.p3_range.0 - 0.5).abs()).max((w.p3_range.1 - 0.5).abs());
    }
    check(worst <= 1e-9, format!("{} pairs, max |P3 - 1/2| = {worst:.2e}", pairs.len()))
}

fn soundness() -> Outcome {
    let pairs = [make_four_level(1.0, 3.0).unwrap(), make_spin(1.5).unwrap(), make_clock_default(12, 1.0).unwrap()];
    let mut rng = rng_from_seed(0x50);
    let mut margin = f64::NEG_INFINITY;
    for pair in &pairs {
        let ops = ScoreOperators::new(pair, DEFAULT_ZERO_TOL).unwrap();
        for _ in 0..1000 {
            let r = ops.score(&random_state(pair.dim(), &mut rng).into()).unwrap();
            margin = margin.max(r.p3 - r.general_bound);
        }
    }
    check(margin <= 1e-9, format!("max P3 - bound = {margin:.4}"))
}

fn builtins() -> Vec<PrecessingPair> {
    let mut out = vec![make_four_level(1.0, 3.0).unwrap(), make_four_level(1.0, 2.72).unwrap(), make_four_level(0.2, 9.0).unwrap()];
    out.extend([0.5, 1.0, 1.5, 2.0, 3.5].map(|j| make_spin(j).unwrap()));
    out.extend([6, 12, 18, 60].map(|n| make_clock_default(n, 1.0).unwrap()));
    out
}

fn precession() -> Outcome {
    let mut rng = rng_from_seed(0x8);
    let mut failures = Vec::new();
    for pair in builtins() {
        let rep = verify_precession(&pair, PRECESSION_TOL);
        let states: Vec<State> = (0..100).map(|_| random_state(pair.dim(), &mut rng).into()).collect();
        let m = check_mean_sum_zero(&pair, &states).unwrap();
        if !rep.pass || m > 1e-9 * pair.x().norm().max(1.0) {
            failures.push(pair.family().label());
        }
    }
    check(failures.is_empty(), format!("{} families, failures {failures:?}", builtins().len()))
}

fn geometry() -> Outcome {
    let spin = QuantumBody::new(&make_spin(1.5).unwrap()).unwrap();
    let cloud = spin.sample_surface(500, 0, 1e-6).unwrap();
    let gap = cloud.iter().map(|r| r.gap()).fold(0.0, f64::max);
    let top = cloud.iter().map(|r| r.tuple.iter().sum::<f64>() / 3.0).fold(0.0, f64::max);
    let cube = full_cube();
    let inside = cloud.iter().all(|r| cube.contains(r.tuple, 1e-9));
    let beyond = cloud.iter().filter(|r| r.tuple.iter().sum::<f64>() > 2.0 + 1e-9).count();

    let clock = make_clock_default(60, 1.0).unwrap();
    let g = general_bound(&spectrum(&clock, DEFAULT_ZERO_TOL).unwrap()).unwrap();
    let points: Vec<[f64; 3]> = QuantumBody::new(&clock).unwrap().sample_surface(200, 0, 1e-6).unwrap().iter().map(|r| r.tuple).collect();
    // the nearest cloud point bounds the distance to the cloud's hull from above
    let far = clock_hull(60, g)
        .unwrap()
        .vertices()
        .iter()
        .map(|v| points.iter().map(|p| (0..3).map(|k| (p[k] - v.coords()[k]).powi(2)).sum::<f64>().sqrt()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let classical_ok = classical_polytope().vertices().len() == 6;
    let ok = gap <= 1e-4 && (top - 0.75).abs() <= 1e-4 && inside && beyond > 0 && far <= 1e-3 && classical_ok;
    check(ok, format!("gap {gap:.1e}, max P3 {top:.6}, {beyond} points beyond the facet, clock-hull vertex distance {far:.1e}"))
}

fn embeddings() -> Outcome {
    let mut worst: f64 = 0.0;
    for pair in [make_four_level(1.0, 3.0).unwrap(), make_four_level(1.0, 2.72).unwrap(), make_clock_default(6, 1.0).unwrap()] {
        let state: State = optimal_state(&pair).unwrap().into();
        let base = p3_score(&pair, &state).unwrap().p3;
        let real = embed_real(&pair).unwrap();
        assert!(real.x().is_real(1e-12) && real.y().is_real(1e-12));
        let p_real = p3_score(&real, &real_encode_state(&state).into()).unwrap().p3;
        let p_grass = p3_score(&embed_grassmann(&pair, 2).unwrap(), &grassmann_encode_state(&state, 2).into()).unwrap().p3;
        worst = worst.max((p_real - base).abs()).max((p_grass - base).abs());
    }
    check(worst <= 1e-9, format!("max deviation {worst:.1e}"))
}

fn reflection() -> Outcome {
    let mut worst: f64 = 0.0;
    let pairs = [
        make_four_level(1.0, 3.0).unwrap(),
        make_four_level(0.3, 1.1).unwrap(),
        make_clock_default(12, 1.0).unwrap(),
        make_clock_default(60, 1.0).unwrap(),
    ];
    for pair in &pairs {
        let eig = eig_hermitian(&score_operator(pair).unwrap());
        worst = worst.max((eig.min() + eig.max() - 1.0).abs());
    }
    check(worst <= 1e-9, format!("max |lambda_min + lambda_max - 1| = {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("spin-3/2 maximum is 3/4", 0.1, spin_three_halves),
        ("four-level family saturates the general bound", 5.0, saturation),
        ("clock bound (1+cos(7pi/15))^-1", 1.0, clock_bound),
        ("four-level beats the oscillator bound", 0.1, oscillator),
        ("classical clock baseline is 2/3", 0.1, classical),
        ("three levels only score 1/2", 10.0, witness),
        ("random states respect the general bound", 30.0, soundness),
        ("precession and vanishing mean sum", 5.0, precession),
        ("probability-space geometry", 180.0, geometry),
        ("real and Grassmann embeddings", 1.0, embeddings),
        ("reflection symmetry of Q3", 1.0, reflection),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok(d) if secs < *limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!("criterion {:>2}: {} {name} [{detail}] ({secs:.3} s, limit {limit} s)", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
