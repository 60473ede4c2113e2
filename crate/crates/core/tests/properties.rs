use approx::assert_abs_diff_eq;
use precess_core::observables::{
    clock_fourier_state, make_clock_default, make_four_level, make_spin, verify_precession, FamilySpec, PRECESSION_TOL,
};
use precess_core::probspace::{full_cube, Direction, QuantumBody};
use precess_core::protocol::{check_mean_sum_zero, general_bound, max_p3, score_operator, spectrum, ScoreOperators, SpectrumInfo};
use precess_core::random::{random_hermitian, random_ladder_pair, random_state, rng_from_seed};
use precess_core::spectral::{eig_hermitian, evolve_heisenberg, heaviside, sign_op, DEFAULT_ZERO_TOL};
use precess_core::{DensityMatrix, HermitianMatrix, State};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn heaviside_is_a_half_weighted_projector(seed in any::<u64>(), dim in 1usize..7) {
        let mut rng = rng_from_seed(seed);
        let m = random_hermitian(dim, &mut rng);
        let th = heaviside(&m, DEFAULT_ZERO_TOL).unwrap();
        let th_neg = heaviside(&m.scale(-1.0), DEFAULT_ZERO_TOL).unwrap();
        // Θ(M) + Θ(−M) = 1 and 2Θ(M) − 1 = sign(M)
        let sum = th.add(&th_neg).unwrap();
        prop_assert!(sum.max_abs_diff(&HermitianMatrix::identity(dim)) < 1e-10);
        let sign = sign_op(&m, DEFAULT_ZERO_TOL).unwrap();
        let twice = th.scale(2.0).sub(&HermitianMatrix::identity(dim)).unwrap();
        prop_assert!(twice.max_abs_diff(&sign) < 1e-10);
        for v in eig_hermitian(&th).eigenvalues {
            prop_assert!(v > -1e-10 && v < 1.0 + 1e-10);
        }
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..9) {
        let m = random_hermitian(dim, &mut rng_from_seed(seed));
        let eig = eig_hermitian(&m);
        prop_assert!(eig.reconstruct().max_abs_diff(&m) < 1e-10 * m.norm().max(1.0));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn heisenberg_evolution_composes(seed in any::<u64>(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let mut rng = rng_from_seed(seed);
        let h = random_hermitian(4, &mut rng);
        let x = random_hermitian(4, &mut rng);
        let once = evolve_heisenberg(&x, &h, t1 + t2).unwrap();
        let twice = evolve_heisenberg(&evolve_heisenberg(&x, &h, t1).unwrap(), &h, t2).unwrap();
        prop_assert!(once.max_abs_diff(&twice) < 1e-9 * x.norm().max(1.0));
    }

    #[test]
    fn ladder_pairs_obey_the_bound(seed in any::<u64>(), mults in prop::collection::vec(1usize..3, 2..6)) {
        let mut rng = rng_from_seed(seed);
        let pair = random_ladder_pair(&mults, &mut rng).unwrap();
        prop_assert!(verify_precession(&pair, PRECESSION_TOL).pass);
        let ops = ScoreOperators::new(&pair, DEFAULT_ZERO_TOL).unwrap();
        let (best, _) = max_p3(&pair).unwrap();
        prop_assert!(best <= ops.general_bound + 1e-9, "max {} bound {}", best, ops.general_bound);
        let states: Vec<State> = (0..20).map(|_| random_state(pair.dim(), &mut rng).into()).collect();
        for s in &states {
            prop_assert!(ops.score(s).unwrap().p3 <= ops.general_bound + 1e-9);
        }
        let scale = eig_hermitian(pair.x()).spectral_norm().max(1.0);
        prop_assert!(check_mean_sum_zero(&pair, &states).unwrap() <= 1e-9 * scale);
    }

    #[test]
    fn four_level_saturates(xp in 0.01f64..10.0, ratio in 1.001f64..50.0) {
        let xm = xp * ratio;
        let pair = make_four_level(xp, xm).unwrap();
        let g = general_bound(&spectrum(&pair, DEFAULT_ZERO_TOL).unwrap()).unwrap();
        prop_assert!((g - 1.0 / (1.0 + 1.0 / ratio)).abs() < 1e-9);
        prop_assert!((max_p3(&pair).unwrap().0 - g).abs() < 1e-9);
        let eig = eig_hermitian(&score_operator(&pair).unwrap());
        prop_assert!((eig.min() + eig.max() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bound_decreases_in_ratio(a in 0.001f64..0.999, b in 0.001f64..0.999) {
        let g = |r: f64| general_bound(&SpectrumInfo::from_extremes(Some(r), Some(1.0), false).unwrap()).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(g(lo) >= g(hi));
        prop_assert!(g(lo) > 0.5 && g(lo) < 1.0);
    }

    #[test]
    fn spec_json_round_trip(xp in 0.1f64..2.0, ratio in 1.1f64..5.0) {
        let spec = FamilySpec::FourLevel { x_plus: xp, x_minus: xp * ratio };
        let back: FamilySpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(&back, &spec);
        let raw = spec.build().unwrap().to_raw_spec();
        let rebuilt: FamilySpec = serde_json::from_str(&serde_json::to_string(&raw).unwrap()).unwrap();
        prop_assert!(verify_precession(&rebuilt.build().unwrap(), PRECESSION_TOL).pass);
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn rays_are_sandwiched(theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..6.3) {
        let pair = make_spin(1.5).unwrap();
        let body = QuantumBody::new(&pair).unwrap();
        let dir = Direction::from_angles(theta, phi);
        let r = body.ray_max(dir, 1e-7).unwrap();
        prop_assert!(r.converged);
        prop_assert!(0.0 <= r.r_lower && r.r_lower <= r.r_upper);
        let n = dir.vector();
        for (t, nk) in r.tuple.iter().zip(n) {
            prop_assert!((t - (0.5 + r.r_lower * nk)).abs() < 1e-9);
        }
        // the witness is a genuine state scored independently
        let ops = ScoreOperators::new(&pair, DEFAULT_ZERO_TOL).unwrap();
        let direct = ops.tuple(&r.witness.clone().into()).unwrap();
        for (d, t) in direct.iter().zip(r.tuple) {
            prop_assert!((d - t).abs() < 1e-9);
        }
        prop_assert!(full_cube().contains(r.tuple, 1e-9));
    }

    #[test]
    fn support_function_bounds_every_state(seed in any::<u64>()) {
        let pair = make_four_level(1.0, 3.0).unwrap();
        let body = QuantumBody::new(&pair).unwrap();
        let mut rng = rng_from_seed(seed);
        let tuples: Vec<[f64; 3]> = (0..20).map(|_| body.tuple_of(&random_state(4, &mut rng))).collect();
        for _ in 0..10 {
            let u: [f64; 3] = std::array::from_fn(|_| rand::Rng::random_range(&mut rng, -1.0..1.0));
            let h = body.support(u).unwrap().h;
            for t in &tuples {
                prop_assert!(u[0] * t[0] + u[1] * t[1] + u[2] * t[2] <= h + 1e-9);
            }
        }
    }

    #[test]
    fn witness_midpoints_are_achievable(t1 in 0.1f64..3.0, t2 in 0.1f64..3.0, p1 in 0.0f64..6.3, p2 in 0.0f64..6.3) {
        let body = QuantumBody::new(&make_spin(1.5).unwrap()).unwrap();
        let a = body.ray_max(Direction::from_angles(t1, p1), 1e-6).unwrap();
        let b = body.ray_max(Direction::from_angles(t2, p2), 1e-6).unwrap();
        let mix = DensityMatrix::mixture(&[(0.5, a.witness.clone()), (0.5, b.witness.clone())]).unwrap();
        let t = body.tuple_of_mixed(&mix);
        for ((tk, ak), bk) in t.iter().zip(a.tuple).zip(b.tuple) {
            prop_assert!((tk - 0.5 * (ak + bk)).abs() < 1e-9);
        }
    }
}

#[test]
fn diagonal_ray_matches_spectral_maximum() {
    for pair in [
        make_four_level(1.0, 3.0).unwrap(),
        make_spin(1.5).unwrap(),
        make_four_level(0.5, 4.0).unwrap(),
        make_clock_default(12, 1.0).unwrap(),
    ] {
        let (best, _) = max_p3(&pair).unwrap();
        let body = QuantumBody::new(&pair).unwrap();
        let up = body.ray_max(Direction::diagonal(), 1e-9).unwrap();
        assert!(up.gap() <= 1e-6);
        assert_abs_diff_eq!(0.5 + up.r_lower / 3f64.sqrt(), best, epsilon = 1e-6);
        // the reflected direction reaches the reflected score
        let down = body.ray_max(Direction::diagonal().neg(), 1e-9).unwrap();
        assert_abs_diff_eq!(0.5 - down.r_lower / 3f64.sqrt(), 1.0 - best, epsilon = 1e-6);
    }
}

#[test]
fn fourier_states_hit_the_classical_vertices() {
    let pair = make_clock_default(60, 1.0).unwrap();
    let ops = ScoreOperators::new(&pair, DEFAULT_ZERO_TOL).unwrap();
    let mut hit = std::collections::BTreeSet::new();
    for n in 0..60 {
        let t = ops.tuple(&clock_fourier_state(60, n).unwrap().into()).unwrap();
        // oracle: Θ(cos(2π(n − kN/3)/N)) with exact zero detection on the index
        for (k, &v) in t.iter().enumerate() {
            let m = (n + 60 - 20 * k) % 60;
            let want = if m == 15 || m == 45 {
                0.5
            } else if !(15..=45).contains(&m) {
                1.0
            } else {
                0.0
            };
            assert_abs_diff_eq!(v, want, epsilon = 1e-9);
        }
        assert!(t != [0.0; 3] && t != [1.0; 3]);
        if t.iter().all(|&v| v.abs() < 1e-9 || (v - 1.0).abs() < 1e-9) {
            hit.insert(t.map(|v| v.round() as u8));
        }
    }
    assert_eq!(hit.len(), 6, "all six classical vertices are reached");
}

#[test]
fn flat_spin_one_body_stays_on_the_half_plane() {
    let body = QuantumBody::new(&make_spin(1.0).unwrap()).unwrap();
    for r in body.sample_surface(24, 3, 1e-7).unwrap() {
        assert!(r.converged);
        assert_abs_diff_eq!(r.tuple.iter().sum::<f64>() / 3.0, 0.5, epsilon = 1e-6);
    }
}

#[test]
fn surface_cloud_is_reflection_symmetric() {
    let body = QuantumBody::new(&make_four_level(1.0, 3.0).unwrap()).unwrap();
    let res = body.sample_surface(60, 0, 1e-7).unwrap();
    for pair in res.chunks(2) {
        for k in 0..3 {
            assert_abs_diff_eq!(pair[0].tuple[k], 1.0 - pair[1].tuple[k], epsilon = 1e-6);
        }
    }
}
