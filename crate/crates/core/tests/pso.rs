mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ris_mimo::geometry::SphericalCoord;
use ris_mimo::pso::{
    fitness, optimize, FitnessEvaluator, FlipMode, Particle, SearchParams, SwarmConfig, SwarmState,
};

use common::*;

fn truth() -> SearchParams {
    SearchParams {
        rx_coord: vlos().scenario.rx_coord_in_ris_frame().unwrap(),
        flip: false,
    }
}

fn fast_cfg(seed: u64) -> SwarmConfig {
    SwarmConfig {
        swarm_size: 8,
        iterations: 10,
        fitness_points: Some(3),
        seed,
        ..SwarmConfig::default()
    }
}

#[test]
fn truth_is_grid_maximum() {
    let scn = vlos().scenario;
    let eval = FitnessEvaluator::new(&scn, None).unwrap();
    let at_truth = eval.evaluate(&truth()).unwrap();
    let b = SwarmConfig::default().bounds;
    let mut best = 0.0f64;
    for i in 0..=12 {
        let r = b.r_m.0 + (b.r_m.1 - b.r_m.0) * (i as f64 / 12.0).powi(2);
        for j in 0..=12 {
            let theta = b.theta_rad.0 + (b.theta_rad.1 - b.theta_rad.0) * j as f64 / 12.0;
            for k in 0..=36 {
                let phi = b.phi_rad.0 + (b.phi_rad.1 - b.phi_rad.0) * k as f64 / 36.0;
                let p = SearchParams {
                    rx_coord: SphericalCoord { r, theta, phi },
                    flip: false,
                };
                best = best.max(eval.evaluate(&p).unwrap());
            }
        }
    }
    eprintln!("truth {:.3} dB, grid max {:.3} dB", 10.0 * at_truth.log10(), 10.0 * best.log10());
    assert!(at_truth >= best, "{at_truth:e} < {best:e}");
}

#[test]
fn thirty_degrees_off_loses_ten_db() {
    let scn = vlos().scenario;
    let t = truth();
    let on = fitness(&scn, &t).unwrap();
    for (dt, dp) in [(0.0, 30.0), (0.0, -30.0), (30.0, 0.0), (-30.0, 0.0)] {
        let mut p = t;
        p.rx_coord.theta += f64::to_radians(dt);
        p.rx_coord.phi += f64::to_radians(dp);
        let off = fitness(&scn, &p).unwrap();
        assert!(10.0 * (on / off).log10() >= 10.0, "({dt}, {dp}): {on:e} vs {off:e}");
    }
}

#[test]
fn flip_is_neutral_without_scatter() {
    let scn = vlos().scenario;
    let mut t = truth();
    let a = fitness(&scn, &t).unwrap();
    t.flip = true;
    let b = fitness(&scn, &t).unwrap();
    assert!((a - b).abs() <= 1e-9 * a);

    let run = |flip| {
        optimize(
            &scn,
            &SwarmConfig {
                flip_mode: FlipMode::Fixed(flip),
                ..fast_cfg(4)
            },
        )
        .unwrap()
        .best_fitness
    };
    let (f0, f1) = (run(false), run(true));
    assert!((f0 - f1).abs() <= 1e-9 * f0, "{f0:e} vs {f1:e}");
}

#[test]
fn particles_at_gbest_at_rest_stay_put() {
    let scn = vlos().scenario;
    let eval = FitnessEvaluator::new(&scn, Some(3)).unwrap();
    let t = truth();
    let f = eval.evaluate(&t).unwrap();
    let x = [t.rx_coord.r, t.rx_coord.theta, t.rx_coord.phi];
    let particle = Particle {
        position: x,
        flip: false,
        velocity: [0.0; 4],
        fitness: f,
        best_position: x,
        best_flip: false,
        best_fitness: f,
    };
    let mut state = SwarmState::from_particles(vec![particle; 4]).unwrap();
    let before = state.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    state.step(&eval, &SwarmConfig::default(), &mut rng).unwrap();
    assert_eq!(state.particles, before.particles);
    assert_eq!((state.best_position, state.best_flip, state.best_fitness), (x, false, f));
}

#[test]
fn same_seed_same_result() {
    let scn = vlos().scenario;
    assert_eq!(optimize(&scn, &fast_cfg(9)).unwrap(), optimize(&scn, &fast_cfg(9)).unwrap());
}

#[test]
fn degenerate_swarm_keeps_initial_fitness() {
    let scn = vlos().scenario;
    let cfg = SwarmConfig {
        swarm_size: 1,
        inertia: 0.0,
        cognitive: 0.0,
        social: 0.0,
        ..fast_cfg(2)
    };
    let res = optimize(&scn, &cfg).unwrap();
    assert!(res.fitness_trace.iter().all(|&g| g == res.fitness_trace[0]));
    assert_eq!(res.best_fitness, res.fitness_trace[0]);
}

#[test]
fn trace_monotone_and_positions_bounded() {
    let scn = zone_a().scenario;
    let cfg = SwarmConfig {
        iterations: 40,
        stall_iterations: 0,
        ..fast_cfg(17)
    };
    let eval = FitnessEvaluator::new(&scn, cfg.fitness_points).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = SwarmState::initialize(&eval, &cfg, &mut rng).unwrap();
    for _ in 0..cfg.iterations {
        let before = state.best_fitness;
        state.step(&eval, &cfg, &mut rng).unwrap();
        assert!(state.best_fitness >= before);
        assert!(state.particles.iter().all(|p| cfg.bounds.contains(&p.current())));
    }
    let res = optimize(&scn, &cfg).unwrap();
    assert!(res.fitness_trace.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(res.fitness_trace.len(), cfg.iterations + 1);
}

#[test]
fn invalid_config_rejected() {
    let scn = vlos().scenario;
    for cfg in [
        SwarmConfig { swarm_size: 0, ..SwarmConfig::default() },
        SwarmConfig { inertia: 1.5, ..SwarmConfig::default() },
        SwarmConfig { fitness_points: Some(0), ..SwarmConfig::default() },
    ] {
        assert!(optimize(&scn, &cfg).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// The global best is replaced only by an improvement, and clamping
    /// keeps every particle in bounds.
    #[test]
    fn random_steps_never_lose_gbest(seed in 0u64..10_000) {
        let scn = vlos().scenario;
        let cfg = SwarmConfig { seed, ..fast_cfg(seed) };
        let eval = FitnessEvaluator::new(&scn, Some(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = SwarmState::initialize(&eval, &cfg, &mut rng).unwrap();
        for _ in 0..125 {
            let before = state.best_fitness;
            state.step(&eval, &cfg, &mut rng).unwrap();
            prop_assert!(state.best_fitness >= before);
            prop_assert!(state.particles.iter().all(|p| cfg.bounds.contains(&p.current())));
        }
    }
}
