mod common;

use common::{apply, random_orthogonal, random_vec, rng};
use dexcite::model::{growth_constants, potential};
use dexcite::simulate::{detect_spikes, simulate_full, simulate_reduced, steady_frequency_at, SpikeDetector};
use dexcite::{FullState, ModelParams, ReducedState, StateVec};
use proptest::prelude::*;
use rand::Rng;

/// Full run from `x0` parallel to a constant `u`, and the reduced run driven
/// by the `ũ` recorded from it. Returns the largest norm discrepancy.
fn norm_reduction_error(n: usize, seed: u64, t_end: f64) -> f64 {
    let p = ModelParams::type1();
    let mut r = rng(seed);
    let mut dir = random_vec(n, 1.0, &mut r);
    dir = dir.scale(1.0 / dir.norm());
    // inputs spread across rest, spiking window and saturation
    let u = dir.scale(r.gen_range(0.5..8.0));
    let x0 = dir.scale(r.gen_range(0.05..1.5));
    let xs0 = r.gen_range(0.0..1.0);
    let dt = p.default_dt();
    let full = simulate_full(&FullState::initial(x0.clone(), xs0), |_| u.clone(), &p, dt, t_end).unwrap();
    let ut = full.u_tilde();
    let red = simulate_reduced(
        &ReducedState::new(x0.norm(), xs0),
        |t| ut[(t / dt).round() as usize],
        &p,
        dt,
        t_end,
    )
    .unwrap();
    full.radii()
        .iter()
        .zip(red.radii())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn norm_reduction_matches_in_all_dimensions() {
    let t_end = 50.0 * ModelParams::type1().tau_s;
    for n in [2usize, 3, 5, 10] {
        for seed in 0..3 {
            let e = norm_reduction_error(n, 1000 * n as u64 + seed, t_end);
            assert!(e <= 1e-6, "n={n} seed={seed} err={e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_reduction_short_runs(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 3, 5, 10])) {
        prop_assert!(norm_reduction_error(n, seed, 20.0) <= 1e-6);
    }

    #[test]
    fn rotation_equivariance(seed in any::<u64>(), n in 2usize..7) {
        let p = ModelParams::rotating_demo();
        let mut r = rng(seed);
        let q = random_orthogonal(n, &mut r);
        let x0 = random_vec(n, 1.0, &mut r);
        let a = random_vec(n, 2.0, &mut r);
        let b = random_vec(n, 2.0, &mut r);
        let input = |t: f64| a.scale((t / 3.0).cos()).axpy((t / 5.0).sin(), &b);
        let dt = p.default_dt();
        let base = simulate_full(&FullState::initial(x0.clone(), 0.3), input, &p, dt, 20.0).unwrap();
        let rot = simulate_full(&FullState::initial(apply(&q, &x0), 0.3), |t| apply(&q, &input(t)), &p, dt, 20.0).unwrap();
        for (s, sr) in base.states.iter().zip(&rot.states) {
            let qs = apply(&q, &s.x);
            for i in 0..n {
                prop_assert!((qs[i] - sr.x[i]).abs() <= 1e-9);
            }
            prop_assert!((s.x_s - sr.x_s).abs() <= 1e-9);
        }
    }

    #[test]
    fn adaptation_stays_nonnegative(seed in any::<u64>()) {
        let p = ModelParams::type2();
        let mut r = rng(seed);
        let x0 = random_vec(3, 1.5, &mut r);
        let u = random_vec(3, 10.0, &mut r);
        let traj = simulate_full(&FullState::initial(x0, 0.0), |_| u.clone(), &p, p.default_dt(), 30.0).unwrap();
        prop_assert!(traj.states.iter().all(|s| s.x_s >= 0.0));
    }
}

#[test]
fn rk4_is_fourth_order() {
    let p = ModelParams::type1();
    let x0 = StateVec::from([0.3, -0.2, 0.1]);
    let u = StateVec::from([0.5, 0.4, 0.0]);
    let end = |dt: f64| {
        let t = simulate_full(&FullState::initial(x0.clone(), 0.2), |_| u.clone(), &p, dt, 1.0).unwrap();
        t.states.last().unwrap().clone()
    };
    let dt = p.max_dt();
    let reference = end(dt / 8.0);
    let err = |s: &FullState| (&s.x - &reference.x).norm().max((s.x_s - reference.x_s).abs());
    let ratio = err(&end(dt)) / err(&end(dt / 2.0));
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn lemma1_eventual_norm_bounds() {
    let p = ModelParams::type1();
    let (_, b) = growth_constants(&p);
    let mut r = rng(11);
    for _ in 0..5 {
        let mut u = random_vec(4, 1.0, &mut r);
        u = u.scale(2.0 * b / p.alpha / u.norm());
        let x0 = random_vec(4, 1.0, &mut r);
        let traj = simulate_full(&FullState::initial(x0, 0.0), |_| u.clone(), &p, p.default_dt(), 60.0).unwrap();
        let half = &traj.radii()[traj.len() / 2..];
        let lo = half.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = half.iter().copied().fold(0.0, f64::max);
        assert!(lo > 0.0 && hi.is_finite(), "lo={lo} hi={hi}");
    }
}

#[test]
fn energy_decreases_with_frozen_adaptation() {
    let p = ModelParams::new(0.1, 3.0, 0.1, 3.0, 1.5, 0.0).unwrap();
    let mut r = rng(5);
    for _ in 0..5 {
        let x0 = random_vec(3, 1.6, &mut r);
        let traj = simulate_full(&FullState::initial(x0, 0.0), |_| StateVec::zeros(3), &p, p.default_dt(), 10.0).unwrap();
        let v: Vec<f64> = traj.states.iter().map(|s| potential(s.x.norm(), s.x_s, &p)).collect();
        for w in v.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn rest_is_preserved_without_input() {
    let p = ModelParams::type1();
    let traj = simulate_full(&FullState::rest(2), |_| StateVec::zeros(2), &p, p.default_dt(), 10.0).unwrap();
    assert!(traj.states.iter().all(|s| s.x.norm() == 0.0 && s.x_s == 0.0));
    let red = simulate_reduced(&ReducedState::new(0.0, 0.0), |_| 0.0, &p, p.default_dt(), 10.0).unwrap();
    assert!(red.states.iter().all(|s| s.r == 0.0 && s.x_s == 0.0));
}

#[test]
fn sub_rheobase_input_settles() {
    let p = ModelParams::type1();
    let u = 0.5 * 0.24 / p.alpha;
    let traj = simulate_reduced(&ReducedState::new(0.0, 0.0), |_| u, &p, p.default_dt(), 100.0).unwrap();
    let det = SpikeDetector::for_duration(100.0);
    assert!(detect_spikes(&traj, &det).unwrap().is_empty());
    let tail = &traj.states[traj.len() - 1000..];
    let spread = tail.iter().map(|s| s.r).fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().map(|s| s.r).fold(f64::INFINITY, f64::min);
    assert!(spread < 1e-9, "spread {spread}");
}

#[test]
fn window_input_spikes_with_consistent_period() {
    let p = ModelParams::type1();
    let u = 0.43 / p.alpha;
    let t_end = 300.0;
    let det = SpikeDetector::for_duration(t_end);
    let traj = simulate_reduced(&ReducedState::new(0.0, 0.0), |_| u, &p, p.default_dt(), t_end).unwrap();
    let f = detect_spikes(&traj, &det).unwrap().steady_frequency;
    assert!(f > 0.0);
    // period from upward crossings of a different level, r = 1
    let radii = traj.radii();
    let start = t_end - det.steady_window;
    let ups: Vec<f64> = (1..radii.len())
        .filter(|&k| radii[k - 1] < 1.0 && radii[k] >= 1.0 && traj.time(k) >= start)
        .map(|k| traj.time(k - 1) + traj.dt * (1.0 - radii[k - 1]) / (radii[k] - radii[k - 1]))
        .collect();
    let period = (ups[ups.len() - 1] - ups[0]) / (ups.len() - 1) as f64;
    assert!((period * f - 1.0).abs() < 0.01, "period {period} f {f}");
    assert_eq!(steady_frequency_at(&p, u, p.default_dt(), t_end, &det).unwrap(), f);
}

#[test]
fn rotating_input_spikes_mid_cycle_along_input() {
    let p = ModelParams::rotating_demo();
    let input = |t: f64| {
        let th = t / 20.0;
        StateVec::from([(1.0 - th.cos()) * th.cos(), (1.0 - th.cos()) * th.sin()])
    };
    let t_end = 40.0 * std::f64::consts::PI;
    let traj = simulate_full(&FullState::initial(StateVec::zeros(2), 1.0), input, &p, p.default_dt(), t_end).unwrap();
    assert!(traj.states.iter().all(|s| s.x_s >= 0.0));
    let train = detect_spikes(&traj, &SpikeDetector::for_duration(t_end)).unwrap();
    assert!(train.len() >= 3);
    for &ts in &train.spike_times {
        assert!(1.0 - (ts / 20.0).cos() > 0.5, "spike at t={ts} with weak input");
    }
    // at each spike peak the state points along the input
    let radii = traj.radii();
    for k in 1..radii.len() - 1 {
        if radii[k] > 1.0 && radii[k] >= radii[k - 1] && radii[k] >= radii[k + 1] {
            let c = dexcite::vector::cosine(&traj.states[k].x, &traj.inputs[k]).unwrap().unwrap();
            assert!(c > 0.9, "cos {c} at t={}", traj.time(k));
        }
    }
}
