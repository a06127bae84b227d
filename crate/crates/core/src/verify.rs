//! Seeded randomized property suites: norm reduction, the closed-form
//! direction dynamics, eventual norm bounds, the structural assumptions and
//! the gradient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::riccati_check;
use crate::error::Result;
use crate::model::{
    check_assumption1, check_assumption2, full_grad, growth_constants, locate_pitchfork_fold, norm_bound,
    pitchfork_thresholds, potential, FullState, ModelParams,
};
use crate::simulate::{simulate_full, simulate_reduced, ReducedState};
use crate::vector::{inner, StateVec};

/// One measured quantity against its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            label: label.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    fn at_least(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            label: label.into(),
            value,
            limit,
            passed: value >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(name: &str, seed: u64, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        SuiteReport {
            name: name.into(),
            seed,
            checks,
            passed,
        }
    }

    /// Worst check by `value`; the summary number for a suite whose checks
    /// share a limit.
    pub fn max_value(&self) -> f64 {
        self.checks.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn run_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn unit<R: Rng>(n: usize, rng: &mut R) -> StateVec {
    loop {
        let v = StateVec::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let len = v.norm();
        if len > 0.1 {
            return v.scale(1.0 / len);
        }
    }
}

/// Largest `|‖x(t)‖ − r(t)|` between a full run started parallel to a
/// constant input and the reduced run driven by the recorded `ũ`.
pub fn norm_reduction_error(p: &ModelParams, n: usize, seed: u64, stream: u64, t_end: f64) -> Result<f64> {
    let mut rng = run_rng(seed, stream);
    let dir = unit(n, &mut rng);
    let u = dir.scale(rng.gen_range(0.5..8.0) * 0.1 / p.alpha);
    let x0 = dir.scale(rng.gen_range(0.05..1.5));
    let xs0 = rng.gen_range(0.0..1.0);
    let dt = p.default_dt();
    let full = simulate_full(&FullState::initial(x0.clone(), xs0), |_| u.clone(), p, dt, t_end)?;
    let ut = full.u_tilde();
    let red = simulate_reduced(
        &ReducedState::new(x0.norm(), xs0),
        |t| ut[((t / dt).round() as usize).min(ut.len() - 1)],
        p,
        dt,
        t_end,
    )?;
    Ok(full
        .radii()
        .iter()
        .zip(red.radii())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

pub const THEOREM1_DIMS: [usize; 4] = [2, 3, 5, 10];

/// Norm reduction for every dimension in `dims` and `runs` seeds each, over
/// `[0, 50 τ_s]` at the default step.
pub fn theorem1_suite(p: &ModelParams, seed: u64, dims: &[usize], runs: usize) -> Result<SuiteReport> {
    let t_end = 50.0 * p.tau_s;
    let jobs: Vec<(usize, u64)> = dims
        .iter()
        .flat_map(|&n| (0..runs as u64).map(move |k| (n, k)))
        .collect();
    let errors = jobs
        .par_iter()
        .map(|&(n, k)| norm_reduction_error(p, n, seed, 1000 * n as u64 + k, t_end))
        .collect::<Result<Vec<f64>>>()?;
    let checks = dims
        .iter()
        .map(|&n| {
            let worst = jobs
                .iter()
                .zip(&errors)
                .filter(|((m, _), _)| *m == n)
                .map(|(_, &e)| e)
                .fold(0.0, f64::max);
            Check::at_most(format!("max |norm - r| n={n}"), worst, 1e-6)
        })
        .collect();
    Ok(SuiteReport::new("theorem1", seed, checks))
}

/// Per-run outcome of a constant-input run above the growth constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionRun {
    pub dim: usize,
    pub u_norm: f64,
    pub initial_cos: f64,
    pub max_residual: f64,
    pub final_cos: f64,
    /// Norm extremes over the second half of the run.
    pub tail_min_norm: f64,
    pub tail_max_norm: f64,
    pub norm_bound: f64,
}

/// Random constant-input runs with `‖u‖ ∈ [1.5, 3]·b/α`, `dt = τ/100`.
pub fn direction_runs(p: &ModelParams, seed: u64, runs: usize) -> Result<Vec<DirectionRun>> {
    let (_, b) = growth_constants(p);
    let dt = p.tau / 100.0;
    let t_end = 20.0 * p.tau_s;
    (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = run_rng(seed, 50_000 + k);
            let dim = [2usize, 3, 5][rng.gen_range(0..3)];
            let u_norm = rng.gen_range(1.5..3.0) * b / p.alpha;
            let u = unit(dim, &mut rng).scale(u_norm);
            // keep away from exact anti-alignment, where x would pass through 0
            let x0 = loop {
                let x = unit(dim, &mut rng).scale(rng.gen_range(0.2..1.5));
                if inner(&x, &u)? / (x.norm() * u_norm) > -0.9 {
                    break x;
                }
            };
            let traj = simulate_full(&FullState::initial(x0, 0.0), |_| u.clone(), p, dt, t_end)?;
            let rep = riccati_check(&traj, &u, p)?;
            let radii = traj.radii();
            let tail = &radii[radii.len() / 2..];
            Ok(DirectionRun {
                dim,
                u_norm,
                initial_cos: rep.initial_cos,
                max_residual: rep.max_residual,
                final_cos: rep.final_cos,
                tail_min_norm: tail.iter().copied().fold(f64::INFINITY, f64::min),
                tail_max_norm: tail.iter().copied().fold(0.0, f64::max),
                norm_bound: norm_bound(p, u_norm),
            })
        })
        .collect()
}

pub fn riccati_suite(p: &ModelParams, seed: u64, runs: usize) -> Result<SuiteReport> {
    let rs = direction_runs(p, seed, runs)?;
    let max_res = rs.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let min_cos = rs.iter().map(|r| r.final_cos).fold(f64::INFINITY, f64::min);
    Ok(SuiteReport::new(
        "riccati",
        seed,
        vec![
            Check::at_most("max closed-form residual", max_res, 1e-3),
            Check::at_least("min final cos(x,u)", min_cos, 0.999),
        ],
    ))
}

pub fn lemma1_suite(p: &ModelParams, seed: u64, runs: usize) -> Result<SuiteReport> {
    let rs = direction_runs(p, seed, runs)?;
    let min_norm = rs.iter().map(|r| r.tail_min_norm).fold(f64::INFINITY, f64::min);
    // excess of the tail maximum over its bound, worst run
    let excess = rs
        .iter()
        .map(|r| r.tail_max_norm - r.norm_bound)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SuiteReport::new(
        "lemma1",
        seed,
        vec![
            Check::at_least("min tail norm", min_norm, 1e-3),
            Check::at_most("max tail norm minus (b + alpha|u|)/a", excess, 1e-6),
        ],
    ))
}

/// Growth bounds on `[0,5] × [0,10]` and the pitchfork window.
pub fn assumptions_suite(params: &[ModelParams], seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for (i, p) in params.iter().enumerate() {
        let a1 = check_assumption1(p, 5.0, 10.0)?;
        checks.push(Check::at_least(format!("set {i}: assumption 1 holds"), a1.holds as u8 as f64, 1.0));
        let (lo, hi) = pitchfork_thresholds(p)?;
        let grid: Vec<f64> = (0..=200).map(|k| lo - 1.0 + (hi - lo + 2.0) * k as f64 / 200.0).collect();
        let a2 = check_assumption2(p, &grid)?;
        checks.push(Check::at_least(format!("set {i}: assumption 2 holds"), a2.holds as u8 as f64, 1.0));
        let fold = locate_pitchfork_fold(p, 1e-13)?;
        checks.push(Check::at_most(format!("set {i}: |numeric fold - closed form|"), (fold - hi).abs(), 1e-9));
    }
    Ok(SuiteReport::new("assumptions", seed, checks))
}

/// Directional finite differences of `V(‖x‖, x_s)` against the gradient at
/// `points` random points for each dimension.
pub fn gradient_suite(p: &ModelParams, seed: u64, dims: &[usize], points: usize) -> Result<SuiteReport> {
    let h = 1e-5;
    let mut checks = Vec::new();
    for &n in dims {
        let mut rng = run_rng(seed, 90_000 + n as u64);
        let mut worst: f64 = 0.0;
        for _ in 0..points {
            let x = unit(n, &mut rng).scale(rng.gen_range(0.0..2.0));
            let x_s = rng.gen_range(0.0..5.0);
            let d = unit(n, &mut rng);
            let fd = (potential(x.axpy(h, &d).norm(), x_s, p) - potential(x.axpy(-h, &d).norm(), x_s, p)) / (2.0 * h);
            let an = inner(&full_grad(&x, x_s, p), &d)?;
            worst = worst.max((fd - an).abs());
        }
        checks.push(Check::at_most(format!("max |fd - grad| n={n}"), worst, 1e-6));
    }
    Ok(SuiteReport::new("gradient", seed, checks))
}
