//! Fixed-step RK4 integration of the full and the norm-reduced systems.
//!
//! Inputs are sampled once per step and held over the four stages. Steps are
//! bounded by `tau / 20`; the default is `tau / 50`.

mod fi;
mod spikes;

pub use fi::{fi_curve, steady_frequency_at};
pub use spikes::{detect_spikes, SpikeDetector, SpikeTrain};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{full_grad, g_eval, norm_bound, radial_grad, FullState, ModelParams};
use crate::vector::{cosine, StateVec};

/// Multiplier on the eventual norm bound beyond which a run is aborted.
pub const BLOWUP_FACTOR: f64 = 10.0;

/// State `(‖x‖, x_s)` of the reduced planar system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub r: f64,
    pub x_s: f64,
}

impl ReducedState {
    pub fn new(r: f64, x_s: f64) -> Self {
        ReducedState { r, x_s }
    }

    pub fn from_full(s: &FullState) -> Self {
        ReducedState {
            r: s.x.norm(),
            x_s: s.x_s,
        }
    }
}

/// Anything with a radial coordinate that spike detection can read.
pub trait Radial {
    fn radius(&self) -> f64;
}

impl Radial for FullState {
    fn radius(&self) -> f64 {
        self.x.norm()
    }
}

impl Radial for ReducedState {
    fn radius(&self) -> f64 {
        self.r
    }
}

/// Uniformly sampled solution: sample `k` is at `t0 + k·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S, I> {
    pub dt: f64,
    pub t0: f64,
    pub states: Vec<S>,
    pub inputs: Vec<I>,
}

pub type FullTrajectory = Trajectory<FullState, StateVec>;
pub type ReducedTrajectory = Trajectory<ReducedState, f64>;

impl<S, I> Trajectory<S, I> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.time(k))
    }
}

impl<S: Radial, I> Trajectory<S, I> {
    pub fn radii(&self) -> Vec<f64> {
        self.states.iter().map(Radial::radius).collect()
    }
}

impl FullTrajectory {
    /// Reduced input `ũ = cos(x, u)‖u‖` at every sample (0 where `x = 0`).
    pub fn u_tilde(&self) -> Vec<f64> {
        self.states
            .iter()
            .zip(&self.inputs)
            .map(|(s, u)| {
                cosine(&s.x, u)
                    .ok()
                    .flatten()
                    .map_or(0.0, |c| c * u.norm())
            })
            .collect()
    }
}

/// Number of steps covering `[0, t_end]` with step `dt`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    // Absorb representation error so that e.g. 150/0.002 is not rounded up.
    ((t_end / dt) * (1.0 - 1e-12)).ceil().max(0.0) as usize
}

pub(crate) fn check_step(p: &ModelParams, dt: f64, t_end: f64) -> Result<()> {
    p.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Precondition(format!("dt must be > 0, got {dt}")));
    }
    if dt > p.max_dt() * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "dt = {dt} exceeds tau/20 = {}",
            p.max_dt()
        )));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::Precondition(format!("t_end must be >= 0, got {t_end}")));
    }
    Ok(())
}

fn full_field(x: &StateVec, x_s: f64, u: &StateVec, p: &ModelParams) -> (StateVec, f64) {
    let grad = full_grad(x, x_s, p);
    let dx = grad.scale(-1.0 / p.tau).axpy(p.alpha / p.tau, u);
    let dxs = (-x_s + g_eval(x.norm(), p)) / p.tau_s;
    (dx, dxs)
}

/// One classical RK4 step of the full system with `u` held constant.
///
/// A non-finite result is reported with `time = dt`, relative to the start of
/// the step.
pub fn step_full(s: &FullState, u: &StateVec, p: &ModelParams, dt: f64) -> Result<FullState> {
    if s.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: u.dim(),
        });
    }
    let (k1x, k1s) = full_field(&s.x, s.x_s, u, p);
    let (k2x, k2s) = full_field(&s.x.axpy(0.5 * dt, &k1x), s.x_s + 0.5 * dt * k1s, u, p);
    let (k3x, k3s) = full_field(&s.x.axpy(0.5 * dt, &k2x), s.x_s + 0.5 * dt * k2s, u, p);
    let (k4x, k4s) = full_field(&s.x.axpy(dt, &k3x), s.x_s + dt * k3s, u, p);

    let mut x = s.x.clone();
    for i in 0..x.dim() {
        x[i] += dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
    }
    let x_s = s.x_s + dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    if !x.is_finite() || !x_s.is_finite() {
        return Err(Error::NonFinite { time: dt });
    }
    Ok(FullState { x, x_s })
}

/// Right-hand side `(ṙ, ẋ_s)` of the reduced system.
pub fn reduced_vector_field(r: f64, x_s: f64, u_tilde: f64, p: &ModelParams) -> (f64, f64) {
    (
        (-radial_grad(r, x_s, p) + p.alpha * u_tilde) / p.tau,
        (-x_s + g_eval(r, p)) / p.tau_s,
    )
}

/// One RK4 step of the reduced system, reflecting `r` back to `|r|` if the
/// step overshoots below zero.
pub fn step_reduced(s: &ReducedState, u_tilde: f64, p: &ModelParams, dt: f64) -> Result<ReducedState> {
    let (k1r, k1s) = reduced_vector_field(s.r, s.x_s, u_tilde, p);
    let (k2r, k2s) = reduced_vector_field(s.r + 0.5 * dt * k1r, s.x_s + 0.5 * dt * k1s, u_tilde, p);
    let (k3r, k3s) = reduced_vector_field(s.r + 0.5 * dt * k2r, s.x_s + 0.5 * dt * k2s, u_tilde, p);
    let (k4r, k4s) = reduced_vector_field(s.r + dt * k3r, s.x_s + dt * k3s, u_tilde, p);
    let r = s.r + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    let x_s = s.x_s + dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    if !r.is_finite() || !x_s.is_finite() {
        return Err(Error::NonFinite { time: dt });
    }
    Ok(ReducedState { r: r.abs(), x_s })
}

fn shift_time(e: Error, t: f64) -> Error {
    match e {
        Error::NonFinite { time } => Error::NonFinite { time: t + time },
        other => other,
    }
}

/// Tracks the largest input norm seen and aborts once the state norm leaves
/// `BLOWUP_FACTOR` times the eventual bound.
struct BlowupGuard {
    initial: f64,
    u_max: f64,
}

impl BlowupGuard {
    fn new(initial_norm: f64) -> Self {
        BlowupGuard {
            initial: initial_norm,
            u_max: 0.0,
        }
    }

    fn observe_input(&mut self, u_norm: f64) {
        self.u_max = self.u_max.max(u_norm);
    }

    fn check(&self, p: &ModelParams, norm: f64, time: f64) -> Result<()> {
        let bound = BLOWUP_FACTOR * self.initial.max(norm_bound(p, self.u_max));
        if norm > bound {
            return Err(Error::Blowup { time, norm, bound });
        }
        Ok(())
    }
}

/// Integrates the full system from `s0` over `[0, t_end]`.
pub fn simulate_full<F>(
    s0: &FullState,
    mut input_fn: F,
    p: &ModelParams,
    dt: f64,
    t_end: f64,
) -> Result<FullTrajectory>
where
    F: FnMut(f64) -> StateVec,
{
    check_step(p, dt, t_end)?;
    if !s0.x.is_finite() || !s0.x_s.is_finite() {
        return Err(Error::Precondition("initial state must be finite".into()));
    }
    let n = step_count(dt, t_end);
    let mut states = Vec::with_capacity(n + 1);
    let mut inputs = Vec::with_capacity(n + 1);
    let mut guard = BlowupGuard::new(s0.x.norm());
    let mut s = s0.clone();
    for k in 0..=n {
        let t = k as f64 * dt;
        let u = input_fn(t);
        if u.dim() != s.dim() {
            return Err(Error::DimensionMismatch {
                left: s.dim(),
                right: u.dim(),
            });
        }
        guard.observe_input(u.norm());
        if k < n {
            let next = step_full(&s, &u, p, dt).map_err(|e| shift_time(e, t))?;
            guard.check(p, next.x.norm(), t + dt)?;
            states.push(std::mem::replace(&mut s, next));
        } else {
            states.push(s.clone());
        }
        inputs.push(u);
    }
    Ok(Trajectory {
        dt,
        t0: 0.0,
        states,
        inputs,
    })
}

/// Integrates the reduced system driven by `ũ(t)` over `[0, t_end]`.
pub fn simulate_reduced<F>(
    s0: &ReducedState,
    mut u_tilde_fn: F,
    p: &ModelParams,
    dt: f64,
    t_end: f64,
) -> Result<ReducedTrajectory>
where
    F: FnMut(f64) -> f64,
{
    check_step(p, dt, t_end)?;
    if !s0.r.is_finite() || !s0.x_s.is_finite() || s0.r < 0.0 {
        return Err(Error::Precondition("initial state must be finite with r >= 0".into()));
    }
    let n = step_count(dt, t_end);
    let mut states = Vec::with_capacity(n + 1);
    let mut inputs = Vec::with_capacity(n + 1);
    let mut guard = BlowupGuard::new(s0.r);
    let mut s = *s0;
    for k in 0..=n {
        let t = k as f64 * dt;
        let u = u_tilde_fn(t);
        guard.observe_input(u.abs());
        states.push(s);
        inputs.push(u);
        if k < n {
            s = step_reduced(&s, u, p, dt).map_err(|e| shift_time(e, t))?;
            guard.check(p, s.r, t + dt)?;
        }
    }
    Ok(Trajectory {
        dt,
        t0: 0.0,
        states,
        inputs,
    })
}
