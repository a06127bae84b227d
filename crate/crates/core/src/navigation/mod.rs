//! A point robot with drag, pushed by an all-or-none actuator whose direction
//! comes from an excitable controller.
//!
//! ```text
//! z̈ = −γ ż + α_act act(u),            act(u) = 1{‖u‖ ≥ S} u/‖u‖
//! τ u̇ = −∇V(u, u_s) + α v,            τ_s u̇_s = −u_s + g(‖u‖)
//! v = k1 (z* − z)/(ε + ‖z* − z‖) + k2 Σ (z − z_o)/‖z − z_o‖²
//! ```
//!
//! The controller gain `α` is kept in [`ModelParams`] and is 1 for the
//! reference setup.

mod scenario;

pub use scenario::{
    obstacles_at_reference_times, run_scenario, NavMetrics, NavScenario, NavTrajectory, Spiral, DEFAULT_DUTY_TRANSIENT, DEFAULT_RECORD_EVERY,
    DEFAULT_TRACKING_TRANSIENT,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{g_eval, grad_factor, ModelParams};
use crate::simulate::BLOWUP_FACTOR;
use crate::model::norm_bound;

pub type Vec2 = [f64; 2];

/// Distance to an obstacle centre treated as a collision with the singularity.
pub const OBSTACLE_SINGULARITY: f64 = 1e-9;

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm2(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavParams {
    pub gamma: f64,
    pub alpha_act: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub k1: f64,
    pub k2: f64,
    pub eps: f64,
    pub obstacles: Vec<Vec2>,
    pub ctrl: ModelParams,
}

impl NavParams {
    /// Controller and plant of the reference tracking task, no obstacles.
    pub fn reference() -> Self {
        NavParams {
            gamma: 1.0,
            alpha_act: 3.0,
            s: 0.9,
            k1: 0.4,
            k2: 1.3,
            eps: 0.1,
            obstacles: Vec::new(),
            ctrl: ModelParams {
                tau: 0.01,
                tau_s: 1.0,
                alpha: 1.0,
                beta1: 3.0,
                beta2: 1.5,
                beta3: 1.5,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ctrl.validate()?;
        let bad = |name: &str, v: f64| Error::InvalidParams(format!("{name} out of range: {v}"));
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(bad("gamma", self.gamma));
        }
        if !(self.alpha_act >= 0.0) || !self.alpha_act.is_finite() {
            return Err(bad("alpha_act", self.alpha_act));
        }
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(bad("S", self.s));
        }
        if !(self.k1 >= 0.0) || !self.k1.is_finite() {
            return Err(bad("k1", self.k1));
        }
        if !(self.k2 >= 0.0) || !self.k2.is_finite() {
            return Err(bad("k2", self.k2));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(bad("eps", self.eps));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !o[0].is_finite() || !o[1].is_finite() {
                return Err(Error::InvalidParams(format!("obstacle {i} is not finite")));
            }
            if self.obstacles[..i].contains(o) {
                return Err(Error::InvalidParams(format!("obstacle {i} duplicates an earlier one")));
            }
        }
        Ok(())
    }
}

/// Position, velocity and controller state of the robot.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotState {
    pub z: Vec2,
    pub zdot: Vec2,
    pub u: Vec2,
    pub u_s: f64,
}

impl RobotState {
    pub fn is_finite(&self) -> bool {
        self.z.iter().chain(&self.zdot).chain(&self.u).all(|v| v.is_finite()) && self.u_s.is_finite()
    }
}

/// All-or-none actuation: the unit vector along `u` once `‖u‖ ≥ S`, else 0.
pub fn act(u: Vec2, s: f64) -> Vec2 {
    let n = norm2(u);
    if n >= s && n > 0.0 {
        [u[0] / n, u[1] / n]
    } else {
        [0.0, 0.0]
    }
}

/// Regularized pull towards the reference, of norm below `k1`.
pub fn tracking_input(z: Vec2, z_star: Vec2, k1: f64, eps: f64) -> Vec2 {
    let d = sub(z_star, z);
    let k = k1 / (eps + norm2(d));
    [k * d[0], k * d[1]]
}

/// Inverse-distance repulsion from every obstacle.
pub fn obstacle_input(z: Vec2, obstacles: &[Vec2], k2: f64) -> Result<Vec2> {
    let mut out = [0.0, 0.0];
    for (index, &o) in obstacles.iter().enumerate() {
        let d = sub(z, o);
        let d2 = d[0] * d[0] + d[1] * d[1];
        let distance = d2.sqrt();
        if distance <= OBSTACLE_SINGULARITY {
            return Err(Error::ObstacleSingularity { index, distance });
        }
        out[0] += k2 * d[0] / d2;
        out[1] += k2 * d[1] / d2;
    }
    Ok(out)
}

/// Total controller input `v`.
pub fn controller_input(z: Vec2, z_star: Vec2, p: &NavParams) -> Result<Vec2> {
    let t = tracking_input(z, z_star, p.k1, p.eps);
    if p.obstacles.is_empty() {
        return Ok(t);
    }
    let o = obstacle_input(z, &p.obstacles, p.k2)?;
    Ok([t[0] + o[0], t[1] + o[1]])
}

/// Time derivative of the closed loop; `v` is returned for the blowup guard.
fn closed_loop(s: &RobotState, z_star: Vec2, p: &NavParams) -> Result<(RobotState, Vec2)> {
    let c = &p.ctrl;
    let a = act(s.u, p.s);
    let v = controller_input(s.z, z_star, p)?;
    let factor = grad_factor(s.u[0] * s.u[0] + s.u[1] * s.u[1], s.u_s, c);
    let d = RobotState {
        z: s.zdot,
        zdot: [
            -p.gamma * s.zdot[0] + p.alpha_act * a[0],
            -p.gamma * s.zdot[1] + p.alpha_act * a[1],
        ],
        u: [
            (-factor * s.u[0] + c.alpha * v[0]) / c.tau,
            (-factor * s.u[1] + c.alpha * v[1]) / c.tau,
        ],
        u_s: (-s.u_s + g_eval(norm2(s.u), c)) / c.tau_s,
    };
    Ok((d, v))
}

fn advance(s: &RobotState, d: &RobotState, h: f64) -> RobotState {
    RobotState {
        z: [s.z[0] + h * d.z[0], s.z[1] + h * d.z[1]],
        zdot: [s.zdot[0] + h * d.zdot[0], s.zdot[1] + h * d.zdot[1]],
        u: [s.u[0] + h * d.u[0], s.u[1] + h * d.u[1]],
        u_s: s.u_s + h * d.u_s,
    }
}

fn rk4_combine(a: f64, k: [f64; 4], dt: f64) -> f64 {
    a + dt / 6.0 * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3])
}

/// One RK4 step of the closed loop with `z*` held over the step; `act` and
/// `v` are re-evaluated at every stage. Also returns the largest `‖v‖` seen.
pub fn step_nav_with_input(s: &RobotState, z_star: Vec2, p: &NavParams, dt: f64) -> Result<(RobotState, f64)> {
    let (k1, v1) = closed_loop(s, z_star, p)?;
    let (k2, v2) = closed_loop(&advance(s, &k1, 0.5 * dt), z_star, p)?;
    let (k3, v3) = closed_loop(&advance(s, &k2, 0.5 * dt), z_star, p)?;
    let (k4, v4) = closed_loop(&advance(s, &k3, dt), z_star, p)?;
    let ks = [k1, k2, k3, k4];
    let comb = |f: fn(&RobotState) -> f64, a: f64| rk4_combine(a, [f(&ks[0]), f(&ks[1]), f(&ks[2]), f(&ks[3])], dt);
    let next = RobotState {
        z: [comb(|k| k.z[0], s.z[0]), comb(|k| k.z[1], s.z[1])],
        zdot: [comb(|k| k.zdot[0], s.zdot[0]), comb(|k| k.zdot[1], s.zdot[1])],
        u: [comb(|k| k.u[0], s.u[0]), comb(|k| k.u[1], s.u[1])],
        u_s: comb(|k| k.u_s, s.u_s),
    };
    if !next.is_finite() {
        return Err(Error::NonFinite { time: dt });
    }
    let v_max = [v1, v2, v3, v4].iter().map(|&v| norm2(v)).fold(0.0, f64::max);
    Ok((next, v_max))
}

/// One RK4 step of the closed loop.
pub fn step_nav(s: &RobotState, z_star: Vec2, p: &NavParams, dt: f64) -> Result<RobotState> {
    check_nav_step(p, dt)?;
    step_nav_with_input(s, z_star, p, dt).map(|(n, _)| n)
}

pub(crate) fn check_nav_step(p: &NavParams, dt: f64) -> Result<()> {
    p.validate()?;
    if !(dt > 0.0) || dt > p.ctrl.max_dt() * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "dt = {dt} must lie in (0, tau/20 = {}]",
            p.ctrl.max_dt()
        )));
    }
    Ok(())
}

/// Controller blowup bound for inputs of norm up to `v_max`.
pub(crate) fn controller_bound(p: &NavParams, initial: f64, v_max: f64) -> f64 {
    BLOWUP_FACTOR * initial.max(norm_bound(&p.ctrl, v_max))
}
