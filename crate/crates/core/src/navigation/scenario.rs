//! Tracking runs along a spiral reference with sparseness and tracking
//! metrics.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::{act, check_nav_step, controller_bound, norm2, step_nav_with_input, sub, NavParams, RobotState, Vec2};
use crate::error::{Error, Result};
use crate::simulate::{step_count, Trajectory};

/// Duty cycle ignores this initial stretch, while the controller charges up.
pub const DEFAULT_DUTY_TRANSIENT: f64 = 10.0;
/// Tracking error is bounded only after the robot has reached the reference.
pub const DEFAULT_TRACKING_TRANSIENT: f64 = 50.0;
/// Integration steps per recorded sample.
pub const DEFAULT_RECORD_EVERY: usize = 50;

/// Reference `z*(t) = (r0 + radial_rate·t)(cos θ, sin θ)`, `θ = omega·t + phase`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spiral {
    pub r0: f64,
    pub radial_rate: f64,
    pub omega: f64,
    pub phase: f64,
}

impl Spiral {
    pub fn reference() -> Self {
        Spiral {
            r0: 20.0,
            radial_rate: 1.0 / 25.0,
            omega: 1.0 / 100.0,
            phase: FRAC_PI_4,
        }
    }

    pub fn at(&self, t: f64) -> Vec2 {
        let rho = self.r0 + self.radial_rate * t;
        let th = self.omega * t + self.phase;
        [rho * th.cos(), rho * th.sin()]
    }
}

pub type NavTrajectory = Trajectory<RobotState, Vec2>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavScenario {
    pub params: NavParams,
    pub reference: Spiral,
    pub initial: RobotState,
    pub dt: f64,
    pub t_end: f64,
    pub duty_transient: f64,
    pub tracking_transient: f64,
    pub record_every: usize,
}

impl NavScenario {
    /// Spiral tracking without obstacles.
    pub fn tracking() -> Self {
        let params = NavParams {
            k2: 0.0,
            ..NavParams::reference()
        };
        NavScenario {
            dt: params.ctrl.default_dt(),
            params,
            reference: Spiral::reference(),
            initial: RobotState::default(),
            t_end: 600.0,
            duty_transient: DEFAULT_DUTY_TRANSIENT,
            tracking_transient: DEFAULT_TRACKING_TRANSIENT,
            record_every: DEFAULT_RECORD_EVERY,
        }
    }

    /// Spiral tracking with three obstacles on the nominal path.
    pub fn avoidance() -> Self {
        let base = Self::tracking();
        let obstacles = obstacles_at_reference_times(&base.reference, &[150.0, 300.0, 450.0]);
        NavScenario {
            params: NavParams {
                k2: 1.3,
                obstacles,
                ..base.params
            },
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_nav_step(&self.params, self.dt)?;
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Precondition(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::Precondition("record_every must be >= 1".into()));
        }
        if !self.initial.is_finite() || self.initial.u_s < 0.0 {
            return Err(Error::Precondition("initial state must be finite with u_s >= 0".into()));
        }
        let r = &self.reference;
        if ![r.r0, r.radial_rate, r.omega, r.phase].iter().all(|v| v.is_finite()) {
            return Err(Error::Precondition("reference parameters must be finite".into()));
        }
        Ok(())
    }
}

/// Points of the reference at the given times.
pub fn obstacles_at_reference_times(reference: &Spiral, times: &[f64]) -> Vec<Vec2> {
    times.iter().map(|&t| reference.at(t)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavMetrics {
    /// Fraction of steps after the duty transient with the actuator on.
    pub duty_cycle: f64,
    /// `‖z* − z‖` at every recorded sample.
    #[serde(skip)]
    pub tracking_error: Vec<f64>,
    pub max_tracking_error_after_transient: f64,
    /// Smallest distance to each obstacle centre over all steps.
    pub min_clearance_per_obstacle: Vec<f64>,
}

/// Integrates a scenario and evaluates its metrics on every step; the
/// returned trajectory keeps one sample every `record_every` steps.
pub fn run_scenario(cfg: &NavScenario) -> Result<(NavTrajectory, NavMetrics)> {
    cfg.validate()?;
    let p = &cfg.params;
    let n = step_count(cfg.dt, cfg.t_end);
    let mut states = Vec::with_capacity(n / cfg.record_every + 1);
    let mut inputs = Vec::with_capacity(n / cfg.record_every + 1);
    let mut tracking_error = Vec::with_capacity(n / cfg.record_every + 1);
    let mut clearance = vec![f64::INFINITY; p.obstacles.len()];
    let (mut active, mut counted) = (0usize, 0usize);
    let mut max_err: f64 = 0.0;
    let initial_norm = norm2(cfg.initial.u);
    let mut v_max: f64 = 0.0;

    let mut s = cfg.initial;
    for k in 0..=n {
        let t = k as f64 * cfg.dt;
        let z_star = cfg.reference.at(t);
        let err = norm2(sub(z_star, s.z));
        if t >= cfg.duty_transient {
            counted += 1;
            if act(s.u, p.s) != [0.0, 0.0] {
                active += 1;
            }
        }
        if t >= cfg.tracking_transient {
            max_err = max_err.max(err);
        }
        for (c, &o) in clearance.iter_mut().zip(&p.obstacles) {
            *c = c.min(norm2(sub(s.z, o)));
        }
        if k % cfg.record_every == 0 {
            states.push(s);
            inputs.push(z_star);
            tracking_error.push(err);
        }
        if k < n {
            let (next, v) = step_nav_with_input(&s, z_star, p, cfg.dt).map_err(|e| match e {
                Error::NonFinite { time } => Error::NonFinite { time: t + time },
                other => other,
            })?;
            v_max = v_max.max(v);
            let bound = controller_bound(p, initial_norm, v_max);
            let norm = norm2(next.u);
            if norm > bound {
                return Err(Error::Blowup {
                    time: t + cfg.dt,
                    norm,
                    bound,
                });
            }
            s = next;
        }
    }
    let traj = Trajectory {
        dt: cfg.dt * cfg.record_every as f64,
        t0: 0.0,
        states,
        inputs,
    };
    let metrics = NavMetrics {
        duty_cycle: if counted > 0 { active as f64 / counted as f64 } else { 0.0 },
        tracking_error,
        max_tracking_error_after_transient: max_err,
        min_clearance_per_obstacle: clearance,
    };
    Ok((traj, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_start() {
        let z = Spiral::reference().at(0.0);
        let c = 20.0 * FRAC_PI_4.cos();
        assert!((z[0] - c).abs() < 1e-12 && (z[1] - c).abs() < 1e-12);
        let z = Spiral::reference().at(100.0);
        assert!((norm2(z) - 24.0).abs() < 1e-12);
    }

    #[test]
    fn zero_gain_keeps_robot_home() {
        let mut cfg = NavScenario::tracking();
        cfg.params.k1 = 0.0;
        cfg.t_end = 20.0;
        let (traj, m) = run_scenario(&cfg).unwrap();
        assert_eq!(m.duty_cycle, 0.0);
        assert!(traj.states.iter().all(|s| s.z == [0.0, 0.0]));
    }

    #[test]
    fn recording_stride() {
        let mut cfg = NavScenario::tracking();
        cfg.t_end = 1.0;
        let (traj, m) = run_scenario(&cfg).unwrap();
        assert_eq!(traj.len(), 101);
        assert_eq!(m.tracking_error.len(), 101);
        assert!((traj.dt - 0.01).abs() < 1e-15);
    }

    #[test]
    fn obstacles_on_path() {
        let cfg = NavScenario::avoidance();
        assert_eq!(cfg.params.obstacles.len(), 3);
        assert_eq!(cfg.params.obstacles[1], cfg.reference.at(300.0));
    }
}
