//! TOML run configuration. Every section rejects unknown keys; each command
//! resolves the sections it needs into a concrete, fully defaulted struct
//! that is embedded in its outputs.

use std::path::{Path, PathBuf};

use dexcite::analysis::ScanConfig;
use dexcite::navigation::{NavParams, NavScenario, RobotState, Spiral, Vec2};
use dexcite::{ModelParams, SpikeDetector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

const BUNDLED: [(&str, &str); 5] = [
    ("fig2", include_str!("../configs/fig2.toml")),
    ("type1", include_str!("../configs/type1.toml")),
    ("type2", include_str!("../configs/type2.toml")),
    ("paper_iv_a", include_str!("../configs/paper_iv_a.toml")),
    ("paper_iv_b", include_str!("../configs/paper_iv_b.toml")),
];

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelSection>,
    pub simulate: Option<SimulateSection>,
    pub input: Option<InputSection>,
    pub detector: Option<DetectorSection>,
    pub phase_plane: Option<PhasePlaneSection>,
    pub scan: Option<ScanSection>,
    pub fi: Option<FiSection>,
    pub controller: Option<ControllerSection>,
    pub plant: Option<PlantSection>,
    pub task: Option<TaskSection>,
    pub obstacles: Option<ObstaclesSection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub tau: f64,
    pub tau_s: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Full,
    Reduced,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default)]
    pub mode: Mode,
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Initial `x` (full) or `[r]` (reduced).
    pub x0: Vec<f64>,
    #[serde(default)]
    pub x_s0: f64,
    /// Integration steps per written sample.
    pub record_every: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum InputSection {
    /// `u` constant; a single entry is `ũ` in reduced mode.
    Constant { u: Vec<f64> },
    /// `u(t) = amplitude (1 − cos θ)(cos θ, sin θ)`, `θ = omega t + phase`.
    Rotating {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl InputSection {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        match self {
            InputSection::Constant { u } => u.clone(),
            InputSection::Rotating { amplitude, omega, phase } => {
                let th = omega * t + phase;
                let m = amplitude * (1.0 - th.cos());
                vec![m * th.cos(), m * th.sin()]
            }
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub r_up: Option<f64>,
    pub r_down: Option<f64>,
    pub steady_window: Option<f64>,
}

impl DetectorSection {
    fn resolve(&self, duration: f64) -> SpikeDetector {
        let d = SpikeDetector::for_duration(duration);
        SpikeDetector {
            r_up: self.r_up.unwrap_or(d.r_up),
            r_down: self.r_down.unwrap_or(d.r_down),
            steady_window: self.steady_window.unwrap_or(d.steady_window),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasePlaneSection {
    /// `ũ` values to analyse.
    pub u_tilde: Vec<f64>,
    pub r_max: Option<f64>,
    pub n_r: Option<usize>,
    pub xs_max: Option<f64>,
    pub n_field: Option<usize>,
    pub orbit_every: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    pub n_grid: Option<usize>,
    pub tol: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub confirm_offset: Option<f64>,
    pub fi_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiSection {
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    pub tau: f64,
    pub tau_s: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub gamma: f64,
    pub alpha_act: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub k1: f64,
    #[serde(default)]
    pub k2: f64,
    pub eps: f64,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub r0: Option<f64>,
    pub radial_rate: Option<f64>,
    pub omega: Option<f64>,
    pub phase: Option<f64>,
    pub duty_transient: Option<f64>,
    pub tracking_transient: Option<f64>,
    pub record_every: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstaclesSection {
    /// Explicit positions.
    pub obstacles: Option<Vec<Vec2>>,
    /// Positions `z*(t)` on the reference at these times.
    pub at_reference_times: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
}

/// Reads `arg` as a file path, falling back to a bundled config of that name
/// (with or without `.toml`).
pub fn load(arg: &str) -> Result<Loaded, CliError> {
    let path = PathBuf::from(arg);
    let (source, text) = if path.is_file() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        (path.display().to_string(), text)
    } else {
        let stem = bundled_stem(&path);
        match stem.and_then(|s| bundled(s).map(|t| (s, t))) {
            Some((name, text)) => (format!("bundled:{name}"), text.to_string()),
            None => {
                return Err(CliError::Usage(format!(
                    "config file not found: {arg} (bundled configs: {})",
                    bundled_names().collect::<Vec<_>>().join(", ")
                )))
            }
        }
    };
    let config = parse(&text).map_err(|e| CliError::Usage(format!("invalid config {source}: {e}")))?;
    Ok(Loaded { config })
}

fn bundled_stem(path: &Path) -> Option<&str> {
    if path.components().count() != 1 {
        return None;
    }
    let name = path.to_str()?;
    Some(name.strip_suffix(".toml").unwrap_or(name))
}

pub fn parse(text: &str) -> Result<RunConfig, toml::de::Error> {
    toml::from_str(text)
}

fn missing(section: &str) -> CliError {
    CliError::Usage(format!("config has no [{section}] section"))
}

fn check_model(p: &ModelParams) -> Result<(), CliError> {
    p.validate().map_err(CliError::from)?;
    for w in p.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn check_dt(p: &ModelParams, dt: f64) -> Result<(), CliError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(CliError::Usage(format!("dt must be > 0, got {dt}")));
    }
    if dt > p.max_dt() * (1.0 + 1e-12) {
        return Err(CliError::Usage(format!(
            "dt = {dt} exceeds tau/20 = {}; the RK4 step must resolve the fast timescale",
            p.max_dt()
        )));
    }
    Ok(())
}

impl RunConfig {
    pub fn model(&self) -> Result<ModelParams, CliError> {
        let m = self.model.ok_or_else(|| missing("model"))?;
        let p = ModelParams {
            tau: m.tau,
            tau_s: m.tau_s,
            alpha: m.alpha,
            beta1: m.beta1,
            beta2: m.beta2,
            beta3: m.beta3,
        };
        check_model(&p)?;
        Ok(p)
    }

    pub fn scan(&self, p: &ModelParams) -> Result<ScanConfig, CliError> {
        let s = self.scan.clone().unwrap_or_default();
        let d = ScanConfig::for_params(p);
        let t_end = s.t_end.unwrap_or(d.t_end);
        let cfg = ScanConfig {
            u_min: s.u_min.unwrap_or(d.u_min),
            u_max: s.u_max.unwrap_or(d.u_max),
            n_grid: s.n_grid.unwrap_or(d.n_grid),
            tol: s.tol.unwrap_or(d.tol),
            dt: s.dt.unwrap_or(d.dt),
            t_end,
            detector: self.detector.clone().unwrap_or_default().resolve(t_end),
            confirm_offset: s.confirm_offset.unwrap_or(d.confirm_offset),
            fi_step: s.fi_step.unwrap_or(d.fi_step),
        };
        check_dt(p, cfg.dt)?;
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    pub fn simulate(&self) -> Result<SimulateRun, CliError> {
        let model = self.model()?;
        let s = self.simulate.clone().ok_or_else(|| missing("simulate"))?;
        let input = self.input.clone().ok_or_else(|| missing("input"))?;
        let dt = s.dt.unwrap_or(model.default_dt());
        check_dt(&model, dt)?;
        if !(s.t_end >= 0.0) || !s.t_end.is_finite() {
            return Err(CliError::Usage(format!("t_end must be >= 0, got {}", s.t_end)));
        }
        let record_every = s.record_every.unwrap_or(1);
        if record_every == 0 {
            return Err(CliError::Usage("record_every must be >= 1".into()));
        }
        if s.x0.is_empty() {
            return Err(CliError::Usage("x0 must not be empty".into()));
        }
        match (s.mode, &input) {
            (Mode::Reduced, InputSection::Constant { u }) if u.len() != 1 || s.x0.len() != 1 => {
                return Err(CliError::Usage("reduced mode takes x0 = [r] and u = [u_tilde]".into()))
            }
            (Mode::Reduced, InputSection::Rotating { .. }) => {
                return Err(CliError::Usage("reduced mode needs a constant input".into()))
            }
            (Mode::Full, InputSection::Constant { u }) if u.len() != s.x0.len() => {
                return Err(CliError::Usage(format!(
                    "u has {} entries but x0 has {}",
                    u.len(),
                    s.x0.len()
                )))
            }
            (Mode::Full, InputSection::Rotating { .. }) if s.x0.len() != 2 => {
                return Err(CliError::Usage("rotating input is planar; x0 needs 2 entries".into()))
            }
            _ => {}
        }
        Ok(SimulateRun {
            model,
            mode: s.mode,
            dt,
            t_end: s.t_end,
            x0: s.x0,
            x_s0: s.x_s0,
            record_every,
            input,
            detector: self.detector.clone().unwrap_or_default().resolve(s.t_end),
        })
    }

    pub fn phase_plane(&self) -> Result<PhasePlaneRun, CliError> {
        let model = self.model()?;
        let s = self.phase_plane.clone().ok_or_else(|| missing("phase_plane"))?;
        if s.u_tilde.is_empty() {
            return Err(CliError::Usage("phase_plane.u_tilde is empty".into()));
        }
        if s.u_tilde.iter().any(|u| !(*u >= 0.0) || !u.is_finite()) {
            return Err(CliError::Usage("phase_plane.u_tilde values must be finite and >= 0".into()));
        }
        let run = PhasePlaneRun {
            model,
            u_tilde: s.u_tilde,
            r_max: s.r_max.unwrap_or(2.0),
            n_r: s.n_r.unwrap_or(401),
            xs_max: s.xs_max.unwrap_or(3.0),
            n_field: s.n_field.unwrap_or(25),
            orbit_every: s.orbit_every.unwrap_or(10),
            scan: self.scan(&model)?,
        };
        if !(run.r_max > 0.0) || !(run.xs_max > 0.0) || run.n_r < 2 || run.n_field < 2 || run.orbit_every == 0 {
            return Err(CliError::Usage(
                "phase_plane needs r_max, xs_max > 0, n_r, n_field >= 2, orbit_every >= 1".into(),
            ));
        }
        Ok(run)
    }

    pub fn fi(&self) -> Result<FiRun, CliError> {
        let model = self.model()?;
        let s = self.fi.clone().unwrap_or_default();
        let d = ScanConfig::for_params(&model);
        let t_end = s.t_end.unwrap_or(d.t_end);
        let run = FiRun {
            model,
            u_min: s.u_min.unwrap_or(d.u_min),
            u_max: s.u_max.unwrap_or(d.u_max),
            n: s.n.unwrap_or(76),
            dt: s.dt.unwrap_or(d.dt),
            t_end,
            detector: self.detector.clone().unwrap_or_default().resolve(t_end),
        };
        check_dt(&model, run.dt)?;
        if run.n < 2 || !(run.u_min >= 0.0) || !(run.u_max > run.u_min) || !(run.t_end > 0.0) {
            return Err(CliError::Usage("fi needs n >= 2, 0 <= u_min < u_max and t_end > 0".into()));
        }
        run.detector.validate().map_err(CliError::from)?;
        Ok(run)
    }

    pub fn navigate(&self) -> Result<NavScenario, CliError> {
        let c = self.controller.clone().ok_or_else(|| missing("controller"))?;
        let pl = self.plant.clone().ok_or_else(|| missing("plant"))?;
        let task = self.task.clone().ok_or_else(|| missing("task"))?;
        let ctrl = ModelParams {
            tau: c.tau,
            tau_s: c.tau_s,
            alpha: c.alpha,
            beta1: c.beta1,
            beta2: c.beta2,
            beta3: c.beta3,
        };
        check_model(&ctrl)?;
        let base = NavScenario::tracking();
        let sp = base.reference;
        let reference = Spiral {
            r0: task.r0.unwrap_or(sp.r0),
            radial_rate: task.radial_rate.unwrap_or(sp.radial_rate),
            omega: task.omega.unwrap_or(sp.omega),
            phase: task.phase.unwrap_or(sp.phase),
        };
        let obs = self.obstacles.clone().unwrap_or_default();
        let obstacles = match (obs.obstacles, obs.at_reference_times) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "[obstacles] takes either obstacles or at_reference_times, not both".into(),
                ))
            }
            (Some(list), None) => list,
            (None, Some(times)) => dexcite::navigation::obstacles_at_reference_times(&reference, &times),
            (None, None) => Vec::new(),
        };
        let dt = task.dt.unwrap_or(ctrl.default_dt());
        check_dt(&ctrl, dt)?;
        let scenario = NavScenario {
            params: NavParams {
                gamma: pl.gamma,
                alpha_act: pl.alpha_act,
                s: pl.s,
                k1: task.k1,
                k2: task.k2,
                eps: task.eps,
                obstacles,
                ctrl,
            },
            reference,
            initial: RobotState::default(),
            dt,
            t_end: task.t_end.unwrap_or(base.t_end),
            duty_transient: task.duty_transient.unwrap_or(base.duty_transient),
            tracking_transient: task.tracking_transient.unwrap_or(base.tracking_transient),
            record_every: task.record_every.unwrap_or(base.record_every),
        };
        scenario.params.validate().map_err(CliError::from)?;
        scenario.validate().map_err(CliError::from)?;
        Ok(scenario)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateRun {
    pub model: ModelParams,
    pub mode: Mode,
    pub dt: f64,
    pub t_end: f64,
    pub x0: Vec<f64>,
    pub x_s0: f64,
    pub record_every: usize,
    pub input: InputSection,
    pub detector: SpikeDetector,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhasePlaneRun {
    pub model: ModelParams,
    pub u_tilde: Vec<f64>,
    pub r_max: f64,
    pub n_r: usize,
    pub xs_max: f64,
    pub n_field: usize,
    pub orbit_every: usize,
    pub scan: ScanConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiRun {
    pub model: ModelParams,
    pub u_min: f64,
    pub u_max: f64,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub detector: SpikeDetector,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_parse() {
        for name in bundled_names() {
            let cfg = parse(bundled(name).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
            if name.starts_with("paper_iv") {
                cfg.navigate().unwrap();
            } else {
                cfg.model().unwrap();
            }
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse("[model]\ntau = 0.1\ntau_s = 3\nalpha = 0.1\nbeta1 = 3\nbeta2 = 1.5\nbeta3 = 1.5\nbeta4 = 1\n").is_err());
        assert!(parse("[modle]\n").is_err());
    }

    #[test]
    fn controller_alpha_defaults_to_one() {
        let cfg = parse(bundled("paper_iv_a").unwrap()).unwrap();
        assert_eq!(cfg.navigate().unwrap().params.ctrl.alpha, 1.0);
    }

    #[test]
    fn obstacle_placement() {
        let b = parse(bundled("paper_iv_b").unwrap()).unwrap().navigate().unwrap();
        assert_eq!(b.params.obstacles, NavScenario::avoidance().params.obstacles);
        assert_eq!(b, NavScenario::avoidance());
        let a = parse(bundled("paper_iv_a").unwrap()).unwrap().navigate().unwrap();
        assert_eq!(a, NavScenario::tracking());
    }

    #[test]
    fn bundled_lookup() {
        assert!(load("type1.toml").is_ok());
        assert!(load("type1").is_ok());
        assert!(matches!(load("nowhere/type1.toml"), Err(CliError::Usage(_))));
        assert!(matches!(load("no_such_config"), Err(CliError::Usage(_))));
    }

    #[test]
    fn rotating_input() {
        let i = InputSection::Rotating {
            amplitude: 1.0,
            omega: 0.05,
            phase: 0.0,
        };
        assert_eq!(i.eval(0.0), vec![0.0, 0.0]);
        let u = i.eval(20.0 * std::f64::consts::PI);
        assert!((u[0] + 2.0).abs() < 1e-12 && u[1].abs() < 1e-12);
    }
}
