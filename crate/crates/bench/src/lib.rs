//! Shared workloads for the benchmarks.

use dexcite::analysis::ScanConfig;
use dexcite::navigation::NavScenario;
use dexcite::{FullState, ModelParams, StateVec};

/// Initial state off the input axis in `dim` dimensions.
pub fn oblique_start(dim: usize) -> FullState {
    let x = (0..dim).map(|i| 0.3 / (i + 1) as f64).collect::<Vec<_>>();
    FullState::initial(StateVec::new(x), 0.0)
}

/// Constant input along the first axis with `α‖u‖ = 0.4`.
pub fn axis_input(dim: usize, p: &ModelParams) -> StateVec {
    StateVec::basis(dim, 0).scale(0.4 / p.alpha)
}

/// Threshold scan with shortened confirmation runs.
pub fn quick_scan(p: &ModelParams) -> ScanConfig {
    let mut cfg = ScanConfig::for_params(p);
    cfg.t_end = 20.0 * p.tau_s;
    cfg.detector.steady_window = 0.6 * cfg.t_end;
    cfg
}

/// Tracking scenario cut to `t_end`.
pub fn short_tracking(t_end: f64) -> NavScenario {
    NavScenario {
        t_end,
        ..NavScenario::tracking()
    }
}
