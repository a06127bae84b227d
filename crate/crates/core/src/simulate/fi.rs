//! Frequency-input curves of the reduced system under constant `ũ`.

use rayon::prelude::*;

use super::{detect_spikes, simulate_reduced, ReducedState, SpikeDetector};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Steady spiking frequency for a constant `ũ`, starting from rest.
pub fn steady_frequency_at(
    p: &ModelParams,
    u_tilde: f64,
    dt: f64,
    t_end: f64,
    det: &SpikeDetector,
) -> Result<f64> {
    let traj = simulate_reduced(&ReducedState::new(0.0, 0.0), |_| u_tilde, p, dt, t_end)?;
    Ok(detect_spikes(&traj, det)?.steady_frequency)
}

/// `(ũ, f)` for every grid value; points run in parallel, order is preserved.
pub fn fi_curve(
    p: &ModelParams,
    u_grid: &[f64],
    dt: f64,
    t_end: f64,
    det: &SpikeDetector,
) -> Result<Vec<(f64, f64)>> {
    if u_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("u grid must be sorted ascending".into()));
    }
    det.validate()?;
    u_grid
        .par_iter()
        .map(|&u| steady_frequency_at(p, u, dt, t_end, det).map(|f| (u, f)))
        .collect()
}
