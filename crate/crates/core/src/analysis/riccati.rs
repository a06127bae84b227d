//! Direction dynamics under a constant input: the cosine between state and
//! input obeys a Riccati equation whose solution is
//! `cos(t) = tanh((α‖u‖/τ) ∫₀ᵗ ‖x‖⁻¹ ds + atanh(cos₀))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::simulate::FullTrajectory;
use crate::vector::{cosine, StateVec};

/// Norms at or below this count as a vanished state.
pub const NORM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiReport {
    /// Largest `|cos_simulated − cos_closed_form|` over the samples.
    pub max_residual: f64,
    pub initial_cos: f64,
    pub final_cos: f64,
    /// `cos₀ = ±1`: the closed form degenerates to a constant.
    pub exact_alignment: bool,
    pub min_norm: f64,
}

/// Closed-form cosine given the running integral of `1/‖x‖`.
pub fn closed_form_cos(integral: f64, u_norm: f64, cos0: f64, p: &ModelParams) -> f64 {
    (p.alpha * u_norm / p.tau * integral + cos0.atanh()).tanh()
}

/// Compares the simulated cosine with the closed form along a full run
/// driven by the constant input `u`.
pub fn riccati_check(traj: &FullTrajectory, u: &StateVec, p: &ModelParams) -> Result<RiccatiReport> {
    if traj.is_empty() {
        return Err(Error::Precondition("empty trajectory".into()));
    }
    if traj.inputs.iter().any(|v| v != u) {
        return Err(Error::Precondition("riccati_check needs a constant input".into()));
    }
    let u_norm = u.norm();
    if u_norm == 0.0 {
        return Err(Error::Precondition("input must be nonzero".into()));
    }
    let mut norms = Vec::with_capacity(traj.len());
    let mut cosines = Vec::with_capacity(traj.len());
    for (k, s) in traj.states.iter().enumerate() {
        let n = s.x.norm();
        if n <= NORM_FLOOR {
            return Err(Error::NormVanished { time: traj.time(k) });
        }
        norms.push(n);
        cosines.push(cosine(&s.x, u)?.expect("both vectors nonzero"));
    }
    let cos0 = cosines[0];
    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let final_cos = *cosines.last().expect("nonempty");

    if cos0.abs() >= 1.0 {
        let max_residual = cosines.iter().map(|c| (c - cos0).abs()).fold(0.0, f64::max);
        return Ok(RiccatiReport {
            max_residual,
            initial_cos: cos0,
            final_cos,
            exact_alignment: true,
            min_norm,
        });
    }

    let mut integral = 0.0;
    let mut max_residual: f64 = 0.0;
    for k in 0..norms.len() {
        if k > 0 {
            integral += 0.5 * traj.dt * (1.0 / norms[k - 1] + 1.0 / norms[k]);
        }
        let c = closed_form_cos(integral, u_norm, cos0, p);
        max_residual = max_residual.max((cosines[k] - c).abs());
    }
    Ok(RiccatiReport {
        max_residual,
        initial_cos: cos0,
        final_cos,
        exact_alignment: false,
        min_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FullState;
    use crate::simulate::simulate_full;

    #[test]
    fn parallel_start_is_exactly_aligned() {
        let p = ModelParams::type1();
        let u = StateVec::from([3.0, 0.0]);
        let traj = simulate_full(&FullState::initial(StateVec::from([0.2, 0.0]), 0.0), |_| u.clone(), &p, p.default_dt(), 5.0).unwrap();
        let rep = riccati_check(&traj, &u, &p).unwrap();
        assert!(rep.exact_alignment);
        assert_eq!(rep.max_residual, 0.0);
        assert_eq!(rep.final_cos, 1.0);
    }

    #[test]
    fn oblique_start_matches_closed_form() {
        let p = ModelParams::type1();
        let u = StateVec::from([0.0, 20.0]);
        let x0 = StateVec::from([1.0, -0.3]);
        let dt = p.tau / 100.0;
        let traj = simulate_full(&FullState::initial(x0, 0.0), |_| u.clone(), &p, dt, 5.0).unwrap();
        let rep = riccati_check(&traj, &u, &p).unwrap();
        assert!(rep.max_residual < 1e-3, "{rep:?}");
        assert!(rep.final_cos > 0.999);
    }

    #[test]
    fn vanished_norm_is_reported() {
        let p = ModelParams::type1();
        let u = StateVec::from([1.0, 0.0]);
        let traj = simulate_full(&FullState::rest(2), |_| u.clone(), &p, p.default_dt(), 0.1).unwrap();
        assert!(matches!(riccati_check(&traj, &u, &p), Err(Error::NormVanished { time }) if time == 0.0));
    }

    #[test]
    fn varying_input_rejected() {
        let p = ModelParams::type1();
        let traj = simulate_full(&FullState::initial(StateVec::from([0.5, 0.5]), 0.0), |t| StateVec::from([1.0 + t, 0.0]), &p, p.default_dt(), 0.1).unwrap();
        assert!(riccati_check(&traj, &StateVec::from([1.0, 0.0]), &p).is_err());
    }
}
