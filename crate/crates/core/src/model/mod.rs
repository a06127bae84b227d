//! The excitable model: a sextic radial potential modulated by a slow variable.
//!
//! ```text
//! V(r, x_s) = ½(1 + x_s) r² − ¼ β1 r⁴ + ⅙ β2 r⁶
//! g(r)      = β3 r⁴
//! ```
//!
//! The fast state follows the gradient of `V(‖x‖, x_s)` plus the scaled input,
//! and `x_s` relaxes towards `g(‖x‖)` on the slow timescale.

mod assumptions;

pub use assumptions::{
    check_assumption1, check_assumption2, locate_pitchfork_fold, Assumption1Report,
    Assumption1Violation, Assumption2Report, PitchforkRegime, RegimeCheck,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::StateVec;

/// Ratio `tau_s / tau` under which the slow/fast split is considered weak.
pub const WEAK_SEPARATION_RATIO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub tau: f64,
    pub tau_s: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl ModelParams {
    pub fn new(tau: f64, tau_s: f64, alpha: f64, beta1: f64, beta2: f64, beta3: f64) -> Result<Self> {
        let p = ModelParams {
            tau,
            tau_s,
            alpha,
            beta1,
            beta2,
            beta3,
        };
        p.validate()?;
        Ok(p)
    }

    /// Type I phase-plane parameters.
    pub fn type1() -> Self {
        ModelParams {
            tau: 0.1,
            tau_s: 3.0,
            alpha: 0.1,
            beta1: 3.0,
            beta2: 1.5,
            beta3: 1.5,
        }
    }

    /// Type II phase-plane parameters (steeper adaptation).
    pub fn type2() -> Self {
        ModelParams {
            beta3: 5.0,
            ..Self::type1()
        }
    }

    /// Parameters of the rotating-input demonstration in the plane.
    pub fn rotating_demo() -> Self {
        ModelParams {
            tau: 0.05,
            tau_s: 2.0,
            alpha: 0.25,
            beta1: 3.0,
            beta2: 1.5,
            beta3: 1.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.tau, self.tau_s, self.alpha, self.beta1, self.beta2, self.beta3];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.tau <= 0.0 {
            return Err(Error::InvalidParams(format!("tau must be > 0, got {}", self.tau)));
        }
        if self.tau_s <= self.tau {
            return Err(Error::InvalidParams(format!(
                "tau_s ({}) must exceed tau ({})",
                self.tau_s, self.tau
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidParams(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if self.beta1 <= 0.0 || self.beta2 <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "beta1 and beta2 must be > 0, got {} and {}",
                self.beta1, self.beta2
            )));
        }
        if self.beta3 < 0.0 {
            return Err(Error::InvalidParams(format!("beta3 must be >= 0, got {}", self.beta3)));
        }
        Ok(())
    }

    /// Non-fatal remarks about the parameter set.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.tau_s / self.tau < WEAK_SEPARATION_RATIO {
            out.push(format!(
                "weak timescale separation: tau_s/tau = {:.3} < {}",
                self.tau_s / self.tau,
                WEAK_SEPARATION_RATIO
            ));
        }
        out
    }

    /// Default integration step, `tau / 50`.
    pub fn default_dt(&self) -> f64 {
        self.tau / 50.0
    }

    /// Largest admissible integration step, `tau / 20`.
    pub fn max_dt(&self) -> f64 {
        self.tau / 20.0
    }
}

/// Full state `(x, x_s)` of the n-dimensional system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub x: StateVec,
    pub x_s: f64,
}

impl FullState {
    /// Builds an initial condition; a negative `x_s` is clamped to 0.
    pub fn initial(x: StateVec, x_s: f64) -> Self {
        FullState { x, x_s: x_s.max(0.0) }
    }

    pub fn rest(dim: usize) -> Self {
        FullState {
            x: StateVec::zeros(dim),
            x_s: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }
}

pub fn potential(r: f64, x_s: f64, p: &ModelParams) -> f64 {
    let r2 = r * r;
    0.5 * (1.0 + x_s) * r2 - 0.25 * p.beta1 * r2 * r2 + p.beta2 * r2 * r2 * r2 / 6.0
}

/// `∂V/∂r = (1 + x_s) r − β1 r³ + β2 r⁵`.
pub fn radial_grad(r: f64, x_s: f64, p: &ModelParams) -> f64 {
    let r2 = r * r;
    r * ((1.0 + x_s) - p.beta1 * r2 + p.beta2 * r2 * r2)
}

/// `∂²V/∂r² = (1 + x_s) − 3 β1 r² + 5 β2 r⁴`.
pub fn radial_curvature(r: f64, x_s: f64, p: &ModelParams) -> f64 {
    let r2 = r * r;
    (1.0 + x_s) - 3.0 * p.beta1 * r2 + 5.0 * p.beta2 * r2 * r2
}

/// Gradient of `V(‖x‖, x_s)` with respect to `x`.
///
/// Evaluated as `[(1 + x_s) − β1‖x‖² + β2‖x‖⁴] x`, which is smooth through the
/// origin and equals `∂V/∂r · x/‖x‖` everywhere else.
pub fn full_grad(x: &StateVec, x_s: f64, p: &ModelParams) -> StateVec {
    x.scale(grad_factor(x.norm_sq(), x_s, p))
}

/// Scalar `(1 + x_s) − β1 r² + β2 r⁴` multiplying `x` in the gradient, given `r²`.
pub fn grad_factor(r2: f64, x_s: f64, p: &ModelParams) -> f64 {
    (1.0 + x_s) - p.beta1 * r2 + p.beta2 * r2 * r2
}

/// Adaptation function `g(r) = β3 r⁴`.
pub fn g_eval(r: f64, p: &ModelParams) -> f64 {
    let r2 = r * r;
    p.beta3 * r2 * r2
}

/// Constants `(a, b)` with `a r − b ≤ ∂V/∂r` for all `r ≥ 0`, `x_s ≥ 0`.
///
/// With `a = 1`, `∂V/∂r − r = x_s r − β1 r³ + β2 r⁵ ≥ −(β1 r³ − β2 r⁵)`, whose
/// worst case over `r ≥ 0` sits at `r² = 3β1/(5β2)`.
pub fn growth_constants(p: &ModelParams) -> (f64, f64) {
    let tight = (3.0 * p.beta1 / (5.0 * p.beta2)).sqrt();
    (1.0, 0.4 * p.beta1 * tight.powi(3))
}

/// Eventual norm bound `(b + α‖u‖)/a` for an input of norm `u_norm`.
pub fn norm_bound(p: &ModelParams, u_norm: f64) -> f64 {
    let (a, b) = growth_constants(p);
    (b + p.alpha * u_norm) / a
}

/// The pitchfork window `(x̲_s, x̄_s)` of `ṙ = −∂V/∂r`.
///
/// The origin changes stability at `x_s = −1`; the nonzero equilibria
/// `r² = (β1 ± √(β1² − 4β2(1 + x_s))) / 2β2` vanish at `x_s = β1²/4β2 − 1`.
pub fn pitchfork_thresholds(p: &ModelParams) -> Result<(f64, f64)> {
    let b1sq = p.beta1 * p.beta1;
    let four_b2 = 4.0 * p.beta2;
    if b1sq <= four_b2 {
        return Err(Error::NoSubcriticalWindow {
            beta1_sq: b1sq,
            four_beta2: four_b2,
        });
    }
    Ok((-1.0, b1sq / four_b2 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta1: f64, beta2: f64, beta3: f64) -> ModelParams {
        ModelParams {
            beta1,
            beta2,
            beta3,
            ..ModelParams::type1()
        }
    }

    #[test]
    fn radial_grad_examples() {
        let p = params(3.0, 1.5, 1.5);
        assert_eq!(radial_grad(0.0, 7.0, &p), 0.0);
        assert!((radial_grad(1.0, 0.0, &p) - (-0.5)).abs() < 1e-15);
        assert!(radial_grad(1.0, 0.5, &p).abs() < 1e-15);
    }

    #[test]
    fn full_grad_examples() {
        let p = params(3.0, 1.5, 1.5);
        assert_eq!(full_grad(&StateVec::zeros(2), 3.0, &p), StateVec::zeros(2));
        let g = full_grad(&[1.0, 0.0].into(), 0.0, &p);
        assert!((g[0] + 0.5).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_eval(0.0, &params(3.0, 1.5, 2.0)), 0.0);
        assert_eq!(g_eval(1.0, &params(3.0, 1.5, 1.5)), 1.5);
        assert_eq!(g_eval(2.0, &params(3.0, 1.5, 5.0)), 80.0);
    }

    #[test]
    fn g_is_monotone_on_grid() {
        let p = params(3.0, 1.5, 1.5);
        let vals: Vec<f64> = (0..=500).map(|i| g_eval(i as f64 * 0.01, &p)).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn pitchfork_examples() {
        let (lo, hi) = pitchfork_thresholds(&params(3.0, 1.5, 1.5)).unwrap();
        assert_eq!(lo, -1.0);
        assert!((hi - 0.5).abs() < 1e-15);
        assert!(matches!(
            pitchfork_thresholds(&params(2.0, 1.0, 1.0)),
            Err(Error::NoSubcriticalWindow { .. })
        ));
    }

    #[test]
    fn nonzero_equilibria_at_zero_slow_state() {
        // r*² = (3 ± √3)/3 from the quadratic in r²; confirm by sign changes.
        let p = params(3.0, 1.5, 1.5);
        let outer = ((3.0 + 3f64.sqrt()) / 3.0).sqrt();
        let inner = ((3.0 - 3f64.sqrt()) / 3.0).sqrt();
        assert!((outer - 1.2559).abs() < 1e-4);
        assert!((inner - 0.6501).abs() < 1e-4);
        for root in [inner, outer] {
            let lo = radial_grad(root - 1e-6, 0.0, &p);
            let hi = radial_grad(root + 1e-6, 0.0, &p);
            assert!(lo * hi < 0.0);
        }
        // The outer root attracts, the inner one repels.
        assert!(radial_curvature(outer, 0.0, &p) > 0.0);
        assert!(radial_curvature(inner, 0.0, &p) < 0.0);
    }

    #[test]
    fn validation() {
        assert!(ModelParams::type1().validate().is_ok());
        assert!(ModelParams::new(0.1, 0.05, 0.1, 3.0, 1.5, 1.5).is_err());
        assert!(ModelParams::new(0.1, 3.0, 0.1, 3.0, 0.0, 1.5).is_err());
        assert!(ModelParams::new(0.1, 3.0, 0.1, 3.0, 1.5, -1.0).is_err());
        assert!(ModelParams::new(0.1, 0.3, 0.1, 3.0, 1.5, 1.0).unwrap().warnings().len() == 1);
        assert!(ModelParams::type1().warnings().is_empty());
    }

    #[test]
    fn initial_state_clamps_slow_variable() {
        let s = FullState::initial(StateVec::zeros(2), -0.3);
        assert_eq!(s.x_s, 0.0);
    }
}
