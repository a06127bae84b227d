//! Numerical verification of the two structural assumptions on the potential.

use serde::{Deserialize, Serialize};

use super::{growth_constants, pitchfork_thresholds, radial_curvature, radial_grad, ModelParams};
use crate::error::{Error, Result};
use crate::roots::{bisect_predicate, scan_roots};

const GRID_R: usize = 2000;
const GRID_XS: usize = 200;
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumption1Violation {
    pub r: f64,
    pub x_s: f64,
    /// `"lower"` for `a r − b ≤ ∂V/∂r`, `"upper"` for `∂V/∂r ≤ h(r̄) r`.
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumption1Report {
    pub a: f64,
    pub b: f64,
    /// `h(r_max) = (1 + x_s_max) + β2 r_max⁴`.
    pub h_at_rmax: f64,
    /// Radius where the lower bound is attained with equality (at `x_s = 0`).
    pub lower_bound_tight_at: f64,
    pub holds: bool,
    pub violation: Option<Assumption1Violation>,
}

/// Witness constants for the growth bounds of `∂V/∂r` on `[0, r_max] × [0, x_s_max]`.
///
/// The lower witness is `a = 1`, `b = (2β1/5)(3β1/(5β2))^{3/2}` (see
/// [`growth_constants`]); the upper witness drops the negative quartic term,
/// `h(r̄) = (1 + x_s_max) + β2 r̄⁴`. Both inequalities are then checked on a
/// dense grid over the box.
pub fn check_assumption1(p: &ModelParams, r_max: f64, x_s_max: f64) -> Result<Assumption1Report> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::Precondition(format!("r_max must be > 0, got {r_max}")));
    }
    if !(x_s_max >= 0.0) || !x_s_max.is_finite() {
        return Err(Error::Precondition(format!("x_s_max must be >= 0, got {x_s_max}")));
    }
    let (a, b) = growth_constants(p);
    let tight = (3.0 * p.beta1 / (5.0 * p.beta2)).sqrt();
    let h = |rbar: f64| (1.0 + x_s_max) + p.beta2 * rbar.powi(4);

    let mut violation = None;
    'grid: for i in 0..=GRID_R {
        let r = r_max * i as f64 / GRID_R as f64;
        for j in 0..=GRID_XS {
            let x_s = x_s_max * j as f64 / GRID_XS as f64;
            let dv = radial_grad(r, x_s, p);
            let scale = 1.0 + dv.abs();
            if a * r - b > dv + SLACK * scale {
                violation = Some(Assumption1Violation { r, x_s, bound: "lower".into() });
                break 'grid;
            }
            // h is increasing, so checking against h(r) covers every r̄ ≥ r.
            if dv > h(r) * r + SLACK * scale {
                violation = Some(Assumption1Violation { r, x_s, bound: "upper".into() });
                break 'grid;
            }
        }
    }

    Ok(Assumption1Report {
        a,
        b,
        h_at_rmax: h(r_max),
        lower_bound_tight_at: tight,
        holds: violation.is_none(),
        violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitchforkRegime {
    /// `x_s < x̲_s`: origin unstable, two stable equilibria `±r*`.
    Bistable,
    /// `x̲_s < x_s < x̄_s`: origin and `±r*` all stable.
    Tristable,
    /// `x_s > x̄_s`: origin globally stable.
    Monostable,
    /// Exactly at a threshold; not checked.
    Boundary,
}

impl PitchforkRegime {
    fn expected_stable(self) -> Option<usize> {
        match self {
            PitchforkRegime::Bistable => Some(2),
            PitchforkRegime::Tristable => Some(3),
            PitchforkRegime::Monostable => Some(1),
            PitchforkRegime::Boundary => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    pub x_s: f64,
    pub regime: PitchforkRegime,
    /// Stable equilibria of `ṙ = −∂V/∂r` on the whole real line.
    pub stable_count: usize,
    /// Equilibria on `r ≥ 0` with their stability.
    pub equilibria: Vec<(f64, bool)>,
    /// Largest stable nonzero equilibrium, if any.
    pub r_star: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumption2Report {
    pub x_s_lower: f64,
    pub x_s_upper: f64,
    pub counts: Vec<RegimeCheck>,
    /// `r*(x_s)` strictly decreasing across the tristable window.
    pub r_star_monotone: bool,
    pub holds: bool,
}

/// Equilibria of `ṙ = −∂V/∂r` on `r ≥ 0`, found numerically, with stability.
fn gradient_equilibria(x_s: f64, p: &ModelParams) -> Vec<(f64, bool)> {
    // Nonzero equilibria satisfy (1 + x_s) − β1 r² + β2 r⁴ = 0, so r² is below
    // the larger root of the quadratic bound used here.
    let c = (1.0 + x_s).abs();
    let s_max = (p.beta1 + (p.beta1 * p.beta1 + 4.0 * p.beta2 * c).sqrt()) / (2.0 * p.beta2);
    let r_hi = s_max.sqrt() + 1.0;
    let factor = |r: f64| (1.0 + x_s) - p.beta1 * r * r + p.beta2 * r.powi(4);
    let mut eq = vec![(0.0, radial_curvature(0.0, x_s, p) > 0.0)];
    for r in scan_roots(factor, 1e-9, r_hi, 10_000) {
        eq.push((r, radial_curvature(r, x_s, p) > 0.0));
    }
    eq
}

/// Minimum over `r > 0` of `(1 + x_s) − β1 r² + β2 r⁴`, by a coarse scan
/// refined with golden-section search.
fn min_radial_factor(x_s: f64, p: &ModelParams) -> f64 {
    let factor = |r: f64| (1.0 + x_s) - p.beta1 * r * r + p.beta2 * r.powi(4);
    let r_hi = (p.beta1 / p.beta2).sqrt() + 1.0;
    let n = 1000;
    let h = r_hi / n as f64;
    let best = (0..=n)
        .map(|i| i as f64 * h)
        .min_by(|a, b| factor(*a).total_cmp(&factor(*b)))
        .unwrap_or(0.0);
    let (mut a, mut b) = ((best - h).max(0.0), best + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if factor(c) < factor(d) {
            b = d;
        } else {
            a = c;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    factor(0.5 * (a + b))
}

fn has_nonzero_equilibrium(x_s: f64, p: &ModelParams) -> bool {
    gradient_equilibria(x_s, p).len() > 1
}

/// Locates the fold `x̄_s` where the nonzero equilibria disappear, by bisection
/// on their existence. Independent of the closed form in `pitchfork_thresholds`.
pub fn locate_pitchfork_fold(p: &ModelParams, tol: f64) -> Result<f64> {
    let lo = -0.5;
    if !has_nonzero_equilibrium(lo, p) {
        return Err(Error::NoSubcriticalWindow {
            beta1_sq: p.beta1 * p.beta1,
            four_beta2: 4.0 * p.beta2,
        });
    }
    let mut hi = 1.0;
    while has_nonzero_equilibrium(hi, p) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidParams("nonzero equilibria never vanish".into()));
        }
    }
    // Near the fold the two roots merge into a tangency that a sign scan
    // misses, so bisect on the sign of the radial factor's numerical minimum.
    let x = bisect_predicate(|x_s| min_radial_factor(x_s, p) > 0.0, lo, hi, tol);
    Ok(x)
}

/// Checks the three-regime pitchfork structure on `x_s_grid`.
pub fn check_assumption2(p: &ModelParams, x_s_grid: &[f64]) -> Result<Assumption2Report> {
    if x_s_grid.is_empty() {
        return Err(Error::Precondition("x_s grid is empty".into()));
    }
    if x_s_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("x_s grid must be sorted".into()));
    }
    let (lower, upper) = pitchfork_thresholds(p)?;
    let mut counts = Vec::with_capacity(x_s_grid.len());
    for &x_s in x_s_grid {
        let regime = if x_s < lower {
            PitchforkRegime::Bistable
        } else if x_s > lower && x_s < upper {
            PitchforkRegime::Tristable
        } else if x_s > upper {
            PitchforkRegime::Monostable
        } else {
            PitchforkRegime::Boundary
        };
        let equilibria = gradient_equilibria(x_s, p);
        let stable_count = equilibria
            .iter()
            .map(|&(r, stable)| match (stable, r == 0.0) {
                (false, _) => 0,
                (true, true) => 1,
                (true, false) => 2,
            })
            .sum();
        let r_star = equilibria
            .iter()
            .filter(|&&(r, s)| s && r > 0.0)
            .map(|&(r, _)| r)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        let ok = regime.expected_stable().is_none_or(|e| e == stable_count);
        counts.push(RegimeCheck {
            x_s,
            regime,
            stable_count,
            equilibria,
            r_star,
            ok,
        });
    }
    let window: Vec<f64> = counts
        .iter()
        .filter(|c| c.regime == PitchforkRegime::Tristable)
        .filter_map(|c| c.r_star)
        .collect();
    let r_star_monotone = window.windows(2).all(|w| w[1] < w[0]);
    let holds = r_star_monotone && counts.iter().all(|c| c.ok);
    Ok(Assumption2Report {
        x_s_lower: lower,
        x_s_upper: upper,
        counts,
        r_star_monotone,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_set() -> ModelParams {
        ModelParams::type1()
    }

    #[test]
    fn assumption1_witness() {
        let rep = check_assumption1(&reference_set(), 5.0, 10.0).unwrap();
        assert!(rep.holds, "{:?}", rep.violation);
        assert_eq!(rep.a, 1.0);
        assert!((rep.b - 1.5775).abs() < 1e-4);
        assert!((rep.lower_bound_tight_at - 1.0954).abs() < 1e-4);
    }

    #[test]
    fn assumption1_b_matches_brute_force_minimum() {
        // min over r of (r − 3r³ + 1.5r⁵) − r on a fine grid
        let p = reference_set();
        let (mut best, mut arg) = (f64::INFINITY, 0.0);
        for i in 0..=400_000 {
            let r = 3.0 * i as f64 / 400_000.0;
            let gap = radial_grad(r, 0.0, &p) - r;
            if gap < best {
                best = gap;
                arg = r;
            }
        }
        let rep = check_assumption1(&p, 5.0, 10.0).unwrap();
        assert!((rep.b + best).abs() < 1e-9);
        assert!((rep.lower_bound_tight_at - arg).abs() < 1e-4);
    }

    #[test]
    fn assumption1_rejects_bad_box() {
        assert!(check_assumption1(&reference_set(), 0.0, 1.0).is_err());
        assert!(check_assumption1(&reference_set(), 1.0, -1.0).is_err());
    }

    #[test]
    fn assumption2_regimes() {
        let rep = check_assumption2(&reference_set(), &[-2.0, 0.0, 1.0]).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.counts[0].stable_count, 2);
        assert!(!rep.counts[0].equilibria[0].1, "origin unstable below x̲_s");
        assert_eq!(rep.counts[1].stable_count, 3);
        let r_star = rep.counts[1].r_star.unwrap();
        assert!((r_star - 1.2559).abs() < 1e-4);
        assert_eq!(rep.counts[2].stable_count, 1);
        assert_eq!(rep.counts[2].equilibria.len(), 1);
    }

    #[test]
    fn assumption2_monotone_r_star() {
        let grid: Vec<f64> = (0..=100).map(|i| -1.5 + 2.5 * i as f64 / 100.0).collect();
        let rep = check_assumption2(&reference_set(), &grid).unwrap();
        assert!(rep.holds);
        assert!(rep.r_star_monotone);
    }

    #[test]
    fn assumption2_preconditions() {
        assert!(check_assumption2(&reference_set(), &[]).is_err());
        assert!(check_assumption2(&reference_set(), &[1.0, 0.0]).is_err());
        let flat = ModelParams { beta1: 2.0, beta2: 1.0, ..reference_set() };
        assert!(check_assumption2(&flat, &[0.0]).is_err());
    }

    #[test]
    fn numeric_fold_matches_closed_form() {
        let x = locate_pitchfork_fold(&reference_set(), 1e-13).unwrap();
        assert!((x - 0.5).abs() < 1e-9);
    }
}
