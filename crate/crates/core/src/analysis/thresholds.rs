//! Rheobase and upper spiking threshold of the reduced system, and the
//! excitability type read off from the bifurcation at onset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::equilibria::{equilibria_unchecked, EquilibriumPoint};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::roots::bisect_predicate;
use crate::simulate::{detect_spikes, simulate_reduced, ReducedState, SpikeDetector};

/// Settings for the threshold scan and the confirmation runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub u_min: f64,
    pub u_max: f64,
    /// Grid points on `[u_min, u_max]` used to bracket stability changes.
    pub n_grid: usize,
    /// Bisection tolerance on `ũ`.
    pub tol: f64,
    pub dt: f64,
    pub t_end: f64,
    pub detector: SpikeDetector,
    /// Distance from each bifurcation at which spiking is confirmed.
    pub confirm_offset: f64,
    /// Spacing of the f-I grid used by [`classify_type`].
    pub fi_step: f64,
}

impl ScanConfig {
    pub fn for_params(p: &ModelParams) -> Self {
        let t_end = 100.0 * p.tau_s;
        ScanConfig {
            u_min: 0.0,
            u_max: 1.5 / p.alpha,
            n_grid: 301,
            tol: 1e-9 / p.alpha,
            dt: p.default_dt(),
            t_end,
            detector: SpikeDetector::for_duration(t_end),
            confirm_offset: 0.01 / p.alpha,
            fi_step: 0.02 / p.alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u_min >= 0.0 && self.u_max > self.u_min) || !self.u_max.is_finite() {
            return Err(Error::Precondition(format!(
                "scan range must satisfy 0 <= u_min < u_max, got [{}, {}]",
                self.u_min, self.u_max
            )));
        }
        if self.n_grid < 2 {
            return Err(Error::Precondition("scan grid needs at least 2 points".into()));
        }
        if !(self.tol > 0.0) || !(self.confirm_offset > 0.0) || !(self.fi_step > 0.0) {
            return Err(Error::Precondition("tol, confirm_offset and fi_step must be > 0".into()));
        }
        self.detector.validate()
    }

    fn grid(&self) -> Vec<f64> {
        let h = (self.u_max - self.u_min) / (self.n_grid - 1) as f64;
        (0..self.n_grid).map(|k| self.u_min + h * k as f64).collect()
    }
}

/// Inputs at which the `ẋ_s` nullcline passes through the two knees of the
/// `ṙ` nullcline. These are the thresholds in the limit `τ/τ_s → 0`.
///
/// At a knee `∂²V/∂r² = 0`, i.e. `1 + x_s − 3β1 r² + 5β2 r⁴ = 0`; with
/// `x_s = β3 r⁴` this is a quadratic in `s = r²`, and the input follows from
/// the equilibrium condition `α ũ = r − β1 r³ + (β2 + β3) r⁵`.
pub fn nullcline_threshold_estimates(p: &ModelParams) -> Result<(f64, f64)> {
    p.validate()?;
    let qa = 5.0 * p.beta2 + p.beta3;
    let qb = -3.0 * p.beta1;
    let disc = qb * qb - 4.0 * qa;
    if disc <= 0.0 {
        return Err(Error::Precondition(format!(
            "r-nullcline has no knees for these parameters (discriminant {disc})"
        )));
    }
    let s_lo = (-qb - disc.sqrt()) / (2.0 * qa);
    let s_hi = (-qb + disc.sqrt()) / (2.0 * qa);
    let u_at = |s: f64| {
        let r = s.sqrt();
        (r - p.beta1 * r.powi(3) + (p.beta2 + p.beta3) * r.powi(5)) / p.alpha
    };
    Ok((u_at(s_lo), u_at(s_hi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BifurcationKind {
    SaddleNode,
    Hopf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bifurcation {
    pub u_tilde: f64,
    pub kind: BifurcationKind,
    /// Equilibrium changing stability, evaluated on its stable side.
    pub r: f64,
    pub x_s: f64,
}

/// Fold of equilibria on `[lo, lo + confirm_offset]`, if any.
fn find_rest_fold(lo: f64, cfg: &ScanConfig, p: &ModelParams) -> Option<f64> {
    let below = (lo - cfg.tol).max(0.0);
    let count = equilibria_unchecked(below, p).len();
    let grid: Vec<f64> = (0..=100)
        .map(|k| below + (cfg.confirm_offset + cfg.tol) * k as f64 / 100.0)
        .collect();
    refine(|u| equilibria_unchecked(u, p).len() == count, &grid, 0, true, cfg.tol)
}

/// Oscillation peak-to-peak amplitude in `r` below which a run counts as
/// settled on an equilibrium.
pub const SETTLED_AMPLITUDE: f64 = 1e-3;

/// Steady-window statistics of a run from rest under constant `ũ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStats {
    pub u_tilde: f64,
    pub spikes: usize,
    /// Peak-to-peak `r` over the steady window.
    pub amplitude: f64,
}

/// Runs at `bifurcation ± confirm_offset`. Spikes must appear just above the
/// rheobase and not below it; the orbit must still oscillate just below the
/// upper threshold and settle just above it. Near the upper threshold the
/// oscillation may be too small to count as spikes, so amplitude is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confirmation {
    pub below_lower: SteadyStats,
    pub above_lower: SteadyStats,
    pub below_upper: SteadyStats,
    pub above_upper: SteadyStats,
}

impl Confirmation {
    pub fn holds(&self) -> bool {
        self.below_lower.spikes == 0
            && self.above_lower.spikes >= 3
            && self.below_upper.amplitude > SETTLED_AMPLITUDE
            && self.above_upper.spikes == 0
            && self.above_upper.amplitude <= SETTLED_AMPLITUDE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// Rheobase estimate from the nullcline geometry.
    pub u_lower: f64,
    /// Upper threshold estimate from the nullcline geometry.
    pub u_upper: f64,
    /// Loss of stability of the resting equilibrium.
    pub lower_bifurcation: Bifurcation,
    /// Fold where the resting branch collides with the saddle, if it lies
    /// within `confirm_offset` above the stability loss.
    pub rest_fold: Option<f64>,
    /// Stabilization of the excited equilibrium, where spiking ceases.
    pub upper_bifurcation: Bifurcation,
    pub confirmation: Confirmation,
    pub confirmed: bool,
}

fn describe(u: f64, p: &ModelParams) -> String {
    let eq = equilibria_unchecked(u, p);
    let parts: Vec<String> = eq
        .iter()
        .map(|e| format!("r={:.6} {:?}", e.r, e.kind))
        .collect();
    format!("u={u}: [{}]", parts.join(", "))
}

fn not_bracketed(cfg: &ScanConfig, p: &ModelParams, what: &str) -> Error {
    Error::NotBracketed {
        u_min: cfg.u_min,
        u_max: cfg.u_max,
        detail: format!("{what}; {}; {}", describe(cfg.u_min, p), describe(cfg.u_max, p)),
    }
}

fn rest_stable(u: f64, p: &ModelParams) -> bool {
    equilibria_unchecked(u, p)
        .first()
        .is_some_and(|e| e.kind.is_stable())
}

fn top_stable(u: f64, p: &ModelParams) -> bool {
    equilibria_unchecked(u, p)
        .last()
        .is_some_and(|e| e.kind.is_stable())
}

/// Refines the first stability change of `pred` on `grid[start..]`, looking
/// for a transition from `from` to `!from`.
fn refine<P: Fn(f64) -> bool + Sync>(pred: P, grid: &[f64], start: usize, from: bool, tol: f64) -> Option<f64> {
    let flags: Vec<bool> = grid[start..].par_iter().map(|&u| pred(u)).collect();
    if flags.first() != Some(&from) {
        return None;
    }
    let k = flags.iter().position(|&f| f != from)?;
    let (lo, hi) = (grid[start + k - 1], grid[start + k]);
    Some(bisect_predicate(&pred, lo, hi, tol))
}

fn classify_point(u: f64, tol: f64, pick: fn(&[EquilibriumPoint]) -> Option<&EquilibriumPoint>, stable_side: f64, p: &ModelParams) -> Bifurcation {
    let below = equilibria_unchecked((u - tol).max(0.0), p);
    let above = equilibria_unchecked(u + tol, p);
    let kind = if below.len() != above.len() {
        BifurcationKind::SaddleNode
    } else {
        BifurcationKind::Hopf
    };
    let side = if stable_side < 0.0 { &below } else { &above };
    let e = pick(side).expect("an equilibrium always exists");
    Bifurcation {
        u_tilde: u,
        kind,
        r: e.r,
        x_s: e.x_s,
    }
}

/// Steady-window spike count and amplitude of a run from rest under
/// constant `ũ`.
pub fn steady_stats(p: &ModelParams, u_tilde: f64, cfg: &ScanConfig) -> Result<SteadyStats> {
    let traj = simulate_reduced(&ReducedState::new(0.0, 0.0), |_| u_tilde, p, cfg.dt, cfg.t_end)?;
    let train = detect_spikes(&traj, &cfg.detector)?;
    let start = traj.t_end() - cfg.detector.steady_window;
    let (lo, hi) = traj
        .states
        .iter()
        .enumerate()
        .filter(|(k, _)| traj.time(*k) >= start)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, s)| (lo.min(s.r), hi.max(s.r)));
    Ok(SteadyStats {
        u_tilde,
        spikes: train.count_after(start),
        amplitude: if hi >= lo { hi - lo } else { 0.0 },
    })
}

/// Locates both thresholds by bracketing the stability changes of the lowest
/// and highest equilibria, then confirms them by simulation.
pub fn threshold_scan(p: &ModelParams, cfg: &ScanConfig) -> Result<ThresholdReport> {
    p.validate()?;
    cfg.validate()?;
    let (u_lower, u_upper) = nullcline_threshold_estimates(p)?;
    let grid = cfg.grid();

    let lo = refine(|u| rest_stable(u, p), &grid, 0, true, cfg.tol)
        .ok_or_else(|| not_bracketed(cfg, p, "resting equilibrium does not lose stability"))?;
    let start = grid.partition_point(|&u| u <= lo);
    if start == 0 || start >= grid.len() {
        return Err(not_bracketed(cfg, p, "no grid point above the rheobase"));
    }
    let hi = refine(|u| top_stable(u, p), &grid, start, false, cfg.tol)
        .ok_or_else(|| not_bracketed(cfg, p, "excited equilibrium never stabilizes"))?;

    let lower_bifurcation = classify_point(lo, cfg.tol, |e| e.first(), -1.0, p);
    let rest_fold = find_rest_fold(lo, cfg, p);
    let upper_bifurcation = classify_point(hi, cfg.tol, |e| e.last(), 1.0, p);

    let probes = [
        (lo - cfg.confirm_offset).max(0.0),
        lo + cfg.confirm_offset,
        hi - cfg.confirm_offset,
        hi + cfg.confirm_offset,
    ];
    let stats = probes
        .par_iter()
        .map(|&u| steady_stats(p, u, cfg))
        .collect::<Result<Vec<SteadyStats>>>()?;
    let confirmation = Confirmation {
        below_lower: stats[0],
        above_lower: stats[1],
        below_upper: stats[2],
        above_upper: stats[3],
    };
    Ok(ThresholdReport {
        u_lower,
        u_upper,
        lower_bifurcation,
        rest_fold,
        upper_bifurcation,
        confirmed: confirmation.holds(),
        confirmation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HodgkinType {
    TypeI,
    TypeII,
    Unclassified,
}

/// Relative offsets above the rheobase at which onset frequencies are sampled.
pub const ONSET_OFFSETS: [f64; 3] = [0.01, 0.02, 0.05];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FICurveReport {
    pub points: Vec<(f64, f64)>,
    pub u_lower: f64,
    pub u_upper: f64,
    /// Type I when the resting branch ends in a saddle-node at onset, Type II
    /// when it only loses stability through a Hopf; provided spiking starts
    /// just above the onset.
    pub hodgkin_type: HodgkinType,
    /// Type from the frequency-ratio rule alone.
    pub ratio_rule_type: HodgkinType,
    /// `(ε, f(ũ_lo(1+ε)), f(ũ_lo(1+ε))/f_mid)` with `ũ_lo` the exact rheobase.
    pub onset: Vec<(f64, f64, f64)>,
    pub u_mid: f64,
    pub f_mid: f64,
    /// Smallest nonzero frequency among the grid and onset samples.
    pub min_spiking_frequency: f64,
    pub thresholds: ThresholdReport,
}

/// Ratio rule: Type I if the ratio at `ε = 0.01` is below 0.3 and falls as
/// `ε → 0`, Type II if above 0.5.
pub fn ratio_rule(ratios: &[f64]) -> HodgkinType {
    let Some(&first) = ratios.first() else {
        return HodgkinType::Unclassified;
    };
    if first < 0.3 && ratios.windows(2).all(|w| w[0] <= w[1]) {
        HodgkinType::TypeI
    } else if first > 0.5 {
        HodgkinType::TypeII
    } else {
        HodgkinType::Unclassified
    }
}

/// Runs the threshold scan, samples the f-I curve and classifies the
/// excitability type.
pub fn classify_type(p: &ModelParams, cfg: &ScanConfig) -> Result<FICurveReport> {
    let thresholds = threshold_scan(p, cfg)?;
    let lo = thresholds.lower_bifurcation.u_tilde;
    let hi = thresholds.upper_bifurcation.u_tilde;
    let u_mid = 0.5 * (lo + hi);

    let n_points = ((cfg.u_max - cfg.u_min) / cfg.fi_step).floor() as usize + 1;
    let mut us: Vec<f64> = (0..n_points).map(|k| cfg.u_min + cfg.fi_step * k as f64).collect();
    let n_grid = us.len();
    us.push(u_mid);
    us.extend(ONSET_OFFSETS.iter().map(|e| lo * (1.0 + e)));

    let freqs = us
        .par_iter()
        .map(|&u| {
            let traj = simulate_reduced(&ReducedState::new(0.0, 0.0), |_| u, p, cfg.dt, cfg.t_end)?;
            Ok(detect_spikes(&traj, &cfg.detector)?.steady_frequency)
        })
        .collect::<Result<Vec<f64>>>()?;

    let points: Vec<(f64, f64)> = us[..n_grid].iter().copied().zip(freqs[..n_grid].iter().copied()).collect();
    let f_mid = freqs[n_grid];
    let onset: Vec<(f64, f64, f64)> = ONSET_OFFSETS
        .iter()
        .zip(&freqs[n_grid + 1..])
        .map(|(&e, &f)| (e, f, if f_mid > 0.0 { f / f_mid } else { f64::NAN }))
        .collect();
    let min_spiking_frequency = freqs
        .iter()
        .copied()
        .filter(|&f| f > 0.0)
        .fold(f64::INFINITY, f64::min);

    let spiking_at_onset = onset[0].1 > 0.0 && f_mid > 0.0;
    let saddle_node_onset =
        thresholds.lower_bifurcation.kind == BifurcationKind::SaddleNode || thresholds.rest_fold.is_some();
    let hodgkin_type = match (spiking_at_onset, saddle_node_onset) {
        (false, _) => HodgkinType::Unclassified,
        (true, true) => HodgkinType::TypeI,
        (true, false) => HodgkinType::TypeII,
    };
    let ratios: Vec<f64> = onset.iter().map(|o| o.2).collect();

    Ok(FICurveReport {
        points,
        u_lower: thresholds.u_lower,
        u_upper: thresholds.u_upper,
        hodgkin_type,
        ratio_rule_type: if f_mid > 0.0 { ratio_rule(&ratios) } else { HodgkinType::Unclassified },
        onset,
        u_mid,
        f_mid,
        min_spiking_frequency,
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knee_estimates_type1() {
        let p = ModelParams::type1();
        let (lo, hi) = nullcline_threshold_estimates(&p).unwrap();
        assert!((p.alpha * lo - 0.2379).abs() < 5e-4, "{lo}");
        assert!((p.alpha * hi - 0.6228).abs() < 5e-4, "{hi}");
    }

    #[test]
    fn knee_is_where_curvature_vanishes() {
        // Independent check: at the knee input, the equilibrium sits where
        // ∂²V/∂r² = 0 along x_s = g(r).
        for p in [ModelParams::type1(), ModelParams::type2()] {
            let (lo, hi) = nullcline_threshold_estimates(&p).unwrap();
            for u in [lo, hi] {
                let has_flat = equilibria_unchecked(u, &p).iter().any(|e| {
                    crate::model::radial_curvature(e.r, e.x_s, &p).abs() < 1e-5
                });
                assert!(has_flat, "u={u}");
            }
        }
    }

    #[test]
    fn ratio_rule_cases() {
        assert_eq!(ratio_rule(&[0.1, 0.2, 0.3]), HodgkinType::TypeI);
        assert_eq!(ratio_rule(&[0.2, 0.1, 0.3]), HodgkinType::Unclassified);
        assert_eq!(ratio_rule(&[0.8, 0.85, 0.9]), HodgkinType::TypeII);
        assert_eq!(ratio_rule(&[0.4, 0.5, 0.6]), HodgkinType::Unclassified);
        assert_eq!(ratio_rule(&[]), HodgkinType::Unclassified);
    }

    #[test]
    fn sub_rheobase_range_is_not_bracketed() {
        let p = ModelParams::type1();
        let cfg = ScanConfig {
            u_max: 0.2 / p.alpha,
            ..ScanConfig::for_params(&p)
        };
        assert!(matches!(threshold_scan(&p, &cfg), Err(Error::NotBracketed { .. })));
    }

    #[test]
    fn onset_structure() {
        // Both sets lose the resting state through a complex pair; only the
        // Type I set then loses the resting branch in a fold.
        for (p, has_fold) in [(ModelParams::type1(), true), (ModelParams::type2(), false)] {
            let cfg = ScanConfig::for_params(&p);
            let grid = cfg.grid();
            let lo = refine(|u| rest_stable(u, &p), &grid, 0, true, cfg.tol).unwrap();
            assert_eq!(classify_point(lo, cfg.tol, |e| e.first(), -1.0, &p).kind, BifurcationKind::Hopf);
            let fold = find_rest_fold(lo, &cfg, &p);
            assert_eq!(fold.is_some(), has_fold, "{fold:?}");
            if let Some(f) = fold {
                assert_eq!(equilibria_unchecked(f - cfg.tol, &p).len(), 3);
                assert_eq!(equilibria_unchecked(f + cfg.tol, &p).len(), 1);
            }
        }
    }
}
