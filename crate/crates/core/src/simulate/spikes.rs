//! Hysteresis spike detection on a sampled radial signal.

use serde::{Deserialize, Serialize};

use super::{Radial, Trajectory};
use crate::error::{Error, Result};

/// Spike detector settings. A spike starts at an upward crossing of `r_up`
/// and ends at the next downward crossing of `r_down`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikeDetector {
    pub r_up: f64,
    pub r_down: f64,
    /// Length of the final window (time units) used for the steady frequency.
    pub steady_window: f64,
}

impl SpikeDetector {
    pub const DEFAULT_R_UP: f64 = 0.8;
    pub const DEFAULT_R_DOWN: f64 = 0.4;
    /// Fraction of a run treated as steady state (the first 40% is transient).
    pub const DEFAULT_STEADY_FRACTION: f64 = 0.6;

    /// Default thresholds with the steady window covering the last 60% of a
    /// run of length `duration`.
    pub fn for_duration(duration: f64) -> Self {
        SpikeDetector {
            r_up: Self::DEFAULT_R_UP,
            r_down: Self::DEFAULT_R_DOWN,
            steady_window: Self::DEFAULT_STEADY_FRACTION * duration,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_down > 0.0 && self.r_down < self.r_up) || !self.r_up.is_finite() {
            return Err(Error::Precondition(format!(
                "detector needs 0 < r_down < r_up, got r_down={} r_up={}",
                self.r_down, self.r_up
            )));
        }
        if !(self.steady_window >= 0.0) {
            return Err(Error::Precondition("steady_window must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpikeTrain {
    pub spike_times: Vec<f64>,
    /// Time spent above `r_up`, one entry per spike that fell back below it
    /// before the run ended.
    pub widths: Vec<f64>,
    pub isis: Vec<f64>,
    pub steady_frequency: f64,
}

impl SpikeTrain {
    /// Detects spikes in `radii` sampled at `t0 + k·dt`.
    pub fn from_radii(radii: &[f64], t0: f64, dt: f64, det: &SpikeDetector) -> Result<Self> {
        det.validate()?;
        let mut spike_times = Vec::new();
        let mut widths = Vec::new();
        let mut in_spike = false;
        let mut width_open = false;
        let crossing = |k: usize, level: f64| {
            let (a, b) = (radii[k - 1], radii[k]);
            t0 + dt * ((k - 1) as f64 + (level - a) / (b - a))
        };
        for k in 1..radii.len() {
            let (prev, cur) = (radii[k - 1], radii[k]);
            if !in_spike {
                if prev < det.r_up && cur >= det.r_up {
                    spike_times.push(crossing(k, det.r_up));
                    in_spike = true;
                    width_open = true;
                }
            } else {
                if width_open && prev >= det.r_up && cur < det.r_up {
                    let start = *spike_times.last().expect("open spike");
                    widths.push(crossing(k, det.r_up) - start);
                    width_open = false;
                }
                if prev >= det.r_down && cur < det.r_down {
                    in_spike = false;
                }
            }
        }
        let isis = spike_times.windows(2).map(|w| w[1] - w[0]).collect();

        let t_last = t0 + dt * radii.len().saturating_sub(1) as f64;
        let window_start = t_last - det.steady_window;
        let steady: Vec<f64> = spike_times.iter().copied().filter(|&t| t >= window_start).collect();
        let steady_frequency = if steady.len() >= 3 {
            (steady.len() - 1) as f64 / (steady[steady.len() - 1] - steady[0])
        } else {
            0.0
        };
        Ok(SpikeTrain {
            spike_times,
            widths,
            isis,
            steady_frequency,
        })
    }

    pub fn len(&self) -> usize {
        self.spike_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spike_times.is_empty()
    }

    /// Spikes starting at or after `t`.
    pub fn count_after(&self, t: f64) -> usize {
        self.spike_times.iter().filter(|&&s| s >= t).count()
    }
}

pub fn detect_spikes<S: Radial, I>(traj: &Trajectory<S, I>, det: &SpikeDetector) -> Result<SpikeTrain> {
    SpikeTrain::from_radii(&traj.radii(), traj.t0, traj.dt, det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn det(window: f64) -> SpikeDetector {
        SpikeDetector {
            r_up: 0.8,
            r_down: 0.4,
            steady_window: window,
        }
    }

    #[test]
    fn flat_signal_has_no_spikes() {
        let train = SpikeTrain::from_radii(&vec![0.3; 1000], 0.0, 0.01, &det(6.0)).unwrap();
        assert!(train.is_empty());
        assert_eq!(train.steady_frequency, 0.0);
    }

    #[test]
    fn rectified_sine_crossings() {
        // r(t) = 1.2 max(0, sin(2πt/T)) crosses 0.8 upwards at T(k + asin(2/3)/2π).
        let period = 2.5;
        let dt = period / 10_000.0;
        let n = 10 * 10_000;
        let radii: Vec<f64> = (0..=n)
            .map(|k| 1.2 * (2.0 * PI * k as f64 * dt / period).sin().max(0.0))
            .collect();
        let train = SpikeTrain::from_radii(&radii, 0.0, dt, &det(0.6 * 10.0 * period)).unwrap();
        assert_eq!(train.len(), 10);
        let phase = (2.0f64 / 3.0).asin() / (2.0 * PI);
        for (k, t) in train.spike_times.iter().enumerate() {
            assert!((t - period * (k as f64 + phase)).abs() < 1e-7, "spike {k} at {t}");
        }
        assert!((train.steady_frequency - 1.0 / period).abs() < 1e-9);
        // Time above 0.8 within each positive half-wave: T(1/2 − 2·phase).
        let width = period * (0.5 - 2.0 * phase);
        assert_eq!(train.widths.len(), 10);
        assert!(train.widths.iter().all(|w| (w - width).abs() < 1e-7));
        assert!(train.isis.iter().all(|i| (i - period).abs() < 1e-7));
    }

    #[test]
    fn hysteresis_ignores_chatter_between_thresholds() {
        // Rises past r_up, dips to 0.6 (above r_down), rises again: one spike.
        let radii = [0.0, 0.9, 0.6, 0.9, 0.3, 0.9, 0.2];
        let train = SpikeTrain::from_radii(&radii, 0.0, 1.0, &det(100.0)).unwrap();
        assert_eq!(train.len(), 2);
        assert_eq!(train.widths.len(), 2);
    }

    #[test]
    fn fewer_than_three_steady_spikes_give_zero_frequency() {
        let radii = [0.0, 1.0, 0.0, 1.0, 0.0];
        let train = SpikeTrain::from_radii(&radii, 0.0, 1.0, &det(100.0)).unwrap();
        assert_eq!(train.len(), 2);
        assert_eq!(train.steady_frequency, 0.0);
    }

    #[test]
    fn invalid_thresholds_rejected() {
        let bad = SpikeDetector { r_up: 0.4, r_down: 0.8, steady_window: 1.0 };
        assert!(SpikeTrain::from_radii(&[0.0], 0.0, 1.0, &bad).is_err());
    }
}
