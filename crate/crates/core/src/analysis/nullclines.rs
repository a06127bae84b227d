//! Nullclines and sampled vector fields of the reduced system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{g_eval, ModelParams};
use crate::simulate::reduced_vector_field;

/// A nullcline sampled as `(r, x_s)` points.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Nullcline {
    pub points: Vec<(f64, f64)>,
    /// For `ũ = 0` the whole axis `r = 0` is part of the `ṙ = 0` set.
    pub includes_axis: bool,
}

fn check_grid(r_grid: &[f64], strict: bool) -> Result<()> {
    let bad = r_grid
        .iter()
        .find(|&&r| !r.is_finite() || if strict { r <= 0.0 } else { r < 0.0 });
    match bad {
        Some(r) => Err(Error::Precondition(format!(
            "nullcline grid must be {}, got {r}",
            if strict { "positive" } else { "non-negative" }
        ))),
        None => Ok(()),
    }
}

/// The `ṙ = 0` curve solved for `x_s`: `(β1 r³ − β2 r⁵ + α ũ)/r − 1`.
pub fn nullcline_r(u_tilde: f64, p: &ModelParams, r_grid: &[f64]) -> Result<Nullcline> {
    check_grid(r_grid, true)?;
    let points = r_grid
        .iter()
        .map(|&r| {
            let x_s = (p.beta1 * r.powi(3) - p.beta2 * r.powi(5) + p.alpha * u_tilde) / r - 1.0;
            (r, x_s)
        })
        .collect();
    Ok(Nullcline {
        points,
        includes_axis: u_tilde == 0.0,
    })
}

/// The `ẋ_s = 0` curve, `x_s = g(r)`.
pub fn nullcline_xs(p: &ModelParams, r_grid: &[f64]) -> Result<Nullcline> {
    check_grid(r_grid, false)?;
    Ok(Nullcline {
        points: r_grid.iter().map(|&r| (r, g_eval(r, p))).collect(),
        includes_axis: false,
    })
}

/// Grid radii where two nullclines sampled on the same grid cross, located by
/// linear interpolation of their difference.
pub fn crossings(a: &Nullcline, b: &Nullcline) -> Vec<f64> {
    let d: Vec<(f64, f64)> = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(&(r, xa), &(_, xb))| (r, xa - xb))
        .collect();
    let mut out = Vec::new();
    for w in d.windows(2) {
        let ((r0, d0), (r1, d1)) = (w[0], w[1]);
        if d0 == 0.0 {
            out.push(r0);
        } else if d0 * d1 < 0.0 {
            out.push(r0 + (r1 - r0) * d0 / (d0 - d1));
        }
    }
    if let Some(&(r, dl)) = d.last() {
        if dl == 0.0 {
            out.push(r);
        }
    }
    out
}

/// One sample of the reduced vector field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub r: f64,
    pub x_s: f64,
    pub dr: f64,
    pub dx_s: f64,
}

/// Vector field on the tensor grid `r_grid × xs_grid`, `r` varying fastest.
pub fn vector_field_grid(u_tilde: f64, p: &ModelParams, r_grid: &[f64], xs_grid: &[f64]) -> Vec<FieldSample> {
    let mut out = Vec::with_capacity(r_grid.len() * xs_grid.len());
    for &x_s in xs_grid {
        for &r in r_grid {
            let (dr, dx_s) = reduced_vector_field(r, x_s, u_tilde, p);
            out.push(FieldSample { r, x_s, dr, dx_s });
        }
    }
    out
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pitchfork_branch_at_zero_input() {
        let p = ModelParams::type1();
        let r = ((3.0 + 3f64.sqrt()) / 3.0).sqrt();
        let nc = nullcline_r(0.0, &p, &[r]).unwrap();
        assert!(nc.includes_axis);
        assert!(nc.points[0].1.abs() < 1e-12);
        // branch x_s = β1 r² − β2 r⁴ − 1
        for &r in &[0.3, 0.9, 1.7] {
            let x_s = nullcline_r(0.0, &p, &[r]).unwrap().points[0].1;
            assert!((x_s - (3.0 * r * r - 1.5 * r.powi(4) - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn r_nullcline_zeroes_radial_field() {
        let p = ModelParams::type2();
        let grid = linspace(0.05, 2.0, 40);
        for u in [0.0, 2.0, 7.5] {
            for (r, x_s) in nullcline_r(u, &p, &grid).unwrap().points {
                let (dr, _) = reduced_vector_field(r, x_s, u, &p);
                assert!((dr * p.tau).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn xs_nullcline_values() {
        assert_eq!(nullcline_xs(&ModelParams::type1(), &[0.0]).unwrap().points[0].1, 0.0);
        assert_eq!(nullcline_xs(&ModelParams::type1(), &[1.0]).unwrap().points[0].1, 1.5);
        assert_eq!(nullcline_xs(&ModelParams::type2(), &[1.0]).unwrap().points[0].1, 5.0);
    }

    #[test]
    fn rejects_non_positive_radius() {
        assert!(nullcline_r(0.0, &ModelParams::type1(), &[0.0, 1.0]).is_err());
        assert!(nullcline_xs(&ModelParams::type1(), &[-1.0]).is_err());
    }

    #[test]
    fn crossing_of_lines() {
        let a = Nullcline { points: vec![(0.0, 0.0), (1.0, 1.0)], includes_axis: false };
        let b = Nullcline { points: vec![(0.0, 0.5), (1.0, 0.5)], includes_axis: false };
        assert_eq!(crossings(&a, &b), vec![0.5]);
    }

    #[test]
    fn field_grid_layout() {
        let g = vector_field_grid(0.0, &ModelParams::type1(), &[0.0, 1.0], &[0.0, 1.0, 2.0]);
        assert_eq!(g.len(), 6);
        assert_eq!((g[1].r, g[1].x_s), (1.0, 0.0));
        assert_eq!((g[2].r, g[2].x_s), (0.0, 1.0));
    }
}
