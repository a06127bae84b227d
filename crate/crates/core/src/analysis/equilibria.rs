//! Equilibria of the reduced system and their linear stability.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{g_eval, norm_bound, radial_curvature, ModelParams};
use crate::roots::scan_roots;

/// Bracketing grid size on `[0, r_max]`.
pub const ROOT_GRID: usize = 10_000;
/// Real parts below this magnitude are treated as zero.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityKind {
    StableNode,
    StableFocus,
    Saddle,
    UnstableNode,
    UnstableFocus,
    CenterDegenerate,
}

impl StabilityKind {
    pub fn is_stable(self) -> bool {
        matches!(self, StabilityKind::StableNode | StabilityKind::StableFocus)
    }

    pub fn from_eigenvalues(eig: &[Complex64; 2]) -> Self {
        if eig.iter().any(|l| l.re.abs() < DEGENERACY_TOL) {
            return StabilityKind::CenterDegenerate;
        }
        let complex = eig[0].im != 0.0;
        match (eig[0].re < 0.0, eig[1].re < 0.0, complex) {
            (true, true, false) => StabilityKind::StableNode,
            (true, true, true) => StabilityKind::StableFocus,
            (false, false, false) => StabilityKind::UnstableNode,
            (false, false, true) => StabilityKind::UnstableFocus,
            _ => StabilityKind::Saddle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub r: f64,
    pub x_s: f64,
    pub eigenvalues: [Complex64; 2],
    pub kind: StabilityKind,
}

/// Jacobian of `(ṙ, ẋ_s)` at `(r, x_s)`.
pub fn reduced_jacobian(r: f64, x_s: f64, p: &ModelParams) -> [[f64; 2]; 2] {
    [
        [-radial_curvature(r, x_s, p) / p.tau, -r / p.tau],
        [4.0 * p.beta3 * r.powi(3) / p.tau_s, -1.0 / p.tau_s],
    ]
}

/// Eigenvalues of a real 2×2 matrix, ordered by descending real part
/// (the `+i` member first for a complex pair).
pub fn eigenvalues_2x2(m: &[[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let half = 0.5 * tr;
    let disc = half * half - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [Complex64::new(half + s, 0.0), Complex64::new(half - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(half, s), Complex64::new(half, -s)]
    }
}

/// Scalar equilibrium condition after substituting `x_s = g(r)`:
/// `−(1 + β3 r⁴) r + β1 r³ − β2 r⁵ + α ũ`.
pub fn equilibrium_residual(r: f64, u_tilde: f64, p: &ModelParams) -> f64 {
    let r2 = r * r;
    -(1.0 + p.beta3 * r2 * r2) * r + p.beta1 * r2 * r - p.beta2 * r2 * r2 * r + p.alpha * u_tilde
}

/// Upper end of the root search, `1 + (b + α ũ)/a`.
pub fn search_radius(u_tilde: f64, p: &ModelParams) -> f64 {
    1.0 + norm_bound(p, u_tilde)
}

pub fn equilibrium_at(r: f64, p: &ModelParams) -> EquilibriumPoint {
    let x_s = g_eval(r, p);
    let eigenvalues = eigenvalues_2x2(&reduced_jacobian(r, x_s, p));
    EquilibriumPoint {
        r,
        x_s,
        eigenvalues,
        kind: StabilityKind::from_eigenvalues(&eigenvalues),
    }
}

/// All equilibria on `r ≥ 0` for a constant `ũ ≥ 0`, sorted by `r`.
pub fn find_equilibria(u_tilde: f64, p: &ModelParams) -> Result<Vec<EquilibriumPoint>> {
    p.validate()?;
    if !(u_tilde >= 0.0) || !u_tilde.is_finite() {
        return Err(Error::Precondition(format!("u_tilde must be >= 0, got {u_tilde}")));
    }
    Ok(equilibria_unchecked(u_tilde, p))
}

pub(crate) fn equilibria_unchecked(u_tilde: f64, p: &ModelParams) -> Vec<EquilibriumPoint> {
    let r_max = search_radius(u_tilde, p);
    let roots = scan_roots(|r| equilibrium_residual(r, u_tilde, p), 0.0, r_max, ROOT_GRID);
    roots.into_iter().map(|r| equilibrium_at(r, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::reduced_vector_field;

    #[test]
    fn origin_is_stable_at_zero_input() {
        let eq = find_equilibria(0.0, &ModelParams::type1()).unwrap();
        assert_eq!(eq.len(), 1);
        assert_eq!(eq[0].r, 0.0);
        assert_eq!(eq[0].x_s, 0.0);
        assert!(eq[0].kind.is_stable());
    }

    #[test]
    fn three_equilibria_below_type1_rheobase() {
        let p = ModelParams::type1();
        let eq = find_equilibria(0.235 / p.alpha, &p).unwrap();
        assert_eq!(eq.len(), 3);
        assert!(eq[0].kind.is_stable());
        assert_eq!(eq[1].kind, StabilityKind::Saddle);
        assert!(!eq[2].kind.is_stable());
    }

    #[test]
    fn single_stable_focus_above_type1_window() {
        let p = ModelParams::type1();
        let eq = find_equilibria(0.65 / p.alpha, &p).unwrap();
        assert_eq!(eq.len(), 1);
        assert_eq!(eq[0].kind, StabilityKind::StableFocus);
    }

    #[test]
    fn residuals_vanish() {
        for p in [ModelParams::type1(), ModelParams::type2()] {
            for k in 0..=40 {
                let u = k as f64 * 0.03 / p.alpha;
                for e in find_equilibria(u, &p).unwrap() {
                    let (fr, fs) = reduced_vector_field(e.r, e.x_s, u, &p);
                    assert!(fr.abs() < 1e-10 && fs.abs() < 1e-10, "u={u} r={} res=({fr},{fs})", e.r);
                }
            }
        }
    }

    #[test]
    fn eigen_classification() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        assert_eq!(StabilityKind::from_eigenvalues(&[c(-1.0, 0.0), c(-2.0, 0.0)]), StabilityKind::StableNode);
        assert_eq!(StabilityKind::from_eigenvalues(&[c(-1.0, 2.0), c(-1.0, -2.0)]), StabilityKind::StableFocus);
        assert_eq!(StabilityKind::from_eigenvalues(&[c(1.0, 0.0), c(-2.0, 0.0)]), StabilityKind::Saddle);
        assert_eq!(StabilityKind::from_eigenvalues(&[c(1.0, 0.0), c(2.0, 0.0)]), StabilityKind::UnstableNode);
        assert_eq!(StabilityKind::from_eigenvalues(&[c(1.0, 2.0), c(1.0, -2.0)]), StabilityKind::UnstableFocus);
        assert_eq!(StabilityKind::from_eigenvalues(&[c(1e-9, 2.0), c(1e-9, -2.0)]), StabilityKind::CenterDegenerate);
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant() {
        let m = [[1.5, -2.0], [0.7, -0.3]];
        let [a, b] = eigenvalues_2x2(&m);
        assert!(((a + b).re - 1.2).abs() < 1e-14);
        assert!(((a * b).re - (1.5 * -0.3 + 2.0 * 0.7)).abs() < 1e-14);
    }

    #[test]
    fn rejects_negative_input() {
        assert!(find_equilibria(-1.0, &ModelParams::type1()).is_err());
    }
}
