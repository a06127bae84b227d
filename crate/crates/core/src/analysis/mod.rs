//! Phase-plane and bifurcation analysis of the reduced system, and the
//! direction dynamics of the full one.

mod equilibria;
mod nullclines;
mod riccati;
mod thresholds;

pub use equilibria::{
    eigenvalues_2x2, equilibrium_at, equilibrium_residual, find_equilibria, reduced_jacobian, search_radius,
    EquilibriumPoint, StabilityKind, DEGENERACY_TOL, ROOT_GRID,
};
pub use nullclines::{crossings, linspace, nullcline_r, nullcline_xs, vector_field_grid, FieldSample, Nullcline};
pub use riccati::{closed_form_cos, riccati_check, RiccatiReport, NORM_FLOOR};
pub use thresholds::{
    classify_type, nullcline_threshold_estimates, ratio_rule, steady_stats, threshold_scan, Bifurcation,
    BifurcationKind, Confirmation, FICurveReport, HodgkinType, ScanConfig, SteadyStats, ThresholdReport, ONSET_OFFSETS, SETTLED_AMPLITUDE,
};
