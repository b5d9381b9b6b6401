//! Thresholds of the acceptance criteria. Energies in Hartree unless the
//! name says otherwise.

/// RDM residuals with the exact three-body matrix vs commutator residuals.
pub const RESIDUAL_EQUIVALENCE: f64 = 1e-8;
/// Valdemoro reconstruction on single determinants.
pub const VALDEMORO_DETERMINANT: f64 = 1e-10;
/// Lower bound taken as "strictly positive" for a correlated state.
pub const VALDEMORO_CORRELATED_MIN: f64 = 1e-6;

pub const H6_NU1_ERROR_MHA: f64 = 0.1;
pub const H6_NU1_PARAMS: (usize, usize) = (45, 80);
pub const H6_NU50_ERROR_MHA: f64 = 0.05;
pub const H6_NU50_MAX_ITERATIONS: usize = 4;

pub const V1_STALL_MIN_ERROR_MHA: f64 = 10.0;
pub const V30_ERROR_MHA: f64 = 0.1;

pub const NPE_GOOD_KCAL: f64 = 0.3;
pub const H6_V10_NPE_MIN_KCAL: f64 = 2.0;
pub const N2_V10_NPE_KCAL: (f64, f64) = (0.3, 2.0);

pub const H4_S1_ERROR: f64 = 1e-6;
pub const H6_S1_NPE_KCAL: f64 = 0.5;
/// Convergence threshold of the excited-state runs.
pub const EXCITED_EPSILON: f64 = 2e-5;

pub const SLOPES: [(&str, f64); 3] = [("adapt", 8.0), ("adapt_rdm", 6.0), ("adapt_v", 4.0)];
pub const SLOPE_BAND: f64 = 0.3;

/// Converged runs must sit this close to FCI.
pub const SOUNDNESS_MHA: f64 = 1.0;

pub const GRADIENT_FD_STEP: f64 = 1e-5;
pub const GRADIENT_FD: f64 = 1e-6;
pub const UNITARITY_DRIFT: f64 = 1e-8;
pub const RDM_SYMMETRY: f64 = 1e-12;
pub const MONOTONE_SLACK: f64 = 1e-10;
