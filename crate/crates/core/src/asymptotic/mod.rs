//! Resonance classification, small-k expansions and large-s diagnostics.

pub mod diagnostics;
pub mod resonance;
pub mod small_k;

pub use diagnostics::{
    critical_power_fit, default_s_grid, diagnose, diagnostic_r, diagnostic_rc, edge_coefficient_a,
    log_grid, DecayClass, DiagnosisBundle, DiagnosticCurve, SingularityDiagnosis, Strength,
    PLATEAU_TOL,
};
pub use resonance::{
    classify_resonance, default_l_max, ResonanceOptions, ResonanceReport, SingularityCase,
    CRITICAL_FIELD_TOL,
};
pub use small_k::{
    alpha_squared_from_model, fit_small_k_overlap, SmallKFit, SmallKRegime, DEFAULT_K_MAX,
};
