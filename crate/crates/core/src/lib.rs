//! Work statistics of a periodically driven transverse-field Ising chain.
//!
//! Each momentum mode is an independent two-level system driven by
//! `h(t)`. The crate builds per-mode Floquet data ([`ising`]), turns it
//! into generating functions, cumulants and histograms of the work
//! ([`work`]), and classifies the low-work singularities from the large-`s`
//! behaviour of the generating function ([`asymptotic`]).
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`.

// `!(x > 0)` style checks are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic;
pub mod error;
pub mod io;
pub mod ising;
pub mod numerics;
pub mod scalar;
pub mod work;

pub use error::{Error, Result};
pub use scalar::Real;

pub use asymptotic::{
    classify_resonance, critical_power_fit, diagnose, diagnostic_r, diagnostic_rc,
    edge_coefficient_a, fit_small_k_overlap, ResonanceOptions, ResonanceReport, SingularityCase,
    SingularityDiagnosis, SmallKFit,
};
pub use ising::{build_spectrum, DriveProtocol, ModeSolution, ProtocolSpec, SpectrumTable};
pub use numerics::IntegratorConfig;
pub use work::{
    cgf_asymptotic, cgf_curve, cgf_finite_n, cgf_finite_t, cumulants_asymptotic, entropy_sweep,
    work_histogram_finite_l, Beta, CgfCurve, CumulantSet, EntropyCurve, Periods, WorkHistogram,
};

pub type DriveProtocol64 = ising::DriveProtocol<f64>;
pub type SpectrumTable64 = ising::SpectrumTable<f64>;
pub type ModeSolution64 = ising::ModeSolution<f64>;
pub type CgfCurve64 = work::CgfCurve<f64>;
pub type CumulantSet64 = work::CumulantSet<f64>;
pub type EntropyCurve64 = work::EntropyCurve<f64>;
pub type WorkHistogram64 = work::WorkHistogram<f64>;

pub type DriveProtocol32 = ising::DriveProtocol<f32>;
pub type SpectrumTable32 = ising::SpectrumTable<f32>;
