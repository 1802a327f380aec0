//! Work statistics: generating functions, cumulants, finite-length
//! histograms and entropy production.

pub mod cgf;
pub mod cumulants;
pub mod histogram;
pub mod quadrature;

pub use cgf::{
    cgf_asymptotic, cgf_curve, cgf_finite_n, cgf_finite_t, fidelity_plateau, log_excess,
    stationary_series, Beta, CgfCurve, Periods,
};
pub use cumulants::{
    avg_work_finite_t, cumulants_asymptotic, entropy_sweep, local_maxima, local_minima,
    CumulantSet, EntropyCurve,
};
pub use histogram::{work_histogram_finite_l, HistogramBin, WorkHistogram};
pub use quadrature::{asymptotic_nodes, grid_nodes, QuadNode};
