//! Numerical building blocks: 2x2 complex algebra, Runge–Kutta propagators,
//! Bessel functions, least-squares fits and a periodic cubic spline.

pub mod bessel;
pub mod complex2;
pub mod fit;
pub mod ode;
pub mod spline;

pub use bessel::{bessel_j, bessel_j_zeros};
pub use complex2::{Complex2x2, Spinor};
pub use fit::{fit_linear, fit_power_law, FitResult};
pub use ode::{integrate_linear_ode, IntegratorConfig, IntegratorMethod};
pub use spline::{romberg, PeriodicSpline};
