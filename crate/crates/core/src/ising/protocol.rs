//! Periodic transverse-field protocols `h(t) = h(t + τ)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::spline::{romberg, PeriodicSpline};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum DriveShape<T: Real> {
    /// `h(t) = h₀ + A cos(ω₀ t + φ₀)`.
    Sinusoidal { amplitude: T, phase: T },
    /// Uniform samples over one period, periodic cubic spline in between.
    Tabulated { spline: PeriodicSpline<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveProtocol<T: Real> {
    h0: T,
    omega: T,
    shape: DriveShape<T>,
}

/// Plain-data description of a protocol, used for provenance blocks and
/// for round-tripping through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProtocolSpec {
    Sinusoidal {
        h0: f64,
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    Tabulated {
        omega: f64,
        samples: Vec<f64>,
    },
}

/// Relative agreement required between the Romberg period average of a
/// tabulated drive and the exact spline integral.
const AVERAGE_TOL: f64 = 1e-10;

impl<T: Real> DriveProtocol<T> {
    pub fn sinusoidal(h0: T, amplitude: T, omega: T, phase: T) -> Result<Self> {
        check_omega(omega)?;
        if !h0.is_finite() || !amplitude.is_finite() || !phase.is_finite() {
            return Err(invalid("protocol", "non-finite parameter"));
        }
        Ok(Self {
            h0,
            omega,
            shape: DriveShape::Sinusoidal { amplitude, phase },
        })
    }

    /// Static field `h(t) = h₀`, still carrying a period for the Floquet
    /// construction.
    pub fn constant(h0: T, omega: T) -> Result<Self> {
        Self::sinusoidal(h0, T::zero(), omega, T::zero())
    }

    /// Builds a protocol from field samples at `t_j = j τ / n`; `h₀` is the
    /// Romberg period average of the interpolating spline.
    pub fn tabulated(samples: &[T], omega: T) -> Result<Self> {
        check_omega(omega)?;
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(invalid("samples", "non-finite sample"));
        }
        let period = T::TAU() / omega;
        let spline = PeriodicSpline::new(samples, period)?;
        let n = samples.len();
        // integrate knot by knot: the spline is only piecewise smooth
        let mut total = T::zero();
        let h = period / T::from_usize_lossy(n);
        for j in 0..n {
            let a = h * T::from_usize_lossy(j);
            let (v, _) = romberg(|t| spline.eval(t), a, a + h, T::lit(1e-14), 12);
            total += v;
        }
        let exact = spline.integral_over_period();
        let scale = exact.abs().max(period);
        if (total - exact).abs() > T::lit(AVERAGE_TOL) * scale {
            return Err(invalid(
                "samples",
                format!(
                    "period average did not converge: Romberg {} vs spline {}",
                    total, exact
                ),
            ));
        }
        Ok(Self {
            h0: total / period,
            omega,
            shape: DriveShape::Tabulated { spline },
        })
    }

    pub fn from_spec(spec: &ProtocolSpec) -> Result<Self> {
        match spec {
            ProtocolSpec::Sinusoidal {
                h0,
                amplitude,
                omega,
                phase,
            } => Self::sinusoidal(
                T::lit(*h0),
                T::lit(*amplitude),
                T::lit(*omega),
                T::lit(*phase),
            ),
            ProtocolSpec::Tabulated { omega, samples } => {
                let s: Vec<T> = samples.iter().map(|&x| T::lit(x)).collect();
                Self::tabulated(&s, T::lit(*omega))
            }
        }
    }

    pub fn spec(&self) -> ProtocolSpec {
        match &self.shape {
            DriveShape::Sinusoidal { amplitude, phase } => ProtocolSpec::Sinusoidal {
                h0: self.h0.as_f64(),
                amplitude: amplitude.as_f64(),
                omega: self.omega.as_f64(),
                phase: phase.as_f64(),
            },
            DriveShape::Tabulated { spline } => ProtocolSpec::Tabulated {
                omega: self.omega.as_f64(),
                samples: spline.samples().iter().map(|x| x.as_f64()).collect(),
            },
        }
    }

    pub fn shape(&self) -> &DriveShape<T> {
        &self.shape
    }

    /// Time-averaged field `h₀`.
    pub fn h0(&self) -> T {
        self.h0
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn period(&self) -> T {
        T::TAU() / self.omega
    }

    /// Initial field `h_i = h(0)`.
    pub fn h_initial(&self) -> T {
        self.field(T::zero())
    }

    pub fn amplitude(&self) -> Option<T> {
        match self.shape {
            DriveShape::Sinusoidal { amplitude, .. } => Some(amplitude),
            DriveShape::Tabulated { .. } => None,
        }
    }

    pub fn is_static(&self) -> bool {
        match &self.shape {
            DriveShape::Sinusoidal { amplitude, .. } => *amplitude == T::zero(),
            DriveShape::Tabulated { spline } => {
                let s = spline.samples();
                s.iter().all(|&x| x == s[0])
            }
        }
    }

    #[inline]
    pub fn field(&self, t: T) -> T {
        match &self.shape {
            DriveShape::Sinusoidal { amplitude, phase } => {
                self.h0 + *amplitude * (self.omega * t + *phase).cos()
            }
            DriveShape::Tabulated { spline } => spline.eval(t),
        }
    }

    /// `f(t) = ∫_0^t (h(t') − h₀) dt'`; vanishes at every multiple of `τ`.
    pub fn phase_integral(&self, t: T) -> T {
        match &self.shape {
            DriveShape::Sinusoidal { amplitude, phase } => {
                *amplitude / self.omega * ((self.omega * t + *phase).sin() - phase.sin())
            }
            DriveShape::Tabulated { spline } => spline.integral_to(t) - self.h0 * t,
        }
    }

    /// `max_t |h(t)|`, sampled.
    pub fn field_bound(&self) -> T {
        match &self.shape {
            DriveShape::Sinusoidal { amplitude, .. } => self.h0.abs() + amplitude.abs(),
            DriveShape::Tabulated { .. } => {
                let n = 512;
                (0..n)
                    .map(|i| {
                        self.field(self.period() * T::from_usize_lossy(i) / T::from_usize_lossy(n))
                            .abs()
                    })
                    .fold(T::zero(), |a, b| a.max(b))
            }
        }
    }

    /// Signed offset `h̃ = (h₀ − 1) − l ω₀/2` with `l` the nearest integer,
    /// so `|h̃| ≤ ω₀/4`. Zero exactly at a non-equilibrium critical point.
    pub fn folded_offset(&self) -> (T, i64) {
        let x = self.h0 - T::one();
        let half = self.omega * T::lit(0.5);
        let l = (x / half).round();
        (x - l * half, l.to_i64().unwrap_or(0))
    }
}

fn check_omega<T: Real>(omega: T) -> Result<()> {
    if !(omega > T::zero()) || !omega.is_finite() {
        return Err(invalid("omega", format!("{omega} must be positive")));
    }
    Ok(())
}

/// Folds a non-negative energy into `[0, ω₀/2]` (distance to the nearest
/// multiple of `ω₀`).
pub fn fold_quasi_energy<T: Real>(e: T, omega: T) -> T {
    let r = e.abs() % omega;
    r.min(omega - r)
}
