//! Runge–Kutta propagators for `i dU/dt = H(t) U` with 2x2 Hermitian `H`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::complex2::Complex2x2;
use crate::scalar::{cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum IntegratorMethod {
    /// Classical RK4 with a fixed number of steps over the integration
    /// interval (callers integrate one drive period at a time).
    FixedRk4 { steps_per_period: usize },
    /// Dormand–Prince 5(4) with step-size control.
    AdaptiveRk45 { rel_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: IntegratorMethod,
    /// Upper bound on accepted steps (adaptive) or total steps (fixed).
    pub max_steps: usize,
    /// Fixed-step mode only: cap on `‖H‖·dt`. Long periods get more steps
    /// than `steps_per_period` so the per-step phase stays small.
    pub max_phase_step: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: IntegratorMethod::FixedRk4 {
                steps_per_period: 512,
            },
            max_steps: 1_000_000,
            max_phase_step: Some(0.05),
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(steps_per_period: usize) -> Self {
        Self {
            method: IntegratorMethod::FixedRk4 { steps_per_period },
            ..Self::default()
        }
    }

    pub fn adaptive(rel_tol: f64) -> Self {
        Self {
            method: IntegratorMethod::AdaptiveRk45 { rel_tol },
            max_steps: 1_000_000,
            max_phase_step: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            IntegratorMethod::FixedRk4 { steps_per_period } if steps_per_period < 16 => Err(
                invalid("steps_per_period", format!("{steps_per_period} < 16")),
            ),
            IntegratorMethod::AdaptiveRk45 { rel_tol } if !(rel_tol > 0.0 && rel_tol <= 1e-3) => {
                Err(invalid("rel_tol", format!("{rel_tol} not in (0, 1e-3]")))
            }
            _ if self.max_steps == 0 => Err(invalid("max_steps", "must be positive")),
            _ => match self.max_phase_step {
                Some(p) if !(p > 0.0) => Err(invalid("max_phase_step", "must be positive")),
                _ => Ok(()),
            },
        }
    }

    /// Nominal tolerance used by unitarity checks on the result.
    pub fn tolerance(&self) -> f64 {
        match self.method {
            IntegratorMethod::FixedRk4 { .. } => 1e-8,
            IntegratorMethod::AdaptiveRk45 { rel_tol } => rel_tol,
        }
    }
}

/// `-i H U`
#[inline]
fn rhs<T: Real>(h: &Complex2x2<T>, u: &Complex2x2<T>) -> Complex2x2<T> {
    (*h * *u).scale(cplx(T::zero(), -T::one()))
}

/// Propagator `U(t1, t0)` of `i dU/dt = H(t) U`, `U(t0, t0) = I`.
pub fn integrate_linear_ode<T, F>(
    matrix_fn: F,
    t0: T,
    t1: T,
    cfg: &IntegratorConfig,
) -> Result<Complex2x2<T>>
where
    T: Real,
    F: Fn(T) -> Complex2x2<T>,
{
    cfg.validate()?;
    if !(t1 > t0) {
        return Err(invalid("t1", "must exceed t0"));
    }
    match cfg.method {
        IntegratorMethod::FixedRk4 { steps_per_period } => {
            let steps = fixed_step_count(&matrix_fn, t0, t1, steps_per_period, cfg.max_phase_step);
            if steps > cfg.max_steps {
                return Err(invalid(
                    "max_steps",
                    format!("fixed stepping needs {steps} steps"),
                ));
            }
            Ok(rk4(&matrix_fn, t0, t1, steps))
        }
        IntegratorMethod::AdaptiveRk45 { rel_tol } => {
            dopri45(&matrix_fn, t0, t1, T::lit(rel_tol), cfg.max_steps)
        }
    }
}

fn fixed_step_count<T: Real, F: Fn(T) -> Complex2x2<T>>(
    f: &F,
    t0: T,
    t1: T,
    base: usize,
    max_phase_step: Option<f64>,
) -> usize {
    let Some(cap) = max_phase_step else {
        return base;
    };
    let probes = 32;
    let mut bound = T::zero();
    for i in 0..=probes {
        let t = t0 + (t1 - t0) * T::from_usize_lossy(i) / T::from_usize_lossy(probes);
        bound = bound.max(f(t).max_abs());
    }
    // Pauli-norm ≤ √2 · max entry for a traceless Hermitian 2x2
    let phase = bound.as_f64() * std::f64::consts::SQRT_2 * (t1 - t0).as_f64();
    base.max((phase / cap).ceil() as usize)
}

fn rk4<T: Real, F: Fn(T) -> Complex2x2<T>>(f: &F, t0: T, t1: T, steps: usize) -> Complex2x2<T> {
    let dt = (t1 - t0) / T::from_usize_lossy(steps);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let mut u = Complex2x2::identity();
    let mut h_start = f(t0);
    for i in 0..steps {
        let t = t0 + dt * T::from_usize_lossy(i);
        let h_mid = f(t + dt * half);
        let h_end = f(t + dt);
        let k1 = rhs(&h_start, &u);
        let k2 = rhs(&h_mid, &(u + k1.scale_re(dt * half)));
        let k3 = rhs(&h_mid, &(u + k2.scale_re(dt * half)));
        let k4 = rhs(&h_end, &(u + k3.scale_re(dt)));
        let incr = k1 + k2.scale_re(T::lit(2.0)) + k3.scale_re(T::lit(2.0)) + k4;
        u = u + incr.scale_re(dt * sixth);
        h_start = h_end;
    }
    u
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dopri45<T: Real, F: Fn(T) -> Complex2x2<T>>(
    f: &F,
    t0: T,
    t1: T,
    rtol: T,
    max_steps: usize,
) -> Result<Complex2x2<T>> {
    let mut u = Complex2x2::identity();
    let mut t = t0;
    let span = t1 - t0;
    let scale0 = f(t0).max_abs().max(T::lit(1e-3));
    let mut dt = (rtol.powf(T::lit(0.2)) / scale0).min(span);
    let mut accepted = 0usize;
    let mut last_err = T::zero();
    let tiny = span * T::epsilon() * T::lit(16.0);
    while t < t1 {
        if accepted >= max_steps {
            return Err(Error::StepExhaustion {
                steps: accepted,
                t: t.as_f64(),
                error_estimate: last_err.as_f64(),
            });
        }
        if t + dt > t1 {
            dt = t1 - t;
        }
        let mut k: [Complex2x2<T>; 7] = [Complex2x2::zero(); 7];
        for s in 0..7 {
            let mut y = u;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    y = y + kj.scale_re(dt * T::lit(a));
                }
            }
            k[s] = rhs(&f(t + dt * T::lit(C[s])), &y);
        }
        let mut y5 = u;
        let mut diff = Complex2x2::zero();
        for s in 0..7 {
            y5 = y5 + k[s].scale_re(dt * T::lit(B5[s]));
            diff = diff + k[s].scale_re(dt * T::lit(B5[s] - B4[s]));
        }
        let err = diff.max_abs() / rtol;
        if err <= T::one() {
            t += dt;
            u = y5;
            accepted += 1;
            last_err = err * rtol;
        }
        let factor = if err > T::zero() {
            (T::lit(0.9) * err.powf(T::lit(-0.2)))
                .max(T::lit(0.2))
                .min(T::lit(5.0))
        } else {
            T::lit(5.0)
        };
        dt *= factor;
        if dt < tiny && t < t1 {
            return Err(Error::StepExhaustion {
                steps: accepted,
                t: t.as_f64(),
                error_estimate: (err * rtol).as_f64(),
            });
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type M = Complex2x2<f64>;

    #[test]
    fn zero_generator_gives_identity() {
        let u =
            integrate_linear_ode(|_| M::zero(), 0.0, 3.0, &IntegratorConfig::default()).unwrap();
        assert!(u.max_abs_diff(&M::identity()) < 1e-15);
        let u = integrate_linear_ode(|_| M::zero(), 0.0, 3.0, &IntegratorConfig::adaptive(1e-9))
            .unwrap();
        assert!(u.max_abs_diff(&M::identity()) < 1e-15);
    }

    #[test]
    fn sigma_z_over_pi_is_minus_identity() {
        let minus = M::identity().scale_re(-1.0);
        for cfg in [
            IntegratorConfig::default(),
            IntegratorConfig::adaptive(1e-10),
        ] {
            let u = integrate_linear_ode(|_| M::sigma_z(), 0.0, PI, &cfg).unwrap();
            assert!(u.max_abs_diff(&minus) < 1e-8, "{cfg:?}");
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(IntegratorConfig::fixed(8).validate().is_err());
        assert!(IntegratorConfig::adaptive(1e-2).validate().is_err());
        assert!(
            integrate_linear_ode(|_| M::zero(), 1.0, 1.0, &IntegratorConfig::default()).is_err()
        );
    }

    #[test]
    fn adaptive_exhaustion_reports_error_estimate() {
        let mut cfg = IntegratorConfig::adaptive(1e-12);
        cfg.max_steps = 3;
        let err = integrate_linear_ode(|t: f64| M::sigma_x().scale_re(1.0 + t), 0.0, 50.0, &cfg)
            .unwrap_err();
        assert!(matches!(err, Error::StepExhaustion { steps: 3, .. }));
    }

    #[test]
    fn works_in_f32() {
        let u = integrate_linear_ode(
            |_| Complex2x2::<f32>::sigma_z(),
            0.0f32,
            std::f32::consts::PI,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(u.max_abs_diff(&Complex2x2::identity().scale_re(-1.0)) < 1e-4);
    }
}
