//! Work cumulants and finite-temperature average work.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ising::spectrum::SpectrumTable;
use crate::ising::{build_spectrum, DriveProtocol};
use crate::numerics::IntegratorConfig;
use crate::scalar::Real;
use crate::work::cgf::{tanh_factor, Beta, Periods};
use crate::work::quadrature::{asymptotic_nodes, grid_nodes, integrate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantSet<T> {
    pub length: usize,
    /// Mean work `K₁`.
    pub k1: T,
    /// Work variance `K₂`.
    pub k2: T,
}

impl<T: Real> CumulantSet<T> {
    pub fn k1_density(&self) -> T {
        self.k1 / T::from_usize_lossy(self.length)
    }

    pub fn k2_density(&self) -> T {
        self.k2 / T::from_usize_lossy(self.length)
    }

    /// `√K₂ / K₁`.
    pub fn relative_width(&self) -> T {
        self.k2.sqrt() / self.k1
    }
}

fn check_length(length: usize) -> Result<()> {
    if length == 0 || length % 2 == 1 {
        return Err(invalid(
            "length",
            format!("{length} must be even and positive"),
        ));
    }
    Ok(())
}

/// First two cumulants of the stationary work distribution, as the first
/// two `s`-derivatives of the stationary CGF at `s = 0`:
/// `K₁ = L∫ ξE dk/2π`, `K₂ = L∫ ξ(2 − 3ξ/2)E² dk/2π`.
pub fn cumulants_asymptotic<T: Real>(
    table: &SpectrumTable<T>,
    length: usize,
) -> Result<CumulantSet<T>> {
    check_length(length)?;
    let nodes = asymptotic_nodes(table, T::zero());
    let l = T::from_usize_lossy(length);
    let k1 = integrate(&nodes, |n| n.xi * n.energy);
    let k2 = integrate(&nodes, |n| {
        n.xi * (T::lit(2.0) - T::lit(1.5) * n.xi) * n.energy * n.energy
    });
    Ok(CumulantSet {
        length,
        k1: l * k1,
        k2: l * k2,
    })
}

/// `⟨W⟩ = L∫ ξ (1 − cos 2μnτ) E tanh(βE) dk/2π`; the cosine is dropped
/// in the stationary limit.
pub fn avg_work_finite_t<T: Real>(
    table: &SpectrumTable<T>,
    periods: Periods,
    beta: Beta<T>,
    length: usize,
) -> Result<T> {
    check_length(length)?;
    beta.validate()?;
    let tau = table.period();
    let l = T::from_usize_lossy(length);
    let nodes = grid_nodes(table);
    let v = match periods {
        Periods::Infinite => integrate(&nodes, |n| n.xi * n.energy * tanh_factor(&beta, n.energy)),
        Periods::Finite(np) => {
            let mus: Vec<T> = table.modes.iter().map(|m| m.mu).collect();
            let mut i = 0usize;
            let vals: Vec<T> = nodes
                .iter()
                .map(|n| {
                    let phase = (T::lit(2.0) * mus[i] * tau).as_f64() * np as f64;
                    i += 1;
                    let c = T::lit(phase % std::f64::consts::TAU).cos();
                    n.xi * (T::one() - c) * n.energy * tanh_factor(&beta, n.energy)
                })
                .collect();
            vals.iter().fold(T::zero(), |a, &b| a + b) * table.spacing() / T::TAU()
        }
    };
    Ok(l * v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve<T> {
    pub omegas: Vec<T>,
    /// Irreversible entropy `β⟨W⟩_∞` (ΔF = 0 at stroboscopic times).
    pub entropy: Vec<T>,
    pub beta: T,
    pub length: usize,
    pub amplitude: T,
    pub n_k: usize,
}

/// Irreversible entropy for `h(t) = 1 + A cos ω₀t` over a frequency grid.
pub fn entropy_sweep<T: Real>(
    amplitude: T,
    omegas: &[T],
    beta: T,
    length: usize,
    n_k: usize,
    cfg: &IntegratorConfig,
) -> Result<EntropyCurve<T>> {
    check_length(length)?;
    Beta::Finite(beta).validate()?;
    if omegas.iter().any(|w| !(*w > T::zero())) {
        return Err(invalid("omegas", "all frequencies must be positive"));
    }
    let entropy = omegas
        .par_iter()
        .map(|&w| {
            let p = DriveProtocol::sinusoidal(T::one(), amplitude, w, T::zero())?;
            let t = build_spectrum(&p, n_k, cfg)?;
            Ok(beta * avg_work_finite_t(&t, Periods::Infinite, Beta::Finite(beta), length)?)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(EntropyCurve {
        omegas: omegas.to_vec(),
        entropy,
        beta,
        length,
        amplitude,
        n_k,
    })
}

/// Indices of strict interior local minima.
pub fn local_minima<T: Real>(values: &[T]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .collect()
}

/// Indices of strict interior local maxima.
pub fn local_maxima<T: Real>(values: &[T]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::work::cgf::cgf_asymptotic;
    use std::sync::OnceLock;

    fn driven() -> &'static SpectrumTable<f64> {
        static T: OnceLock<SpectrumTable<f64>> = OnceLock::new();
        T.get_or_init(|| {
            let p = DriveProtocol::<f64>::sinusoidal(1.3, 1.0, 2.0, 0.4).unwrap();
            build_spectrum(&p, 512, &IntegratorConfig::default()).unwrap()
        })
    }

    #[test]
    fn static_drive_has_no_work() {
        let p = DriveProtocol::<f64>::constant(0.4, 1.0).unwrap();
        let t = build_spectrum(&p, 64, &IntegratorConfig::default()).unwrap();
        let c = cumulants_asymptotic(&t, 100).unwrap();
        assert!(c.k1.abs() < 1e-13 && c.k2.abs() < 1e-13);
        assert!(
            avg_work_finite_t(&t, Periods::Infinite, Beta::Finite(1.0), 100)
                .unwrap()
                .abs()
                < 1e-13
        );
    }

    #[test]
    fn cumulants_match_cgf_derivatives() {
        let t = driven();
        let l = 1000;
        let c = cumulants_asymptotic(t, l).unwrap();
        let h = 1e-4;
        let (gp, gm) = (cgf_asymptotic(t, h), cgf_asymptotic(t, -h));
        let d1 = -(gp - gm) / (2.0 * h) * l as f64;
        assert!((d1 - c.k1).abs() < 1e-4 * c.k1, "{d1} vs {}", c.k1);
        let h = 1e-3;
        let d2 = (cgf_asymptotic(t, h) - 2.0 * cgf_asymptotic(t, 0.0) + cgf_asymptotic(t, -h))
            / (h * h)
            * l as f64;
        assert!((d2 - c.k2).abs() < 1e-4 * c.k2, "{d2} vs {}", c.k2);
        assert!(c.k1 > 0.0 && c.k2 > 0.0);
    }

    #[test]
    fn relative_width_scales_with_length() {
        let t = driven();
        let a = cumulants_asymptotic(t, 100).unwrap();
        let b = cumulants_asymptotic(t, 400).unwrap();
        assert!((a.relative_width() / b.relative_width() - 2.0).abs() < 1e-12);
        assert!(cumulants_asymptotic(t, 101).is_err());
    }

    #[test]
    fn zero_temperature_average_is_first_cumulant() {
        let t = driven();
        let c = cumulants_asymptotic(t, 200).unwrap();
        let w = avg_work_finite_t(t, Periods::Infinite, Beta::Infinite, 200).unwrap();
        // grid midpoint vs tail-resolved nodes
        assert!((w - c.k1).abs() < 1e-4 * c.k1, "{w} vs {}", c.k1);
    }

    #[test]
    fn finite_n_averages_to_stationary() {
        let t = driven();
        let beta = Beta::Finite(2.0);
        let inf = avg_work_finite_t(t, Periods::Infinite, beta, 200).unwrap();
        let n0 = 20_000u64;
        let avg: f64 = (n0..n0 + 2000)
            .map(|n| avg_work_finite_t(t, Periods::Finite(n), beta, 200).unwrap())
            .sum::<f64>()
            / 2000.0;
        assert!((avg - inf).abs() < 1e-3 * inf, "{avg} vs {inf}");
    }

    #[test]
    fn extrema() {
        let v = [3.0, 1.0, 2.0, 5.0, 4.0, 6.0];
        assert_eq!(local_minima(&v), vec![1, 4]);
        assert_eq!(local_maxima(&v), vec![3]);
    }
}
