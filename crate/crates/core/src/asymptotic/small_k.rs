//! Small-k behaviour of the ground-state/Floquet overlaps.

use serde::{Deserialize, Serialize};

use crate::asymptotic::resonance::ResonanceReport;
use crate::error::{invalid, Error, Result};
use crate::ising::spectrum::{ModeSolution, SmallKModel, SpectrumTable};
use crate::numerics::fit_linear;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallKRegime {
    /// `|r⁺|² → 1/2 − βk/2`.
    ResonantLinear,
    /// `min(|r⁺|², |r⁻|²) → α²k²/4`.
    NonresonantQuadratic,
}

impl SmallKRegime {
    fn name(&self) -> &'static str {
        match self {
            SmallKRegime::ResonantLinear => "resonant-linear",
            SmallKRegime::NonresonantQuadratic => "nonresonant-quadratic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallKFit {
    pub regime: SmallKRegime,
    /// `β` (linear regime) or `α²` (quadratic regime).
    pub coefficient: f64,
    pub coefficient_error: f64,
    /// `ξ` extrapolated to `k = 0` from a straight line in `k`.
    pub xi_at_zero: f64,
    pub window: (f64, f64),
    pub points: usize,
    /// RMS deviation of the data from the fitted form.
    pub residual: f64,
}

pub const DEFAULT_K_MAX: f64 = 0.05;
const MIN_POINTS: usize = 8;

/// `min(|r⁺|², |r⁻|²) = ξ / (2(1 + |n_F·n_g|))`, free of cancellation.
fn minority<T: Real>(m: &ModeSolution<T>) -> f64 {
    let xi = m.xi.as_f64();
    xi / (2.0 * (1.0 + m.abs_alignment().as_f64()))
}

fn rms(r: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = r.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    (s / n.max(1) as f64).sqrt()
}

/// Fits the leading small-k form expected for the report's regime over
/// `k ≤ k_max`. The data must agree with the regime: a resonant, non-CDT
/// drive needs `ξ₀ ≈ 1`, everything else `ξ₀ ≈ 0`.
pub fn fit_small_k_overlap<T: Real>(
    table: &SpectrumTable<T>,
    report: &ResonanceReport,
    k_max: f64,
) -> Result<SmallKFit> {
    let window: Vec<&ModeSolution<T>> = table
        .modes
        .iter()
        .filter(|m| m.k.as_f64() <= k_max)
        .collect();
    if window.len() < MIN_POINTS {
        return Err(invalid(
            "k_max",
            format!(
                "{} grid points below {k_max}, need {MIN_POINTS}",
                window.len()
            ),
        ));
    }
    let ks: Vec<f64> = window.iter().map(|m| m.k.as_f64()).collect();
    let ms: Vec<f64> = window.iter().map(|m| minority(m)).collect();
    let xis: Vec<f64> = window.iter().map(|m| m.xi.as_f64()).collect();

    // linear hypothesis: m = c₀ + c₁ k with c₀ ≈ 1/2
    let lin = fit_linear(&ks, &ms)?;
    let lin_res = rms(ks
        .iter()
        .zip(&ms)
        .map(|(k, m)| m - lin.coefficients[0] - lin.coefficients[1] * k));
    // quadratic hypothesis: m/k² = A + B k²
    let k2: Vec<f64> = ks.iter().map(|k| k * k).collect();
    let scaled: Vec<f64> = ms.iter().zip(&k2).map(|(m, q)| m / q).collect();
    let quad = fit_linear(&k2, &scaled)?;
    let quad_res = rms(k2
        .iter()
        .zip(&ms)
        .map(|(q, m)| m - (quad.coefficients[0] + quad.coefficients[1] * q) * q));
    let xi0 = fit_linear(&ks, &xis)?.coefficients[0];

    let expected = if report.resonant && !report.cdt {
        SmallKRegime::ResonantLinear
    } else {
        SmallKRegime::NonresonantQuadratic
    };
    let data_linear = lin.coefficients[0] > 0.25;
    let (exp_res, other_res) = match expected {
        SmallKRegime::ResonantLinear => (lin_res, quad_res),
        SmallKRegime::NonresonantQuadratic => (quad_res, lin_res),
    };
    if data_linear != (expected == SmallKRegime::ResonantLinear) {
        let other = match expected {
            SmallKRegime::ResonantLinear => SmallKRegime::NonresonantQuadratic,
            SmallKRegime::NonresonantQuadratic => SmallKRegime::ResonantLinear,
        };
        return Err(Error::RegimeMismatch {
            expected: expected.name(),
            expected_residual: exp_res,
            other: other.name(),
            other_residual: other_res,
        });
    }
    let (coefficient, coefficient_error) = match expected {
        SmallKRegime::ResonantLinear => (-2.0 * lin.coefficients[1], 2.0 * lin.std_errors[1]),
        SmallKRegime::NonresonantQuadratic => {
            (4.0 * quad.coefficients[0], 4.0 * quad.std_errors[0])
        }
    };
    Ok(SmallKFit {
        regime: expected,
        coefficient,
        coefficient_error,
        xi_at_zero: xi0,
        window: (ks[0], ks[ks.len() - 1]),
        points: ks.len(),
        residual: exp_res,
    })
}

/// `α²` from the small-k effective Floquet Hamiltonian
/// `(a_x k, a_y k, h̃ + a_z k²)` and the ground-state axis
/// `−(0, k, h_i − 1)/|h_i − 1|`:
/// `α² = (a_x/|h̃|)² + (a_y/|h̃| ± 1/|h_i − 1|)²`, with the minus sign when
/// `h̃` and `h_i − 1` have the same sign.
pub fn alpha_squared_from_model<T: Real>(model: &SmallKModel<T>) -> Result<f64> {
    let ht = model.offset.as_f64();
    let gap = model.h_initial.as_f64() - 1.0;
    if ht == 0.0 {
        return Err(invalid(
            "offset",
            "resonant drive: the quadratic form does not apply",
        ));
    }
    if gap == 0.0 {
        return Err(invalid("h_initial", "critical initial field"));
    }
    let sigma = -(ht.signum() * gap.signum());
    let ax = model.a_x.as_f64() / ht.abs();
    let ay = model.a_y.as_f64() / ht.abs() + sigma / gap.abs();
    Ok(ax * ax + ay * ay)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotic::resonance::{classify_resonance, ResonanceOptions};
    use crate::ising::{build_spectrum, DriveProtocol};
    use crate::numerics::IntegratorConfig;

    fn setup(
        h0: f64,
        a: f64,
        omega: f64,
        phi: f64,
        n: usize,
    ) -> (SpectrumTable<f64>, ResonanceReport) {
        let p = DriveProtocol::<f64>::sinusoidal(h0, a, omega, phi).unwrap();
        let t = build_spectrum(&p, n, &IntegratorConfig::default()).unwrap();
        let r = classify_resonance(&p, &ResonanceOptions::default()).unwrap();
        (t, r)
    }

    #[test]
    fn static_drive_gives_zero_alpha() {
        let (t, r) = setup(1.7, 0.0, 2.0, 0.0, 1000);
        let f = fit_small_k_overlap(&t, &r, DEFAULT_K_MAX).unwrap();
        assert_eq!(f.regime, SmallKRegime::NonresonantQuadratic);
        assert!(f.coefficient.abs() < 1e-10);
    }

    #[test]
    fn resonant_overlap_tends_to_half() {
        let (t, r) = setup(1.0, 1.0, 2.0, 0.0, 1000);
        let f = fit_small_k_overlap(&t, &r, DEFAULT_K_MAX).unwrap();
        assert_eq!(f.regime, SmallKRegime::ResonantLinear);
        assert!((f.xi_at_zero - 1.0).abs() < 1e-2);
        // |r⁺|² at the smallest k
        let m = minority(&t.modes[0]);
        assert!((m - 0.5).abs() < 1e-3 + f.coefficient * t.modes[0].k);
    }

    #[test]
    fn nonresonant_quadratic_matches_closed_form() {
        let (t, r) = setup(1.3, 1.0, 2.0, 0.0, 1000);
        let f = fit_small_k_overlap(&t, &r, DEFAULT_K_MAX).unwrap();
        assert_eq!(f.regime, SmallKRegime::NonresonantQuadratic);
        assert!(f.residual < 1e-3);
        assert!(f.xi_at_zero.abs() < 1e-2);
        let closed = alpha_squared_from_model(&t.small_k.unwrap()).unwrap();
        assert!(
            (f.coefficient - closed).abs() < 1e-3 * closed,
            "{} vs {closed}",
            f.coefficient
        );
    }

    #[test]
    fn mismatch_is_reported_with_both_residuals() {
        let (t, mut r) = setup(1.0, 1.0, 2.0, 0.0, 1000);
        r.resonant = false;
        match fit_small_k_overlap(&t, &r, DEFAULT_K_MAX) {
            Err(Error::RegimeMismatch {
                expected, other, ..
            }) => {
                assert_eq!(expected, "nonresonant-quadratic");
                assert_eq!(other, "resonant-linear");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cdt_reopens_the_gap() {
        let (t, r) = setup(1.0, 1.0, 0.3623, 0.0, 1000);
        assert!(r.cdt);
        let f = fit_small_k_overlap(&t, &r, DEFAULT_K_MAX).unwrap();
        assert_eq!(f.regime, SmallKRegime::NonresonantQuadratic);
        assert!(f.xi_at_zero.abs() < 1e-2);
    }

    #[test]
    fn too_few_points() {
        let (t, r) = setup(1.3, 1.0, 2.0, 0.0, 64);
        assert!(fit_small_k_overlap(&t, &r, DEFAULT_K_MAX).is_err());
    }
}
