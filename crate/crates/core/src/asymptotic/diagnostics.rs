//! Large-s diagnostics of the stationary CGF and the resulting
//! classification of the small-W work distribution.

use serde::{Deserialize, Serialize};

use crate::asymptotic::resonance::{
    classify_resonance, ResonanceOptions, ResonanceReport, SingularityCase, CRITICAL_FIELD_TOL,
};
use crate::asymptotic::small_k::{fit_small_k_overlap, SmallKFit, SmallKRegime, DEFAULT_K_MAX};
use crate::error::{invalid, Error, Result};
use crate::ising::spectrum::SpectrumTable;
use crate::numerics::fit_power_law;
use crate::scalar::Real;
use crate::work::cgf::log_excess;

/// Relative last-decade variation below which a curve counts as flat.
pub const PLATEAU_TOL: f64 = 0.05;
/// Smallest allowed `s·|h_i − 1|` for the gapped diagnostics.
pub const MIN_SCALED_S: f64 = 3.0;
/// Largest `2|h_i − 1|s` kept before `e^{−2|h_i−1|s}` leaves the normal range.
const MAX_DECAY_EXPONENT: f64 = 700.0;
/// Smallest `s` accepted by the critical power-law fit.
pub const MIN_CRITICAL_S: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticCurve {
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    /// Grid points dropped at large `s`.
    pub truncated: usize,
    pub warnings: Vec<String>,
}

impl DiagnosticCurve {
    /// `(max − min)/|last|` over `s ∈ [s_last/10, s_last]`.
    pub fn last_decade_variation(&self) -> Option<f64> {
        let last_s = *self.s.last()?;
        let last = *self.values.last()?;
        let tail: Vec<f64> = self
            .s
            .iter()
            .zip(&self.values)
            .filter(|(s, _)| **s >= last_s / 10.0)
            .map(|(_, v)| *v)
            .collect();
        let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        if last == 0.0 {
            return Some(if hi == lo { 0.0 } else { f64::INFINITY });
        }
        Some((hi - lo) / last.abs())
    }

    pub fn plateaus(&self) -> bool {
        self.last_decade_variation()
            .is_some_and(|v| v < PLATEAU_TOL)
    }

    /// Last value, taken as the plateau height.
    pub fn plateau(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi > lo) || n < 2 {
        return Err(invalid(
            "s_grid",
            format!("need 0 < lo < hi and n ≥ 2, got [{lo}, {hi}] × {n}"),
        ));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    // exact endpoints
    g[0] = lo;
    g[n - 1] = hi;
    Ok(g)
}

/// `a = α²/(16√π) · (|h_i − 1|/h_i)^{3/2}`.
pub fn edge_coefficient_a(fit: &SmallKFit, h_initial: f64) -> Result<f64> {
    if fit.regime != SmallKRegime::NonresonantQuadratic {
        return Err(invalid(
            "fit",
            "edge coefficient needs the quadratic small-k regime",
        ));
    }
    if (h_initial - 1.0).abs() < CRITICAL_FIELD_TOL {
        return Err(invalid(
            "h_initial",
            "critical initial field: use the power-law diagnostic",
        ));
    }
    if !(h_initial > 0.0) {
        return Err(invalid(
            "h_initial",
            format!("{h_initial} must be positive"),
        ));
    }
    let ratio = (h_initial - 1.0).abs() / h_initial;
    Ok(fit.coefficient / (16.0 * std::f64::consts::PI.sqrt()) * ratio.powf(1.5))
}

/// `[ln G_∞(is)/L − g_∞] · e^{2|h_i−1|s} · s^p`, assembled in log space.
fn scaled_excess<T: Real>(
    table: &SpectrumTable<T>,
    s_grid: &[f64],
    power: f64,
) -> Result<DiagnosticCurve> {
    let gap = table.threshold_energy().as_f64();
    if gap < CRITICAL_FIELD_TOL {
        return Err(invalid(
            "h_initial",
            "critical initial field: use the power-law diagnostic",
        ));
    }
    if s_grid.is_empty() || s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid(
            "s_grid",
            "must be non-empty and strictly increasing",
        ));
    }
    if let Some(&s) = s_grid
        .iter()
        .find(|&&s| s * gap < MIN_SCALED_S * (1.0 - 1e-9))
    {
        return Err(invalid(
            "s_grid",
            format!("s = {s} gives s|h_i − 1| = {} < {MIN_SCALED_S}", s * gap),
        ));
    }
    let mut out = DiagnosticCurve {
        s: Vec::with_capacity(s_grid.len()),
        values: Vec::with_capacity(s_grid.len()),
        truncated: 0,
        warnings: Vec::new(),
    };
    for &s in s_grid {
        if 2.0 * gap * s > MAX_DECAY_EXPONENT {
            out.truncated += 1;
            continue;
        }
        let v = match log_excess(table, T::lit(s)) {
            Ok(le) => (le.as_f64() + 2.0 * gap * s + power * s.ln()).exp(),
            // undriven: the CGF equals its plateau identically
            Err(Error::NumericalDomain(_)) => 0.0,
            Err(e) => return Err(e),
        };
        out.s.push(s);
        out.values.push(v);
    }
    if out.truncated > 0 {
        out.warnings.push(format!(
            "{} grid points beyond 2|h_i − 1|s = {MAX_DECAY_EXPONENT} dropped",
            out.truncated
        ));
    }
    if out.s.is_empty() {
        return Err(Error::NumericalDomain("every grid point underflows".into()));
    }
    Ok(out)
}

/// `R(s)`: the excess over `e^{−2|h_i−1|s}/s^{3/2}`; flat in the
/// square-root-edge case.
pub fn diagnostic_r<T: Real>(table: &SpectrumTable<T>, s_grid: &[f64]) -> Result<DiagnosticCurve> {
    scaled_excess(table, s_grid, 1.5)
}

/// `R_c(s)`: the excess over `s e^{−2|h_i−1|s}`; flat for resonant drives
/// without tunnelling suppression. Other drives are evaluated too (so the
/// absence of a plateau can be shown) but carry a warning.
pub fn diagnostic_rc<T: Real>(table: &SpectrumTable<T>, s_grid: &[f64]) -> Result<DiagnosticCurve> {
    let mut curve = scaled_excess(table, s_grid, -1.0)?;
    let report = classify_resonance(&table.protocol, &ResonanceOptions::default())?;
    if report.case() != SingularityCase::B {
        curve.warnings.push(format!(
            "drive is case {}, not resonant without CDT",
            report.case().label()
        ));
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayClass {
    /// `b ≈ 1`: step at `W = 0`.
    Step,
    /// `b ≈ 3`: quadratic rise.
    Quadratic,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strength {
    SqrtEdge {
        a: f64,
        measured_plateau: Option<f64>,
    },
    DeltaPrimeEdge {
        a_c: f64,
    },
    PowerLaw {
        d: f64,
        exponent: f64,
        exponent_error: f64,
        class: DecayClass,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityDiagnosis {
    pub case: SingularityCase,
    pub w_threshold: f64,
    pub strength: Strength,
    pub s_window: (f64, f64),
    /// Last-decade variation of the diagnostic curve, or the log-log fit
    /// residual norm for the power law.
    pub residual: f64,
}

fn decay_class(b: f64) -> DecayClass {
    if (b - 1.0).abs() <= 0.25 {
        DecayClass::Step
    } else if (b - 3.0).abs() <= 0.75 {
        DecayClass::Quadratic
    } else {
        DecayClass::Unclassified
    }
}

/// Fits `ln G_∞(is)/L − g_∞ ≈ D/s^b` for a quench from the critical field.
pub fn critical_power_fit<T: Real>(
    table: &SpectrumTable<T>,
    s_grid: &[f64],
) -> Result<SingularityDiagnosis> {
    if table.threshold_energy().as_f64() >= CRITICAL_FIELD_TOL {
        return Err(invalid("h_initial", "power-law fit needs h_i = 1"));
    }
    if let Some(&s) = s_grid.iter().find(|&&s| s < MIN_CRITICAL_S) {
        return Err(invalid("s_grid", format!("s = {s} below {MIN_CRITICAL_S}")));
    }
    let excess = s_grid
        .iter()
        .map(|&s| log_excess(table, T::lit(s)).map(|v| v.as_f64().exp()))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_power_law(s_grid, &excess)?;
    let b = fit.coefficients[1];
    Ok(SingularityDiagnosis {
        case: SingularityCase::C,
        w_threshold: 0.0,
        strength: Strength::PowerLaw {
            d: fit.coefficients[0],
            exponent: b,
            exponent_error: fit.std_errors[1],
            class: decay_class(b),
        },
        s_window: fit.window,
        residual: fit.residual_norm,
    })
}

/// Everything `diagnose` produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisBundle {
    pub report: ResonanceReport,
    pub small_k: Option<SmallKFit>,
    pub curve: Option<DiagnosticCurve>,
    pub diagnosis: SingularityDiagnosis,
}

/// Default `s` grid: from `3/|h_i−1|` over two decades, clipped to the
/// representable range. At criticality the power law only settles for
/// s ≳ 10³, so one decade from there.
pub fn default_s_grid(h_initial: f64, points: usize) -> Result<Vec<f64>> {
    let gap = (h_initial - 1.0).abs();
    if gap < CRITICAL_FIELD_TOL {
        log_grid(1e3, 1e4, points)
    } else {
        let lo = MIN_SCALED_S / gap;
        let hi = (100.0 * lo).min(0.5 * MAX_DECAY_EXPONENT / gap);
        log_grid(lo, hi, points)
    }
}

/// Assigns the case from the resonance report alone, then measures its
/// strength.
pub fn diagnose<T: Real>(
    table: &SpectrumTable<T>,
    opts: &ResonanceOptions,
    s_grid: &[f64],
    k_max: Option<f64>,
) -> Result<DiagnosisBundle> {
    let report = classify_resonance(&table.protocol, opts)?;
    let case = report.case();
    let w_threshold = report.threshold();
    let k_max = k_max.unwrap_or(DEFAULT_K_MAX);
    let window = (
        s_grid.first().copied().unwrap_or(0.0),
        s_grid.last().copied().unwrap_or(0.0),
    );
    match case {
        SingularityCase::C => {
            let diagnosis = critical_power_fit(table, s_grid)?;
            Ok(DiagnosisBundle {
                report,
                small_k: None,
                curve: None,
                diagnosis,
            })
        }
        SingularityCase::A => {
            let fit = fit_small_k_overlap(table, &report, k_max)?;
            let a = edge_coefficient_a(&fit, report.h_initial)?;
            let curve = diagnostic_r(table, s_grid)?;
            let residual = curve.last_decade_variation().unwrap_or(f64::INFINITY);
            let diagnosis = SingularityDiagnosis {
                case,
                w_threshold,
                strength: Strength::SqrtEdge {
                    a,
                    measured_plateau: curve.plateau(),
                },
                s_window: window,
                residual,
            };
            Ok(DiagnosisBundle {
                report,
                small_k: Some(fit),
                curve: Some(curve),
                diagnosis,
            })
        }
        SingularityCase::B => {
            let fit = fit_small_k_overlap(table, &report, k_max)?;
            let curve = diagnostic_rc(table, s_grid)?;
            let residual = curve.last_decade_variation().unwrap_or(f64::INFINITY);
            let diagnosis = SingularityDiagnosis {
                case,
                w_threshold,
                strength: Strength::DeltaPrimeEdge {
                    a_c: curve.plateau().unwrap_or(f64::NAN),
                },
                s_window: window,
                residual,
            };
            Ok(DiagnosisBundle {
                report,
                small_k: Some(fit),
                curve: Some(curve),
                diagnosis,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{build_spectrum, DriveProtocol};
    use crate::numerics::IntegratorConfig;

    fn quad_fit(coefficient: f64) -> SmallKFit {
        SmallKFit {
            regime: SmallKRegime::NonresonantQuadratic,
            coefficient,
            coefficient_error: 0.0,
            xi_at_zero: 0.0,
            window: (0.0, 0.05),
            points: 10,
            residual: 0.0,
        }
    }

    #[test]
    fn edge_coefficient_arithmetic() {
        assert_eq!(edge_coefficient_a(&quad_fit(0.0), 2.0).unwrap(), 0.0);
        let a = edge_coefficient_a(&quad_fit(16.0 * std::f64::consts::PI.sqrt()), 2.0).unwrap();
        assert!((a - 0.5f64.powf(1.5)).abs() < 1e-14);
        assert!(edge_coefficient_a(&quad_fit(1.0), 1.0).is_err());
        assert!(edge_coefficient_a(&quad_fit(1.0), -0.5).is_err());
    }

    #[test]
    fn plateau_detection() {
        let s = log_grid(1.0, 100.0, 21).unwrap();
        let flat = DiagnosticCurve {
            values: s.iter().map(|x| 2.0 + 0.01 / x).collect(),
            s: s.clone(),
            truncated: 0,
            warnings: vec![],
        };
        assert!(flat.plateaus());
        let growing = DiagnosticCurve {
            values: s.iter().map(|x| x.powf(2.5)).collect(),
            s,
            truncated: 0,
            warnings: vec![],
        };
        assert!(!growing.plateaus());
    }

    #[test]
    fn static_drive_has_zero_r() {
        let p = DriveProtocol::<f64>::constant(2.0, 1.0).unwrap();
        let t = build_spectrum(&p, 1000, &IntegratorConfig::default()).unwrap();
        let c = diagnostic_r(&t, &log_grid(3.0, 30.0, 5).unwrap()).unwrap();
        assert!(c.values.iter().all(|&v| v == 0.0), "{:?}", c.values);
        let b = diagnose(
            &t,
            &ResonanceOptions::default(),
            &log_grid(3.0, 30.0, 5).unwrap(),
            None,
        )
        .unwrap();
        assert_eq!(b.diagnosis.case, SingularityCase::A);
        match b.diagnosis.strength {
            Strength::SqrtEdge { a, .. } => assert!(a.abs() < 1e-10),
            ref s => panic!("{s:?}"),
        }
    }

    #[test]
    fn grid_preconditions() {
        let p = DriveProtocol::<f64>::sinusoidal(1.3, 1.0, 2.0, 0.0).unwrap();
        let t = build_spectrum(&p, 200, &IntegratorConfig::default()).unwrap();
        assert!(diagnostic_r(&t, &[1.0, 2.0]).is_err());
        let c = diagnostic_r(&t, &[3.0, 100.0, 1000.0]).unwrap();
        assert_eq!(c.truncated, 1);
        assert!(!c.warnings.is_empty());
        assert!(critical_power_fit(&t, &[20.0, 30.0, 40.0, 50.0]).is_err());
    }

    #[test]
    fn decay_classes() {
        assert_eq!(decay_class(1.02), DecayClass::Step);
        assert_eq!(decay_class(2.9), DecayClass::Quadratic);
        assert_eq!(decay_class(5.0), DecayClass::Unclassified);
    }
}
