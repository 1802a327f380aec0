//! Resonance and coherent-destruction-of-tunnelling classification.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ising::protocol::{DriveProtocol, DriveShape};
use crate::numerics::bessel_j;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceOptions {
    /// Largest resonance order scanned; `None` picks `⌈2|h₀−1|/ω₀⌉ + 1`.
    pub l_max: Option<u32>,
    /// Tolerance on `min_l |2|h₀−1| − lω₀|`.
    pub tol_res: f64,
    /// Tolerance on `|J_l(2A/ω₀)|` for flagging coherent destruction of
    /// tunnelling.
    pub tol_cdt: f64,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        Self {
            l_max: None,
            tol_res: 1e-9,
            // J₀(2/0.3623) ≈ 7e-5: the four-digit frequency is only
            // this close to the Bessel zero
            tol_cdt: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub h0: f64,
    pub omega: f64,
    pub h_initial: f64,
    pub resonant: bool,
    /// Order of the matched resonance (the closest one when not resonant).
    pub l: u32,
    pub cdt: bool,
    /// `|J_l(2A/ω₀)|` at the matched order; `None` for tabulated drives.
    pub bessel_at_l: Option<f64>,
    pub h_critical_distance: f64,
    pub initial_gap: f64,
}

/// Which of the three small-W behaviours applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingularityCase {
    /// Square-root edge at `W_th` (gapped Floquet spectrum at k = 0).
    A,
    /// Derivative-of-delta edge (resonant, no tunnelling suppression).
    B,
    /// Quenched from the critical field: power-law CGF tail.
    C,
}

impl SingularityCase {
    pub fn label(&self) -> &'static str {
        match self {
            SingularityCase::A => "a",
            SingularityCase::B => "b",
            SingularityCase::C => "c",
        }
    }
}

/// Tolerance on `|h_i − 1|` for the critical initial field.
pub const CRITICAL_FIELD_TOL: f64 = 1e-9;

impl ResonanceReport {
    /// Case label; depends only on `h_i`, `h₀`, `ω₀` and the CDT flag.
    pub fn case(&self) -> SingularityCase {
        if (self.h_initial - 1.0).abs() < CRITICAL_FIELD_TOL {
            SingularityCase::C
        } else if self.resonant && !self.cdt {
            SingularityCase::B
        } else {
            SingularityCase::A
        }
    }

    pub fn threshold(&self) -> f64 {
        self.initial_gap
    }
}

pub fn default_l_max(h0: f64, omega: f64) -> u32 {
    (2.0 * (h0 - 1.0).abs() / omega).ceil() as u32 + 1
}

pub fn classify_resonance<T: Real>(
    protocol: &DriveProtocol<T>,
    opts: &ResonanceOptions,
) -> Result<ResonanceReport> {
    if !(opts.tol_res > 0.0) || !(opts.tol_cdt > 0.0) {
        return Err(invalid("tolerance", "tol_res and tol_cdt must be positive"));
    }
    let h0 = protocol.h0().as_f64();
    let omega = protocol.omega().as_f64();
    let h_i = protocol.h_initial().as_f64();
    let l_max = opts.l_max.unwrap_or_else(|| default_l_max(h0, omega));
    let gap = 2.0 * (h0 - 1.0).abs();
    let (l, dist) = (0..=l_max)
        .map(|l| (l, (gap - l as f64 * omega).abs()))
        .fold(
            (0, f64::INFINITY),
            |best, c| if c.1 < best.1 { c } else { best },
        );
    let resonant = dist < opts.tol_res;
    let bessel_at_l = match protocol.shape() {
        DriveShape::Sinusoidal { amplitude, .. } => {
            Some(bessel_j(l, 2.0 * amplitude.as_f64() / omega).abs())
        }
        DriveShape::Tabulated { .. } => None,
    };
    let cdt = resonant && bessel_at_l.is_some_and(|j| j < opts.tol_cdt);
    Ok(ResonanceReport {
        h0,
        omega,
        h_initial: h_i,
        resonant,
        l,
        cdt,
        bessel_at_l,
        h_critical_distance: dist,
        initial_gap: 2.0 * (h_i - 1.0).abs(),
    })
}
