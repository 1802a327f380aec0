//! Finite-length work distribution as a product of independent per-mode
//! two-point distributions, convolved by iterative binning.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ising::spectrum::SpectrumTable;
use crate::scalar::Real;
use crate::work::cgf::Periods;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin<T> {
    pub lo: T,
    pub hi: T,
    pub probability: T,
    /// Conditional mean work inside the bin (the bin midpoint when empty).
    pub mean: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkHistogram<T> {
    pub length: usize,
    pub periods: Periods,
    /// Probability of no excitation, `Π(1 − p_k)`.
    pub delta0_weight: T,
    /// `2|h_i − 1|`, always a bin edge.
    pub threshold: T,
    pub bin_width: T,
    pub bins: Vec<HistogramBin<T>>,
    /// Set when `sin²(μnτ)` was replaced by its time average 1/2.
    pub time_averaged: bool,
}

impl<T: Real> WorkHistogram<T> {
    pub fn total_probability(&self) -> T {
        self.delta0_weight + self.bins.iter().fold(T::zero(), |a, b| a + b.probability)
    }

    /// Mean and variance of the binned distribution (bins at their means).
    pub fn moments(&self) -> (T, T) {
        let m1 = self
            .bins
            .iter()
            .fold(T::zero(), |a, b| a + b.probability * b.mean);
        let m2 = self
            .bins
            .iter()
            .fold(T::zero(), |a, b| a + b.probability * b.mean * b.mean);
        (m1, m2 - m1 * m1)
    }
}

/// Binned distribution of `W = Σ 2E_k b_k` with independent Bernoulli `b_k`,
/// `P(b_k = 1) = ξ_k sin²(μ_k nτ)` (or `ξ_k/2` in the stationary limit).
/// The table must sit on the antiperiodic grid of `length`, i.e. have
/// `length/2` midpoint modes.
pub fn work_histogram_finite_l<T: Real>(
    table: &SpectrumTable<T>,
    periods: Periods,
    length: usize,
    bin_width: T,
) -> Result<WorkHistogram<T>> {
    if length == 0 || length % 2 == 1 {
        return Err(invalid(
            "length",
            format!("{length} must be even and positive"),
        ));
    }
    if length / 2 > 10_000 {
        return Err(invalid("length", format!("{length}/2 exceeds 10⁴ modes")));
    }
    if table.len() != length / 2 {
        return Err(Error::TableMismatch(format!(
            "histogram for L = {length} needs {} modes, table has {}",
            length / 2,
            table.len()
        )));
    }
    let e_min = table.min_energy();
    if !(bin_width > T::zero()) || !(bin_width < T::lit(2.0) * e_min) {
        return Err(invalid(
            "bin_width",
            format!(
                "{bin_width} must lie in (0, 2E_min = {})",
                T::lit(2.0) * e_min
            ),
        ));
    }
    let tau = table.period();
    let threshold = T::lit(2.0) * (table.protocol.h_initial() - T::one()).abs();
    // first edge at or below the smallest jump, aligned with the threshold
    let shift = ((threshold - T::lit(2.0) * e_min) / bin_width)
        .ceil()
        .max(T::zero());
    let origin = threshold - shift * bin_width;
    let total_jump = table
        .modes
        .iter()
        .fold(T::zero(), |a, m| a + T::lit(2.0) * m.energy);
    let n_bins = ((total_jump - origin) / bin_width)
        .ceil()
        .to_usize()
        .unwrap_or(0)
        + 2;

    let mut delta0 = T::one();
    let mut mass = vec![T::zero(); n_bins];
    let mut moment = vec![T::zero(); n_bins];
    let mut hi_used = 0usize;
    let index = |w: T| -> usize {
        let i = ((w - origin) / bin_width).floor().to_isize().unwrap_or(0);
        (i.max(0) as usize).min(n_bins - 1)
    };
    let mut new_mass = vec![T::zero(); n_bins];
    let mut new_moment = vec![T::zero(); n_bins];

    for m in &table.modes {
        let p = match periods {
            Periods::Infinite => m.xi * T::lit(0.5),
            Periods::Finite(n) => {
                let phase = (m.mu * tau).as_f64() * n as f64 % std::f64::consts::PI;
                let s = T::lit(phase).sin();
                m.xi * s * s
            }
        };
        // rounding-level excitation probabilities (undriven modes) are dropped
        if p <= T::epsilon() {
            continue;
        }
        let q = T::one() - p;
        let jump = T::lit(2.0) * m.energy;
        for i in 0..=hi_used {
            new_mass[i] = q * mass[i];
            new_moment[i] = q * moment[i];
        }
        let mut top = hi_used;
        for i in 0..=hi_used {
            if mass[i] == T::zero() {
                continue;
            }
            let mean = moment[i] / mass[i];
            let j = index(mean + jump);
            new_mass[j] += p * mass[i];
            new_moment[j] += p * (moment[i] + mass[i] * jump);
            top = top.max(j);
        }
        let j = index(jump);
        new_mass[j] += p * delta0;
        new_moment[j] += p * delta0 * jump;
        top = top.max(j);
        delta0 *= q;
        hi_used = top;
        std::mem::swap(&mut mass, &mut new_mass);
        std::mem::swap(&mut moment, &mut new_moment);
        for i in 0..=hi_used {
            new_mass[i] = T::zero();
            new_moment[i] = T::zero();
        }
    }

    let any_mass = mass.iter().any(|&x| x > T::zero());
    let bins = if any_mass {
        (0..=hi_used)
            .map(|i| {
                let lo = origin + bin_width * T::from_usize_lossy(i);
                let hi = lo + bin_width;
                HistogramBin {
                    lo,
                    hi,
                    probability: mass[i],
                    mean: if mass[i] > T::zero() {
                        moment[i] / mass[i]
                    } else {
                        (lo + hi) * T::lit(0.5)
                    },
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(WorkHistogram {
        length,
        periods,
        delta0_weight: delta0,
        threshold,
        bin_width,
        bins,
        time_averaged: periods == Periods::Infinite,
    })
}
