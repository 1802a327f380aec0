//! Per-mode solutions assembled over a midpoint grid of `(0, π)`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ising::floquet::{floquet_decompose, mode_failure, period_propagator};
use crate::ising::hamiltonian::{bogoliubov_ground, ground_bloch};
use crate::ising::protocol::DriveProtocol;
use crate::numerics::{fit_linear, IntegratorConfig};
use crate::scalar::Real;

pub const MIN_GRID: usize = 64;

/// Relative distance from `ω₀/2` below which a quasi-energy is flagged as
/// sitting on the zone edge (its sign is then a convention).
const ZONE_EDGE_TOL: f64 = 1e-9;

/// Resonance tolerance on `2|h̃|`; a smaller folded offset is treated as zero.
pub const RESONANCE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution<T: Real> {
    pub k: T,
    /// Half-gap of the initial Hamiltonian.
    pub energy: T,
    pub u: Complex<T>,
    pub v: Complex<T>,
    /// Quasi-energy in `[0, ω₀/2]`.
    pub mu: T,
    pub r_plus_sq: T,
    pub xi: T,
    /// `n_F · n_g`: cosine between the Bloch vectors of the "+" Floquet mode
    /// and of the ground state. `|r⁺|² = (1 + c)/2`, `ξ = 1 − c²`.
    pub alignment: T,
    /// Bloch vector of the "+" Floquet mode.
    pub axis: [T; 3],
    pub degenerate: bool,
    pub zone_edge: bool,
}

impl<T: Real> ModeSolution<T> {
    pub fn r_minus_sq(&self) -> T {
        (T::one() - self.alignment) * T::lit(0.5)
    }

    /// `√(1 − ξ) = |n_F · n_g|`, accurate when `ξ` is close to 1.
    pub fn abs_alignment(&self) -> T {
        self.alignment.abs()
    }

    pub fn theta(&self, period: T) -> T {
        self.mu * period
    }

    /// Same mode with the "+" and "−" Floquet labels swapped, so
    /// `|r⁺|² ↦ 1 − |r⁺|²`. The quasi-energy pair `±μ` is unchanged.
    pub fn exchanged(&self) -> Self {
        Self {
            r_plus_sq: self.r_minus_sq().max(T::zero()).min(T::one()),
            alignment: -self.alignment,
            axis: [-self.axis[0], -self.axis[1], -self.axis[2]],
            ..*self
        }
    }

    fn from_parts(k: T, h_i: T, mu: T, axis: [T; 3], degenerate: bool, omega: T) -> Self {
        let g = bogoliubov_ground(k, h_i);
        let n_g = ground_bloch(k, h_i);
        let (c, xi) = alignment_and_xi(&axis, &n_g);
        Self {
            k,
            energy: g.energy,
            u: g.u,
            v: g.v,
            mu,
            r_plus_sq: ((T::one() + c) * T::lit(0.5)).max(T::zero()).min(T::one()),
            xi,
            alignment: c,
            axis,
            degenerate,
            zone_edge: (omega * T::lit(0.5) - mu).abs() <= T::lit(ZONE_EDGE_TOL) * omega,
        }
    }
}

/// `(a·b, |a × b|²)` for unit vectors, the second clamped to `[0, 1]`.
pub(crate) fn alignment_and_xi<T: Real>(a: &[T; 3], b: &[T; 3]) -> (T, T) {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cx = a[1] * b[2] - a[2] * b[1];
    let cy = a[2] * b[0] - a[0] * b[2];
    let cz = a[0] * b[1] - a[1] * b[0];
    let cross = cx * cx + cy * cy + cz * cz;
    // the cross product is accurate near alignment, the dot near orthogonality
    let xi = if cross < T::lit(0.5) {
        cross
    } else {
        T::one() - dot * dot
    };
    (
        dot.max(-T::one()).min(T::one()),
        xi.max(T::zero()).min(T::one()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScheme {
    /// `k_j = (j − ½)π/N`, `j = 1..N`.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub count: usize,
    pub scheme: GridScheme,
}

impl GridSpec {
    pub fn midpoint(count: usize) -> Self {
        Self {
            count,
            scheme: GridScheme::Midpoint,
        }
    }

    pub fn spacing<T: Real>(&self) -> T {
        T::PI() / T::from_usize_lossy(self.count)
    }

    pub fn points<T: Real>(&self) -> Vec<T> {
        let dk: T = self.spacing();
        (0..self.count)
            .map(|j| dk * (T::from_usize_lossy(j) + T::lit(0.5)))
            .collect()
    }
}

/// Leading small-k form of the effective Floquet Hamiltonian vector,
/// `(a_x k, a_y k, h̃ + a_z k²)`, fitted from the smallest grid modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallKModel<T> {
    /// Folded offset `h̃`, zero on resonance.
    pub offset: T,
    pub a_x: T,
    pub a_y: T,
    pub a_z: T,
    pub h_initial: T,
}

impl<T: Real> SmallKModel<T> {
    /// Bloch vector of the "+" Floquet mode predicted at `k`.
    pub fn floquet_axis(&self, k: T) -> Option<[T; 3]> {
        let v = [self.a_x * k, self.a_y * k, self.offset + self.a_z * k * k];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n > T::zero()) {
            return None;
        }
        Some([v[0] / n, v[1] / n, v[2] / n])
    }

    /// `(n_F·n_g, ξ)` at `k` from the model axis and the exact ground state.
    pub fn alignment_and_xi(&self, k: T) -> Option<(T, T)> {
        let n_f = self.floquet_axis(k)?;
        Some(alignment_and_xi(&n_f, &ground_bloch(k, self.h_initial)))
    }

    /// Transverse coefficient `|a| = √(a_x² + a_y²)`.
    pub fn transverse(&self) -> T {
        self.a_x.hypot(self.a_y)
    }

    /// Fits the model from the first three modes. The quasi-energy branch
    /// `θ/τ + jω₀/2` is chosen so the vector lands closest to `(0, 0, h̃)`.
    pub fn fit(protocol: &DriveProtocol<T>, modes: &[ModeSolution<T>]) -> Result<Self> {
        if modes.len() < 3 {
            return Err(Error::DegenerateFit("need three modes".into()));
        }
        let (mut offset, _) = protocol.folded_offset();
        if (T::lit(2.0) * offset).abs() < T::lit(RESONANCE_SNAP) {
            offset = T::zero();
        }
        let half = protocol.omega() * T::lit(0.5);
        let mut k2 = Vec::with_capacity(3);
        let (mut fx, mut fy, mut fz) = (Vec::new(), Vec::new(), Vec::new());
        for m in &modes[..3] {
            let n = m.axis;
            let mut best = (T::infinity(), T::zero());
            for j in -4i32..=4 {
                let c = m.mu + T::lit(j as f64) * half;
                let d = (c * n[0]).powi(2) + (c * n[1]).powi(2) + (c * n[2] - offset).powi(2);
                if d < best.0 {
                    best = (d, c);
                }
            }
            let c = best.1;
            let k = m.k;
            k2.push(k * k);
            fx.push(c * n[0] / k);
            fy.push(c * n[1] / k);
            fz.push((c * n[2] - offset) / (k * k));
        }
        let a_x = fit_linear(&k2, &fx)?.coefficients[0];
        let a_y = fit_linear(&k2, &fy)?.coefficients[0];
        let a_z = fit_linear(&k2, &fz)?.coefficients[0];
        Ok(Self {
            offset,
            a_x,
            a_y,
            a_z,
            h_initial: protocol.h_initial(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable<T: Real> {
    pub protocol: DriveProtocol<T>,
    pub integrator: IntegratorConfig,
    pub grid: GridSpec,
    pub modes: Vec<ModeSolution<T>>,
    /// Small-k model used to resolve the first grid cell; `None` when the
    /// fit is impossible (e.g. a vanishing Floquet vector).
    pub small_k: Option<SmallKModel<T>>,
}

impl<T: Real> SpectrumTable<T> {
    /// Table with the Floquet labels swapped in every mode.
    pub fn exchanged(&self) -> Self {
        Self {
            modes: self.modes.iter().map(ModeSolution::exchanged).collect(),
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn spacing(&self) -> T {
        self.grid.spacing()
    }

    pub fn period(&self) -> T {
        self.protocol.period()
    }

    pub fn ks(&self) -> Vec<T> {
        self.modes.iter().map(|m| m.k).collect()
    }

    pub fn min_energy(&self) -> T {
        self.modes
            .iter()
            .map(|m| m.energy)
            .fold(T::infinity(), |a, b| a.min(b))
    }

    /// Gap of the initial Hamiltonian, `E_th = |h_i − 1|` (reached at k = 0).
    pub fn threshold_energy(&self) -> T {
        (self.protocol.h_initial() - T::one()).abs()
    }
}

/// Solves one mode.
pub fn solve_mode<T: Real>(
    k: T,
    protocol: &DriveProtocol<T>,
    cfg: &IntegratorConfig,
) -> Result<ModeSolution<T>> {
    let u = period_propagator(k, protocol, cfg)?;
    let defect = u.unitarity_defect();
    // round-off alone grows ~ √steps · ε, which dominates in single precision
    let tol = T::lit(cfg.tolerance().max(1e-12) * 100.0).max(T::epsilon() * T::lit(1e3));
    if !(defect <= tol) {
        return Err(mode_failure(
            k,
            Error::NumericalDomain(format!("propagator unitarity defect {:e}", defect.as_f64())),
        ));
    }
    let d = floquet_decompose(&u, protocol.period());
    let mut axis = d.axis;
    if protocol.is_static() && !d.degenerate {
        // undriven: the Floquet axes are ±n_g exactly
        let n_g = ground_bloch(k, protocol.h_initial());
        let sign = if axis[0] * n_g[0] + axis[1] * n_g[1] + axis[2] * n_g[2] < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        axis = [sign * n_g[0], sign * n_g[1], sign * n_g[2]];
    }
    Ok(ModeSolution::from_parts(
        k,
        protocol.h_initial(),
        d.mu,
        axis,
        d.degenerate,
        protocol.omega(),
    ))
}

/// Solves every grid mode in parallel.
pub fn build_spectrum<T: Real>(
    protocol: &DriveProtocol<T>,
    n_k: usize,
    cfg: &IntegratorConfig,
) -> Result<SpectrumTable<T>> {
    if n_k < MIN_GRID {
        return Err(invalid("n_k", format!("{n_k} < {MIN_GRID}")));
    }
    cfg.validate()?;
    let grid = GridSpec::midpoint(n_k);
    let ks: Vec<T> = grid.points();
    let mut modes = ks
        .par_iter()
        .map(|&k| solve_mode(k, protocol, cfg))
        .collect::<Result<Vec<_>>>()?;
    fix_degenerate(&mut modes, protocol);
    let small_k = if protocol.is_static() {
        None
    } else {
        SmallKModel::fit(protocol, &modes).ok()
    };
    Ok(SpectrumTable {
        protocol: protocol.clone(),
        integrator: *cfg,
        grid,
        modes,
        small_k,
    })
}

/// Degenerate modes inherit the axis of the nearest non-degenerate smaller-k
/// mode (or the next larger one at the start of the grid).
fn fix_degenerate<T: Real>(modes: &mut [ModeSolution<T>], protocol: &DriveProtocol<T>) {
    let n = modes.len();
    for i in 0..n {
        if !modes[i].degenerate {
            continue;
        }
        let neighbour = (0..i).rev().chain(i + 1..n).find(|&j| !modes[j].degenerate);
        if let Some(j) = neighbour {
            let m = modes[i];
            modes[i] = ModeSolution::from_parts(
                m.k,
                protocol.h_initial(),
                m.mu,
                modes[j].axis,
                true,
                protocol.omega(),
            );
        }
    }
}
