//! Quadrature nodes over `(0, π)` for the asymptotic integrals.
//!
//! The first grid cell is replaced by a geometric sub-grid driven by the
//! small-k model, so integrands dominated by `k → 0` (large `s`) are
//! resolved down to `k ~ e^{−s E_th}`. Interior cells where the Floquet and
//! ground-state axes are nearly orthogonal are sub-sampled.

use crate::ising::hamiltonian::mode_energy;
use crate::ising::spectrum::{ModeSolution, SpectrumTable};
use crate::scalar::Real;

/// One quadrature node; integrals are `Σ weight · f(node) / 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode<T> {
    pub k: T,
    pub weight: T,
    pub energy: T,
    pub xi: T,
    /// `√(1 − ξ)`.
    pub abs_d: T,
}

/// Threshold on `1 − ξ` below which an interior cell is sub-sampled.
const REFINE_BELOW: f64 = 1e-3;
const REFINE_FACTOR: usize = 8;
/// Panel ratio of the geometric tail grid (eight panels per decade).
const TAIL_RATIO_LOG10: f64 = -1.0 / 8.0;
const GAUSS2: f64 = 0.288_675_134_594_812_9; // 1/(2√3)

/// Nodes resolving the integrand up to Laplace variable `s` (use `0` for
/// quantities at `s = 0`).
pub fn asymptotic_nodes<T: Real>(table: &SpectrumTable<T>, s: T) -> Vec<QuadNode<T>> {
    let modes = &table.modes;
    let dk = table.spacing();
    let h_i = table.protocol.h_initial();
    let mut nodes = Vec::with_capacity(modes.len() + 64);
    let start = match &table.small_k {
        Some(model) if model.floquet_axis(dk * T::lit(0.5)).is_some() => {
            let e_th = table.threshold_energy();
            let ln_edge = dk.ln();
            let s_pos = s.max(T::zero());
            let mut ln_floor = (ln_edge + T::lit(1e-3f64.ln()))
                .min(-s_pos * e_th - (T::lit(100.0) * s_pos.max(T::one())).ln());
            ln_floor = ln_floor.max(T::lit(-700.0));
            let step = T::lit(TAIL_RATIO_LOG10 * std::f64::consts::LN_10);
            let mut hi = ln_edge;
            loop {
                let lo = (hi + step).max(ln_floor);
                let (a, b) = (lo.exp(), hi.exp());
                let mid = (a + b) * T::lit(0.5);
                let half = (b - a) * T::lit(GAUSS2);
                for k in [mid - half, mid + half] {
                    let energy = mode_energy(k, h_i);
                    let (c, xi) = model.alignment_and_xi(k).unwrap_or((T::one(), T::zero()));
                    nodes.push(QuadNode {
                        k,
                        weight: (b - a) * T::lit(0.5),
                        energy,
                        xi,
                        abs_d: c.abs(),
                    });
                }
                if lo <= ln_floor {
                    break;
                }
                hi = lo;
            }
            // remaining sliver [0, k_floor]
            let kf = ln_floor.exp();
            let k = kf * T::lit(0.5);
            let (c, xi) = model.alignment_and_xi(k).unwrap_or((T::one(), T::zero()));
            nodes.push(QuadNode {
                k,
                weight: kf,
                energy: mode_energy(k, h_i),
                xi,
                abs_d: c.abs(),
            });
            1
        }
        _ => 0,
    };
    for j in start..modes.len() {
        let m = &modes[j];
        if m.abs_alignment() * m.abs_alignment() < T::lit(REFINE_BELOW) {
            refine_cell(modes, j, dk, h_i, &mut nodes);
        } else {
            nodes.push(node_from_mode(m, dk));
        }
    }
    nodes
}

/// Plain midpoint nodes on the table grid.
pub fn grid_nodes<T: Real>(table: &SpectrumTable<T>) -> Vec<QuadNode<T>> {
    let dk = table.spacing();
    table.modes.iter().map(|m| node_from_mode(m, dk)).collect()
}

fn node_from_mode<T: Real>(m: &ModeSolution<T>, dk: T) -> QuadNode<T> {
    QuadNode {
        k: m.k,
        weight: dk,
        energy: m.energy,
        xi: m.xi,
        abs_d: m.abs_alignment(),
    }
}

/// Signed alignment of mode `j` expressed in the label convention of `i`;
/// a label swap between neighbours flips the Floquet axis.
fn aligned<T: Real>(modes: &[ModeSolution<T>], i: usize, j: usize) -> T {
    let a = modes[i].axis;
    let b = modes[j].axis;
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    if dot < T::zero() {
        -modes[j].alignment
    } else {
        modes[j].alignment
    }
}

fn refine_cell<T: Real>(
    modes: &[ModeSolution<T>],
    j: usize,
    dk: T,
    h_i: T,
    out: &mut Vec<QuadNode<T>>,
) {
    let kj = modes[j].k;
    let dj = modes[j].alignment;
    let left = (j > 0).then(|| (modes[j - 1].k, aligned(modes, j, j - 1)));
    let right = (j + 1 < modes.len()).then(|| (modes[j + 1].k, aligned(modes, j, j + 1)));
    let w = dk / T::from_usize_lossy(REFINE_FACTOR);
    for i in 0..REFINE_FACTOR {
        let k = kj - dk * T::lit(0.5) + w * (T::from_usize_lossy(i) + T::lit(0.5));
        let nb = if k < kj { left } else { right };
        let d = match nb {
            Some((kn, dn)) => dj + (dn - dj) * (k - kj) / (kn - kj),
            None => dj,
        };
        let d = d.max(-T::one()).min(T::one());
        out.push(QuadNode {
            k,
            weight: w,
            energy: mode_energy(k, h_i),
            xi: T::one() - d * d,
            abs_d: d.abs(),
        });
    }
}

/// `Σ weight · f / 2π`.
pub fn integrate<T: Real, F: Fn(&QuadNode<T>) -> T>(nodes: &[QuadNode<T>], f: F) -> T {
    let mut acc = T::zero();
    let mut comp = T::zero();
    for n in nodes {
        // Kahan summation: tail weights span hundreds of decades
        let y = n.weight * f(n) - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    acc / T::TAU()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{build_spectrum, DriveProtocol};
    use crate::numerics::IntegratorConfig;

    #[test]
    fn weights_cover_the_zone() {
        let p = DriveProtocol::<f64>::sinusoidal(1.3, 1.0, 2.0, 0.0).unwrap();
        let t = build_spectrum(&p, 128, &IntegratorConfig::default()).unwrap();
        for s in [0.0, 10.0, 300.0] {
            let nodes = asymptotic_nodes(&t, s);
            let total: f64 = nodes.iter().map(|n| n.weight).sum();
            assert!(
                (total - std::f64::consts::PI).abs() < 1e-5,
                "s = {s}: {total}"
            );
            assert!(nodes.iter().all(|n| n.xi >= 0.0 && n.xi <= 1.0));
            let kmin = nodes.iter().map(|n| n.k).fold(1.0, f64::min);
            if s > 100.0 {
                assert!(kmin < (-s * 1.3f64).exp());
            }
        }
    }

    #[test]
    fn grid_nodes_integrate_constant() {
        let p = DriveProtocol::<f64>::constant(0.5, 1.0).unwrap();
        let t = build_spectrum(&p, 64, &IntegratorConfig::default()).unwrap();
        let v = integrate(&grid_nodes(&t), |_| 1.0);
        assert!((v - 0.5).abs() < 1e-14);
    }
}
