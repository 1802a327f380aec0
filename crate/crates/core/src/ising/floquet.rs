//! One-period propagators and their Floquet decomposition.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::ising::hamiltonian::{diagonal_energy, mode_hamiltonian};
use crate::ising::protocol::DriveProtocol;
use crate::numerics::complex2::{inner, Spinor};
use crate::numerics::{integrate_linear_ode, Complex2x2, IntegratorConfig};
use crate::scalar::{cplx, Real};

/// Below this `|sin θ|` the one-period propagator is treated as a multiple
/// of the identity and its eigenbasis is undetermined.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `U_k(τ, 0)` in the lab frame.
pub fn period_propagator<T: Real>(
    k: T,
    protocol: &DriveProtocol<T>,
    cfg: &IntegratorConfig,
) -> Result<Complex2x2<T>> {
    integrate_linear_ode(
        |t| mode_hamiltonian(k, protocol.field(t)),
        T::zero(),
        protocol.period(),
        cfg,
    )
    .map_err(|e| mode_failure(k, e))
}

/// Generator in the frame co-rotating with the oscillating part of the
/// field: the diagonal is static and the pairing term carries `e^{±2i f(t)}`.
pub fn rotated_hamiltonian<T: Real>(k: T, protocol: &DriveProtocol<T>, t: T) -> Complex2x2<T> {
    let eps = diagonal_energy(k, protocol.h0());
    let delta = k.sin();
    let (s, c) = (T::lit(2.0) * protocol.phase_integral(t)).sin_cos();
    // −iΔ e^{2if} and its conjugate
    Complex2x2::new(
        cplx(eps, T::zero()),
        cplx(delta * s, -delta * c),
        cplx(delta * s, delta * c),
        cplx(-eps, T::zero()),
    )
}

/// `U_k(τ, 0)` integrated in the rotated frame; equal to the lab-frame
/// propagator because the frame change is the identity at `0` and `τ`.
pub fn rotated_frame_propagator<T: Real>(
    k: T,
    protocol: &DriveProtocol<T>,
    cfg: &IntegratorConfig,
) -> Result<Complex2x2<T>> {
    integrate_linear_ode(
        |t| rotated_hamiltonian(k, protocol, t),
        T::zero(),
        protocol.period(),
        cfg,
    )
    .map_err(|e| mode_failure(k, e))
}

/// Max-entry deviation between the rotated-frame and lab-frame propagators.
pub fn rotated_frame_check<T: Real>(
    k: T,
    protocol: &DriveProtocol<T>,
    cfg: &IntegratorConfig,
) -> Result<T> {
    let lab = period_propagator(k, protocol, cfg)?;
    let rot = rotated_frame_propagator(k, protocol, cfg)?;
    Ok(lab.max_abs_diff(&rot))
}

pub(crate) fn mode_failure(k: impl Real, e: Error) -> Error {
    match e {
        Error::ModeFailure { .. } => e,
        other => Error::ModeFailure {
            k: k.as_f64(),
            source: Box::new(other),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetDecomposition<T: Real> {
    /// Quasi-energy in `[0, ω₀/2]`.
    pub mu: T,
    /// Eigenphase `θ = μτ ∈ [0, π]`; the "+" mode has eigenvalue `e^{−iθ}`.
    pub theta: T,
    /// Bloch vector of the "+" mode (unit; arbitrary `ẑ` when degenerate).
    pub axis: [T; 3],
    pub mode_plus: Spinor<T>,
    pub mode_minus: Spinor<T>,
    /// `U` is a multiple of the identity; labels must be fixed externally.
    pub degenerate: bool,
}

/// Spinor with Bloch vector `n` (the `+1` eigenvector of `n·σ`).
pub fn spinor_from_bloch<T: Real>(n: [T; 3]) -> Spinor<T> {
    let one = T::one();
    let two = T::lit(2.0);
    if n[2] >= T::zero() {
        let s = (two * (one + n[2])).sqrt();
        [cplx((one + n[2]) / s, T::zero()), cplx(n[0] / s, n[1] / s)]
    } else {
        let s = (two * (one - n[2])).sqrt();
        [cplx(n[0] / s, -n[1] / s), cplx((one - n[2]) / s, T::zero())]
    }
}

/// Partner spinor orthogonal to `a`: `(−b*, a*)`.
pub fn orthogonal_spinor<T: Real>(a: &Spinor<T>) -> Spinor<T> {
    [-a[1].conj(), a[0].conj()]
}

/// Splits a one-period propagator into quasi-energy and Floquet modes.
/// A global phase (from integrator drift off SU(2)) is ignored.
pub fn floquet_decompose<T: Real>(u: &Complex2x2<T>, period: T) -> FloquetDecomposition<T> {
    let (theta, w) = u.su2_axis_angle();
    let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let degenerate = !(norm >= T::lit(DEGENERACY_TOL));
    let axis = if degenerate {
        [T::zero(), T::zero(), T::one()]
    } else {
        [w[0] / norm, w[1] / norm, w[2] / norm]
    };
    let mode_plus = spinor_from_bloch(axis);
    FloquetDecomposition {
        mu: theta / period,
        theta,
        axis,
        mode_plus,
        mode_minus: orthogonal_spinor(&mode_plus),
        degenerate,
    }
}

/// `|⟨mode|ground⟩|²`, clamped to `[0, 1]`.
pub fn overlaps<T: Real>(mode_plus: &Spinor<T>, ground: &Spinor<T>) -> T {
    let o: Complex<T> = inner(mode_plus, ground);
    o.norm_sqr().max(T::zero()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::hamiltonian::bogoliubov_ground;
    use crate::ising::protocol::fold_quasi_energy;
    use crate::numerics::complex2::norm_sqr;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Independent propagator: 2¹⁰ slices of the fourth-order Magnus
    /// exponential with two Gauss points per slice.
    fn magnus_oracle(k: f64, p: &DriveProtocol<f64>) -> Complex2x2<f64> {
        let n = 1 << 10;
        let dt = p.period() / n as f64;
        let c = 3f64.sqrt() / 6.0;
        let mut u = Complex2x2::identity();
        for i in 0..n {
            let t = i as f64 * dt;
            let h1 = mode_hamiltonian(k, p.field(t + (0.5 - c) * dt));
            let h2 = mode_hamiltonian(k, p.field(t + (0.5 + c) * dt));
            let comm = h1 * h2 - h2 * h1;
            let heff = (h1 + h2).scale_re(0.5) + comm.scale(cplx(0.0, 3f64.sqrt() / 12.0 * dt));
            u = Complex2x2::exp_minus_i_hermitian(&heff, dt) * u;
        }
        u
    }

    #[test]
    fn diagonal_unitary() {
        let tau = 2.0;
        let th = 0.7f64;
        let u = Complex2x2::diag(cplx(th.cos(), -th.sin()), cplx(th.cos(), th.sin()));
        let d = floquet_decompose(&u, tau);
        assert!(!d.degenerate);
        assert!((d.mu - th / tau).abs() < 1e-15);
        assert!((d.mode_plus[0].norm() - 1.0).abs() < 1e-15);
        assert!(d.mode_minus[1].norm() > 1.0 - 1e-15);
    }

    #[test]
    fn identity_is_degenerate() {
        let d = floquet_decompose(&Complex2x2::<f64>::identity(), 1.0);
        assert!(d.degenerate);
        assert_eq!(d.mu, 0.0);
    }

    #[test]
    fn spinor_bloch_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let v: [f64; 3] = [
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            ];
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            let n = [v[0] / r, v[1] / r, v[2] / r];
            let s = spinor_from_bloch(n);
            let m = Complex2x2::from_pauli(n[0], n[1], n[2]).apply(&s);
            assert!((m[0] - s[0]).norm() < 1e-14 && (m[1] - s[1]).norm() < 1e-14);
            let o = orthogonal_spinor(&s);
            assert!(inner(&s, &o).norm() < 1e-15);
        }
    }

    #[test]
    fn overlap_examples() {
        let a = [cplx(1.0f64, 0.0), cplx(0.0, 0.0)];
        let b = [cplx(0.0f64, 0.0), cplx(1.0, 0.0)];
        let h = [cplx(0.5f64.sqrt(), 0.0), cplx(0.5f64.sqrt(), 0.0)];
        assert_eq!(overlaps(&a, &a), 1.0);
        assert_eq!(overlaps(&a, &b), 0.0);
        assert!((overlaps(&h, &a) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn static_drive_recovers_bogoliubov_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = IntegratorConfig::adaptive(1e-11);
        for _ in 0..50 {
            let k = rng.gen_range(0.01..PI);
            let h0 = rng.gen_range(-3.0..3.0);
            let omega = rng.gen_range(0.5..4.0);
            let p = DriveProtocol::<f64>::constant(h0, omega).unwrap();
            let u = period_propagator(k, &p, &cfg).unwrap();
            let d = floquet_decompose(&u, p.period());
            let g = bogoliubov_ground(k, h0);
            let mu_exp = fold_quasi_energy(g.energy, omega);
            assert!((d.mu - mu_exp).abs() < 1e-8, "mu {} vs {}", d.mu, mu_exp);
            // the ground state is one of the two Floquet modes
            let r = overlaps(&d.mode_plus, &g.spinor());
            assert!(r.min(1.0 - r) < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn static_propagator_is_matrix_exponential() {
        let p = DriveProtocol::<f64>::constant(0.4, 1.3).unwrap();
        let k = 1.1;
        let u = period_propagator(k, &p, &IntegratorConfig::default()).unwrap();
        let exact = Complex2x2::exp_minus_i_hermitian(&mode_hamiltonian(k, 0.4), p.period());
        assert!(u.max_abs_diff(&exact) < 1e-9);
    }

    #[test]
    fn fixed_and_adaptive_agree_with_magnus() {
        let p = DriveProtocol::<f64>::sinusoidal(1.0, 1.0, 2.0, 0.3).unwrap();
        for k in [0.05, 0.7, PI / 2.0, 2.9] {
            let oracle = magnus_oracle(k, &p);
            let fixed = period_propagator(k, &p, &IntegratorConfig::fixed(512)).unwrap();
            let adapt = period_propagator(k, &p, &IntegratorConfig::adaptive(1e-10)).unwrap();
            assert!(fixed.max_abs_diff(&oracle) < 1e-8, "k = {k}");
            assert!(adapt.max_abs_diff(&oracle) < 1e-8, "k = {k}");
            assert!(fixed.unitarity_defect() < 1e-8);
        }
    }

    #[test]
    fn zone_edge_quasi_energies() {
        let cfg = IntegratorConfig::default();
        for (h0, a, phi) in [(1.3f64, 1.0, 0.0), (0.2, 0.7, 1.1), (2.5, 2.0, -0.4)] {
            let p = DriveProtocol::<f64>::sinusoidal(h0, a, 2.0, phi).unwrap();
            let d0 = floquet_decompose(&period_propagator(1e-8, &p, &cfg).unwrap(), p.period());
            assert!((d0.mu - fold_quasi_energy(h0 - 1.0, 2.0)).abs() < 1e-7);
            let dpi =
                floquet_decompose(&period_propagator(PI - 1e-8, &p, &cfg).unwrap(), p.period());
            assert!((dpi.mu - fold_quasi_energy(h0 + 1.0, 2.0)).abs() < 1e-7);
        }
    }

    #[test]
    fn rotated_frame_matches_lab_frame() {
        let cfg = IntegratorConfig::default();
        let p = DriveProtocol::<f64>::constant(0.8, 1.0).unwrap();
        assert!(rotated_frame_check(0.9, &p, &cfg).unwrap() < 1e-12);
        let p = DriveProtocol::<f64>::sinusoidal(1.0, 1.0, 2.0, 0.0).unwrap();
        assert!(rotated_frame_check(PI / 2.0, &p, &cfg).unwrap() < 1e-6);
        let k = 1e-4;
        assert!(rotated_frame_check(k, &p, &cfg).unwrap() < 1e-6);
        let p = DriveProtocol::<f64>::sinusoidal(1.4, 1.0, 2.0, 0.5).unwrap();
        let u = rotated_frame_propagator(1e-6, &p, &cfg).unwrap();
        let d = floquet_decompose(&u, p.period());
        assert!((d.mu - 0.4).abs() < 1e-6);
    }

    #[test]
    fn exchange_symmetric_under_negative_k() {
        let cfg = IntegratorConfig::fixed(1024);
        let p = DriveProtocol::<f64>::sinusoidal(0.6, 1.2, 1.7, 0.2).unwrap();
        for k in [0.3, 1.2, 2.4] {
            let g = |kk: f64| {
                let d = floquet_decompose(&period_propagator(kk, &p, &cfg).unwrap(), p.period());
                let r = overlaps(&d.mode_plus, &bogoliubov_ground(kk, p.h_initial()).spinor());
                4.0 * r * (1.0 - r)
            };
            assert!((g(k) - g(-k)).abs() < 1e-8);
        }
    }

    #[test]
    fn modes_normalized() {
        let p = DriveProtocol::<f64>::sinusoidal(0.6, 1.2, 1.7, 0.2).unwrap();
        let d = floquet_decompose(
            &period_propagator(0.8, &p, &IntegratorConfig::default()).unwrap(),
            p.period(),
        );
        assert!((norm_sqr(&d.mode_plus) - 1.0).abs() < 1e-14);
        assert!(d.mu >= 0.0 && d.mu <= p.omega() / 2.0);
    }
}
