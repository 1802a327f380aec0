//! Per-mode Bogoliubov–de Gennes Hamiltonian and its ground state.
//!
//! Basis `{|0⟩, c†_k c†_{−k}|0⟩}`; the matrix is `ε σ_z + Δ σ_y`.

use num_complex::Complex;

use crate::numerics::Complex2x2;
use crate::scalar::{cplx, Real};

/// `ε = h − cos k`, evaluated as `(h − 1) + 2 sin²(k/2)` so small-k values
/// near the critical field keep their relative precision.
#[inline]
pub fn diagonal_energy<T: Real>(k: T, h: T) -> T {
    let s = (k * T::lit(0.5)).sin();
    (h - T::one()) + T::lit(2.0) * s * s
}

/// `[[ε, −iΔ], [iΔ, −ε]]` with `ε = h − cos k`, `Δ = sin k`.
pub fn mode_hamiltonian<T: Real>(k: T, h: T) -> Complex2x2<T> {
    Complex2x2::from_pauli(T::zero(), k.sin(), diagonal_energy(k, h))
}

/// `E_k = √(ε² + Δ²)` at field `h`.
#[inline]
pub fn mode_energy<T: Real>(k: T, h: T) -> T {
    diagonal_energy(k, h).hypot(k.sin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundState<T: Real> {
    /// Amplitude on `|0⟩`.
    pub u: Complex<T>,
    /// Amplitude on `c†_k c†_{−k}|0⟩`.
    pub v: Complex<T>,
    /// Half-gap; the ground energy is `−E`.
    pub energy: T,
}

impl<T: Real> GroundState<T> {
    pub fn spinor(&self) -> [Complex<T>; 2] {
        [self.u, self.v]
    }
}

/// Ground state of the mode Hamiltonian at field `h_i`.
pub fn bogoliubov_ground<T: Real>(k: T, h_i: T) -> GroundState<T> {
    let eps = diagonal_energy(k, h_i);
    let delta = k.sin();
    let e = eps.hypot(delta);
    if e == T::zero() {
        return GroundState {
            u: cplx(T::one(), T::zero()),
            v: cplx(T::zero(), T::zero()),
            energy: e,
        };
    }
    // pick the branch without cancellation
    if eps >= T::zero() {
        let a = eps + e;
        let n = a.hypot(delta);
        GroundState {
            u: cplx(T::zero(), delta / n),
            v: cplx(a / n, T::zero()),
            energy: e,
        }
    } else {
        let a = e - eps;
        let n = a.hypot(delta);
        GroundState {
            u: cplx(a / n, T::zero()),
            v: cplx(T::zero(), -delta / n),
            energy: e,
        }
    }
}

/// Bloch vector of the ground state, `−(0, Δ, ε)/E`.
pub fn ground_bloch<T: Real>(k: T, h_i: T) -> [T; 3] {
    let eps = diagonal_energy(k, h_i);
    let delta = k.sin();
    let e = eps.hypot(delta);
    if e == T::zero() {
        return [T::zero(), T::zero(), T::one()];
    }
    [T::zero(), -delta / e, -eps / e]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::complex2::norm_sqr;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn half_pi_unit_field() {
        let h = mode_hamiltonian(PI / 2.0, 1.0f64);
        let expect = Complex2x2::new(
            cplx(1.0, 0.0),
            cplx(0.0, -1.0),
            cplx(0.0, 1.0),
            cplx(-1.0, 0.0),
        );
        assert!(h.max_abs_diff(&expect) < 1e-15);
        let g = bogoliubov_ground(PI / 2.0, 1.0f64);
        assert!((g.energy - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_field_equal_weights() {
        let g = bogoliubov_ground(PI / 2.0, 0.0f64);
        assert!((g.energy - 1.0).abs() < 1e-15);
        assert!((g.u.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((g.v.norm() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn small_k_energy_expansion() {
        for h_i in [1.5f64, 2.0, 2.3, 4.0] {
            let k = 1e-2;
            let approx = (h_i - 1.0) + h_i * k * k / (2.0 * (h_i - 1.0));
            let e = bogoliubov_ground(k, h_i).energy;
            assert!(
                ((e - (h_i - 1.0)) - (approx - (h_i - 1.0))).abs() / (approx - (h_i - 1.0)) < 1e-3
            );
        }
    }

    #[test]
    fn small_k_is_nearly_diagonal() {
        let k = 1e-6f64;
        let h = mode_hamiltonian(k, 1.7);
        assert!((h.m[0][0].re - 0.7).abs() < 1e-11);
        assert!((h.m[0][1].im + k).abs() < 1e-17);
    }

    proptest! {
        #[test]
        fn traceless_hermitian(k in 1e-6f64..PI, h in -5.0f64..5.0) {
            let m = mode_hamiltonian(k, h);
            prop_assert!(m.trace().norm() < 1e-15);
            prop_assert!(m.is_hermitian(1e-15));
        }

        #[test]
        fn ground_is_normalized_eigenvector(k in 1e-6f64..PI, h in -5.0f64..5.0) {
            let g = bogoliubov_ground(k, h);
            let s = g.spinor();
            prop_assert!((norm_sqr(&s) - 1.0).abs() < 1e-14);
            let hs = mode_hamiltonian(k, h).apply(&s);
            for i in 0..2 {
                prop_assert!((hs[i] + s[i] * g.energy).norm() < 1e-13 * (1.0 + g.energy));
            }
            let e2 = (h - k.cos()).powi(2) + k.sin().powi(2);
            prop_assert!((g.energy - e2.sqrt()).abs() < 1e-13);
            let b = ground_bloch(k, h);
            let z = s[0].norm_sqr() - s[1].norm_sqr();
            prop_assert!((b[2] - z).abs() < 1e-13);
        }
    }
}
