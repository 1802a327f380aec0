//! Dense 2x2 complex matrices and the SU(2) axis-angle form used for
//! single-mode propagators.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::scalar::{cplx, Real};

/// A 2x2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex2x2<T: Real> {
    pub m: [[Complex<T>; 2]; 2],
}

/// Complex 2-vector (a state of a single momentum pair).
pub type Spinor<T> = [Complex<T>; 2];

impl<T: Real> Complex2x2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self {
            m: [[a, b], [c, d]],
        }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Self::new(o, z, z, o)
    }

    pub fn diag(a: Complex<T>, d: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(a, z, z, d)
    }

    /// `x σx + y σy + z σz`.
    pub fn from_pauli(x: T, y: T, z: T) -> Self {
        Self::new(
            cplx(z, T::zero()),
            cplx(x, -y),
            cplx(x, y),
            cplx(-z, T::zero()),
        )
    }

    pub fn sigma_x() -> Self {
        Self::from_pauli(T::one(), T::zero(), T::zero())
    }

    pub fn sigma_y() -> Self {
        Self::from_pauli(T::zero(), T::one(), T::zero())
    }

    pub fn sigma_z() -> Self {
        Self::from_pauli(T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    #[inline]
    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cplx(s, T::zero()))
    }

    pub fn apply(&self, v: &Spinor<T>) -> Spinor<T> {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Max-norm of the entries.
    pub fn max_abs(&self) -> T {
        let mut best = T::zero();
        for row in &self.m {
            for z in row {
                best = best.max(z.norm());
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `‖U†U − I‖_∞ < tol`.
    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() < tol
    }

    pub fn unitarity_defect(&self) -> T {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    /// Exponential `exp(-i H dt)` of a Hermitian `H`, computed from its
    /// Pauli decomposition (exact up to rounding).
    pub fn exp_minus_i_hermitian(h: &Self, dt: T) -> Self {
        let half = T::lit(0.5);
        let shift = (h.m[0][0].re + h.m[1][1].re) * half;
        let z = (h.m[0][0].re - h.m[1][1].re) * half;
        let x = (h.m[0][1].re + h.m[1][0].re) * half;
        let y = (h.m[1][0].im - h.m[0][1].im) * half;
        let r = (x * x + y * y + z * z).sqrt();
        let phi = r * dt;
        let (s, c) = phi.sin_cos();
        let body = if r > T::zero() {
            let f = s / r;
            Self::new(
                cplx(c, -f * z),
                cplx(-f * y, -f * x),
                cplx(f * y, -f * x),
                cplx(c, f * z),
            )
        } else {
            Self::identity()
        };
        let (ss, sc) = (shift * dt).sin_cos();
        body.scale(cplx(sc, -ss))
    }

    /// Axis-angle form of a (near-)SU(2) matrix: `U ≈ cos θ I − i sin θ (n·σ)`
    /// with `θ ∈ [0, π]`. Returns `(θ, sin θ · n)`; the unnormalized axis is
    /// what stays accurate when `θ` is close to `0` or `π`.
    pub fn su2_axis_angle(&self) -> (T, [T; 3]) {
        let half = T::lit(0.5);
        let u = &self.m;
        let cos_t = (u[0][0].re + u[1][1].re) * half;
        let wz = (u[1][1].im - u[0][0].im) * half;
        let wx = -(u[0][1].im + u[1][0].im) * half;
        let wy = (u[1][0].re - u[0][1].re) * half;
        let sin_t = (wx * wx + wy * wy + wz * wz).sqrt();
        (sin_t.atan2(cos_t), [wx, wy, wz])
    }
}

impl<T: Real> Add for Complex2x2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl<T: Real> Sub for Complex2x2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl<T: Real> Mul for Complex2x2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// `⟨a|b⟩`.
pub fn inner<T: Real>(a: &Spinor<T>, b: &Spinor<T>) -> Complex<T> {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm_sqr<T: Real>(a: &Spinor<T>) -> T {
    a[0].norm_sqr() + a[1].norm_sqr()
}
