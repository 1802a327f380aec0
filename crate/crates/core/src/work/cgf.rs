//! Cumulant-generating functions per unit length.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ising::spectrum::SpectrumTable;
use crate::scalar::{cplx, log_add_exp, Real};
use crate::work::quadrature::{asymptotic_nodes, integrate, QuadNode};

/// Number of drive periods, or the stationary limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Periods {
    Finite(u64),
    Infinite,
}

/// Inverse temperature; `Infinite` is the exact zero-temperature branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Beta<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Beta<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Beta::Finite(b) if !(*b > T::zero()) || !b.is_finite() => {
                Err(invalid("beta", format!("{b} must be positive and finite")))
            }
            _ => Ok(()),
        }
    }

    /// Fermi factor `1/(e^{2βE} + 1)` and its logarithm.
    fn fermi(&self, e: T) -> (T, T) {
        match self {
            Beta::Infinite => (T::zero(), T::neg_infinity()),
            Beta::Finite(b) => {
                let x = T::lit(2.0) * *b * e;
                let ln_f = -(x + (-x).exp().ln_1p());
                (ln_f.exp(), ln_f)
            }
        }
    }

    /// `tanh(βE)`, equal to 1 at zero temperature.
    fn tanh(&self, e: T) -> T {
        match self {
            Beta::Infinite => T::one(),
            Beta::Finite(b) => (*b * e).tanh(),
        }
    }
}

/// A sampled CGF curve in the Laplace domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgfCurve<T> {
    pub s: Vec<T>,
    pub values: Vec<T>,
    pub periods: Periods,
}

/// `sin²(μ n τ)`.
fn sin2_periods<T: Real>(theta: T, n: u64) -> T {
    // reduce in f64 so single-precision tables keep the phase at large n
    let phase = (theta.as_f64() * n as f64) % std::f64::consts::PI;
    let s = T::lit(phase).sin();
    s * s
}

/// `ln G_{nτ}(is)/L` at zero temperature, midpoint rule on the table grid.
pub fn cgf_finite_n<T: Real>(table: &SpectrumTable<T>, n: u64, s: T) -> Result<T> {
    if !(s >= T::zero()) {
        return Err(invalid("s", format!("{s} must be non-negative")));
    }
    let tau = table.period();
    let dk = table.spacing();
    let mut acc = T::zero();
    for m in &table.modes {
        let y = m.xi * sin2_periods(m.mu * tau, n) * -(-T::lit(2.0) * s * m.energy).exp_m1();
        if !(y < T::one()) {
            return Err(Error::NumericalDomain(format!(
                "log argument {} at k = {}",
                T::one() - y,
                m.k
            )));
        }
        acc += (-y).ln_1p();
    }
    Ok(acc * dk / T::TAU())
}

/// Per-node `2 ln[(1 + √(d² + ξ e^{−2sE}))/2]`.
#[inline]
fn asymptotic_term<T: Real>(n: &QuadNode<T>, s: T) -> T {
    let two = T::lit(2.0);
    // y = ξ(1 − e^{−2sE}); exact zero at s = 0
    let y = n.xi * -(-two * s * n.energy).exp_m1();
    let root = if y < T::lit(0.5) {
        (T::one() - y).sqrt()
    } else {
        (n.abs_d * n.abs_d + n.xi * (-two * s * n.energy).exp()).sqrt()
    };
    -resummed_log(y, root)
}

/// `f(y) = Σ_{m≥1} C(2m,m) y^m / (4^m m) = −2 ln[(1 + √(1−y))/2]`, given
/// `root = √(1−y)` (callers may have a more accurate root than `1 − y`).
#[inline]
fn resummed_log<T: Real>(y: T, root: T) -> T {
    let two = T::lit(2.0);
    // −2 ln(1 − y/(2(1 + √(1−y)))), no cancellation at small y
    -two * (-y / (two * (T::one() + root))).ln_1p()
}

/// Closed form of the time-averaged series `Σ_{m≥1} C(2m,m) ξ^m/(4^m m)`,
/// i.e. `−2 ln[(1 + √(1−ξ))/2]`, for `ξ ∈ [0, 1]`.
pub fn stationary_series<T: Real>(xi: T) -> Result<T> {
    if !(xi >= T::zero() && xi <= T::one()) {
        return Err(invalid("xi", format!("{xi} not in [0, 1]")));
    }
    Ok(resummed_log(xi, (T::one() - xi).sqrt()))
}

/// Stationary `ln G_∞(is)/L`, for any real `s`.
pub fn cgf_asymptotic<T: Real>(table: &SpectrumTable<T>, s: T) -> T {
    let nodes = asymptotic_nodes(table, s);
    integrate(&nodes, |n| asymptotic_term(n, s))
}

/// `g_∞ = 2∫ ln[(1 + √(1 − ξ))/2] dk/2π`, the large-`s` plateau.
pub fn fidelity_plateau<T: Real>(table: &SpectrumTable<T>) -> T {
    let nodes = asymptotic_nodes(table, T::zero());
    plateau_on(&nodes)
}

fn plateau_on<T: Real>(nodes: &[QuadNode<T>]) -> T {
    integrate(nodes, |n| {
        T::lit(2.0) * ((T::one() + n.abs_d) * T::lit(0.5)).ln()
    })
}

/// `ln(ln G_∞(is)/L − g_∞)`, evaluated term by term in log space so it stays
/// finite when the excess itself underflows. Requires `s > 0`.
pub fn log_excess<T: Real>(table: &SpectrumTable<T>, s: T) -> Result<T> {
    if !(s > T::zero()) {
        return Err(invalid("s", format!("{s} must be positive")));
    }
    let nodes = asymptotic_nodes(table, s);
    let two = T::lit(2.0);
    let mut acc = T::neg_infinity();
    for n in &nodes {
        if !(n.xi > T::zero()) || !(n.weight > T::zero()) {
            continue;
        }
        let ln_x = -two * s * n.energy;
        let ln_xi_x = n.xi.ln() + ln_x;
        let ln_c = n.abs_d.ln();
        // ln(√(d² + ξx) + |d|)
        let ln_root = log_add_exp(two * ln_c, ln_xi_x) * T::lit(0.5);
        let ln_den = log_add_exp(ln_root, ln_c);
        // z = ξx / ((√(d²+ξx) + |d|)(1 + |d|)); term = 2 ln(1 + z)
        let ln_z = ln_xi_x - ln_den - n.abs_d.ln_1p();
        let ln_log1p = if ln_z < T::lit(-18.0) {
            ln_z + (-(ln_z.exp()) * T::lit(0.5)).ln_1p()
        } else {
            ln_z.exp().ln_1p().ln()
        };
        acc = log_add_exp(acc, n.weight.ln() + two.ln() + ln_log1p);
    }
    if acc == T::neg_infinity() {
        return Err(Error::NumericalDomain("excess vanishes identically".into()));
    }
    Ok(acc - T::TAU().ln())
}

/// CGF curve over an `s` grid, evaluated in parallel.
pub fn cgf_curve<T: Real>(
    table: &SpectrumTable<T>,
    periods: Periods,
    s: &[T],
) -> Result<CgfCurve<T>> {
    let values = s
        .par_iter()
        .map(|&si| match periods {
            Periods::Finite(n) => cgf_finite_n(table, n, si),
            Periods::Infinite => Ok(cgf_asymptotic(table, si)),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CgfCurve {
        s: s.to_vec(),
        values,
        periods,
    })
}

/// Characteristic function `ln G_{nτ}(u)/L` at inverse temperature `β`;
/// `u` may be complex (e.g. `u = iβ` for the Jarzynski check).
pub fn cgf_finite_t<T: Real>(
    table: &SpectrumTable<T>,
    n: u64,
    u: Complex<T>,
    beta: Beta<T>,
) -> Result<Complex<T>> {
    beta.validate()?;
    let tau = table.period();
    let dk = table.spacing();
    let one = cplx(T::one(), T::zero());
    let two_i = cplx(T::zero(), T::lit(2.0));
    let mut acc = cplx(T::zero(), T::zero());
    for m in &table.modes {
        let (f, ln_f) = beta.fermi(m.energy);
        let e = cplx(m.energy, T::zero());
        // (1 − e^{2iuE})(1 − f) + f − e^{−2iuE + ln f}
        let a = (one - (two_i * u * e).exp()) * (T::one() - f);
        let b = if f > T::zero() {
            cplx(f, T::zero()) - (-two_i * u * e + cplx(ln_f, T::zero())).exp()
        } else {
            cplx(T::zero(), T::zero())
        };
        let factor = one - (a + b) * (m.xi * sin2_periods(m.mu * tau, n));
        if !(factor.norm() > T::lit(1e-300)) || !factor.re.is_finite() || !factor.im.is_finite() {
            return Err(Error::NumericalDomain(format!(
                "per-mode factor {factor} at k = {}",
                m.k
            )));
        }
        acc += factor.ln();
    }
    Ok(acc * (dk / T::TAU()))
}

pub(crate) fn tanh_factor<T: Real>(beta: &Beta<T>, e: T) -> T {
    beta.tanh(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{build_spectrum, DriveProtocol};
    use crate::numerics::IntegratorConfig;
    use crate::work::quadrature::grid_nodes;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn critical() -> &'static SpectrumTable<f64> {
        static T: OnceLock<SpectrumTable<f64>> = OnceLock::new();
        T.get_or_init(|| {
            let p = DriveProtocol::<f64>::sinusoidal(1.0, 1.0, 2.0, 0.0).unwrap();
            build_spectrum(&p, 1000, &IntegratorConfig::default()).unwrap()
        })
    }

    fn static_table() -> SpectrumTable<f64> {
        let p = DriveProtocol::<f64>::constant(0.6, 1.5).unwrap();
        build_spectrum(&p, 64, &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn normalization() {
        let t = critical();
        assert_eq!(cgf_finite_n(t, 7, 0.0).unwrap(), 0.0);
        assert_eq!(cgf_asymptotic(t, 0.0), 0.0);
        let z = cgf_finite_t(t, 3, cplx(0.0, 0.0), Beta::Finite(2.0)).unwrap();
        assert_eq!(z, cplx(0.0, 0.0));
        assert!(cgf_finite_n(t, 1, -1.0).is_err());
    }

    #[test]
    fn static_drive_is_trivial() {
        let t = static_table();
        for s in [0.5, 3.0, 20.0] {
            assert!(cgf_finite_n(&t, 5, s).unwrap().abs() < 1e-15);
            assert!(cgf_asymptotic(&t, s).abs() < 1e-15);
        }
    }

    #[test]
    fn monotone_and_non_positive() {
        let t = critical();
        let s: Vec<f64> = (0..40).map(|i| 0.5 * i as f64).collect();
        for periods in [Periods::Finite(1), Periods::Finite(5), Periods::Infinite] {
            let c = cgf_curve(t, periods, &s).unwrap();
            for w in c.values.windows(2) {
                assert!(w[1] <= w[0] + 1e-15);
            }
            assert!(c.values.iter().all(|&v| v <= 0.0));
        }
    }

    #[test]
    fn plateau_at_large_s() {
        let t = critical();
        let g = fidelity_plateau(t);
        assert!((cgf_asymptotic(t, 1e6) - g).abs() < 1e-8);
        assert!(g < 0.0);
    }

    #[test]
    fn time_average_matches_stationary_limit() {
        let t = critical();
        for s in [0.5, 1.0, 5.0] {
            let avg: f64 = (10_000..=10_100)
                .map(|n| cgf_finite_n(t, n, s).unwrap())
                .sum::<f64>()
                / 101.0;
            let grid_value = {
                let nodes = grid_nodes(t);
                integrate(&nodes, |n| asymptotic_term(n, s))
            };
            assert!(
                (avg - grid_value).abs() < 1e-3,
                "s = {s}: {avg} vs {grid_value}"
            );
            assert!((avg - cgf_asymptotic(t, s)).abs() < 1e-3);
        }
    }

    #[test]
    fn log_excess_matches_direct_difference() {
        let t = critical();
        let g = fidelity_plateau(t);
        for s in [0.5, 2.0, 5.0] {
            let direct = cgf_asymptotic(t, s) - g;
            let via_log = log_excess(t, s).unwrap().exp();
            // node sets differ only below the floor
            assert!(
                (direct - via_log).abs() < 1e-6 * direct.abs().max(1e-8),
                "s {s}: {direct} vs {via_log}"
            );
        }
        let deep = log_excess(t, 400.0).unwrap();
        assert!(deep.is_finite() && deep < -100.0);
    }

    #[test]
    fn jarzynski_at_imaginary_argument() {
        let t = critical();
        for beta in [0.3, 1.0, 4.0] {
            for n in [1, 7, 40] {
                let z = cgf_finite_t(t, n, cplx(0.0, beta), Beta::Finite(beta)).unwrap();
                assert!(z.norm() < 1e-10, "beta {beta} n {n}: {z}");
            }
        }
    }

    #[test]
    fn zero_temperature_limit() {
        let p = DriveProtocol::<f64>::sinusoidal(1.6, 1.0, 2.0, 0.0).unwrap();
        let t = build_spectrum(&p, 128, &IntegratorConfig::default()).unwrap();
        assert!(t.min_energy() >= 0.1);
        for u in [0.3, 1.7] {
            let a = cgf_finite_t(&t, 4, cplx(u, 0.0), Beta::Finite(200.0)).unwrap();
            let b = cgf_finite_t(&t, 4, cplx(u, 0.0), Beta::Infinite).unwrap();
            assert!((a - b).norm() < 1e-8);
        }
        // Laplace branch: u = is at T = 0 reproduces the real CGF
        let z = cgf_finite_t(&t, 4, cplx(0.0, 1.3), Beta::Infinite).unwrap();
        assert!((z.re - cgf_finite_n(&t, 4, 1.3).unwrap()).abs() < 1e-13);
        assert!(z.im.abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_beta() {
        let t = static_table();
        assert!(cgf_finite_t(&t, 1, cplx(0.1, 0.0), Beta::Finite(0.0)).is_err());
        assert!(cgf_finite_t(&t, 1, cplx(0.1, 0.0), Beta::Finite(f64::NAN)).is_err());
    }

    /// `−Σ_{m≤M} C(2m,m) ξ^m / (4^m m)` against `2 ln[(1 + √(1−ξ))/2]`.
    fn series(xi: f64, terms: usize) -> f64 {
        let mut c = 1.0; // C(2m,m)/4^m
        let mut p = 1.0;
        let mut acc = 0.0;
        for m in 1..=terms {
            c *= (2 * m - 1) as f64 / (2 * m) as f64;
            p *= xi;
            acc -= c * p / m as f64;
        }
        acc
    }

    proptest! {
        #[test]
        fn binomial_series_resums_to_log(xi in 0.0f64..0.999) {
            // remainder ≤ ξ^{M+1}/((M+1)(1−ξ)); choose M so it is below 1e-10
            let mut m = 1usize;
            while xi.powi(m as i32 + 1) / ((m + 1) as f64 * (1.0 - xi)) > 1e-10 {
                m += 1;
            }
            let exact = 2.0 * ((1.0 + (1.0 - xi).sqrt()) / 2.0).ln();
            prop_assert!((series(xi, m) - exact).abs() < 1e-8);
            prop_assert!((series(xi, m) + stationary_series(xi).unwrap()).abs() < 1e-8);
        }
    }
}
