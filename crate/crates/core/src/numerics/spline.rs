//! Periodic cubic spline on a uniform grid, and Romberg quadrature.

use crate::error::{invalid, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline<T: Real> {
    period: T,
    h: T,
    y: Vec<T>,
    /// Second derivatives at the knots.
    m: Vec<T>,
    /// `cum[i]` = integral from 0 to knot `i`; `cum[n]` is the full period.
    cum: Vec<T>,
}

impl<T: Real> PeriodicSpline<T> {
    /// Knots at `t_i = i·period/n`, `i = 0..n`, with `y(t + period) = y(t)`.
    pub fn new(samples: &[T], period: T) -> Result<Self> {
        let n = samples.len();
        if n < 4 {
            return Err(invalid("samples", format!("{n} samples, need at least 4")));
        }
        if !(period > T::zero()) {
            return Err(invalid("period", "must be positive"));
        }
        let h = period / T::from_usize_lossy(n);
        let six_over_h2 = T::lit(6.0) / (h * h);
        let rhs: Vec<T> = (0..n)
            .map(|i| {
                let prev = samples[(i + n - 1) % n];
                let next = samples[(i + 1) % n];
                (next - T::lit(2.0) * samples[i] + prev) * six_over_h2
            })
            .collect();
        let m = solve_cyclic_141(&rhs);
        let mut s = Self {
            period,
            h,
            y: samples.to_vec(),
            m,
            cum: Vec::new(),
        };
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(T::zero());
        for i in 0..n {
            let seg = s.segment_integral(i, h);
            cum.push(cum[i] + seg);
        }
        s.cum = cum;
        Ok(s)
    }

    pub fn period(&self) -> T {
        self.period
    }

    fn locate(&self, t: T) -> (usize, T) {
        let n = self.y.len();
        let tt = t - (t / self.period).floor() * self.period;
        let mut i = (tt / self.h).floor().to_usize().unwrap_or(0);
        if i >= n {
            i = n - 1;
        }
        (i, tt - self.h * T::from_usize_lossy(i))
    }

    pub fn eval(&self, t: T) -> T {
        let n = self.y.len();
        let (i, a) = self.locate(t);
        let j = (i + 1) % n;
        let h = self.h;
        let b = h - a;
        let six = T::lit(6.0);
        self.m[i] * b * b * b / (six * h)
            + self.m[j] * a * a * a / (six * h)
            + (self.y[i] / h - self.m[i] * h / six) * b
            + (self.y[j] / h - self.m[j] * h / six) * a
    }

    /// Integral over `[t_i, t_i + a]` within segment `i`.
    fn segment_integral(&self, i: usize, a: T) -> T {
        let n = self.y.len();
        let j = (i + 1) % n;
        let h = self.h;
        let b = h - a;
        let c24 = T::lit(24.0);
        let six = T::lit(6.0);
        let half = T::lit(0.5);
        self.m[i] * (h.powi(4) - b.powi(4)) / (c24 * h)
            + self.m[j] * a.powi(4) / (c24 * h)
            + (self.y[i] / h - self.m[i] * h / six) * (h * h - b * b) * half
            + (self.y[j] / h - self.m[j] * h / six) * a * a * half
    }

    /// `∫_0^t y(t') dt'` for any real `t`.
    pub fn integral_to(&self, t: T) -> T {
        let n = self.y.len();
        let periods = (t / self.period).floor();
        let (i, a) = self.locate(t);
        periods * self.cum[n] + self.cum[i] + self.segment_integral(i, a)
    }

    pub fn integral_over_period(&self) -> T {
        self.cum[self.y.len()]
    }

    pub fn samples(&self) -> &[T] {
        &self.y
    }
}

/// Solves the cyclic system `M_{i-1} + 4 M_i + M_{i+1} = r_i`.
fn solve_cyclic_141<T: Real>(r: &[T]) -> Vec<T> {
    let n = r.len();
    let four = T::lit(4.0);
    // Sherman–Morrison: A = B + u vᵀ with u = (γ,0,…,1), v = (1,0,…,1/γ)
    let gamma = -four;
    let mut diag = vec![four; n];
    diag[0] = four - gamma;
    diag[n - 1] = four - T::one() / gamma;
    let solve = |rhs: &[T]| -> Vec<T> {
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        c[0] = T::one() / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..n {
            let denom = diag[i] - c[i - 1];
            c[i] = T::one() / denom;
            d[i] = (rhs[i] - d[i - 1]) / denom;
        }
        let mut x = vec![T::zero(); n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    };
    let x = solve(r);
    let mut u = vec![T::zero(); n];
    u[0] = gamma;
    u[n - 1] = T::one();
    let z = solve(&u);
    let fact = (x[0] + x[n - 1] / gamma) / (T::one() + z[0] + z[n - 1] / gamma);
    x.iter().zip(&z).map(|(&xi, &zi)| xi - fact * zi).collect()
}

/// Romberg integration of `f` over `[a, b]`. Returns `(value, error estimate)`.
pub fn romberg<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T, max_levels: usize) -> (T, T) {
    let mut prev: Vec<T> = vec![(f(a) + f(b)) * (b - a) * T::lit(0.5)];
    let mut err = T::infinity();
    for level in 1..max_levels.max(2) {
        let n = 1usize << (level - 1);
        let h = (b - a) / T::from_usize_lossy(2 * n);
        let mut s = T::zero();
        for i in 0..n {
            s += f(a + h * T::from_usize_lossy(2 * i + 1));
        }
        let mut row = Vec::with_capacity(level + 1);
        row.push(prev[0] * T::lit(0.5) + s * h);
        let mut p4 = T::one();
        for j in 1..=level {
            p4 *= T::lit(4.0);
            let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / (p4 - T::one());
            row.push(v);
        }
        err = (row[level] - prev[level - 1]).abs();
        let best = row[level];
        prev = row;
        if err <= tol * best.abs().max(T::one()) && level >= 4 {
            break;
        }
    }
    (prev[prev.len() - 1], err)
}
