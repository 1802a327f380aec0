//! Bessel functions of the first kind, integer order.

use crate::scalar::Real;

/// Below this argument the ascending series is summed directly; its largest
/// term stays O(1) so there is no cancellation.
const SERIES_CUTOFF: f64 = 4.0;

/// `J_l(x)` for `l ≤ 20`, `|x| ≤ 100`, absolute error below `1e-12` in `f64`.
pub fn bessel_j<T: Real>(l: u32, x: T) -> T {
    if x < T::zero() {
        let v = bessel_j(l, -x);
        return if l % 2 == 1 { -v } else { v };
    }
    if x == T::zero() {
        return if l == 0 { T::one() } else { T::zero() };
    }
    if x < T::lit(SERIES_CUTOFF) {
        ascending_series(l, x)
    } else {
        miller(l, x)
    }
}

fn ascending_series<T: Real>(l: u32, x: T) -> T {
    let half = x * T::lit(0.5);
    let q = -half * half;
    // (x/2)^l / l!
    let mut term = T::one();
    for j in 1..=l {
        term = term * half / T::lit(j as f64);
    }
    let mut sum = term;
    for m in 1..200u32 {
        term = term * q / (T::lit(m as f64) * T::lit((m + l) as f64));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() * T::lit(0.01) {
            break;
        }
    }
    sum
}

/// Downward recurrence normalized with `J_0 + 2 Σ J_{2k} = 1`.
fn miller<T: Real>(l: u32, x: T) -> T {
    let xf = x.as_f64();
    let m = (l as f64).max(xf);
    let mut start = (m + 20.0 + (40.0 * m).sqrt()).ceil() as u32;
    if start % 2 == 1 {
        start += 1;
    }
    let two_over_x = T::lit(2.0) / x;
    let big = T::lit(1e30);
    let mut j_next = T::zero();
    let mut j_cur = T::lit(1e-30);
    let mut norm = T::zero();
    let mut wanted = T::zero();
    let mut k = start;
    loop {
        if k == l {
            wanted = j_cur;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { j_cur } else { T::lit(2.0) * j_cur };
        }
        if k == 0 {
            break;
        }
        let j_prev = T::lit(k as f64) * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        k -= 1;
        if j_cur.abs() > big {
            let s = T::one() / big;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            wanted *= s;
        }
    }
    wanted / norm
}

/// The first `count` positive zeros of `J_l`, by bracketing and bisection.
pub fn bessel_j_zeros<T: Real>(l: u32, count: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(count);
    let step = T::lit(0.05);
    let mut a = T::lit(1e-6);
    let mut fa = bessel_j(l, a);
    while out.len() < count {
        let b = a + step;
        let fb = bessel_j(l, b);
        if fa == T::zero() && a > T::lit(1e-3) {
            out.push(a);
        } else if fa * fb < T::zero() {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = (lo + hi) * T::lit(0.5);
                let fm = bessel_j(l, mid);
                if fm * flo <= T::zero() {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                if hi - lo <= T::epsilon() * hi {
                    break;
                }
            }
            out.push((lo + hi) * T::lit(0.5));
        }
        a = b;
        fa = fb;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `J_n(x) = (1/π) ∫_0^π cos(nτ − x sin τ) dτ`; the trapezoid rule on this
    /// periodic integrand converges geometrically once the node count
    /// exceeds `x + n`.
    fn integral_oracle(n: u32, x: f64) -> f64 {
        let m = 2 * ((x.abs() as usize) + n as usize + 64);
        let h = PI / m as f64;
        let mut s = 0.0;
        for i in 0..=m {
            let t = i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += w * (n as f64 * t - x * t.sin()).cos();
        }
        s * h / PI
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0f64), 1.0);
        assert_eq!(bessel_j(1, 0.0f64), 0.0);
        assert_eq!(bessel_j(7, 0.0f64), 0.0);
    }

    #[test]
    fn second_zero_of_j0_matches_cdt_frequency() {
        assert!(bessel_j(0, 5.5201f64).abs() < 1e-4);
        // 2A/ω₀ with A = 1, ω₀ = 0.3623
        assert!(bessel_j(0, 2.0f64 / 0.3623).abs() < 1e-4);
    }

    #[test]
    fn agrees_with_integral_representation() {
        let mut worst = 0.0f64;
        for l in 0..=20u32 {
            for i in 0..=400 {
                let x = -100.0 + 0.5 * i as f64 + 0.013 * l as f64;
                let err = (bessel_j(l, x) - integral_oracle(l, x)).abs();
                worst = worst.max(err);
            }
        }
        assert!(worst < 1e-12, "worst abs error {worst:e}");
    }

    #[test]
    fn known_zeros() {
        let z: Vec<f64> = bessel_j_zeros(0, 3);
        let reference = [
            2.404_825_557_695_773,
            5.520_078_110_286_311,
            8.653_727_912_911_013,
        ];
        for (a, b) in z.iter().zip(reference) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let z1: Vec<f64> = bessel_j_zeros(1, 1);
        assert!((z1[0] - 3.831_705_970_207_512).abs() < 1e-12);
    }

    #[test]
    fn f32_accuracy() {
        let v = bessel_j(2, 3.0f32);
        assert!((v as f64 - integral_oracle(2, 3.0)).abs() < 1e-6);
    }
}
