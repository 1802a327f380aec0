//! Ordinary least squares on a line and on log-log power laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    /// Model-dependent; see the constructing function.
    pub coefficients: Vec<T>,
    /// One standard error per coefficient (from the residual variance).
    pub std_errors: Vec<T>,
    /// Euclidean norm of the residual vector in the fitted coordinates.
    pub residual_norm: T,
    pub window: (T, T),
}

/// Line `y = a + b x`; coefficients are `[a, b]`.
pub fn fit_linear<T: Real>(xs: &[T], ys: &[T]) -> Result<FitResult<T>> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateFit(format!(
            "length mismatch: {} xs vs {} ys",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} points, need at least 3",
            xs.len()
        )));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        if xs.iter().all(|&x| x == xs[0]) {
            return Err(Error::DegenerateFit("all abscissae equal".into()));
        }
        return Err(Error::DegenerateFit(
            "abscissae not strictly increasing".into(),
        ));
    }
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == T::zero() {
        return Err(Error::DegenerateFit("zero spread in abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .fold(T::zero(), |a, r| a + r);
    let sigma2 = rss / (n - T::lit(2.0));
    let se_slope = (sigma2 / sxx).sqrt();
    let se_intercept = (sigma2 * (T::one() / n + mx * mx / sxx)).sqrt();
    Ok(FitResult {
        coefficients: vec![intercept, slope],
        std_errors: vec![se_intercept, se_slope],
        residual_norm: rss.sqrt(),
        window: (xs[0], xs[xs.len() - 1]),
    })
}

/// Power law `y ≈ D / s^b` fitted as a line in log-log coordinates;
/// coefficients are `[D, b]`.
pub fn fit_power_law<T: Real>(ss: &[T], ys: &[T]) -> Result<FitResult<T>> {
    if ss.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "{} points, need at least 4",
            ss.len()
        )));
    }
    if ss.iter().chain(ys).any(|&v| !(v > T::zero())) {
        return Err(Error::DegenerateFit(
            "power-law fit needs strictly positive data".into(),
        ));
    }
    let lx: Vec<T> = ss.iter().map(|s| s.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let line = fit_linear(&lx, &ly)?;
    let ln_d = line.coefficients[0];
    let amp = ln_d.exp();
    Ok(FitResult {
        coefficients: vec![amp, -line.coefficients[1]],
        std_errors: vec![amp * line.std_errors[0], line.std_errors[1]],
        residual_norm: line.residual_norm,
        window: (ss[0], ss[ss.len() - 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_line() {
        let f = fit_linear(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((f.coefficients[1] - 2.0f64).abs() < 1e-14);
        assert!((f.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(f.residual_norm < 1e-14);
        assert_eq!(f.window, (0.0, 2.0));
    }

    #[test]
    fn constant_data() {
        let c = 4.25f64;
        let f = fit_linear(&[1.0, 2.0, 3.0], &[c, c, c]).unwrap();
        assert!(f.coefficients[1].abs() < 1e-14);
        assert!((f.coefficients[0] - c).abs() < 1e-14);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            fit_linear(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_linear(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 3.0, 4.0], &[1.0, -2.0, 3.0, 4.0]).is_err());
        assert!(fit_power_law(&[0.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn noisy_line_recovers_slope_within_three_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 2.0 * x + 1.0 + (rng.gen::<f64>() - 0.5) * 0.2)
            .collect();
        let f = fit_linear(&xs, &ys).unwrap();
        assert!((f.coefficients[1] - 2.0).abs() < 3.0 * f.std_errors[1]);
        assert!((f.coefficients[0] - 1.0).abs() < 3.0 * f.std_errors[0]);
    }

    #[test]
    fn exact_power_laws() {
        let ss = [10.0, 20.0, 40.0, 80.0];
        let ys: Vec<f64> = ss.iter().map(|s| 7.0 / s).collect();
        let f = fit_power_law(&ss, &ys).unwrap();
        assert!((f.coefficients[1] - 1.0).abs() < 1e-6);
        assert!((f.coefficients[0] - 7.0).abs() < 1e-6);

        let ss: Vec<f64> = (0..12).map(|i| 10f64.powf(1.0 + i as f64 / 6.0)).collect();
        let ys: Vec<f64> = ss.iter().map(|s| 3.0 / s.powi(3)).collect();
        let f = fit_power_law(&ss, &ys).unwrap();
        assert!((f.coefficients[1] - 3.0).abs() < 1e-6);
    }
}
