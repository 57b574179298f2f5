//! Least-squares exponent fits on log-log data.

#[allow(unused_imports)]
use crate::math::Float;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; `1` when the values are constant.
    pub r_squared: f64,
    /// Largest absolute residual in `log value`.
    pub max_residual: f64,
}

/// OLS slope of `ln value` against `ln scale`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 2 {
        return Err(Error::Fit(alloc::format!("need at least 2 points, got {}", points.len())));
    }
    for &(s, v) in points {
        if !(s > 0.0 && v > 0.0) || !s.is_finite() || !v.is_finite() {
            return Err(Error::Fit(alloc::format!("scale and value must be positive and finite ({s}, {v})")));
        }
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1.ln() - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all scales coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = points
        .iter()
        .map(|p| (p.1.ln() - (intercept + slope * p.0.ln())).abs())
        .fold(0.0, f64::max);
    let scale = my.abs().max(1.0);
    let r_squared = if syy <= 1e-28 * scale * scale { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(ExponentFit { slope, intercept, r_squared, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_law_is_exact() {
        let pts: alloc::vec::Vec<_> = (1..6).map(|i| (i as f64, (i * i) as f64)).collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_values() {
        let f = fit_exponent(&[(0.125, 3.0), (0.25, 3.0), (0.5, 3.0)]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn perturbed_inverse_square_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: alloc::vec::Vec<_> = (3..8)
            .map(|j| {
                let s = 0.5f64.powi(j);
                let u: f64 = rng.random_range(-0.01..=0.01);
                (s, s.powf(-0.5) * (1.0 + u))
            })
            .collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 0.05, "{}", f.slope);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_exponent(&[(1.0, 1.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
    }
}
