use serde::{Deserialize, Serialize};

use super::SpecError;

/// Log-scale location and shape of a lognormal distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl LognormalParams {
    /// Moment matching: the lognormal with these parameters has exactly the
    /// requested arithmetic mean and standard deviation.
    ///
    /// `mu = ln(mean² / sqrt(sd² + mean²))`, `sigma = sqrt(ln(1 + sd²/mean²))`.
    pub fn from_mean_sd(mean: f64, sd: f64) -> Result<Self, SpecError> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(SpecError::new("mean", "must be > 0"));
        }
        if !(sd.is_finite() && sd >= 0.0) {
            return Err(SpecError::new("sd", "must be >= 0"));
        }
        let variance_ratio = (sd / mean).powi(2);
        let mu = (mean * mean / (sd * sd + mean * mean).sqrt()).ln();
        let sigma = variance_ratio.ln_1p().sqrt();
        Ok(LognormalParams { mu, sigma })
    }

    /// Analytic mean, `exp(mu + sigma²/2)`.
    pub fn mean(&self) -> f64 {
        (self.mu + 0.5 * self.sigma * self.sigma).exp()
    }

    /// Analytic standard deviation.
    pub fn sd(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        (s2.exp_m1() * (2.0 * self.mu + s2).exp()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_sd_is_degenerate() {
        let p = LognormalParams::from_mean_sd(7.5, 0.0).unwrap();
        assert_eq!(p.sigma, 0.0);
        assert!((p.mu - 7.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn mean_ten_sd_ten() {
        // mu = ln(100 / sqrt(200)), sigma = sqrt(ln 2)
        let p = LognormalParams::from_mean_sd(10.0, 10.0).unwrap();
        assert!((p.mu - 1.956_011_502_714_073).abs() < 1e-12);
        assert!((p.sigma - 0.832_554_611_157_697_8).abs() < 1e-12);
        assert!((p.mu - 1.95601).abs() < 1e-5);
        assert!((p.sigma - 0.83255).abs() < 1e-5);
    }

    #[test]
    fn non_positive_mean_rejected() {
        assert!(LognormalParams::from_mean_sd(0.0, 1.0).is_err());
        assert!(LognormalParams::from_mean_sd(-3.0, 1.0).is_err());
        assert!(LognormalParams::from_mean_sd(3.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn analytic_moments_round_trip(mean in 1e-3f64..1e4, cv in 0.0f64..5.0) {
            let sd = mean * cv;
            let p = LognormalParams::from_mean_sd(mean, sd).unwrap();
            prop_assert!((p.mean() - mean).abs() <= 1e-12 * mean.max(1.0) * 10.0);
            prop_assert!((p.sd() - sd).abs() <= 1e-9 * mean.max(1.0));
            prop_assert_eq!(p.sigma == 0.0, sd == 0.0);
        }
    }
}
