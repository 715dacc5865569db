//! Error bars from the gap between an ideal and a noisy model.
//!
//! Percentages are normalized by the full scale of a Pauli expectation, which
//! spans `[−1, 1]`: a discrepancy of 0.01 means an average deviation of 0.02.

use crate::error::{EqsError, Result};

/// Two-sided 95% quantile of the standard normal distribution.
pub const Z95: f64 = 1.959963984540054;

/// Range of a Pauli expectation value.
pub const FULL_SCALE: f64 = 2.0;

/// Mean `|ideal − noisy|` divided by [`FULL_SCALE`].
pub fn discrepancy(ideal: &[f64], noisy: &[f64]) -> Result<f64> {
    if ideal.len() != noisy.len() {
        return Err(EqsError::DimensionMismatch {
            expected: ideal.len(),
            found: noisy.len(),
        });
    }
    if ideal.is_empty() {
        return Err(EqsError::EmptyRecords);
    }
    let total: f64 = ideal.iter().zip(noisy).map(|(a, b)| (a - b).abs()).sum();
    Ok(total / ideal.len() as f64 / FULL_SCALE)
}

/// Standard deviation of the Gaussian that puts 95% of its mass within `±bound`.
pub fn error_bar(bound: f64) -> Result<f64> {
    if !(bound >= 0.0) || !bound.is_finite() {
        return Err(EqsError::OutOfRange(format!("error bound {bound} must be non-negative")));
    }
    Ok(bound / Z95)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Combination {
    /// `discrepancy + infidelity`
    #[default]
    Additive,
    /// `sqrt(discrepancy² + infidelity²)`, for sensitivity checks.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    pub discrepancy: f64,
    pub preparation_infidelity: f64,
    pub combination: Combination,
}

impl ErrorBudget {
    pub fn new(discrepancy: f64, preparation_infidelity: f64, combination: Combination) -> Result<Self> {
        for v in [discrepancy, preparation_infidelity] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(EqsError::OutOfRange(format!("budget term {v} must be non-negative")));
            }
        }
        Ok(Self {
            discrepancy,
            preparation_infidelity,
            combination,
        })
    }

    pub fn total_bound(&self) -> f64 {
        match self.combination {
            Combination::Additive => self.discrepancy + self.preparation_infidelity,
            Combination::Quadrature => self.discrepancy.hypot(self.preparation_infidelity),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.total_bound() / Z95
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn normal_cdf(x: f64) -> f64 {
        0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(discrepancy(&[0.3, -0.2], &[0.3, -0.2]).unwrap(), 0.0);
        assert_eq!(discrepancy(&[1.0; 4], &[0.0; 4]).unwrap(), 0.5);
        assert!(discrepancy(&[], &[]).is_err());
        assert!(discrepancy(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn error_bar_examples() {
        assert_eq!(error_bar(0.0).unwrap(), 0.0);
        assert!(error_bar(-1e-3).is_err());
        let b = ErrorBudget::new(0.0271, 0.0130, Combination::Additive).unwrap();
        assert!((b.sigma() - 0.020_46).abs() < 1e-5);
        let q = ErrorBudget::new(0.03, 0.04, Combination::Quadrature).unwrap();
        assert!((q.total_bound() - 0.05).abs() < 1e-15);
        assert!(ErrorBudget::new(-0.1, 0.0, Combination::Additive).is_err());
    }

    proptest! {
        #[test]
        fn ninety_five_percent_coverage(b in 1e-6f64..10.0) {
            let sigma = error_bar(b).unwrap();
            let coverage = normal_cdf(b / sigma) - normal_cdf(-b / sigma);
            prop_assert!((coverage - 0.95).abs() < 1e-9);
            prop_assert!(sigma >= 0.0);
        }
    }
}
