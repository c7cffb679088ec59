use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters shared by the estimators and the permutation test.
#[derive(Clone, Debug, Serialize)]
pub struct EstimatorConfig {
    /// Neighbour count for the kNN estimators.
    pub k: usize,
    /// Number of permutations drawn by the permutation test.
    pub permutations: usize,
    /// Significance level in (0, 1).
    pub alpha: f64,
    /// CMI threshold (nats) below which the hybrid test may skip permutations.
    pub shortcut_threshold: f64,
    /// Base seed; all sub-streams are derived from it.
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            k: 3,
            permutations: 200,
            alpha: 0.05,
            shortcut_threshold: 0.001,
            seed: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if self.permutations == 0 {
            return Err(Error::InvalidParameter("permutation count must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.shortcut_threshold >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shortcut threshold must be >= 0, got {}",
                self.shortcut_threshold
            )));
        }
        Ok(())
    }

    /// Validate against a concrete sample size: the estimators need 1 <= k < n.
    pub fn validate_for_n(&self, n: usize) -> Result<()> {
        self.validate()?;
        if self.k >= n {
            return Err(Error::BadNeighborCount { k: self.k, n });
        }
        Ok(())
    }
}

/// Outcome of a single conditional-independence test.
///
/// For the permutation test `statistic` is the CMI estimate in nats and
/// `p_value` lies on the grid {1/(T+1), ..., 1}. For the Fisher-z test
/// `statistic` is the z-transformed partial correlation and `p_value` is the
/// two-sided normal tail. A shortcut result carries the CMI estimate with
/// `permutation_count == 0`.
#[derive(Clone, Debug, Serialize)]
pub struct CITestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub independent: bool,
    pub used_shortcut: bool,
    pub permutation_count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let cfg = EstimatorConfig::default();
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.permutations, 200);
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.shortcut_threshold, 0.001);
        cfg.validate().unwrap();
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let mut cfg = EstimatorConfig::default();
        cfg.alpha = 1.0;
        assert!(cfg.validate().is_err());

        let mut cfg = EstimatorConfig::default();
        cfg.k = 0;
        assert!(cfg.validate().is_err());

        let cfg = EstimatorConfig::default();
        assert!(cfg.validate_for_n(3).is_err());
        assert!(cfg.validate_for_n(4).is_ok());
    }
}
