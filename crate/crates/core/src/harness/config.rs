use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::ToleranceConfig;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub n_plus: usize,
    pub n_minus: usize,
    /// Subspace dimension; `None` selects the index-zero stratum `k = n_plus`.
    pub k: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    /// Schatten order for defect reports; `f64::INFINITY` for the operator norm.
    #[serde(serialize_with = "super::report::serialize_order")]
    pub schatten_order: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n_plus: 4,
            n_minus: 4,
            k: None,
            trials: 100,
            seed: 7,
            tolerances: ToleranceConfig::default(),
            schatten_order: 2.0,
        }
    }
}

impl SuiteConfig {
    pub fn n(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(self.n_plus)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_plus == 0 {
            return Err(Error::Config("n_plus must be at least 1".into()));
        }
        let k = self.k();
        if k == 0 || k > self.n() {
            return Err(Error::Config(format!(
                "k = {k} must lie in 1..={}",
                self.n()
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.schatten_order.is_nan() || self.schatten_order < 1.0 {
            return Err(Error::Config(format!(
                "Schatten order {} must be >= 1",
                self.schatten_order
            )));
        }
        self.tolerances.validate()
    }
}
