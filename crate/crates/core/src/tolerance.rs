use serde::Serialize;

use crate::error::{FeltError, Result};

/// Numerical thresholds realizing the exact limits in floating point.
///
/// Finite spaces compare tabulated values exactly and ignore `tol_zero`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// A continuous-space distance below this counts as zero.
    pub tol_zero: f64,
    /// Bound on `p(x, fx)` and `p(x, x)` for certifying a fixed point.
    pub tol_fixed: f64,
    pub max_iter: usize,
    /// Consecutive sub-`tol_zero` steps required to declare vanishing.
    pub window: usize,
    pub seed: u64,
    /// Points drawn per sampled check.
    pub sample_count: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_zero: 1e-12,
            tol_fixed: 1e-9,
            max_iter: 10_000,
            window: 3,
            seed: 0,
            sample_count: 2000,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(FeltError::InvalidTolerance(m));
        if !(self.tol_zero > 0.0 && self.tol_zero.is_finite()) {
            return bad(format!("tol_zero must be positive, got {}", self.tol_zero));
        }
        if !(self.tol_fixed > 0.0 && self.tol_fixed.is_finite()) {
            return bad(format!(
                "tol_fixed must be positive, got {}",
                self.tol_fixed
            ));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        if self.sample_count == 0 {
            return bad("sample_count must be at least 1".into());
        }
        Ok(())
    }
}
