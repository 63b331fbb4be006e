//! Work budgets for the brute-force paths.
//!
//! Every exhaustive computation estimates its cost up front and refuses to
//! start when the estimate exceeds [`WorkLimits::ops`].

use crate::error::{Error, Result};

/// 3^16: one full scan of the 4x4 matrices over F_3, or of F_3^16.
pub const DEFAULT_OPS: u64 = 43_046_721;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkLimits {
    pub ops: u64,
}

impl Default for WorkLimits {
    fn default() -> Self {
        WorkLimits { ops: DEFAULT_OPS }
    }
}

impl WorkLimits {
    pub fn new(ops: u64) -> Self {
        WorkLimits { ops }
    }

    pub fn unlimited() -> Self {
        WorkLimits { ops: u64::MAX }
    }

    /// Fails with a capacity error when `cost` (saturating) exceeds the budget.
    pub fn check(&self, what: &str, cost: u128, hint: &str) -> Result<()> {
        if cost > self.ops as u128 {
            let mut msg = format!("{what} needs ~{cost} operations, limit is {}", self.ops);
            if !hint.is_empty() {
                msg.push_str("; ");
                msg.push_str(hint);
            }
            return Err(Error::Capacity(msg));
        }
        Ok(())
    }
}

/// Saturating `base^exp` in u128.
pub(crate) fn pow_sat(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
