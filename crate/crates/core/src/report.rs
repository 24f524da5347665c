use std::fmt;

/// Result of one named numerical check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Measured error (or measured value) behind the verdict.
    pub measured: f64,
    /// Threshold the measurement was compared against.
    pub threshold: f64,
}

impl CheckOutcome {
    /// Passes when `measured <= threshold` (NaN fails).
    pub fn within(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: measured <= threshold,
            measured,
            threshold,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, measured: f64, threshold: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            measured,
            threshold,
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<56} measured {:.3e} (limit {:.3e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold
        )
    }
}
