use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Linear conversion is refused below this many bits.
pub const LINEAR_FLOOR_LOG2: f64 = -1000.0;

/// A probability held as its base-2 logarithm.
///
/// Probabilities of order 2⁻¹²⁸ and smaller are routine here, so nothing is
/// carried in linear space unless a caller asks for it.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    /// From a base-2 logarithm. Values above zero (rounding noise) are
    /// clamped to probability one.
    pub fn from_log2(log2_value: f64) -> Self {
        debug_assert!(!log2_value.is_nan(), "NaN log-probability");
        LogProb(log2_value.min(0.0))
    }

    pub fn from_ln(ln_value: f64) -> Self {
        Self::from_log2(ln_value / LN_2)
    }

    pub fn from_linear(p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
        Self::from_log2(p.log2())
    }

    pub fn log2(self) -> f64 {
        self.0
    }

    pub fn ln(self) -> f64 {
        self.0 * LN_2
    }

    /// Linear value, or `None` when it would not be representable with
    /// meaningful precision (below 2⁻¹⁰⁰⁰).
    pub fn to_linear(self) -> Option<f64> {
        if self.0 == f64::NEG_INFINITY {
            Some(0.0)
        } else if self.0 > LINEAR_FLOOR_LOG2 {
            Some(self.0.exp2())
        } else {
            None
        }
    }

    /// Linear value, flushing anything unrepresentable to zero.
    pub fn to_linear_lossy(self) -> f64 {
        self.0.exp2()
    }

    /// Whether the probability is at most `2^-bits`.
    pub fn meets_bits(self, bits: f64) -> bool {
        self.0 <= -bits
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{:.4}", self.0)
    }
}

/// Streaming log-sum-exp accumulator over natural-log terms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn ln_total(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}
