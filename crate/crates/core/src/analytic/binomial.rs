//! Log-domain binomial probabilities.
//!
//! Single terms use Loader's saddle-point form (Stirling remainder plus the
//! deviance `bd0`), which keeps full relative precision for millions of
//! trials where differences of log-gammas would not. The stream walks the
//! support with the ratio recurrence and re-anchors on an exact term at the
//! mode and every `ANCHOR_STRIDE` steps, so rounding never accumulates over
//! more than a short run.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

pub const DEFAULT_TERM_BUDGET: u64 = 100_000_000;
const ANCHOR_STRIDE: u64 = 512;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling-series remainder `ln Γ(x+1) − (x+½)ln x + x − ln√(2π)`.
fn stirling_error(x: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if x <= 15.0 {
        return libm::lgamma(x + 1.0) - (x + 0.5) * x.ln() + x - LN_SQRT_2PI;
    }
    let xx = x * x;
    if x > 500.0 {
        (S0 - S1 / xx) / x
    } else if x > 80.0 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if x > 35.0 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// Deviance term `x·ln(x/m) + m − x`, computed without cancellation near `x = m`.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln P(B = k)` for `B ~ Binomial(trials, p)`.
pub fn ln_binomial_pmf(k: u64, trials: u64, p: f64) -> f64 {
    if k > trials {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p == 1.0 {
        return if k == trials { 0.0 } else { f64::NEG_INFINITY };
    }
    let n = trials as f64;
    let q = 1.0 - p;
    if k == 0 {
        return n * (-p).ln_1p();
    }
    if k == trials {
        return n * p.ln();
    }
    let x = k as f64;
    let lc = stirling_error(n)
        - stirling_error(x)
        - stirling_error(n - x)
        - deviance(x, n * p)
        - deviance(n - x, n * q);
    let lf = (2.0 * PI).ln() + x.ln() + (-x / n).ln_1p();
    lc - 0.5 * lf
}

/// Mode of `Binomial(trials, p)`.
pub fn binomial_mode(trials: u64, p: f64) -> u64 {
    (((trials + 1) as f64 * p).floor() as u64).min(trials)
}

/// Iterator over `(b, ln pmf(b))` for `b = 0..=trials`.
#[derive(Debug, Clone)]
pub struct LogBinomialPmf {
    trials: u64,
    p: f64,
    mode: u64,
    ln_odds: f64,
    next: u64,
    current: f64,
    done: bool,
}

impl LogBinomialPmf {
    pub fn new(trials: u64, p: f64) -> Result<Self> {
        Self::with_budget(trials, p, DEFAULT_TERM_BUDGET)
    }

    pub fn with_budget(trials: u64, p: f64, budget: u64) -> Result<Self> {
        if trials == 0 {
            return Err(invalid("binomial stream needs at least one trial"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("binomial probability must lie in (0, 1), got {p}")));
        }
        if trials.saturating_add(1) > budget {
            return Err(Error::TermBudget { trials: trials + 1, budget });
        }
        Ok(LogBinomialPmf {
            trials,
            p,
            mode: binomial_mode(trials, p),
            ln_odds: p.ln() - (-p).ln_1p(),
            next: 0,
            current: f64::NAN,
            done: false,
        })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn mode(&self) -> u64 {
        self.mode
    }
}

impl Iterator for LogBinomialPmf {
    type Item = (u64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let b = self.next;
        let value = if b.is_multiple_of(ANCHOR_STRIDE) || b == self.mode || b == self.trials {
            ln_binomial_pmf(b, self.trials, self.p)
        } else {
            // pmf(b) = pmf(b-1) · (trials-b+1)/b · p/(1-p)
            let prev = b - 1;
            self.current + (((self.trials - prev) as f64) / (b as f64)).ln() + self.ln_odds
        };
        self.current = value;
        if b == self.trials {
            self.done = true;
        } else {
            self.next = b + 1;
        }
        Some((b, value))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = if self.done { 0 } else { (self.trials - self.next + 1) as usize };
        (left, Some(left))
    }
}

/// Log-pmf stream for `Binomial(trials, p)` under the default term budget.
pub fn log_binomial_pmf_stream(trials: u64, p: f64) -> Result<LogBinomialPmf> {
    LogBinomialPmf::new(trials, p)
}
