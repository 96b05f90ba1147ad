use serde::{Deserialize, Serialize};

use super::binomial::{binomial_mode, LogBinomialPmf, DEFAULT_TERM_BUDGET};
use super::logprob::LogSumExp;
use super::tail::{ln_normal_sf, log_normal_sf};
use super::LogProb;
use crate::error::{invalid, Error, Result};
use crate::params::{ChannelModel, DetectorConfig, RadioModel};

/// How a PMD value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PmdMethod {
    Exact,
    Clt,
    MonteCarlo { trials: u64, ci_low: LogProb, ci_high: LogProb },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmdResult {
    pub pmd: LogProb,
    #[serde(flatten)]
    pub method: PmdMethod,
    /// Upper bound on the mass dropped by optional truncation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discarded_bound: Option<LogProb>,
}

impl PmdResult {
    pub fn exact(pmd: LogProb) -> Self {
        PmdResult { pmd, method: PmdMethod::Exact, discarded_bound: None }
    }

    pub fn clt(pmd: LogProb) -> Self {
        PmdResult { pmd, method: PmdMethod::Clt, discarded_bound: None }
    }

    pub fn monte_carlo(pmd: LogProb, trials: u64, ci_low: LogProb, ci_high: LogProb) -> Self {
        debug_assert!(ci_low <= pmd && pmd <= ci_high);
        PmdResult {
            pmd,
            method: PmdMethod::MonteCarlo { trials, ci_low, ci_high },
            discarded_bound: None,
        }
    }

    pub fn log2(&self) -> f64 {
        self.pmd.log2()
    }
}

/// Mean and per-code variance of the correlator output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltMoments {
    pub mean: f64,
    pub variance: f64,
}

impl CltMoments {
    /// Variance of the average of `w` independent codes.
    pub fn averaged_variance(&self, w: u64) -> f64 {
        self.variance / w as f64
    }
}

/// Knobs for [`pmd_exact_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub term_budget: u64,
    /// Skip terms whose binomial mass is this many bits below the largest
    /// term seen so far. `None` sums every term.
    pub truncate_bits: Option<f64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { term_budget: DEFAULT_TERM_BUDGET, truncate_bits: None }
    }
}

// A term this far (in nats) below a known term cannot change an f64 sum,
// even summed over 2^64 of them.
const NEGLIGIBLE_NATS: f64 = 790.0;

fn check_inputs(radio: &RadioModel, channel: &ChannelModel) -> Result<()> {
    radio.validate()?;
    channel.validate()?;
    if channel.signal_power <= 0.0 {
        return Err(invalid("signal power must be > 0 for the matched-filter gain"));
    }
    Ok(())
}

/// Standard deviation of the noise on the `w`-averaged statistic:
/// `σ_W² = σ²/(P·F·T·W)`.
pub fn averaged_noise_sigma(radio: &RadioModel, channel: &ChannelModel, w: u64) -> f64 {
    (channel.noise_ratio() / (radio.samples_per_code_f64() * w as f64)).sqrt()
}

/// Probability that an authentic signal's averaged statistic falls below
/// the threshold.
pub fn pfa(radio: &RadioModel, channel: &ChannelModel, det: &DetectorConfig) -> Result<LogProb> {
    check_inputs(radio, channel)?;
    det.validate()?;
    let sigma = averaged_noise_sigma(radio, channel, det.w);
    if sigma == 0.0 {
        return Ok(LogProb::ZERO);
    }
    Ok(log_normal_sf((1.0 - det.threshold) / sigma))
}

/// Exact PMD: the Gaussian tail above the threshold summed against the
/// binomial count of correctly forged chips over the whole window.
pub fn pmd_exact(
    radio: &RadioModel,
    channel: &ChannelModel,
    det: &DetectorConfig,
    p_chip: f64,
) -> Result<PmdResult> {
    pmd_exact_with(radio, channel, det, p_chip, ExactOptions::default())
}

pub fn pmd_exact_with(
    radio: &RadioModel,
    channel: &ChannelModel,
    det: &DetectorConfig,
    p_chip: f64,
    opts: ExactOptions,
) -> Result<PmdResult> {
    check_inputs(radio, channel)?;
    det.validate()?;
    if !(0.0..=1.0).contains(&p_chip) {
        return Err(invalid(format!("chip probability must lie in [0, 1], got {p_chip}")));
    }
    let total_chips = radio
        .chips
        .checked_mul(det.w)
        .ok_or(Error::TermBudget { trials: u64::MAX, budget: opts.term_budget })?;
    let nw = total_chips as f64;
    let sigma = averaged_noise_sigma(radio, channel, det.w);
    let threshold = det.threshold;

    // ln P(ybar >= threshold | b correct chips)
    let ln_pass = |b: u64| -> f64 {
        let g = (2.0 * b as f64 - nw) / nw;
        if sigma == 0.0 {
            if g >= threshold {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            ln_normal_sf((threshold - g) / sigma)
        }
    };

    if p_chip == 0.0 || p_chip == 1.0 {
        let b = if p_chip == 1.0 { total_chips } else { 0 };
        return Ok(PmdResult::exact(LogProb::from_ln(ln_pass(b))));
    }

    let stream = LogBinomialPmf::with_budget(total_chips, p_chip, opts.term_budget)?;

    // Seed a lower bound on the largest term from the places it can peak:
    // the binomial mode and the first count that clears the threshold.
    let mode = binomial_mode(total_chips, p_chip);
    let crossing = (((threshold + 1.0) * nw / 2.0).ceil().max(0.0) as u64).min(total_chips);
    let mut floor = f64::NEG_INFINITY;
    for b in [mode, crossing, (mode + crossing) / 2] {
        let t = super::binomial::ln_binomial_pmf(b, total_chips, p_chip) + ln_pass(b);
        floor = floor.max(t);
    }

    let truncate_nats = opts.truncate_bits.map(|bits| bits * std::f64::consts::LN_2);
    let mut acc = LogSumExp::new();
    let mut dropped = LogSumExp::new();
    for (b, ln_pmf) in stream {
        if ln_pmf < floor - NEGLIGIBLE_NATS {
            continue;
        }
        if let Some(cut) = truncate_nats {
            if ln_pmf < acc.max().max(floor) - cut {
                dropped.add(ln_pmf);
                continue;
            }
        }
        acc.add(ln_pmf + ln_pass(b));
    }

    let mut result = PmdResult::exact(LogProb::from_ln(acc.ln_total()));
    if truncate_nats.is_some() {
        result.discarded_bound = Some(LogProb::from_ln(dropped.ln_total()));
    }
    Ok(result)
}

/// Mean and variance of one code's correlator output against a forger that
/// gets each chip right with probability `p_chip`.
pub fn clt_moments(radio: &RadioModel, channel: &ChannelModel, p_chip: f64) -> Result<CltMoments> {
    check_inputs(radio, channel)?;
    if !(0.0..=1.0).contains(&p_chip) {
        return Err(invalid(format!("chip probability must lie in [0, 1], got {p_chip}")));
    }
    let n = radio.chips as f64;
    Ok(CltMoments {
        mean: 2.0 * p_chip - 1.0,
        variance: 4.0 * p_chip * (1.0 - p_chip) / n
            + channel.noise_ratio() / radio.samples_per_code_f64(),
    })
}

/// Gaussian approximation of the PMD from [`clt_moments`].
pub fn pmd_clt(
    radio: &RadioModel,
    channel: &ChannelModel,
    det: &DetectorConfig,
    p_chip: f64,
) -> Result<PmdResult> {
    det.validate()?;
    let m = clt_moments(radio, channel, p_chip)?;
    let var = m.averaged_variance(det.w);
    let pmd = if var == 0.0 {
        if m.mean >= det.threshold {
            LogProb::ONE
        } else {
            LogProb::ZERO
        }
    } else {
        log_normal_sf((det.threshold - m.mean) / var.sqrt())
    };
    Ok(PmdResult::clt(pmd))
}
