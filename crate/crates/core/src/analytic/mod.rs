//! Closed-form missed-detection and false-alarm probabilities.
//!
//! Everything is computed in the log domain: the security targets of
//! interest sit around 2⁻¹²⁸, far below what a linear sum of f64 terms can
//! carry once the binomial and Gaussian factors are multiplied together.

mod binomial;
mod logprob;
mod pmd;
mod search;
mod tail;

pub use binomial::{
    binomial_mode, ln_binomial_pmf, log_binomial_pmf_stream, LogBinomialPmf, DEFAULT_TERM_BUDGET,
};
pub use logprob::{LogProb, LINEAR_FLOOR_LOG2};
pub use pmd::{
    averaged_noise_sigma, clt_moments, pfa, pmd_clt, pmd_exact, pmd_exact_with, CltMoments,
    ExactOptions, PmdMethod, PmdResult,
};
pub use search::{
    breaking_adversary_snr, hdscer_pmd_curve, min_cn0, min_w_for_security,
    min_w_for_security_capped, pmd_vs_w, threshold_tradeoff, CurveMethod, CurvePoint, TradeoffRow,
    CLT_MIN_W, DEFAULT_W_LIMIT,
};
pub use tail::{ln_normal_cdf, ln_normal_sf, log_normal_sf};
