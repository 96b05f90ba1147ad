//! Inverse problems: smallest W, smallest C/N0, breaking SNR, and the
//! threshold trade-off.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::pmd::{pfa, pmd_clt, pmd_exact};
use super::{LogProb, PmdResult};
use crate::error::{invalid, Error, Result};
use crate::params::{
    chip_success_probability, db_to_linear, linear_to_db, ChannelModel, DetectorConfig, RadioModel,
};

pub const DEFAULT_W_LIMIT: u64 = 100_000;

/// Smallest `W` whose exact blind-guessing PMD is at most `2^-security_bits`.
///
/// A Gaussian-approximation pass brackets the answer; the exact sum then
/// bisects the bracket. Ties go to the smaller `W`.
pub fn min_w_for_security(
    radio: &RadioModel,
    channel: &ChannelModel,
    security_bits: f64,
    threshold: f64,
) -> Result<u64> {
    min_w_for_security_capped(radio, channel, security_bits, threshold, DEFAULT_W_LIMIT)
}

pub fn min_w_for_security_capped(
    radio: &RadioModel,
    channel: &ChannelModel,
    security_bits: f64,
    threshold: f64,
    limit: u64,
) -> Result<u64> {
    if !(security_bits >= 0.0) {
        return Err(invalid(format!("security bits must be >= 0, got {security_bits}")));
    }
    DetectorConfig::new(1, threshold)?;
    if security_bits == 0.0 {
        return Ok(1);
    }
    let exact_ok = |w: u64| -> Result<bool> {
        let det = DetectorConfig::new(w, threshold)?;
        Ok(pmd_exact(radio, channel, &det, 0.5)?.pmd.meets_bits(security_bits))
    };
    let clt_ok = |w: u64| -> Result<bool> {
        let det = DetectorConfig::new(w, threshold)?;
        Ok(pmd_clt(radio, channel, &det, 0.5)?.pmd.meets_bits(security_bits))
    };

    let guess = smallest_passing(1, limit, clt_ok)?.unwrap_or(limit);

    // Widen around the approximate answer until the exact criterion changes
    // sign across the bracket.
    let mut hi = guess.max(1);
    while !exact_ok(hi)? {
        if hi >= limit {
            return Err(Error::SearchLimit { limit });
        }
        hi = (hi + hi / 4 + 1).min(limit);
    }
    // Step down until the exact criterion fails; it then holds on (lo, hi].
    let mut lo = hi;
    loop {
        if lo == 1 {
            return Ok(1);
        }
        let next = lo - (lo / 4).max(1);
        if exact_ok(next)? {
            hi = next;
            lo = next;
        } else {
            lo = next;
            break;
        }
    }
    Ok(smallest_passing(lo + 1, hi, exact_ok)?.unwrap_or(hi))
}

/// Smallest integer in `[lo, hi]` satisfying a monotone predicate.
fn smallest_passing(
    lo: u64,
    hi: u64,
    pred: impl Fn(u64) -> Result<bool>,
) -> Result<Option<u64>> {
    if lo > hi || !pred(hi)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

/// Gaussian-approximation W below which [`min_cn0`] refuses to answer.
pub const CLT_MIN_W: u64 = 30;

/// Lowest receiver C/N0 (dB-Hz, to 0.01 dB) at which the Gaussian
/// approximation of the blind-guessing PMD meets `2^-security_bits`.
///
/// The radio's own C/N0 is ignored. Fails with [`Error::Infeasible`] when
/// even a noise-free channel cannot meet the requirement at this `W`.
pub fn min_cn0(radio: &RadioModel, w: u64, security_bits: f64, threshold: f64) -> Result<f64> {
    if w < CLT_MIN_W {
        return Err(invalid(format!("W = {w} is below the Gaussian-approximation regime (W >= {CLT_MIN_W})")));
    }
    if !(security_bits >= 0.0) {
        return Err(invalid(format!("security bits must be >= 0, got {security_bits}")));
    }
    let det = DetectorConfig::new(w, threshold)?;
    let passes = |cn0: f64| -> Result<bool> {
        let r = radio.with_cn0(cn0);
        let ch = ChannelModel::from_radio(&r);
        Ok(pmd_clt(&r, &ch, &det, 0.5)?.pmd.meets_bits(security_bits))
    };
    if !passes(f64::INFINITY)? {
        return Err(Error::Infeasible(format!(
            "chip-guessing variance alone exceeds 2^-{security_bits} at W = {w}"
        )));
    }
    let mut hi = 60.0;
    while !passes(hi)? {
        hi += 30.0;
        if hi > 600.0 {
            return Err(Error::Infeasible(format!("no finite C/N0 meets 2^-{security_bits} at W = {w}")));
        }
    }
    let mut lo = hi - 30.0;
    while passes(lo)? {
        lo -= 30.0;
        if lo < -600.0 {
            return Ok(lo);
        }
    }
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Adversary chip SNR (dB) at which hard-decision forgeries have mean
/// statistic exactly at `threshold`, i.e. `Φ(√snr) = (1 + threshold)/2`.
pub fn breaking_adversary_snr(threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(invalid(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    if threshold == 1.0 {
        return Ok(f64::INFINITY);
    }
    let p = 0.5 * (1.0 + threshold);
    let x = Normal::standard().inverse_cdf(p);
    Ok(linear_to_db(x * x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub threshold: f64,
    pub breaking_snr_db: f64,
    pub pfa: LogProb,
}

/// Breaking SNR and false-alarm probability for each candidate threshold.
pub fn threshold_tradeoff(
    radio: &RadioModel,
    channel: &ChannelModel,
    w: u64,
    thresholds: &[f64],
) -> Result<Vec<TradeoffRow>> {
    thresholds
        .iter()
        .map(|&t| {
            let det = DetectorConfig::new(w, t)?;
            Ok(TradeoffRow {
                threshold: t,
                breaking_snr_db: breaking_adversary_snr(t)?,
                pfa: pfa(radio, channel, &det)?,
            })
        })
        .collect()
}

/// Which PMD evaluator a curve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMethod {
    Clt,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub w: u64,
    pub adversary_snr_db: f64,
    pub p_chip: f64,
    pub pmd: PmdResult,
}

/// Hard-decision PMD over a grid of W values and adversary chip SNRs.
///
/// Points are evaluated in parallel; the output is ordered W-major, then by
/// SNR, independent of scheduling.
pub fn hdscer_pmd_curve(
    radio: &RadioModel,
    channel: &ChannelModel,
    ws: &[u64],
    snr_grid_db: &[f64],
    threshold: f64,
    method: CurveMethod,
) -> Result<Vec<CurvePoint>> {
    if ws.is_empty() || snr_grid_db.is_empty() {
        return Err(invalid("W list and SNR grid must be nonempty"));
    }
    let points: Vec<(u64, f64)> =
        ws.iter().flat_map(|&w| snr_grid_db.iter().map(move |&s| (w, s))).collect();
    points
        .par_iter()
        .map(|&(w, snr_db)| {
            let det = DetectorConfig::new(w, threshold)?;
            let p = chip_success_probability(db_to_linear(snr_db));
            let pmd = match method {
                CurveMethod::Clt => pmd_clt(radio, channel, &det, p)?,
                CurveMethod::Exact => pmd_exact(radio, channel, &det, p)?,
            };
            Ok(CurvePoint { w, adversary_snr_db: snr_db, p_chip: p, pmd })
        })
        .collect()
}

/// PMD at each `W` for a fixed chip probability, evaluated in parallel and
/// returned in input order.
pub fn pmd_vs_w(
    radio: &RadioModel,
    channel: &ChannelModel,
    ws: &[u64],
    threshold: f64,
    p_chip: f64,
    method: CurveMethod,
) -> Result<Vec<(u64, PmdResult)>> {
    ws.par_iter()
        .map(|&w| {
            let det = DetectorConfig::new(w, threshold)?;
            let r = match method {
                CurveMethod::Clt => pmd_clt(radio, channel, &det, p_chip)?,
                CurveMethod::Exact => pmd_exact(radio, channel, &det, p_chip)?,
            };
            Ok((w, r))
        })
        .collect()
}
