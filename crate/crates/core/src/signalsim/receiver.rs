use serde::{Deserialize, Serialize};

use super::baseband::BasebandSegment;
use super::code::Replica;
use crate::error::{invalid, Error, Result};
use crate::params::{ChannelModel, DetectorConfig, RadioModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Authentic,
    Spoofed,
}

/// Zero-lag matched-filter output scaled by `k = 1/(F·T·√P)`.
pub fn correlate(segment: &BasebandSegment, replica: &Replica, signal_power: f64) -> Result<f64> {
    if segment.len() != replica.len() {
        return Err(Error::LengthMismatch { expected: replica.len(), actual: segment.len() });
    }
    let dot: f64 = segment
        .samples
        .iter()
        .zip(replica.samples())
        .map(|(&x, &r)| x * f64::from(r))
        .sum();
    Ok(dot / (replica.l1_norm() as f64 * signal_power.sqrt()))
}

/// Average the `W` per-code statistics and gate on the threshold.
pub fn authenticate(
    segments: &[BasebandSegment],
    replica_truth: &[Replica],
    radio: &RadioModel,
    channel: &ChannelModel,
    det: &DetectorConfig,
) -> Result<(Decision, f64)> {
    det.validate()?;
    let w = det.w as usize;
    if segments.len() != w {
        return Err(Error::LengthMismatch { expected: w, actual: segments.len() });
    }
    if replica_truth.len() != w {
        return Err(Error::LengthMismatch { expected: w, actual: replica_truth.len() });
    }
    if channel.signal_power <= 0.0 {
        return Err(invalid("signal power must be > 0 for the matched-filter gain"));
    }
    let ft = radio.samples_per_code();
    let mut total = 0.0;
    for (seg, rep) in segments.iter().zip(replica_truth) {
        if rep.len() != ft {
            return Err(Error::LengthMismatch { expected: ft, actual: rep.len() });
        }
        total += correlate(seg, rep, channel.signal_power)?;
    }
    let y_bar = total / w as f64;
    let decision = if y_bar >= det.threshold { Decision::Authentic } else { Decision::Spoofed };
    Ok((decision, y_bar))
}
