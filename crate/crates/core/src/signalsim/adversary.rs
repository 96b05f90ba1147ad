use rand::Rng;
use rand_distr::StandardNormal;

use super::code::ChipSequence;
use crate::error::{invalid, Result};
use crate::params::AdversaryModel;

/// Forged chips and per-chip amplitudes for a whole aggregation window
/// (one entry per ranging code).
#[derive(Debug, Clone, PartialEq)]
pub struct SpoofPlan {
    pub chips: Vec<ChipSequence>,
    pub amplitudes: Vec<Vec<f64>>,
}

impl SpoofPlan {
    fn unit(chips: Vec<ChipSequence>) -> Self {
        let amplitudes = chips.iter().map(|c| vec![1.0; c.len()]).collect();
        SpoofPlan { chips, amplitudes }
    }

    pub fn codes(&self) -> usize {
        self.chips.len()
    }

    /// Mean squared amplitude over the window.
    pub fn mean_power(&self) -> f64 {
        let (sum, count) = self
            .amplitudes
            .iter()
            .flatten()
            .fold((0.0, 0usize), |(s, c), a| (s + a * a, c + 1));
        sum / count as f64
    }
}

/// The adversary's per-chip measurements `chip·√snr + N(0, 1)`.
pub fn measure_chips<R: Rng + ?Sized>(
    authentic: &[ChipSequence],
    chip_snr: f64,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let amp = chip_snr.sqrt();
    authentic
        .iter()
        .map(|code| {
            code.chips()
                .iter()
                .map(|&c| {
                    let noise: f64 = rng.sample(StandardNormal);
                    if amp.is_infinite() {
                        f64::from(c) * f64::INFINITY
                    } else {
                        f64::from(c) * amp + noise
                    }
                })
                .collect()
        })
        .collect()
}

/// Turn measurements into a forgery for a chip-estimating adversary.
///
/// Both variants forge `sign(m)`. The soft variant scales each chip by its
/// posterior confidence `max(P(+1|m), P(-1|m)) = 1/(1 + e^(-2√snr·|m|))`
/// and then rescales so the window's mean squared amplitude is one.
pub fn plan_from_measurements(model: &AdversaryModel, measurements: &[Vec<f64>]) -> Result<SpoofPlan> {
    let (snr, soft) = match *model {
        AdversaryModel::HdScer { adversary_chip_snr } => (adversary_chip_snr, false),
        AdversaryModel::PScer { adversary_chip_snr } => (adversary_chip_snr, true),
        _ => return Err(invalid("measurements only apply to chip-estimating adversaries")),
    };
    model.validate()?;
    let chips: Vec<ChipSequence> = measurements
        .iter()
        .map(|m| ChipSequence::from_trusted(m.iter().map(|&x| if x >= 0.0 { 1 } else { -1 }).collect()))
        .collect();
    if !soft || snr.is_infinite() {
        return Ok(SpoofPlan::unit(chips));
    }
    let scale = 2.0 * snr.sqrt();
    let mut amplitudes: Vec<Vec<f64>> = measurements
        .iter()
        .map(|m| m.iter().map(|&x| 1.0 / (1.0 + (-scale * x.abs()).exp())).collect())
        .collect();
    let mut plan_power = 0.0;
    let mut count = 0usize;
    for a in amplitudes.iter().flatten() {
        plan_power += a * a;
        count += 1;
    }
    let norm = (plan_power / count as f64).sqrt().recip();
    for a in amplitudes.iter_mut().flatten() {
        *a *= norm;
    }
    Ok(SpoofPlan { chips, amplitudes })
}

/// Build the adversary's forgery against `authentic` (one aggregation window).
pub fn forge<R: Rng + ?Sized>(
    model: &AdversaryModel,
    authentic: &[ChipSequence],
    rng: &mut R,
) -> Result<SpoofPlan> {
    if authentic.is_empty() {
        return Err(invalid("forgery needs at least one authentic code"));
    }
    match *model {
        AdversaryModel::Authentic => Err(invalid("the authentic transmitter does not forge")),
        AdversaryModel::NonScer => {
            let chips = authentic
                .iter()
                .map(|code| {
                    ChipSequence::from_trusted((0..code.len()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
                })
                .collect();
            Ok(SpoofPlan::unit(chips))
        }
        AdversaryModel::HdScer { adversary_chip_snr } | AdversaryModel::PScer { adversary_chip_snr } => {
            model.validate()?;
            let m = measure_chips(authentic, adversary_chip_snr, rng);
            plan_from_measurements(model, &m)
        }
    }
}
