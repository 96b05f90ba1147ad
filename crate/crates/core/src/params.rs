//! Physical and system parameters, unit conversions and presets.
//!
//! All powers are normalized so that only the ratio `σ²/P` matters; the
//! analytic routines never depend on absolute calibration.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Signal structure and receiver sampling assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioModel {
    /// Chips per ranging code.
    pub chips: u64,
    /// Duration of one ranging code in seconds.
    pub code_period_s: f64,
    /// Receiver sampling rate in Hz.
    pub sample_rate_hz: f64,
    /// Assumed receiver carrier-to-noise density in dB-Hz.
    pub cn0_dbhz: f64,
}

impl RadioModel {
    pub fn new(chips: u64, code_period_s: f64, sample_rate_hz: f64, cn0_dbhz: f64) -> Result<Self> {
        let radio = RadioModel { chips, code_period_s, sample_rate_hz, cn0_dbhz };
        radio.validate()?;
        Ok(radio)
    }

    pub fn validate(&self) -> Result<()> {
        if self.chips == 0 {
            return Err(invalid("chips per code must be at least 1"));
        }
        if !(self.code_period_s > 0.0 && self.code_period_s.is_finite()) {
            return Err(invalid(format!("code period must be positive, got {}", self.code_period_s)));
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(invalid(format!("sample rate must be positive, got {}", self.sample_rate_hz)));
        }
        if self.cn0_dbhz.is_nan() {
            return Err(invalid("C/N0 must not be NaN"));
        }
        let ft = (self.sample_rate_hz * self.code_period_s).floor();
        if ft < self.chips as f64 {
            return Err(invalid(format!(
                "need at least one sample per chip: floor(F*T) = {ft} < n = {}",
                self.chips
            )));
        }
        Ok(())
    }

    /// Length of every replica and baseband segment, `round(F·T)`.
    pub fn samples_per_code(&self) -> usize {
        (self.sample_rate_hz * self.code_period_s).round() as usize
    }

    /// `F·T` as a real number; the matched-filter gain normalizes by it.
    pub fn samples_per_code_f64(&self) -> f64 {
        self.samples_per_code() as f64
    }

    pub fn with_cn0(self, cn0_dbhz: f64) -> Self {
        RadioModel { cn0_dbhz, ..self }
    }
}

/// Galileo E6-C at the Nyquist rate and the conservative 30 dB-Hz floor.
pub fn galileo_e6c_preset() -> RadioModel {
    RadioModel {
        chips: 5115,
        code_period_s: 1e-3,
        sample_rate_hz: 10.230e6,
        cn0_dbhz: 30.0,
    }
}

/// Per-sample noise-to-signal power ratio `σ²/P` for real sampling at `F`.
///
/// The in-band noise power of a real signal sampled at `F` is `N₀·F/2`.
pub fn noise_variance_ratio(radio: &RadioModel) -> f64 {
    (radio.sample_rate_hz / 2.0) / db_to_linear(radio.cn0_dbhz)
}

/// Signal power and per-sample noise variance at the correlator input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub signal_power: f64,
    pub noise_variance: f64,
}

impl ChannelModel {
    pub fn new(signal_power: f64, noise_variance: f64) -> Result<Self> {
        let ch = ChannelModel { signal_power, noise_variance };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_power >= 0.0 && self.signal_power.is_finite()) {
            return Err(invalid(format!("signal power must be finite and >= 0, got {}", self.signal_power)));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(invalid(format!(
                "noise variance must be finite and >= 0, got {}",
                self.noise_variance
            )));
        }
        Ok(())
    }

    /// Unit-power channel whose noise follows the radio's C/N0.
    pub fn from_radio(radio: &RadioModel) -> Self {
        ChannelModel { signal_power: 1.0, noise_variance: noise_variance_ratio(radio) }
    }

    /// `σ²/P`. Infinite when the signal power is zero and noise is present.
    pub fn noise_ratio(&self) -> f64 {
        if self.noise_variance == 0.0 {
            0.0
        } else {
            self.noise_variance / self.signal_power
        }
    }
}

/// Aggregation count and decision threshold on the averaged statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub w: u64,
    pub threshold: f64,
}

impl DetectorConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.5;

    pub fn new(w: u64, threshold: f64) -> Result<Self> {
        let det = DetectorConfig { w, threshold };
        det.validate()?;
        Ok(det)
    }

    pub fn with_w(w: u64) -> Result<Self> {
        Self::new(w, Self::DEFAULT_THRESHOLD)
    }

    pub fn validate(&self) -> Result<()> {
        if self.w == 0 {
            return Err(invalid("W must be at least 1"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(invalid(format!("threshold must lie in (0, 1), got {}", self.threshold)));
        }
        Ok(())
    }
}

/// What the transmitter on the other end is doing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryModel {
    Authentic,
    /// Blind guessing of every chip.
    NonScer,
    /// Hard per-chip decisions from measurements at the given linear chip SNR.
    HdScer { adversary_chip_snr: f64 },
    /// Hard decisions with chip amplitudes weighted by posterior confidence.
    PScer { adversary_chip_snr: f64 },
}

impl AdversaryModel {
    pub fn hd_scer_db(snr_db: f64) -> Result<Self> {
        let m = AdversaryModel::HdScer { adversary_chip_snr: db_to_linear(snr_db) };
        m.validate()?;
        Ok(m)
    }

    pub fn p_scer_db(snr_db: f64) -> Result<Self> {
        let m = AdversaryModel::PScer { adversary_chip_snr: db_to_linear(snr_db) };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AdversaryModel::HdScer { adversary_chip_snr: s }
            | AdversaryModel::PScer { adversary_chip_snr: s } => {
                // +inf is allowed: it models perfect chip estimation.
                if !(s > 0.0) {
                    return Err(invalid(format!("adversary chip SNR must be > 0, got {s}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Per-chip probability that the forged chip equals the authentic one.
    ///
    /// `None` for the authentic transmitter. The soft-decision adversary
    /// still gets its sign right with the hard-decision probability.
    pub fn chip_success_probability(&self) -> Option<f64> {
        match *self {
            AdversaryModel::Authentic => None,
            AdversaryModel::NonScer => Some(0.5),
            AdversaryModel::HdScer { adversary_chip_snr }
            | AdversaryModel::PScer { adversary_chip_snr } => {
                Some(chip_success_probability(adversary_chip_snr))
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AdversaryModel::Authentic => "authentic",
            AdversaryModel::NonScer => "non_scer",
            AdversaryModel::HdScer { .. } => "hd_scer",
            AdversaryModel::PScer { .. } => "p_scer",
        }
    }
}

/// Probability of estimating one BPSK chip correctly at linear chip SNR
/// `P/σ²`: `Φ(√snr)`.
pub fn chip_success_probability(chip_snr: f64) -> f64 {
    if chip_snr <= 0.0 {
        return 0.5;
    }
    normal_cdf(chip_snr.sqrt())
}

/// Thermal noise power `k_B·T·B` in dBW.
pub fn thermal_noise_dbw(temperature_k: f64, bandwidth_hz: f64) -> f64 {
    linear_to_db(BOLTZMANN * temperature_k * bandwidth_hz)
}

/// Precorrelation chip SNR in dB seen by an eavesdropping adversary.
pub fn adversary_link_budget(
    received_power_dbw: f64,
    temperature_k: f64,
    bandwidth_hz: f64,
    antenna_gain_db: f64,
) -> Result<f64> {
    check_link(temperature_k, bandwidth_hz)?;
    Ok(received_power_dbw + antenna_gain_db - thermal_noise_dbw(temperature_k, bandwidth_hz))
}

/// Antenna gain in dB needed to reach `target_snr_db`.
pub fn required_antenna_gain(
    received_power_dbw: f64,
    temperature_k: f64,
    bandwidth_hz: f64,
    target_snr_db: f64,
) -> Result<f64> {
    Ok(target_snr_db - adversary_link_budget(received_power_dbw, temperature_k, bandwidth_hz, 0.0)?)
}

fn check_link(temperature_k: f64, bandwidth_hz: f64) -> Result<()> {
    if !(temperature_k > 0.0) {
        return Err(invalid(format!("temperature must be > 0 K, got {temperature_k}")));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(invalid(format!("bandwidth must be > 0 Hz, got {bandwidth_hz}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(30.0) - 1000.0).abs() < 1e-9);
        // 10^(-0.342) = 0.454988...
        assert!((db_to_linear(-3.42) - 0.4550).abs() < 5e-4);
    }

    #[test]
    fn galileo_noise_ratio() {
        let radio = galileo_e6c_preset();
        assert!((noise_variance_ratio(&radio) - 5115.0).abs() < 1e-9);
        assert_eq!(radio.samples_per_code(), 10230);
        assert_eq!(radio.chips, 5115);
        assert_eq!(radio.code_period_s, 0.001);
    }

    #[test]
    fn unit_noise_ratio_and_limits() {
        let r = RadioModel::new(1, 1.0, 2.0, 0.0).unwrap();
        assert!((noise_variance_ratio(&r) - 1.0).abs() < 1e-15);
        assert_eq!(noise_variance_ratio(&r.with_cn0(f64::INFINITY)), 0.0);
    }

    #[test]
    fn radio_rejects_undersampling() {
        assert!(RadioModel::new(10, 1.0, 9.5, 30.0).is_err());
        assert!(RadioModel::new(0, 1.0, 9.5, 30.0).is_err());
        assert!(RadioModel::new(3, 1.0, 4.0, 30.0).is_ok());
    }

    #[test]
    fn detector_validation() {
        assert!(DetectorConfig::new(0, 0.5).is_err());
        assert!(DetectorConfig::new(1, 1.0).is_err());
        assert!(DetectorConfig::new(1, 0.0).is_err());
        assert_eq!(DetectorConfig::with_w(3).unwrap().threshold, 0.5);
    }

    #[test]
    fn chip_probability_cases() {
        assert_eq!(chip_success_probability(0.0), 0.5);
        assert!((chip_success_probability(1e6) - 1.0).abs() < 1e-15);
        let p = chip_success_probability(db_to_linear(-3.42));
        assert!((p - 0.750).abs() < 1e-3, "p = {p}");
        assert!(AdversaryModel::hd_scer_db(-3.42).unwrap().chip_success_probability().unwrap() > 0.5);
        assert!(AdversaryModel::HdScer { adversary_chip_snr: 0.0 }.validate().is_err());
    }

    #[test]
    fn link_budget_values() {
        let snr = adversary_link_budget(-153.0, 300.0, 10.23e6, 0.0).unwrap();
        assert!((snr + 19.0).abs() < 0.5, "snr = {snr}");
        let g = required_antenna_gain(-153.0, 300.0, 10.23e6, -3.42).unwrap();
        assert!((g - 15.58).abs() < 0.5, "gain = {g}");
        let boosted = adversary_link_budget(-153.0, 300.0, 10.23e6, 10.0).unwrap();
        assert!((boosted - snr - 10.0).abs() < 1e-12);
        assert!(adversary_link_budget(-153.0, 0.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn db_roundtrip(x in -300.0f64..300.0) {
            let back = linear_to_db(db_to_linear(x));
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn chip_probability_monotone(a in 0.0f64..50.0, b in 0.0f64..50.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(chip_success_probability(lo) <= chip_success_probability(hi));
        }

        #[test]
        fn noise_ratio_scaling(f in 1e3f64..1e8, cn0 in 0.0f64..60.0, k in 1.0f64..8.0) {
            let r = RadioModel { chips: 1, code_period_s: 1.0, sample_rate_hz: f, cn0_dbhz: cn0 };
            let base = noise_variance_ratio(&r);
            let scaled_f = noise_variance_ratio(&RadioModel { sample_rate_hz: f * k, ..r });
            prop_assert!((scaled_f / base - k).abs() < 1e-9 * k);
            let scaled_c = noise_variance_ratio(&r.with_cn0(cn0 + linear_to_db(k)));
            prop_assert!((base / scaled_c - k).abs() < 1e-9 * k);
        }

        #[test]
        fn link_budget_unit_slope(g in -20.0f64..40.0) {
            let a = adversary_link_budget(-153.0, 300.0, 10.23e6, g).unwrap();
            let b = adversary_link_budget(-153.0, 300.0, 10.23e6, 0.0).unwrap();
            prop_assert!((a - b - g).abs() < 1e-9);
        }
    }
}
