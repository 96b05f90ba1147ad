//! Seeded, parallel Monte Carlo over the simulated receiver chain.
//!
//! Every trial draws from its own ChaCha8 stream: the key is the
//! experiment's master seed and the stream number is the trial index. The
//! count of missed detections is a sum over trials, so results do not
//! depend on how many workers run them or in which order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{pmd_exact, LogProb, PmdResult};
use crate::error::{invalid, Error, Result};
use crate::params::{db_to_linear, AdversaryModel, ChannelModel, DetectorConfig, RadioModel};
use crate::signalsim::{
    authenticate, forge, gen_prf_code, measure_chips, plan_from_measurements, resample,
    synth_baseband, ChipSequence, Decision, Replica, SpoofPlan,
};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "PRFAUTH_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub radio: RadioModel,
    pub channel: ChannelModel,
    pub det: DetectorConfig,
    pub adversary: AdversaryModel,
    pub trials: u64,
    pub master_seed: [u8; 32],
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.channel.validate()?;
        self.det.validate()?;
        self.adversary.validate()?;
        if self.trials == 0 {
            return Err(invalid("at least one trial is required"));
        }
        if self.channel.signal_power <= 0.0 {
            return Err(invalid("signal power must be > 0"));
        }
        Ok(())
    }
}

/// Outcome counts with a 3-sigma (99.7%) normal-approximation interval.
///
/// For an authentic transmitter `missed_detections` counts false alarms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub missed_detections: u64,
    pub trials: u64,
    pub pmd_hat: f64,
    pub ci_997: (f64, f64),
}

impl TrialSummary {
    pub fn from_counts(missed_detections: u64, trials: u64) -> Self {
        assert!(trials > 0 && missed_detections <= trials);
        let p = missed_detections as f64 / trials as f64;
        let half = ci_half_width(p, trials);
        TrialSummary {
            missed_detections,
            trials,
            pmd_hat: p,
            ci_997: ((p - half).max(0.0), (p + half).min(1.0)),
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_997.0 <= p && p <= self.ci_997.1
    }

    pub fn as_pmd_result(&self) -> PmdResult {
        PmdResult::monte_carlo(
            LogProb::from_linear(self.pmd_hat),
            self.trials,
            LogProb::from_linear(self.ci_997.0),
            LogProb::from_linear(self.ci_997.1),
        )
    }
}

/// `3·√(p(1−p)/trials)`.
pub fn ci_half_width(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Worker count from [`THREADS_ENV`], else the machine's parallelism.
pub fn default_workers() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// RNG for trial `index` of the experiment keyed by `seed`.
pub fn trial_rng(seed: &[u8; 32], index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(*seed);
    rng.set_stream(index);
    rng
}

/// Seed for sub-experiment `index` (one sweep point) under `master`.
pub fn derive_seed(master: &[u8; 32], label: &str, index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master);
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(index.to_le_bytes());
    h.finalize().into()
}

/// Parse a seed given as a decimal integer or 64 hex digits.
pub fn seed_from_str(s: &str) -> Result<[u8; 32]> {
    let s = s.trim();
    if s.len() == 64 && s.chars().all(|c| c.is_ascii_hexdigit()) {
        let mut out = [0u8; 32];
        for (i, byte) in out.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).expect("checked hex");
        }
        return Ok(out);
    }
    let v: u64 = s.parse().map_err(|_| invalid(format!("seed must be an integer or 64 hex digits, got {s:?}")))?;
    Ok(seed_from_u64(v))
}

pub fn seed_from_u64(v: u64) -> [u8; 32] {
    let mut out = [0u8; 32];
    out[..8].copy_from_slice(&v.to_le_bytes());
    out
}

fn authentic_window<R: Rng + ?Sized>(radio: &RadioModel, w: u64, rng: &mut R) -> Result<Vec<ChipSequence>> {
    let mut key = [0u8; 32];
    rng.fill(&mut key);
    (0..w).map(|k| gen_prf_code(&key, k, radio.chips as usize)).collect()
}

fn receive_plan<R: Rng + ?Sized>(
    plan: &SpoofPlan,
    truth: &[Replica],
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<Decision> {
    let segments = plan
        .chips
        .iter()
        .zip(&plan.amplitudes)
        .map(|(chips, amps)| {
            let rep = resample(chips, &cfg.radio)?;
            synth_baseband(&rep, Some(amps), &cfg.channel, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(authenticate(&segments, truth, &cfg.radio, &cfg.channel, &cfg.det)?.0)
}

/// One trial; `true` when the counted event (missed detection, or false
/// alarm for the authentic transmitter) occurs.
fn run_trial(cfg: &ExperimentConfig, index: u64) -> Result<bool> {
    let mut rng = trial_rng(&cfg.master_seed, index);
    let auth = authentic_window(&cfg.radio, cfg.det.w, &mut rng)?;
    let truth = auth.iter().map(|c| resample(c, &cfg.radio)).collect::<Result<Vec<_>>>()?;
    match cfg.adversary {
        AdversaryModel::Authentic => {
            let segments = truth
                .iter()
                .map(|r| synth_baseband(r, None, &cfg.channel, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let (d, _) = authenticate(&segments, &truth, &cfg.radio, &cfg.channel, &cfg.det)?;
            Ok(d == Decision::Spoofed)
        }
        model => {
            let plan = forge(&model, &auth, &mut rng)?;
            Ok(receive_plan(&plan, &truth, cfg, &mut rng)? == Decision::Authentic)
        }
    }
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<TrialSummary> {
    run_experiment_with_workers(config, default_workers())
}

pub fn run_experiment_with_workers(config: &ExperimentConfig, workers: usize) -> Result<TrialSummary> {
    config.validate()?;
    let hits = in_pool(workers, || {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, i).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })??;
    Ok(TrialSummary::from_counts(hits, config.trials))
}

/// The swept parameter of [`validation_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "snake_case")]
pub enum SweepAxis {
    W(Vec<u64>),
    /// Adversary chip SNR in dB; the base adversary must be hard-decision.
    AdversarySnrDb(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: f64,
    pub summary: TrialSummary,
    pub analytic: PmdResult,
}

impl SweepRow {
    pub fn analytic_linear(&self) -> f64 {
        self.analytic.pmd.to_linear_lossy()
    }

    pub fn contained(&self) -> bool {
        self.summary.contains(self.analytic_linear())
    }
}

/// Empirical PMD next to the exact analytic PMD at each grid point.
pub fn validation_sweep(base: &ExperimentConfig, sweep: &SweepAxis) -> Result<Vec<SweepRow>> {
    validation_sweep_with_workers(base, sweep, default_workers())
}

pub fn validation_sweep_with_workers(
    base: &ExperimentConfig,
    sweep: &SweepAxis,
    workers: usize,
) -> Result<Vec<SweepRow>> {
    let configs: Vec<(f64, ExperimentConfig)> = match sweep {
        SweepAxis::W(ws) => ws
            .iter()
            .map(|&w| Ok((w as f64, ExperimentConfig { det: DetectorConfig::new(w, base.det.threshold)?, ..*base })))
            .collect::<Result<_>>()?,
        SweepAxis::AdversarySnrDb(grid) => {
            if !matches!(base.adversary, AdversaryModel::HdScer { .. }) {
                return Err(invalid("an SNR sweep needs a hard-decision adversary"));
            }
            grid.iter()
                .map(|&db| Ok((db, ExperimentConfig { adversary: AdversaryModel::hd_scer_db(db)?, ..*base })))
                .collect::<Result<_>>()?
        }
    };
    if configs.is_empty() {
        return Err(invalid("sweep grid must be nonempty"));
    }
    configs
        .into_iter()
        .enumerate()
        .map(|(i, (point, mut cfg))| {
            cfg.master_seed = derive_seed(&base.master_seed, "sweep-point", i as u64);
            let p = match cfg.adversary {
                AdversaryModel::NonScer | AdversaryModel::HdScer { .. } => {
                    cfg.adversary.chip_success_probability().expect("forging adversary")
                }
                other => {
                    return Err(invalid(format!("no closed-form PMD for the {} model", other.label())))
                }
            };
            let analytic = pmd_exact(&cfg.radio, &cfg.channel, &cfg.det, p)?;
            let summary = run_experiment_with_workers(&cfg, workers)?;
            Ok(SweepRow { point, summary, analytic })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PscerRow {
    pub snr_db: f64,
    pub hdscer: TrialSummary,
    pub pscer: TrialSummary,
}

/// Paired comparison: per trial both adversaries see the same authentic
/// codes and the same measurement noise, and the receiver sees the same
/// noise on both forgeries.
fn run_paired_trial(cfg: &ExperimentConfig, chip_snr: f64, index: u64) -> Result<(bool, bool)> {
    let mut rng = trial_rng(&cfg.master_seed, index);
    let auth = authentic_window(&cfg.radio, cfg.det.w, &mut rng)?;
    let truth = auth.iter().map(|c| resample(c, &cfg.radio)).collect::<Result<Vec<_>>>()?;
    let measurements = measure_chips(&auth, chip_snr, &mut rng);
    let hd = plan_from_measurements(&AdversaryModel::HdScer { adversary_chip_snr: chip_snr }, &measurements)?;
    let ps = plan_from_measurements(&AdversaryModel::PScer { adversary_chip_snr: chip_snr }, &measurements)?;
    let mut noise_rng = rng.clone();
    let hd_pass = receive_plan(&hd, &truth, cfg, &mut rng)? == Decision::Authentic;
    let ps_pass = receive_plan(&ps, &truth, cfg, &mut noise_rng)? == Decision::Authentic;
    Ok((hd_pass, ps_pass))
}

fn run_unpaired(cfg: &ExperimentConfig, model: AdversaryModel, label: &str, index: u64, workers: usize) -> Result<TrialSummary> {
    let c = ExperimentConfig {
        adversary: model,
        master_seed: derive_seed(&cfg.master_seed, label, index),
        ..*cfg
    };
    run_experiment_with_workers(&c, workers)
}

/// PMD of the hard-decision and soft (power-weighted) adversaries over an
/// SNR grid. `paired` shares randomness between the two per trial.
pub fn pscer_curves(
    base: &ExperimentConfig,
    snr_grid_db: &[f64],
    paired: bool,
    workers: usize,
) -> Result<Vec<PscerRow>> {
    base.validate()?;
    if snr_grid_db.is_empty() {
        return Err(invalid("SNR grid must be nonempty"));
    }
    snr_grid_db
        .iter()
        .enumerate()
        .map(|(i, &db)| {
            let snr = db_to_linear(db);
            if paired {
                let cfg = ExperimentConfig { master_seed: derive_seed(&base.master_seed, "pscer-point", i as u64), ..*base };
                let (hd, ps) = in_pool(workers, || {
                    (0..cfg.trials)
                        .into_par_iter()
                        .map(|t| run_paired_trial(&cfg, snr, t).map(|(a, b)| (u64::from(a), u64::from(b))))
                        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
                })??;
                Ok(PscerRow {
                    snr_db: db,
                    hdscer: TrialSummary::from_counts(hd, cfg.trials),
                    pscer: TrialSummary::from_counts(ps, cfg.trials),
                })
            } else {
                Ok(PscerRow {
                    snr_db: db,
                    hdscer: run_unpaired(base, AdversaryModel::HdScer { adversary_chip_snr: snr }, "hdscer-point", i as u64, workers)?,
                    pscer: run_unpaired(base, AdversaryModel::PScer { adversary_chip_snr: snr }, "pscer-point", i as u64, workers)?,
                })
            }
        })
        .collect()
}

/// First SNR at which a PMD curve reaches `level`, by linear interpolation
/// between grid points.
pub fn crossing_snr(points: &[(f64, f64)], level: f64) -> Option<f64> {
    points.windows(2).find_map(|pair| {
        let ((x0, y0), (x1, y1)) = (pair[0], pair[1]);
        if y0 < level && y1 >= level {
            Some(x0 + (level - y0) * (x1 - x0) / (y1 - y0))
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PscerAdvantage {
    pub rows: Vec<PscerRow>,
    pub hdscer_crossing_db: f64,
    pub pscer_crossing_db: f64,
    /// How far left (in dB) the soft adversary's curve sits.
    pub shift_db: f64,
}

/// Horizontal dB shift between the soft and hard adversaries' PMD curves at
/// PMD = 0.5. Fails with [`Error::Degenerate`] when either curve never
/// crosses 0.5 on the grid.
pub fn pscer_advantage(base: &ExperimentConfig, snr_grid_db: &[f64]) -> Result<PscerAdvantage> {
    pscer_advantage_with(base, snr_grid_db, true, default_workers())
}

pub fn pscer_advantage_with(
    base: &ExperimentConfig,
    snr_grid_db: &[f64],
    paired: bool,
    workers: usize,
) -> Result<PscerAdvantage> {
    let rows = pscer_curves(base, snr_grid_db, paired, workers)?;
    let hd: Vec<(f64, f64)> = rows.iter().map(|r| (r.snr_db, r.hdscer.pmd_hat)).collect();
    let ps: Vec<(f64, f64)> = rows.iter().map(|r| (r.snr_db, r.pscer.pmd_hat)).collect();
    let (Some(h), Some(p)) = (crossing_snr(&hd, 0.5), crossing_snr(&ps, 0.5)) else {
        return Err(Error::Degenerate("a PMD curve never crosses 0.5 on the SNR grid".into()));
    };
    Ok(PscerAdvantage { rows, hdscer_crossing_db: h, pscer_crossing_db: p, shift_db: h - p })
}
