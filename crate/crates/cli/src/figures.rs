//! Data tables behind the standard plots, one CSV per figure.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use prfauth::analytic::{
    breaking_adversary_snr, hdscer_pmd_curve, min_cn0, pmd_vs_w, threshold_tradeoff, CurveMethod,
};
use prfauth::montecarlo::{
    default_workers, pscer_advantage_with, seed_from_str, validation_sweep_with_workers,
    ExperimentConfig, SweepAxis, SweepRow, THREADS_ENV,
};
use prfauth::params::{AdversaryModel, DetectorConfig};
use prfauth::Error;
use serde_json::{json, Value};

use crate::output::{prob_cells, OutputRecord};
use crate::{explain, CmdResult, Failure, Preset, RadioArgs};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Exact blind-guessing PMD for W = 1..w-max.
    PmdNscer,
    /// Minimum C/N0 against W for several security levels.
    #[value(name = "cn0-v-w")]
    Cn0VW,
    /// Hard-decision PMD against adversary SNR for several W.
    HdscerPmdSnr,
    /// Breaking adversary SNR and PFA against the threshold.
    AdvSnrPfaY,
    /// Simulated vs exact blind-guessing PMD over a W grid.
    ValidateNscer,
    /// Simulated vs exact hard-decision PMD over an SNR grid.
    ValidateHdscer,
    /// Paired soft vs hard adversary simulation.
    Pscer,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::PmdNscer => "pmd-nscer",
            Figure::Cn0VW => "cn0-v-w",
            Figure::HdscerPmdSnr => "hdscer-pmd-snr",
            Figure::AdvSnrPfaY => "adv-snr-pfa-y",
            Figure::ValidateNscer => "validate-nscer",
            Figure::ValidateHdscer => "validate-hdscer",
            Figure::Pscer => "pscer",
        }
    }

    fn is_monte_carlo(self) -> bool {
        matches!(self, Figure::ValidateNscer | Figure::ValidateHdscer | Figure::Pscer)
    }

    fn default_preset(self) -> Preset {
        match self {
            Figure::ValidateNscer => Preset::Lab31,
            Figure::ValidateHdscer => Preset::Lab31Clean,
            Figure::Pscer => Preset::Lab255,
            _ => Preset::GalileoE6c,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigMethod {
    Exact,
    Clt,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    figure: Figure,
    /// CSV destination; a `.json` sidecar with the full record goes next to
    /// it. Without `--out` the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    radio: RadioArgs,
    #[arg(long, default_value_t = DetectorConfig::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Single W for figures that fix it.
    #[arg(long)]
    w: Option<u64>,
    /// Comma-separated W list.
    #[arg(long, value_delimiter = ',')]
    ws: Option<Vec<u64>>,
    #[arg(long)]
    w_min: Option<u64>,
    #[arg(long)]
    w_max: Option<u64>,
    #[arg(long)]
    w_step: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    snr_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    snr_max: Option<f64>,
    #[arg(long)]
    snr_step: Option<f64>,
    /// Comma-separated security levels in bits.
    #[arg(long, value_delimiter = ',')]
    bits: Option<Vec<f64>>,
    /// Comma-separated thresholds.
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "exact")]
    method: FigMethod,
    #[arg(long)]
    trials: Option<u64>,
    /// Decimal integer or 64 hex digits.
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads for simulations; does not affect results.
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
    /// Independent rather than paired randomness for the two adversaries.
    #[arg(long)]
    unpaired: bool,
}

/// Inclusive grid `lo, lo+step, …` up to `hi`, built by index so it is
/// free of accumulated rounding.
fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Failure::usage(format!("bad grid {lo}..{hi} step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

fn w_range(lo: u64, hi: u64, step: u64) -> Result<Vec<u64>, Failure> {
    if lo == 0 || step == 0 || hi < lo {
        return Err(Failure::usage(format!("bad W range {lo}..{hi} step {step}")));
    }
    Ok((lo..=hi).step_by(step as usize).collect())
}

struct Mc {
    trials: u64,
    seed: [u8; 32],
    workers: usize,
}

fn mc_args(a: &FigureArgs, params: &mut BTreeMap<String, Value>) -> Result<Mc, Failure> {
    let (Some(trials), Some(seed)) = (a.trials, a.seed.as_deref()) else {
        return Err(Failure::usage("simulation figures need --trials and --seed"));
    };
    if trials == 0 {
        return Err(Failure::usage("--trials must be positive"));
    }
    params.insert("trials".into(), json!(trials));
    params.insert("seed".into(), json!(seed));
    Ok(Mc { trials, seed: seed_from_str(seed)?, workers: a.threads.filter(|&t| t > 0).unwrap_or_else(default_workers) })
}

pub fn cmd_figures(a: &FigureArgs) -> CmdResult {
    let fig = a.figure;
    let mut params = BTreeMap::new();
    params.insert("figure".into(), json!(fig.name()));
    params.insert("threshold".into(), json!(a.threshold));
    let (radio, channel) = a.radio.resolve(fig.default_preset(), &mut params)?;
    let mc = if fig.is_monte_carlo() { Some(mc_args(a, &mut params)?) } else { None };
    let method = match a.method {
        FigMethod::Exact => CurveMethod::Exact,
        FigMethod::Clt => CurveMethod::Clt,
    };
    let command = format!("figures/{}", fig.name());

    let rec = match fig {
        Figure::PmdNscer => {
            let ws = w_range(a.w_min.unwrap_or(1), a.w_max.unwrap_or(800), a.w_step.unwrap_or(1))?;
            put_ws(&mut params, &ws);
            params.insert("method".into(), json!(method_name(method)));
            let pts = pmd_vs_w(&radio, &channel, &ws, a.threshold, 0.5, method)?;
            let mut rec = OutputRecord::new(&command, params, &["w", "log2_pmd", "pmd"]);
            for (w, r) in pts {
                let [l, lin] = prob_cells(r.pmd);
                rec.push(vec![Some(w as f64), l, lin]);
            }
            rec
        }
        Figure::Cn0VW => {
            let bits = a.bits.clone().unwrap_or_else(|| vec![32.0, 64.0, 128.0]);
            let ws = w_range(a.w_min.unwrap_or(30), a.w_max.unwrap_or(800), a.w_step.unwrap_or(10))?;
            put_ws(&mut params, &ws);
            params.insert("bits".into(), json!(bits));
            let mut rec = OutputRecord::new(&command, params, &["bits", "w", "min_cn0_dbhz"]);
            for &b in &bits {
                for &w in &ws {
                    let cn0 = match min_cn0(&radio, w, b, a.threshold) {
                        Ok(v) => v,
                        Err(Error::Infeasible(_)) => f64::INFINITY,
                        Err(e) => return Err(e.into()),
                    };
                    rec.push(vec![Some(b), Some(w as f64), Some(cn0)]);
                }
            }
            rec
        }
        Figure::HdscerPmdSnr => {
            let ws = a.ws.clone().unwrap_or_else(|| vec![50, 100, 200, 400]);
            let snrs = grid(a.snr_min.unwrap_or(-10.0), a.snr_max.unwrap_or(5.0), a.snr_step.unwrap_or(0.25))?;
            params.insert("ws".into(), json!(ws));
            put_snrs(&mut params, &snrs);
            params.insert("method".into(), json!(method_name(method)));
            let pts = hdscer_pmd_curve(&radio, &channel, &ws, &snrs, a.threshold, method)?;
            let mut rec = OutputRecord::new(&command, params, &["w", "adv_snr_db", "p_chip", "log2_pmd", "pmd"]);
            for p in pts {
                let [l, lin] = prob_cells(p.pmd.pmd);
                rec.push(vec![Some(p.w as f64), Some(p.adversary_snr_db), Some(p.p_chip), l, lin]);
            }
            rec.summary.insert("inflection_snr_db".into(), json!(breaking_adversary_snr(a.threshold)?));
            rec
        }
        Figure::AdvSnrPfaY => {
            let w = a.w.unwrap_or(100);
            let ts = match &a.thresholds {
                Some(t) => t.clone(),
                None => (1..=19).map(|i| i as f64 * 0.05).collect(),
            };
            params.insert("w".into(), json!(w));
            params.insert("thresholds".into(), json!(ts));
            let rows = threshold_tradeoff(&radio, &channel, w, &ts)?;
            let mut rec = OutputRecord::new(&command, params, &["threshold", "breaking_snr_db", "log2_pfa", "pfa"]);
            for r in rows {
                let [l, lin] = prob_cells(r.pfa);
                rec.push(vec![Some(r.threshold), Some(r.breaking_snr_db), l, lin]);
            }
            rec
        }
        Figure::ValidateNscer | Figure::ValidateHdscer => {
            let mc = mc.expect("simulation figure");
            let (axis, point_col, w) = if fig == Figure::ValidateNscer {
                let ws = a.ws.clone().unwrap_or_else(|| (2..=11).collect());
                params.insert("ws".into(), json!(ws));
                (SweepAxis::W(ws), "w", 1)
            } else {
                let snrs = grid(a.snr_min.unwrap_or(-12.0), a.snr_max.unwrap_or(-0.75), a.snr_step.unwrap_or(0.75))?;
                put_snrs(&mut params, &snrs);
                let w = a.w.unwrap_or(4);
                params.insert("w".into(), json!(w));
                (SweepAxis::AdversarySnrDb(snrs), "adv_snr_db", w)
            };
            let adversary = match fig {
                Figure::ValidateNscer => AdversaryModel::NonScer,
                _ => AdversaryModel::hd_scer_db(0.0)?,
            };
            let base = ExperimentConfig {
                radio,
                channel,
                det: DetectorConfig::new(w, a.threshold)?,
                adversary,
                trials: mc.trials,
                master_seed: mc.seed,
            };
            let rows = validation_sweep_with_workers(&base, &axis, mc.workers)?;
            let mut rec = OutputRecord::new(
                &command,
                params,
                &[point_col, "trials", "missed", "pmd_hat", "ci_low", "ci_high", "log2_pmd_exact", "pmd_exact", "contained"],
            );
            push_sweep(&mut rec, &rows);
            let inside = rows.iter().filter(|r| r.contained()).count();
            rec.summary.insert("points".into(), json!(rows.len()));
            rec.summary.insert("contained".into(), json!(inside));
            rec
        }
        Figure::Pscer => {
            let mc = mc.expect("simulation figure");
            let snrs = grid(a.snr_min.unwrap_or(-7.0), a.snr_max.unwrap_or(-2.0), a.snr_step.unwrap_or(0.25))?;
            let w = a.w.unwrap_or(4);
            put_snrs(&mut params, &snrs);
            params.insert("w".into(), json!(w));
            params.insert("paired".into(), json!(!a.unpaired));
            let base = ExperimentConfig {
                radio,
                channel,
                det: DetectorConfig::new(w, a.threshold)?,
                adversary: AdversaryModel::NonScer,
                trials: mc.trials,
                master_seed: mc.seed,
            };
            let adv = pscer_advantage_with(&base, &snrs, !a.unpaired, mc.workers)
                .map_err(|e| explain(e, &command, &params))?;
            let mut rec = OutputRecord::new(
                &command,
                params,
                &["snr_db", "hdscer_pmd", "hdscer_ci_low", "hdscer_ci_high", "pscer_pmd", "pscer_ci_low", "pscer_ci_high"],
            );
            for r in &adv.rows {
                rec.push(vec![
                    Some(r.snr_db),
                    Some(r.hdscer.pmd_hat),
                    Some(r.hdscer.ci_997.0),
                    Some(r.hdscer.ci_997.1),
                    Some(r.pscer.pmd_hat),
                    Some(r.pscer.ci_997.0),
                    Some(r.pscer.ci_997.1),
                ]);
            }
            rec.summary.insert("hdscer_crossing_db".into(), json!(adv.hdscer_crossing_db));
            rec.summary.insert("pscer_crossing_db".into(), json!(adv.pscer_crossing_db));
            rec.summary.insert("shift_db".into(), json!(adv.shift_db));
            rec
        }
    };
    emit(&rec, a.out.as_ref())
}

fn method_name(m: CurveMethod) -> &'static str {
    match m {
        CurveMethod::Exact => "exact",
        CurveMethod::Clt => "clt",
    }
}

fn put_ws(params: &mut BTreeMap<String, Value>, ws: &[u64]) {
    params.insert("w_first".into(), json!(ws.first()));
    params.insert("w_last".into(), json!(ws.last()));
    params.insert("w_count".into(), json!(ws.len()));
}

fn put_snrs(params: &mut BTreeMap<String, Value>, snrs: &[f64]) {
    params.insert("adv_snr_db".into(), json!(snrs));
}

fn push_sweep(rec: &mut OutputRecord, rows: &[SweepRow]) {
    for r in rows {
        let s = r.summary;
        let [l, lin] = prob_cells(r.analytic.pmd);
        rec.push(vec![
            Some(r.point),
            Some(s.trials as f64),
            Some(s.missed_detections as f64),
            Some(s.pmd_hat),
            Some(s.ci_997.0),
            Some(s.ci_997.1),
            l,
            lin,
            Some(f64::from(u8::from(r.contained()))),
        ]);
    }
}

fn emit(rec: &OutputRecord, out: Option<&PathBuf>) -> CmdResult {
    let io_fail = |e: std::io::Error| Failure::usage(format!("cannot write output: {e}"));
    match out {
        None => {
            let mut buf = Vec::new();
            rec.write_csv(&mut buf).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
        }
        Some(path) => {
            let file = File::create(path).map_err(io_fail)?;
            rec.write_csv(BufWriter::new(file)).map_err(|e| Failure::usage(e.to_string()))?;
            let sidecar = path.with_extension("json");
            let json = rec.to_json();
            let mut f = File::create(&sidecar).map_err(io_fail)?;
            f.write_all(json.as_bytes()).map_err(io_fail)?;
            Ok(json)
        }
    }
}
