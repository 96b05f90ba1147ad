//! `prfauth`: PMD/PFA tables, parameter search, link budgets and figure data.
//!
//! Every command prints a JSON record carrying its full parameter set.
//! Exit codes: 0 success, 2 usage error, 3 infeasible or degenerate result.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod figures;
mod output;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use prfauth::analytic::{
    min_cn0, min_w_for_security, pfa, pmd_clt, pmd_exact, pmd_exact_with, ExactOptions,
};
use prfauth::params::{
    adversary_link_budget, chip_success_probability, db_to_linear, galileo_e6c_preset,
    noise_variance_ratio, required_antenna_gain, thermal_noise_dbw, ChannelModel, DetectorConfig,
    RadioModel,
};
use prfauth::Error;
use serde_json::{json, Value};

use output::{prob_cells, OutputRecord};

#[derive(Parser, Debug)]
#[command(name = "prfauth", version, about = "PRF ranging authentication security calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// False-alarm probability of an authentic signal.
    Pfa {
        #[command(flatten)]
        radio: RadioArgs,
        #[arg(long)]
        w: u64,
        #[arg(long, default_value_t = DetectorConfig::DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Missed-detection probability against a chip-guessing forger.
    Pmd(PmdArgs),
    /// Smallest W (or C/N0) meeting a security level.
    Search(SearchArgs),
    /// Write the data behind one of the standard figures as CSV.
    Figures(Box<figures::FigureArgs>),
    /// Adversary precorrelation SNR from a link budget, or the gain needed
    /// for a target SNR.
    Linkbudget(LinkArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Galileo E6-C: 5115 chips, 1 ms, Nyquist 10.23 MHz, 30 dB-Hz.
    GalileoE6c,
    /// 31-chip code, 62 kHz, heavily degraded channel (σ²/P ≈ 16.5).
    #[value(name = "lab-31")]
    Lab31,
    /// `lab-31` with a cleaner channel (σ²/P ≈ 2.0).
    #[value(name = "lab-31-clean")]
    Lab31Clean,
    /// 255-chip code, 510 kHz, nearly noise-free receiver (σ²/P ≈ 1e-3).
    #[value(name = "lab-255")]
    Lab255,
}

impl Preset {
    fn radio(self) -> RadioModel {
        match self {
            Preset::GalileoE6c => galileo_e6c_preset(),
            Preset::Lab31 => RadioModel { chips: 31, code_period_s: 1e-3, sample_rate_hz: 62e3, cn0_dbhz: 32.74 },
            Preset::Lab31Clean => RadioModel { cn0_dbhz: 41.9, ..Preset::Lab31.radio() },
            Preset::Lab255 => RadioModel { chips: 255, code_period_s: 1e-3, sample_rate_hz: 510e3, cn0_dbhz: 84.07 },
        }
    }

    fn name(self) -> &'static str {
        match self {
            Preset::GalileoE6c => "galileo-e6c",
            Preset::Lab31 => "lab-31",
            Preset::Lab31Clean => "lab-31-clean",
            Preset::Lab255 => "lab-255",
        }
    }
}

/// Radio and channel flags; explicit flags override the preset.
#[derive(Args, Debug, Clone)]
pub struct RadioArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Chips per ranging code.
    #[arg(long)]
    chips: Option<u64>,
    #[arg(long)]
    code_period_s: Option<f64>,
    #[arg(long)]
    sample_rate_hz: Option<f64>,
    #[arg(long)]
    cn0_dbhz: Option<f64>,
    /// Per-sample noise-to-signal ratio σ²/P; overrides the C/N0 mapping.
    #[arg(long)]
    noise_ratio: Option<f64>,
}

impl RadioArgs {
    pub fn resolve(&self, default: Preset, params: &mut BTreeMap<String, Value>) -> prfauth::Result<(RadioModel, ChannelModel)> {
        let preset = self.preset.unwrap_or(default);
        let base = preset.radio();
        let radio = RadioModel::new(
            self.chips.unwrap_or(base.chips),
            self.code_period_s.unwrap_or(base.code_period_s),
            self.sample_rate_hz.unwrap_or(base.sample_rate_hz),
            self.cn0_dbhz.unwrap_or(base.cn0_dbhz),
        )?;
        let channel = match self.noise_ratio {
            Some(r) => ChannelModel::new(1.0, r)?,
            None => ChannelModel::from_radio(&radio),
        };
        params.insert("preset".into(), json!(preset.name()));
        params.insert("chips".into(), json!(radio.chips));
        params.insert("code_period_s".into(), json!(radio.code_period_s));
        params.insert("sample_rate_hz".into(), json!(radio.sample_rate_hz));
        params.insert("cn0_dbhz".into(), json!(radio.cn0_dbhz));
        params.insert("noise_ratio".into(), json!(channel.noise_ratio()));
        params.insert("noise_ratio_from_cn0".into(), json!(self.noise_ratio.is_none()));
        Ok((radio, channel))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Clt,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("forger").args(["p_chip", "adv_snr_db"])))]
struct PmdArgs {
    #[command(flatten)]
    radio: RadioArgs,
    #[arg(long)]
    w: u64,
    #[arg(long, default_value_t = DetectorConfig::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Per-chip success probability of the forger (default 0.5: blind guessing).
    #[arg(long)]
    p_chip: Option<f64>,
    /// Hard-decision adversary chip SNR in dB.
    #[arg(long, allow_negative_numbers = true)]
    adv_snr_db: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    method: Method,
    /// Drop binomial terms this many bits below the largest (exact only).
    #[arg(long)]
    truncate_bits: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Free {
    W,
    Cn0,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    radio: RadioArgs,
    #[arg(long)]
    bits: f64,
    #[arg(long, value_enum, default_value = "w")]
    free: Free,
    /// Fixed W when solving for C/N0.
    #[arg(long)]
    w: Option<u64>,
    #[arg(long, default_value_t = DetectorConfig::DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").required(true).args(["gain_db", "target_snr_db"])))]
struct LinkArgs {
    #[arg(long, allow_negative_numbers = true)]
    rx_power_dbw: f64,
    #[arg(long)]
    temp_k: f64,
    #[arg(long)]
    bandwidth_hz: f64,
    #[arg(long, allow_negative_numbers = true)]
    gain_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    target_snr_db: Option<f64>,
}

/// A failed command: exit code plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Record printed to stdout for infeasible results.
    pub record: Option<Box<OutputRecord>>,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into(), record: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::LengthMismatch { .. } => 2,
            Error::Infeasible(_) | Error::Degenerate(_) | Error::SearchLimit { .. } | Error::TermBudget { .. } => 3,
        };
        Failure { code, message: e.to_string(), record: None }
    }
}

/// Attach an explanatory record to an infeasible-result failure.
pub fn explain(e: Error, command: &str, params: &BTreeMap<String, Value>) -> Failure {
    let mut f = Failure::from(e);
    if f.code == 3 {
        let mut rec = OutputRecord::new(command, params.clone(), &[]);
        rec.error = Some(f.message.clone());
        f.record = Some(Box::new(rec));
    }
    f
}

type CmdResult = Result<String, Failure>;

fn cmd_pfa(radio: &RadioArgs, w: u64, threshold: f64) -> CmdResult {
    let mut params = BTreeMap::new();
    let (r, ch) = radio.resolve(Preset::GalileoE6c, &mut params)?;
    let det = DetectorConfig::new(w, threshold)?;
    params.insert("w".into(), json!(w));
    params.insert("threshold".into(), json!(threshold));
    let p = pfa(&r, &ch, &det)?;
    let mut rec = OutputRecord::new("pfa", params, &["w", "threshold", "log2_pfa", "pfa"]);
    let [l, lin] = prob_cells(p);
    rec.push(vec![Some(w as f64), Some(threshold), l, lin]);
    Ok(rec.to_json())
}

fn cmd_pmd(a: &PmdArgs) -> CmdResult {
    let mut params = BTreeMap::new();
    let (r, ch) = a.radio.resolve(Preset::GalileoE6c, &mut params)?;
    let det = DetectorConfig::new(a.w, a.threshold)?;
    let p = match (a.p_chip, a.adv_snr_db) {
        (Some(p), _) => p,
        (None, Some(db)) => chip_success_probability(db_to_linear(db)),
        (None, None) => 0.5,
    };
    if a.truncate_bits.is_some() && a.method == Method::Clt {
        return Err(Failure::usage("--truncate-bits applies to --method exact only"));
    }
    params.insert("w".into(), json!(a.w));
    params.insert("threshold".into(), json!(a.threshold));
    params.insert("p_chip".into(), json!(p));
    params.insert("adv_snr_db".into(), json!(a.adv_snr_db));
    params.insert("method".into(), json!(if a.method == Method::Exact { "exact" } else { "clt" }));
    params.insert("truncate_bits".into(), json!(a.truncate_bits));
    let res = match a.method {
        Method::Exact => {
            let opts = ExactOptions { truncate_bits: a.truncate_bits, ..Default::default() };
            pmd_exact_with(&r, &ch, &det, p, opts).map_err(|e| explain(e, "pmd", &params))?
        }
        Method::Clt => pmd_clt(&r, &ch, &det, p)?,
    };
    let mut rec = OutputRecord::new(
        "pmd",
        params,
        &["w", "threshold", "p_chip", "log2_pmd", "pmd", "log2_discarded_bound"],
    );
    let [l, lin] = prob_cells(res.pmd);
    rec.push(vec![Some(a.w as f64), Some(a.threshold), Some(p), l, lin, res.discarded_bound.map(|b| b.log2())]);
    Ok(rec.to_json())
}

fn cmd_search(a: &SearchArgs) -> CmdResult {
    let mut params = BTreeMap::new();
    let (r, ch) = a.radio.resolve(Preset::GalileoE6c, &mut params)?;
    params.insert("bits".into(), json!(a.bits));
    params.insert("threshold".into(), json!(a.threshold));
    match a.free {
        Free::W => {
            if a.w.is_some() {
                return Err(Failure::usage("--w is the free variable; drop it or use --free cn0"));
            }
            params.insert("free".into(), json!("w"));
            let w = min_w_for_security(&r, &ch, a.bits, a.threshold).map_err(|e| explain(e, "search", &params))?;
            let det = DetectorConfig::new(w, a.threshold)?;
            let pmd = pmd_exact(&r, &ch, &det, 0.5)?.pmd;
            let mut rec = OutputRecord::new("search", params, &["bits", "w", "log2_pmd", "pmd"]);
            let [l, lin] = prob_cells(pmd);
            rec.push(vec![Some(a.bits), Some(w as f64), l, lin]);
            Ok(rec.to_json())
        }
        Free::Cn0 => {
            let w = a.w.ok_or_else(|| Failure::usage("--free cn0 needs a fixed --w"))?;
            params.insert("free".into(), json!("cn0"));
            params.insert("w".into(), json!(w));
            let cn0 = min_cn0(&r, w, a.bits, a.threshold).map_err(|e| explain(e, "search", &params))?;
            let mut rec = OutputRecord::new("search", params, &["bits", "w", "min_cn0_dbhz", "noise_ratio"]);
            rec.push(vec![Some(a.bits), Some(w as f64), Some(cn0), Some(noise_variance_ratio(&r.with_cn0(cn0)))]);
            Ok(rec.to_json())
        }
    }
}

fn cmd_linkbudget(a: &LinkArgs) -> CmdResult {
    let mut params = BTreeMap::new();
    params.insert("rx_power_dbw".into(), json!(a.rx_power_dbw));
    params.insert("temp_k".into(), json!(a.temp_k));
    params.insert("bandwidth_hz".into(), json!(a.bandwidth_hz));
    params.insert("gain_db".into(), json!(a.gain_db));
    params.insert("target_snr_db".into(), json!(a.target_snr_db));
    let noise = thermal_noise_dbw(a.temp_k, a.bandwidth_hz);
    let (gain, snr) = match (a.gain_db, a.target_snr_db) {
        (Some(g), None) => (g, adversary_link_budget(a.rx_power_dbw, a.temp_k, a.bandwidth_hz, g)?),
        (None, Some(t)) => (required_antenna_gain(a.rx_power_dbw, a.temp_k, a.bandwidth_hz, t)?, t),
        _ => return Err(Failure::usage("give exactly one of --gain-db and --target-snr-db")),
    };
    let mut rec = OutputRecord::new("linkbudget", params, &["noise_dbw", "gain_db", "snr_db", "p_chip"]);
    rec.push(vec![Some(noise), Some(gain), Some(snr), Some(chip_success_probability(db_to_linear(snr)))]);
    Ok(rec.to_json())
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Pfa { radio, w, threshold } => cmd_pfa(radio, *w, *threshold),
        Command::Pmd(a) => cmd_pmd(a),
        Command::Search(a) => cmd_search(a),
        Command::Figures(a) => figures::cmd_figures(a),
        Command::Linkbudget(a) => cmd_linkbudget(a),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors by itself
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(rec) = f.record {
                print!("{}", rec.to_json());
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
