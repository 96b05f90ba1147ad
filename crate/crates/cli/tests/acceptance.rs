//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report is always
//! printed. Criteria listed in `KNOWN_RED` are expected to fail for the
//! reason given; the run fails if any other criterion fails or if a known
//! red one unexpectedly passes.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use prfauth::analytic::{
    breaking_adversary_snr, log_normal_sf, min_w_for_security, pfa, pmd_exact, pmd_vs_w,
    CurveMethod,
};
use prfauth::montecarlo::{
    pscer_advantage_with, default_workers, seed_from_u64, validation_sweep_with_workers,
    ExperimentConfig, SweepAxis,
};
use prfauth::params::{
    adversary_link_budget, chip_success_probability, db_to_linear, galileo_e6c_preset,
    required_antenna_gain, AdversaryModel, ChannelModel, DetectorConfig, RadioModel,
};

const KNOWN_RED: &[(u8, &str)] = &[
    (1, "the searched minimum is 342: W=341 reaches 2^-127.98, 0.02 bit short of 2^-128"),
    (2, "the searched minimum is 78: W=77 reaches 2^-31.76, 0.24 bit short of 2^-32"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn galileo() -> (RadioModel, ChannelModel) {
    let r = galileo_e6c_preset();
    (r, ChannelModel::from_radio(&r))
}

fn security_claim(bits: f64, claimed_w: u64) -> Outcome {
    let (r, ch) = galileo();
    let w = min_w_for_security(&r, &ch, bits, 0.5).expect("search succeeds");
    let at = |w: u64| pmd_exact(&r, &ch, &DetectorConfig::with_w(w).unwrap(), 0.5).unwrap().pmd.log2();
    let (l_min, l_claim) = (at(w), at(claimed_w));
    let in_band = w.abs_diff(claimed_w) <= 2;
    let pass = in_band && l_min <= -bits && l_claim <= -bits;
    outcome(
        pass,
        format!(
            "min W = {w} (want {claimed_w} ± 2: {}), log2 PMD(W={w}) = {l_min:.3}, log2 PMD(W={claimed_w}) = {l_claim:.3} (want ≤ {})",
            if in_band { "ok" } else { "out of band" },
            -bits
        ),
    )
}

fn c3_inflection() -> Outcome {
    let db = breaking_adversary_snr(0.5).unwrap();
    let p = chip_success_probability(db_to_linear(db));
    outcome(
        (db + 3.42).abs() <= 0.01 && (p - 0.75).abs() <= 0.001,
        format!("breaking SNR = {db:.4} dB, chip success = {p:.5}"),
    )
}

fn c4_link_budget() -> Outcome {
    let snr = adversary_link_budget(-153.0, 300.0, 10.23e6, 0.0).unwrap();
    let gain = required_antenna_gain(-153.0, 300.0, 10.23e6, -3.42).unwrap();
    outcome(
        (snr + 19.0).abs() <= 0.5 && (gain - 15.58).abs() <= 0.5,
        format!("SNR at 0 dBi = {snr:.3} dB, gain to -3.42 dB = {gain:.3} dB"),
    )
}

/// PMD with no receiver noise by visiting all `2^(n·W)` guess outcomes and
/// correlating the actual sign vectors. Outcomes are walked in Gray-code
/// order, so each step flips one forged chip and updates one code's dot
/// product.
fn enumerate_pmd(n: usize, w: usize, p: f64, threshold: f64) -> f64 {
    let total = n * w;
    let authentic: Vec<i64> = (0..total).map(|i| if (i * 5 + 1) % 3 == 0 { -1 } else { 1 }).collect();
    // start with every chip wrong
    let mut forged: Vec<i64> = authentic.iter().map(|a| -a).collect();
    let mut dots: Vec<i64> = (0..w)
        .map(|k| (k * n..(k + 1) * n).map(|i| authentic[i] * forged[i]).sum())
        .collect();
    let mut right = 0i32;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for step in 0u64..(1u64 << total) {
        if step > 0 {
            let i = step.trailing_zeros() as usize;
            forged[i] = -forged[i];
            dots[i / n] += 2 * authentic[i] * forged[i];
            right += if forged[i] == authentic[i] { 1 } else { -1 };
        }
        let y_bar = dots.iter().map(|&d| d as f64 / n as f64).sum::<f64>() / w as f64;
        if y_bar >= threshold {
            let pr = p.powi(right) * (1.0 - p).powi(total as i32 - right);
            let t = sum + pr;
            comp += if sum >= pr { (sum - t) + pr } else { (pr - t) + sum };
            sum = t;
        }
    }
    sum + comp
}

fn c5_enumeration() -> Outcome {
    let clean = ChannelModel::new(1.0, 0.0).unwrap();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=12u64 {
        let radio = RadioModel::new(n, 1.0, 2.0 * n as f64, 30.0).unwrap();
        for w in 1..=2u64 {
            for p in [0.5, 0.75] {
                let det = DetectorConfig::new(w, 0.5).unwrap();
                let got = pmd_exact(&radio, &clean, &det, p).unwrap().pmd.to_linear().unwrap();
                let want = enumerate_pmd(n as usize, w as usize, p, 0.5);
                worst = worst.max(((got - want) / want).abs());
                cases += 1;
            }
        }
    }
    let radio = RadioModel::new(4, 1.0, 8.0, 30.0).unwrap();
    let five_16 = pmd_exact(&radio, &clean, &DetectorConfig::with_w(1).unwrap(), 0.5).unwrap().pmd.to_linear().unwrap();
    let ok16 = ((five_16 - 5.0 / 16.0) / (5.0 / 16.0)).abs() <= 1e-12;
    outcome(
        worst <= 1e-12 && ok16,
        format!("{cases} cases, worst relative error {worst:.2e}; n=4,W=1 gives {five_16}"),
    )
}

/// `log2 Q(z)` from a 50-digit evaluation of `erfc(z/√2)/2`.
const FROZEN_LOG2_SF: [(f64, f64); 5] = [
    (1.0, -2.656032797424106),
    (5.0, -21.73419847400773),
    (13.36, -133.8265991473834),
    (30.0, -655.4470056263213),
    (50.0, -1810.338981867789),
];

fn c6_tail() -> Outcome {
    let mut worst = 0.0f64;
    for (z, want) in FROZEN_LOG2_SF {
        let got = log_normal_sf(z).log2();
        worst = worst.max(((got - want) / want).abs());
    }
    outcome(worst <= 1e-10, format!("worst relative-in-log error {worst:.2e} over z ∈ {{1, 5, 13.36, 30, 50}}"))
}

fn lab(n: u64, noise: f64, w: u64, adversary: AdversaryModel, trials: u64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        radio: RadioModel::new(n, 1e-3, 2000.0 * n as f64, 30.0).unwrap(),
        channel: ChannelModel::new(1.0, noise).unwrap(),
        det: DetectorConfig::with_w(w).unwrap(),
        adversary,
        trials,
        master_seed: seed_from_u64(seed),
    }
}

fn containment(base: &ExperimentConfig, axis: SweepAxis, pmd_range: (f64, f64)) -> Outcome {
    let rows = validation_sweep_with_workers(base, &axis, default_workers()).unwrap();
    let inside = rows.iter().filter(|r| r.contained()).count();
    let (lo, hi) = rows
        .iter()
        .map(|r| r.analytic_linear())
        .fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p), b.max(p)));
    let in_range = lo >= pmd_range.0 && hi <= pmd_range.1;
    // at least 9 of every 10 points
    let need = (rows.len() * 9).div_ceil(10);
    outcome(
        in_range && rows.len() >= 10 && inside >= need,
        format!(
            "{inside}/{} points contain the exact PMD (need {need}); exact PMD spans [{lo:.2e}, {hi:.3}]",
            rows.len()
        ),
    )
}

fn c7_validate_blind() -> Outcome {
    // 31 chips, 62 samples per code, σ²/P = 16.5
    let base = lab(31, 16.5, 1, AdversaryModel::NonScer, 100_000, 7);
    containment(&base, SweepAxis::W((2..=11).collect()), (1e-3, 1e-1))
}

fn c8_validate_hard() -> Outcome {
    let base = lab(31, 2.0, 4, AdversaryModel::hd_scer_db(0.0).unwrap(), 100_000, 8);
    let grid: Vec<f64> = (0..16).map(|i| -12.0 + 0.75 * i as f64).collect();
    containment(&base, SweepAxis::AdversarySnrDb(grid), (1e-3, 0.9))
}

fn c9_soft_advantage() -> Outcome {
    let base = lab(255, 1e-3, 4, AdversaryModel::NonScer, 4000, 9);
    let grid: Vec<f64> = (0..=20).map(|i| -7.0 + 0.25 * i as f64).collect();
    let adv = pscer_advantage_with(&base, &grid, true, default_workers()).unwrap();
    let dominated = adv
        .rows
        .iter()
        .filter(|r| r.pscer.ci_997.1 < r.hdscer.ci_997.0)
        .map(|r| r.snr_db)
        .collect::<Vec<_>>();
    let ordered = dominated.is_empty();
    outcome(
        ordered && (0.3..=1.0).contains(&adv.shift_db),
        format!(
            "shift {:.3} dB (hard crossing {:.3} dB, soft {:.3} dB); soft below hard beyond CI at {:?}",
            adv.shift_db, adv.hdscer_crossing_db, adv.pscer_crossing_db, dominated
        ),
    )
}

fn c10_pfa_below_pmd() -> Outcome {
    let (r, ch) = galileo();
    let ws: Vec<u64> = (1..=800).collect();
    let pmds = pmd_vs_w(&r, &ch, &ws, 0.5, 0.5, CurveMethod::Exact).unwrap();
    let bad: Vec<u64> = pmds
        .iter()
        .filter(|(w, md)| pfa(&r, &ch, &DetectorConfig::with_w(*w).unwrap()).unwrap() > md.pmd)
        .map(|(w, _)| *w)
        .collect();
    let (w800, md800) = pmds[799];
    let fa800 = pfa(&r, &ch, &DetectorConfig::with_w(w800).unwrap()).unwrap();
    outcome(
        bad.is_empty(),
        format!("violations at W = {bad:?}; at W=800 log2 PFA = {:.1}, log2 PMD = {:.1}", fa800.log2(), md800.pmd.log2()),
    )
}

fn run_cli(args: &[&str], threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_prfauth"))
        .args(args)
        .env("PRFAUTH_THREADS", threads)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["pfa", "--w", "100"],
        vec!["pmd", "--w", "77", "--adv-snr-db", "-8"],
        vec!["search", "--bits", "32"],
        vec!["linkbudget", "--rx-power-dbw", "-153", "--temp-k", "300", "--bandwidth-hz", "10.23e6", "--gain-db", "3"],
        vec!["figures", "--figure", "hdscer-pmd-snr", "--ws", "50,100", "--snr-step", "1"],
        vec!["figures", "--figure", "validate-nscer", "--trials", "20000", "--seed", "42"],
        vec!["figures", "--figure", "validate-hdscer", "--trials", "5000", "--seed", "42"],
        vec!["figures", "--figure", "pscer", "--trials", "500", "--seed", "42"],
    ];
    let mut differing = Vec::new();
    for (k, cmd) in commands.iter().enumerate() {
        let mut seen: Option<(Vec<u8>, Vec<u8>, Vec<u8>)> = None;
        for (run, threads) in ["1", "4", "16", "4"].iter().enumerate() {
            let out = dir.path().join(format!("c{k}-{run}.csv"));
            let mut args = cmd.clone();
            let is_figure = cmd[0] == "figures";
            let out_s = out.to_str().unwrap().to_owned();
            if is_figure {
                args.extend(["--out", &out_s]);
            }
            let stdout = run_cli(&args, threads);
            let (csv, sidecar) = if is_figure { read_pair(&out) } else { (Vec::new(), Vec::new()) };
            let stdout = if is_figure { Vec::new() } else { stdout };
            let now = (stdout, csv, sidecar);
            match &seen {
                None => seen = Some(now),
                Some(first) if *first != now => differing.push(format!("{} (threads {threads})", cmd.join(" "))),
                Some(_) => {}
            }
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} commands x 1/4/16/4 workers; differing: {differing:?}", commands.len()),
    )
}

fn read_pair(csv: &Path) -> (Vec<u8>, Vec<u8>) {
    (std::fs::read(csv).unwrap(), std::fs::read(csv.with_extension("json")).unwrap())
}

type Criterion = (u8, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let only: Option<u8> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let criteria: [Criterion; 11] = [
        (1, "128-bit minimal W", Duration::from_secs(60), || security_claim(128.0, 341)),
        (2, "32-bit minimal W", Duration::from_secs(10), || security_claim(32.0, 77)),
        (3, "inflection SNR", Duration::from_secs(1), c3_inflection),
        (4, "link budget", Duration::from_secs(1), c4_link_budget),
        (5, "exhaustive enumeration", Duration::from_secs(10), c5_enumeration),
        (6, "normal tail", Duration::from_secs(1), c6_tail),
        (7, "simulated blind guessing", Duration::from_secs(600), c7_validate_blind),
        (8, "simulated hard decisions", Duration::from_secs(600), c8_validate_hard),
        (9, "soft-decision advantage", Duration::from_secs(900), c9_soft_advantage),
        (10, "PFA below PMD", Duration::from_secs(300), c10_pfa_below_pmd),
        (11, "determinism", Duration::from_secs(300), c11_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, budget, check) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let t = Instant::now();
        let o = check();
        let took = t.elapsed();
        let pass = o.pass && took <= budget;
        let status = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} [{name}] {} ({:.1}s of {}s)",
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        match KNOWN_RED.iter().find(|(k, _)| *k == id) {
            Some((_, why)) if !pass => println!("             known red: {why}"),
            Some(_) => unexpected.push(format!("criterion {id} passed but is listed as known red")),
            None if !pass => unexpected.push(format!("criterion {id} failed")),
            None => {}
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: {} known red, all other criteria pass", KNOWN_RED.len());
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            println!("acceptance: {u}");
        }
        ExitCode::FAILURE
    }
}
