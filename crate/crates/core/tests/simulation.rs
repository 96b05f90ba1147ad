//! End-to-end behaviour of the simulated transmitter/adversary/receiver chain.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use prfauth::analytic::{breaking_adversary_snr, pmd_exact};
use prfauth::montecarlo::{
    run_experiment_with_workers, seed_from_u64, trial_rng, validation_sweep_with_workers,
    ExperimentConfig, SweepAxis,
};
use prfauth::params::{AdversaryModel, ChannelModel, DetectorConfig, RadioModel};
use prfauth::signalsim::{
    authenticate, gen_prf_code, read_segments, resample, synth_baseband, write_segments, Decision,
};

fn config(n: u64, ft: f64, noise: f64, w: u64, adversary: AdversaryModel, trials: u64) -> ExperimentConfig {
    ExperimentConfig {
        radio: RadioModel::new(n, 1.0, ft, 30.0).unwrap(),
        channel: ChannelModel::new(1.0, noise).unwrap(),
        det: DetectorConfig::with_w(w).unwrap(),
        adversary,
        trials,
        master_seed: seed_from_u64(2024),
    }
}

#[test]
fn four_chip_blind_guessing_rate() {
    let cfg = config(4, 4.0, 0.0, 1, AdversaryModel::NonScer, 1_000_000);
    let s = run_experiment_with_workers(&cfg, 4).unwrap();
    assert!((s.pmd_hat - 0.3125).abs() < 0.0014, "{}", s.pmd_hat);
}

#[test]
fn authentic_clean_signal_never_alarms() {
    let cfg = config(31, 62.0, 0.0, 3, AdversaryModel::Authentic, 2000);
    assert_eq!(run_experiment_with_workers(&cfg, 2).unwrap().missed_detections, 0);
}

#[test]
fn perfect_forgeries_always_pass() {
    let inf = AdversaryModel::HdScer { adversary_chip_snr: f64::INFINITY };
    let cfg = config(31, 62.0, 2.0, 4, inf, 3000);
    assert_eq!(run_experiment_with_workers(&cfg, 2).unwrap().pmd_hat, 1.0);
}

#[test]
fn breaking_point_forgeries_pass_about_half_the_time() {
    let db = breaking_adversary_snr(0.5).unwrap();
    let base = config(255, 510.0, 0.5, 8, AdversaryModel::hd_scer_db(db).unwrap(), 20_000);
    let rows = validation_sweep_with_workers(&base, &SweepAxis::AdversarySnrDb(vec![db]), 4).unwrap();
    let r = rows[0];
    assert!((r.summary.pmd_hat - 0.5).abs() < 0.05, "{}", r.summary.pmd_hat);
    assert!(r.contained(), "{:?}", r);
}

#[test]
fn noisy_blind_guessing_tracks_exact_pmd() {
    let cfg = config(31, 62.0, 16.5, 5, AdversaryModel::NonScer, 100_000);
    let s = run_experiment_with_workers(&cfg, 4).unwrap();
    let p = pmd_exact(&cfg.radio, &cfg.channel, &cfg.det, 0.5).unwrap().pmd.to_linear_lossy();
    assert!(s.contains(p), "{p} not in {:?}", s.ci_997);
}

#[test]
fn baseband_file_roundtrip_keeps_the_decision() {
    let radio = RadioModel::new(127, 1e-3, 254e3, 30.0).unwrap();
    let ch = ChannelModel::new(1.0, 4.0).unwrap();
    let det = DetectorConfig::with_w(3).unwrap();
    let seed = [9u8; 32];
    let mut rng = trial_rng(&seed, 0);
    let replicas: Vec<_> = (0..3)
        .map(|k| resample(&gen_prf_code(&seed, k, 127).unwrap(), &radio).unwrap())
        .collect();
    let segments: Vec<_> = replicas.iter().map(|r| synth_baseband(r, None, &ch, &mut rng).unwrap()).collect();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("capture.bin");
    let mut out = BufWriter::new(File::create(&path).unwrap());
    write_segments(&mut out, &segments).unwrap();
    out.flush().unwrap();
    drop(out);
    let back = read_segments(&mut BufReader::new(File::open(&path).unwrap())).unwrap();

    assert_eq!(back.len(), 3);
    let (d0, y0) = authenticate(&segments, &replicas, &radio, &ch, &det).unwrap();
    let (d1, y1) = authenticate(&back, &replicas, &radio, &ch, &det).unwrap();
    assert_eq!(d0, Decision::Authentic);
    assert_eq!(d0, d1);
    assert!((y0 - y1).abs() < 1e-5);
}
