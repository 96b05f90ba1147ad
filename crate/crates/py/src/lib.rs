//! Python bindings: radio/channel/detector models, the closed-form PMD and
//! PFA, parameter search, and the seeded Monte Carlo.
//!
//! Probabilities cross the boundary as log2 values; `PmdResult.linear` is
//! `None` when the value underflows.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use prfauth::analytic::{self, ExactOptions, LogProb};
use prfauth::montecarlo::{self, ExperimentConfig};
use prfauth::params::{self, AdversaryModel};
use prfauth::signalsim;
use prfauth::Error;

create_exception!(prfauth, InfeasibleError, PyException, "No parameter value meets the request.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::LengthMismatch { .. } => PyValueError::new_err(e.to_string()),
        _ => InfeasibleError::new_err(e.to_string()),
    }
}

#[pyclass(name = "RadioModel", module = "prfauth", from_py_object)]
#[derive(Clone, Copy)]
struct PyRadioModel {
    inner: params::RadioModel,
}

#[pymethods]
impl PyRadioModel {
    #[new]
    #[pyo3(signature = (chips, code_period_s, sample_rate_hz, cn0_dbhz))]
    fn new(chips: u64, code_period_s: f64, sample_rate_hz: f64, cn0_dbhz: f64) -> PyResult<Self> {
        let inner = params::RadioModel::new(chips, code_period_s, sample_rate_hz, cn0_dbhz).map_err(to_py)?;
        Ok(PyRadioModel { inner })
    }

    /// Galileo E6-C at 30 dB-Hz.
    #[staticmethod]
    fn galileo_e6c() -> Self {
        PyRadioModel { inner: params::galileo_e6c_preset() }
    }

    #[getter]
    fn chips(&self) -> u64 {
        self.inner.chips
    }

    #[getter]
    fn code_period_s(&self) -> f64 {
        self.inner.code_period_s
    }

    #[getter]
    fn sample_rate_hz(&self) -> f64 {
        self.inner.sample_rate_hz
    }

    #[getter]
    fn cn0_dbhz(&self) -> f64 {
        self.inner.cn0_dbhz
    }

    fn with_cn0(&self, cn0_dbhz: f64) -> Self {
        PyRadioModel { inner: self.inner.with_cn0(cn0_dbhz) }
    }

    fn samples_per_code(&self) -> usize {
        self.inner.samples_per_code()
    }

    /// σ²/P implied by the C/N0.
    fn noise_ratio(&self) -> f64 {
        params::noise_variance_ratio(&self.inner)
    }

    fn __repr__(&self) -> String {
        let r = self.inner;
        format!(
            "RadioModel(chips={}, code_period_s={}, sample_rate_hz={}, cn0_dbhz={})",
            r.chips, r.code_period_s, r.sample_rate_hz, r.cn0_dbhz
        )
    }
}

#[pyclass(name = "ChannelModel", module = "prfauth", from_py_object)]
#[derive(Clone, Copy)]
struct PyChannelModel {
    inner: params::ChannelModel,
}

#[pymethods]
impl PyChannelModel {
    #[new]
    fn new(signal_power: f64, noise_variance: f64) -> PyResult<Self> {
        Ok(PyChannelModel { inner: params::ChannelModel::new(signal_power, noise_variance).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_radio(radio: &PyRadioModel) -> Self {
        PyChannelModel { inner: params::ChannelModel::from_radio(&radio.inner) }
    }

    #[getter]
    fn signal_power(&self) -> f64 {
        self.inner.signal_power
    }

    #[getter]
    fn noise_variance(&self) -> f64 {
        self.inner.noise_variance
    }

    fn __repr__(&self) -> String {
        format!("ChannelModel(signal_power={}, noise_variance={})", self.inner.signal_power, self.inner.noise_variance)
    }
}

#[pyclass(name = "DetectorConfig", module = "prfauth", from_py_object)]
#[derive(Clone, Copy)]
struct PyDetectorConfig {
    inner: params::DetectorConfig,
}

#[pymethods]
impl PyDetectorConfig {
    #[new]
    #[pyo3(signature = (w, threshold = params::DetectorConfig::DEFAULT_THRESHOLD))]
    fn new(w: u64, threshold: f64) -> PyResult<Self> {
        Ok(PyDetectorConfig { inner: params::DetectorConfig::new(w, threshold).map_err(to_py)? })
    }

    #[getter]
    fn w(&self) -> u64 {
        self.inner.w
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.inner.threshold
    }

    fn __repr__(&self) -> String {
        format!("DetectorConfig(w={}, threshold={})", self.inner.w, self.inner.threshold)
    }
}

#[pyclass(name = "PmdResult", module = "prfauth", frozen)]
struct PyPmdResult {
    inner: analytic::PmdResult,
}

#[pymethods]
impl PyPmdResult {
    #[getter]
    fn log2(&self) -> f64 {
        self.inner.pmd.log2()
    }

    #[getter]
    fn linear(&self) -> Option<f64> {
        self.inner.pmd.to_linear()
    }

    #[getter]
    fn method(&self) -> &'static str {
        match self.inner.method {
            analytic::PmdMethod::Exact => "exact",
            analytic::PmdMethod::Clt => "clt",
            analytic::PmdMethod::MonteCarlo { .. } => "monte_carlo",
        }
    }

    #[getter]
    fn discarded_bound_log2(&self) -> Option<f64> {
        self.inner.discarded_bound.map(LogProb::log2)
    }

    fn __repr__(&self) -> String {
        format!("PmdResult(log2={}, method='{}')", self.log2(), self.method())
    }
}

#[pyclass(name = "TrialSummary", module = "prfauth", frozen)]
struct PyTrialSummary {
    inner: montecarlo::TrialSummary,
}

#[pymethods]
impl PyTrialSummary {
    #[getter]
    fn missed_detections(&self) -> u64 {
        self.inner.missed_detections
    }

    #[getter]
    fn trials(&self) -> u64 {
        self.inner.trials
    }

    #[getter]
    fn pmd_hat(&self) -> f64 {
        self.inner.pmd_hat
    }

    #[getter]
    fn ci_997(&self) -> (f64, f64) {
        self.inner.ci_997
    }

    fn contains(&self, p: f64) -> bool {
        self.inner.contains(p)
    }

    fn __repr__(&self) -> String {
        let s = self.inner;
        format!("TrialSummary(missed_detections={}, trials={}, pmd_hat={})", s.missed_detections, s.trials, s.pmd_hat)
    }
}

/// log2 of the false-alarm probability.
#[pyfunction]
fn pfa(radio: PyRadioModel, channel: PyChannelModel, det: PyDetectorConfig) -> PyResult<f64> {
    Ok(analytic::pfa(&radio.inner, &channel.inner, &det.inner).map_err(to_py)?.log2())
}

#[pyfunction]
#[pyo3(signature = (radio, channel, det, p_chip = 0.5, truncate_bits = None))]
fn pmd_exact(
    py: Python<'_>,
    radio: PyRadioModel,
    channel: PyChannelModel,
    det: PyDetectorConfig,
    p_chip: f64,
    truncate_bits: Option<f64>,
) -> PyResult<PyPmdResult> {
    let opts = ExactOptions { truncate_bits, ..Default::default() };
    let inner = py
        .detach(|| analytic::pmd_exact_with(&radio.inner, &channel.inner, &det.inner, p_chip, opts))
        .map_err(to_py)?;
    Ok(PyPmdResult { inner })
}

#[pyfunction]
#[pyo3(signature = (radio, channel, det, p_chip = 0.5))]
fn pmd_clt(radio: PyRadioModel, channel: PyChannelModel, det: PyDetectorConfig, p_chip: f64) -> PyResult<PyPmdResult> {
    let inner = analytic::pmd_clt(&radio.inner, &channel.inner, &det.inner, p_chip).map_err(to_py)?;
    Ok(PyPmdResult { inner })
}

#[pyfunction]
#[pyo3(signature = (radio, channel, bits, threshold = params::DetectorConfig::DEFAULT_THRESHOLD))]
fn min_w_for_security(py: Python<'_>, radio: PyRadioModel, channel: PyChannelModel, bits: f64, threshold: f64) -> PyResult<u64> {
    py.detach(|| analytic::min_w_for_security(&radio.inner, &channel.inner, bits, threshold)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (radio, w, bits, threshold = params::DetectorConfig::DEFAULT_THRESHOLD))]
fn min_cn0(radio: PyRadioModel, w: u64, bits: f64, threshold: f64) -> PyResult<f64> {
    analytic::min_cn0(&radio.inner, w, bits, threshold).map_err(to_py)
}

/// Adversary chip SNR (dB) at which hard-decision forgeries sit on the threshold.
#[pyfunction]
#[pyo3(signature = (threshold = params::DetectorConfig::DEFAULT_THRESHOLD))]
fn breaking_adversary_snr(threshold: f64) -> PyResult<f64> {
    analytic::breaking_adversary_snr(threshold).map_err(to_py)
}

/// `Φ(√snr)` for a linear chip SNR.
#[pyfunction]
fn chip_success_probability(chip_snr: f64) -> f64 {
    params::chip_success_probability(chip_snr)
}

#[pyfunction]
#[pyo3(signature = (rx_power_dbw, temp_k, bandwidth_hz, gain_db = 0.0))]
fn adversary_link_budget(rx_power_dbw: f64, temp_k: f64, bandwidth_hz: f64, gain_db: f64) -> PyResult<f64> {
    params::adversary_link_budget(rx_power_dbw, temp_k, bandwidth_hz, gain_db).map_err(to_py)
}

#[pyfunction]
fn required_antenna_gain(rx_power_dbw: f64, temp_k: f64, bandwidth_hz: f64, target_snr_db: f64) -> PyResult<f64> {
    params::required_antenna_gain(rx_power_dbw, temp_k, bandwidth_hz, target_snr_db).map_err(to_py)
}

/// log2 of the standard normal upper tail.
#[pyfunction]
fn log_normal_sf(z: f64) -> f64 {
    analytic::log_normal_sf(z).log2()
}

/// ±1 chips of code `code_index` under a 32-byte seed.
#[pyfunction]
fn gen_prf_code(seed: [u8; 32], code_index: u64, n: usize) -> PyResult<Vec<i8>> {
    Ok(signalsim::gen_prf_code(&seed, code_index, n).map_err(to_py)?.chips().to_vec())
}

fn adversary_from(kind: &str, snr_db: Option<f64>) -> PyResult<AdversaryModel> {
    let need_snr = || snr_db.ok_or_else(|| PyValueError::new_err(format!("adversary {kind:?} needs adversary_snr_db")));
    match kind {
        "authentic" => Ok(AdversaryModel::Authentic),
        "non_scer" => Ok(AdversaryModel::NonScer),
        "hd_scer" => AdversaryModel::hd_scer_db(need_snr()?).map_err(to_py),
        "p_scer" => AdversaryModel::p_scer_db(need_snr()?).map_err(to_py),
        other => Err(PyValueError::new_err(format!(
            "unknown adversary {other:?}; expected authentic, non_scer, hd_scer or p_scer"
        ))),
    }
}

/// Seeded Monte Carlo of the full signal chain. `seed` is an integer or a
/// 64-digit hex string; results do not depend on `workers`.
#[pyfunction]
#[pyo3(signature = (radio, channel, det, adversary, trials, seed, adversary_snr_db = None, workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    radio: PyRadioModel,
    channel: PyChannelModel,
    det: PyDetectorConfig,
    adversary: &str,
    trials: u64,
    seed: &str,
    adversary_snr_db: Option<f64>,
    workers: Option<usize>,
) -> PyResult<PyTrialSummary> {
    let cfg = ExperimentConfig {
        radio: radio.inner,
        channel: channel.inner,
        det: det.inner,
        adversary: adversary_from(adversary, adversary_snr_db)?,
        trials,
        master_seed: montecarlo::seed_from_str(seed).map_err(to_py)?,
    };
    let workers = workers.unwrap_or_else(montecarlo::default_workers);
    let inner = py.detach(|| montecarlo::run_experiment_with_workers(&cfg, workers)).map_err(to_py)?;
    Ok(PyTrialSummary { inner })
}

/// Paired soft- vs hard-decision simulation over an SNR grid (dB). Returns a
/// dict with per-point rows and the dB shift at PMD = 0.5.
#[pyfunction]
#[pyo3(signature = (radio, channel, det, snr_grid_db, trials, seed, paired = true, workers = None))]
#[allow(clippy::too_many_arguments)]
fn pscer_advantage<'py>(
    py: Python<'py>,
    radio: PyRadioModel,
    channel: PyChannelModel,
    det: PyDetectorConfig,
    snr_grid_db: Vec<f64>,
    trials: u64,
    seed: &str,
    paired: bool,
    workers: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ExperimentConfig {
        radio: radio.inner,
        channel: channel.inner,
        det: det.inner,
        adversary: AdversaryModel::NonScer,
        trials,
        master_seed: montecarlo::seed_from_str(seed).map_err(to_py)?,
    };
    let workers = workers.unwrap_or_else(montecarlo::default_workers);
    let adv = py
        .detach(|| montecarlo::pscer_advantage_with(&cfg, &snr_grid_db, paired, workers))
        .map_err(to_py)?;
    let out = PyDict::new(py);
    let rows: Vec<(f64, f64, f64)> = adv.rows.iter().map(|r| (r.snr_db, r.hdscer.pmd_hat, r.pscer.pmd_hat)).collect();
    out.set_item("rows", rows)?;
    out.set_item("hdscer_crossing_db", adv.hdscer_crossing_db)?;
    out.set_item("pscer_crossing_db", adv.pscer_crossing_db)?;
    out.set_item("shift_db", adv.shift_db)?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "prfauth")]
pub fn prfauth_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRadioModel>()?;
    m.add_class::<PyChannelModel>()?;
    m.add_class::<PyDetectorConfig>()?;
    m.add_class::<PyPmdResult>()?;
    m.add_class::<PyTrialSummary>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(pfa, m)?)?;
    m.add_function(wrap_pyfunction!(pmd_exact, m)?)?;
    m.add_function(wrap_pyfunction!(pmd_clt, m)?)?;
    m.add_function(wrap_pyfunction!(min_w_for_security, m)?)?;
    m.add_function(wrap_pyfunction!(min_cn0, m)?)?;
    m.add_function(wrap_pyfunction!(breaking_adversary_snr, m)?)?;
    m.add_function(wrap_pyfunction!(chip_success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(adversary_link_budget, m)?)?;
    m.add_function(wrap_pyfunction!(required_antenna_gain, m)?)?;
    m.add_function(wrap_pyfunction!(log_normal_sf, m)?)?;
    m.add_function(wrap_pyfunction!(gen_prf_code, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(pscer_advantage, m)?)?;
    Ok(())
}
