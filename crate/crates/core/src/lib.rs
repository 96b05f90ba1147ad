//! Authentication security of PRF-based GNSS ranging.
//!
//! A receiver correlates stored baseband against a PRF replica it learns
//! after the fact, averages `W` correlator outputs and compares the average
//! against a threshold. This crate computes the resulting probability of
//! missed detection (PMD) and false alarm (PFA) for blind-guessing spoofers
//! and for hard-decision chip-estimating spoofers, exactly and through a
//! Gaussian approximation, and simulates the whole receiver chain at sample
//! level to check those numbers empirically.
//!
//! * [`params`] holds radio, channel and detector parameters plus the chip
//!   estimation and link budget formulas.
//! * [`analytic`] evaluates PMD/PFA in the log domain and searches for
//!   design parameters (W, C/N0, threshold).
//! * [`signalsim`] synthesizes codes, forgeries and baseband, and runs the
//!   matched-filter authentication.
//! * [`montecarlo`] runs seeded, parallel trial batches against the
//!   simulator.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod params;
pub mod signalsim;

pub use analytic::{CltMoments, LogProb, PmdMethod, PmdResult};
pub use error::{Error, Result};
pub use params::{AdversaryModel, ChannelModel, DetectorConfig, RadioModel};
