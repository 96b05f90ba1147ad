//! Sample-level simulation of the PRF authentication chain: code
//! generation, resampling, forgeries, baseband synthesis, and the matched
//! filter → gain → average → threshold receiver.

mod adversary;
mod baseband;
mod code;
mod receiver;

pub use adversary::{forge, measure_chips, plan_from_measurements, SpoofPlan};
pub use baseband::{read_segments, synth_baseband, write_segments, BasebandSegment};
pub use code::{gen_prf_code, resample, ChipSequence, Replica, PRF_GENERATOR};
pub use receiver::{authenticate, correlate, Decision};
