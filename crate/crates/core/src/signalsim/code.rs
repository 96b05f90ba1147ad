use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{invalid, Result};
use crate::params::RadioModel;

/// Identity of the keyed generator behind [`gen_prf_code`]. Changing it
/// changes every seeded output of the crate.
pub const PRF_GENERATOR: &str = "chacha20-stream-per-code-index/lsb-first";

/// One ranging code as ±1 chips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChipSequence {
    chips: Vec<i8>,
}

impl ChipSequence {
    pub fn new(chips: Vec<i8>) -> Result<Self> {
        if chips.is_empty() {
            return Err(invalid("chip sequence must be nonempty"));
        }
        if let Some(bad) = chips.iter().find(|c| **c != 1 && **c != -1) {
            return Err(invalid(format!("chips must be +1 or -1, found {bad}")));
        }
        Ok(ChipSequence { chips })
    }

    pub(crate) fn from_trusted(chips: Vec<i8>) -> Self {
        debug_assert!(chips.iter().all(|c| *c == 1 || *c == -1));
        ChipSequence { chips }
    }

    pub fn chips(&self) -> &[i8] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    /// Number of positions where both sequences carry the same chip.
    pub fn agreements(&self, other: &ChipSequence) -> usize {
        self.chips.iter().zip(&other.chips).filter(|(a, b)| a == b).count()
    }
}

/// Keyed PRF ranging code: the ChaCha20 keystream under `seed`, on stream
/// `code_index`, one chip per bit (bit set → +1).
pub fn gen_prf_code(seed: &[u8; 32], code_index: u64, n: usize) -> Result<ChipSequence> {
    if n == 0 {
        return Err(invalid("code length must be at least 1"));
    }
    let mut rng = ChaCha20Rng::from_seed(*seed);
    rng.set_stream(code_index);
    let mut chips = Vec::with_capacity(n);
    while chips.len() < n {
        let word = rng.next_u64();
        let take = (n - chips.len()).min(64);
        chips.extend((0..take).map(|bit| if (word >> bit) & 1 == 1 { 1i8 } else { -1 }));
    }
    Ok(ChipSequence::from_trusted(chips))
}

/// A code resampled to the receiver's `F·T` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Replica {
    samples: Vec<i8>,
    chip_of_sample: Vec<u32>,
    source: ChipSequence,
}

impl Replica {
    pub fn samples(&self) -> &[i8] {
        &self.samples
    }

    /// Index of the chip each sample was taken from.
    pub fn chip_index(&self) -> &[u32] {
        &self.chip_of_sample
    }

    pub fn source(&self) -> &ChipSequence {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn l1_norm(&self) -> usize {
        self.samples.len()
    }
}

/// Sample `i` takes chip `⌊i·n/(F·T)⌋`.
pub fn resample(chips: &ChipSequence, radio: &RadioModel) -> Result<Replica> {
    let n = chips.len() as u64;
    if n != radio.chips {
        return Err(invalid(format!("code has {n} chips but the radio expects {}", radio.chips)));
    }
    let ft = radio.samples_per_code() as u64;
    if ft < n {
        return Err(invalid(format!("F·T = {ft} is below the chip count {n}")));
    }
    let chip_of_sample: Vec<u32> = (0..ft).map(|i| (i * n / ft) as u32).collect();
    let samples = chip_of_sample.iter().map(|&c| chips.chips[c as usize]).collect();
    Ok(Replica { samples, chip_of_sample, source: chips.clone() })
}
