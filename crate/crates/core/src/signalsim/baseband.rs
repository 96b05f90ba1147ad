use std::io::{self, Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use super::code::Replica;
use crate::error::{Error, Result};
use crate::params::ChannelModel;

/// In-phase baseband over one ranging code, after carrier removal.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSegment {
    pub samples: Vec<f64>,
}

impl BasebandSegment {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `√P · amplitude · replica + N(0, σ²)` per sample. `chip_amplitudes`
/// (indexed by chip) defaults to all ones.
pub fn synth_baseband<R: Rng + ?Sized>(
    replica: &Replica,
    chip_amplitudes: Option<&[f64]>,
    channel: &ChannelModel,
    rng: &mut R,
) -> Result<BasebandSegment> {
    channel.validate()?;
    if let Some(amps) = chip_amplitudes {
        let n = replica.source().len();
        if amps.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: amps.len() });
        }
    }
    let root_p = channel.signal_power.sqrt();
    let sigma = channel.noise_variance.sqrt();
    let samples = replica
        .samples()
        .iter()
        .zip(replica.chip_index())
        .map(|(&s, &chip)| {
            let amp = chip_amplitudes.map_or(1.0, |a| a[chip as usize]);
            let clean = root_p * amp * f64::from(s);
            if sigma == 0.0 {
                clean
            } else {
                let n: f64 = rng.sample(StandardNormal);
                clean + sigma * n
            }
        })
        .collect();
    Ok(BasebandSegment { samples })
}

/// Dump segments as a `u64` little-endian sample count followed by that
/// many little-endian `f32` samples, per segment.
pub fn write_segments<W: Write>(out: &mut W, segments: &[BasebandSegment]) -> io::Result<()> {
    for seg in segments {
        out.write_all(&(seg.samples.len() as u64).to_le_bytes())?;
        for &x in &seg.samples {
            out.write_all(&(x as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

/// Inverse of [`write_segments`] (samples come back rounded to `f32`).
pub fn read_segments<R: Read>(input: &mut R) -> io::Result<Vec<BasebandSegment>> {
    let mut segments = Vec::new();
    let mut header = [0u8; 8];
    loop {
        match input.read_exact(&mut header) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e),
        }
        let len = u64::from_le_bytes(header) as usize;
        let mut raw = vec![0u8; len * 4];
        input.read_exact(&mut raw)?;
        let samples = raw
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect();
        segments.push(BasebandSegment { samples });
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RadioModel;
    use crate::signalsim::{gen_prf_code, resample};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn replica(n: usize, ft: f64) -> Replica {
        let radio = RadioModel::new(n as u64, 1.0, ft, 30.0).unwrap();
        resample(&gen_prf_code(&[1; 32], 0, n).unwrap(), &radio).unwrap()
    }

    #[test]
    fn noise_free_is_scaled_replica() {
        let r = replica(50, 100.0);
        let ch = ChannelModel::new(4.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let seg = synth_baseband(&r, None, &ch, &mut rng).unwrap();
        for (x, &s) in seg.samples.iter().zip(r.samples()) {
            assert_eq!(*x, 2.0 * f64::from(s));
        }
    }

    #[test]
    fn signal_free_is_white_noise() {
        let r = replica(500_000, 1_000_000.0);
        let ch = ChannelModel::new(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seg = synth_baseband(&r, None, &ch, &mut rng).unwrap();
        let n = seg.len() as f64;
        let mean = seg.samples.iter().sum::<f64>() / n;
        let var = seg.samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.003, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn amplitudes_apply_per_chip() {
        let r = replica(3, 6.0);
        let ch = ChannelModel::new(1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let seg = synth_baseband(&r, Some(&[0.5, 1.0, 2.0]), &ch, &mut rng).unwrap();
        let mags: Vec<f64> = seg.samples.iter().map(|x| x.abs()).collect();
        assert_eq!(mags, vec![0.5, 0.5, 1.0, 1.0, 2.0, 2.0]);
        assert!(synth_baseband(&r, Some(&[1.0]), &ch, &mut rng).is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let segs = vec![
            BasebandSegment { samples: vec![0.25, -1.5, 3.0] },
            BasebandSegment { samples: vec![] },
            BasebandSegment { samples: vec![7.0] },
        ];
        let mut buf = Vec::new();
        write_segments(&mut buf, &segs).unwrap();
        assert_eq!(buf.len(), 3 * 8 + 4 * 4);
        assert_eq!(&buf[..8], &3u64.to_le_bytes());
        let back = read_segments(&mut buf.as_slice()).unwrap();
        assert_eq!(back, segs);
    }
}
