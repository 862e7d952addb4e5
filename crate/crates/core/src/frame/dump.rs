//! Binary shot dump.
//!
//! Header: three little-endian `u64`s `detector_count`, `herald_count`,
//! `shots`. Then, per shot, the bits `detectors ‖ observable ‖ heralds`
//! packed least-significant-bit first into `ceil((D + 1 + H) / 8)` bytes.

use std::io::{self, Read, Write};

use bitvec::prelude::*;
use thiserror::Error;

use super::ShotRecord;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("shot {shot} has {got} detector or herald bits, header declares {want}")]
    Shape { shot: usize, got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DumpHeader {
    pub detector_count: u64,
    pub herald_count: u64,
    pub shots: u64,
}

impl DumpHeader {
    fn shot_bytes(&self) -> usize {
        (self.detector_count as usize + 1 + self.herald_count as usize).div_ceil(8)
    }
}

pub fn write_dump<W: Write>(
    mut out: W,
    detector_count: usize,
    herald_count: usize,
    shots: &[ShotRecord],
) -> Result<(), DumpError> {
    let header = DumpHeader {
        detector_count: detector_count as u64,
        herald_count: herald_count as u64,
        shots: shots.len() as u64,
    };
    for v in [header.detector_count, header.herald_count, header.shots] {
        out.write_all(&v.to_le_bytes())?;
    }
    let mut bits: BitVec<u8, Lsb0> = BitVec::with_capacity(header.shot_bytes() * 8);
    for (i, s) in shots.iter().enumerate() {
        if s.detectors.len() != detector_count {
            return Err(DumpError::Shape { shot: i, got: s.detectors.len(), want: detector_count });
        }
        if s.heralds.len() != herald_count {
            return Err(DumpError::Shape { shot: i, got: s.heralds.len(), want: herald_count });
        }
        bits.clear();
        bits.extend(s.detectors.iter().by_vals());
        bits.push(s.observable);
        bits.extend(s.heralds.iter().by_vals());
        bits.resize(header.shot_bytes() * 8, false);
        out.write_all(bits.as_raw_slice())?;
    }
    Ok(())
}

pub fn read_dump<R: Read>(mut input: R) -> Result<(DumpHeader, Vec<ShotRecord>), DumpError> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<u64, DumpError> {
        input.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let header = DumpHeader {
        detector_count: next(&mut input)?,
        herald_count: next(&mut input)?,
        shots: next(&mut input)?,
    };
    let d = header.detector_count as usize;
    let h = header.herald_count as usize;
    let mut buf = vec![0u8; header.shot_bytes()];
    let mut shots = Vec::with_capacity(header.shots as usize);
    for _ in 0..header.shots {
        input.read_exact(&mut buf)?;
        let bits = buf.view_bits::<Lsb0>();
        shots.push(ShotRecord {
            detectors: bits[..d].iter().by_vals().collect(),
            observable: bits[d],
            heralds: bits[d + 1..d + 1 + h].iter().by_vals().collect(),
        });
    }
    Ok((header, shots))
}
