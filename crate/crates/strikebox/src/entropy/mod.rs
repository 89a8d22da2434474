//! True-random bit extraction from lightning strike location data.
//!
//! The pipeline is: parse LDAR records ([`ldar`]), turn the spatial
//! differences between strikes into raw bits ([`strike_diff_bits`]),
//! debias them with the Von Neumann extractor ([`von_neumann`]), and
//! assess the result with a battery of statistical tests ([`stats`]).

pub mod ldar;
pub mod stats;

use crate::bits::{BitOrigin, BitStream};
use ldar::StrikeRecord;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("need at least 2 records to difference, found {found}")]
    InsufficientRecords { found: usize },
}

/// Derives raw bits from strike locations.
///
/// Every record after the first is differenced against record 0: the
/// absolute east, north and altitude differences are each reduced mod 256
/// and emitted as 8 bits, most significant first. Output length is
/// `24 * (records.len() - 1)` bits.
pub fn strike_diff_bits(records: &[StrikeRecord]) -> Result<BitStream, EntropyError> {
    if records.len() < 2 {
        return Err(EntropyError::InsufficientRecords { found: records.len() });
    }
    let anchor = records[0];
    let mut out = BitStream::with_capacity(BitOrigin::Raw, 24 * (records.len() - 1));
    for rec in &records[1..] {
        for (a, b) in [
            (rec.east_m, anchor.east_m),
            (rec.north_m, anchor.north_m),
            (rec.alt_m, anchor.alt_m),
        ] {
            let diff = (a as i128 - b as i128).unsigned_abs();
            out.push_byte_msb((diff & 0xFF) as u8);
        }
    }
    Ok(out)
}

/// Von Neumann extractor: consumes non-overlapping bit pairs, emitting 0
/// for (0,1) and 1 for (1,0); equal pairs emit nothing and a trailing odd
/// bit is discarded. Output length is at most half the input length.
pub fn von_neumann(input: &BitStream) -> BitStream {
    let mut out = BitStream::with_capacity(BitOrigin::Whitened, input.len() / 4);
    for pair in input.as_slice().chunks_exact(2) {
        match (pair[0], pair[1]) {
            (0, 1) => out.push(0),
            (1, 0) => out.push(1),
            _ => {}
        }
    }
    out
}
