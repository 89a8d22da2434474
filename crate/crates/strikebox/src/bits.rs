//! Ordered bit sequences and cursors over them.
//!
//! A [`BitStream`] is the interchange type between the extraction stage,
//! the walk-based S-box generator and the cipher material derivation.
//! Bits are stored one per byte (0 or 1) which keeps indexing trivial at
//! the stream sizes this crate works with.

use thiserror::Error;

/// Provenance of a bit stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitOrigin {
    /// Bits straight out of the difference extractor.
    Raw,
    /// Bits that have been through the Von Neumann extractor.
    Whitened,
}

impl std::fmt::Display for BitOrigin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BitOrigin::Raw => write!(f, "raw"),
            BitOrigin::Whitened => write!(f, "whitened"),
        }
    }
}

/// Error when deserializing a bit stream from text.
#[derive(Debug, Error)]
pub enum BitParseError {
    #[error("invalid character {found:?} at offset {offset} (expected '0' or '1')")]
    InvalidChar { offset: usize, found: char },
}

/// An ordered sequence of bits with a provenance tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    bits: Vec<u8>,
    origin: BitOrigin,
}

impl BitStream {
    pub fn new(origin: BitOrigin) -> Self {
        Self { bits: Vec::new(), origin }
    }

    pub fn with_capacity(origin: BitOrigin, capacity: usize) -> Self {
        Self { bits: Vec::with_capacity(capacity), origin }
    }

    /// Builds a stream from a slice of 0/1 values. Any nonzero byte counts as 1.
    pub fn from_bits(bits: &[u8], origin: BitOrigin) -> Self {
        Self { bits: bits.iter().map(|&b| (b != 0) as u8).collect(), origin }
    }

    /// Unpacks bytes into bits, most significant bit first.
    pub fn from_bytes_msb(bytes: &[u8], origin: BitOrigin) -> Self {
        let mut s = Self::with_capacity(origin, bytes.len() * 8);
        for &b in bytes {
            s.push_byte_msb(b);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn origin(&self) -> BitOrigin {
        self.origin
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn push(&mut self, bit: u8) {
        self.bits.push((bit != 0) as u8);
    }

    /// Appends the 8 bits of `byte`, most significant first.
    pub fn push_byte_msb(&mut self, byte: u8) {
        for shift in (0..8).rev() {
            self.bits.push((byte >> shift) & 1);
        }
    }

    /// Appends the low `n` bits of `value`, most significant first.
    pub fn push_low_bits_msb(&mut self, value: u64, n: usize) {
        assert!(n <= 64);
        for shift in (0..n).rev() {
            self.bits.push(((value >> shift) & 1) as u8);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// Truncates the stream to at most `len` bits.
    pub fn truncate(&mut self, len: usize) {
        self.bits.truncate(len);
    }

    /// Regroups the bits into bytes (MSB first). A trailing group shorter
    /// than 8 bits is dropped.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        self.bits
            .chunks_exact(8)
            .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b))
            .collect()
    }

    /// ASCII serialization: lines of '0'/'1' characters, `width` per line.
    pub fn to_ascii(&self, width: usize) -> String {
        let width = width.max(1);
        let mut out = String::with_capacity(self.bits.len() + self.bits.len() / width + 1);
        for (i, &b) in self.bits.iter().enumerate() {
            if i > 0 && i % width == 0 {
                out.push('\n');
            }
            out.push(if b == 1 { '1' } else { '0' });
        }
        if !self.bits.is_empty() {
            out.push('\n');
        }
        out
    }

    /// Parses ASCII '0'/'1' text, ignoring whitespace.
    pub fn from_ascii(text: &str, origin: BitOrigin) -> Result<Self, BitParseError> {
        let mut bits = Vec::with_capacity(text.len());
        for (offset, ch) in text.char_indices() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_whitespace() => {}
                c => return Err(BitParseError::InvalidChar { offset, found: c }),
            }
        }
        Ok(Self { bits, origin })
    }
}

/// A reading position over a [`BitStream`].
///
/// In cyclic mode the cursor wraps back to the start of the stream instead
/// of running dry, which keeps long deterministic consumers (the walk
/// generator) fed from a finite stream.
#[derive(Debug, Clone)]
pub struct BitCursor<'a> {
    bits: &'a [u8],
    pos: usize,
    cyclic: bool,
}

impl<'a> BitCursor<'a> {
    pub fn new(stream: &'a BitStream) -> Self {
        Self { bits: stream.as_slice(), pos: 0, cyclic: false }
    }

    pub fn cyclic(stream: &'a BitStream) -> Self {
        Self { bits: stream.as_slice(), pos: 0, cyclic: true }
    }

    /// Bits consumed so far (monotonic, not wrapped).
    pub fn consumed(&self) -> usize {
        self.pos
    }

    /// Bits left before the end of the underlying stream; `None` when cyclic.
    pub fn remaining(&self) -> Option<usize> {
        if self.cyclic {
            None
        } else {
            Some(self.bits.len().saturating_sub(self.pos))
        }
    }

    pub fn take_bit(&mut self) -> Option<u8> {
        if self.bits.is_empty() {
            return None;
        }
        let idx = if self.cyclic {
            self.pos % self.bits.len()
        } else if self.pos < self.bits.len() {
            self.pos
        } else {
            return None;
        };
        self.pos += 1;
        Some(self.bits[idx])
    }

    /// Takes `n <= 64` bits as an unsigned value, most significant bit first.
    /// Returns `None` if the stream cannot supply all `n` bits.
    pub fn take_bits(&mut self, n: usize) -> Option<u64> {
        assert!(n <= 64);
        if !self.cyclic && self.bits.len().saturating_sub(self.pos) < n {
            // do not consume a partial group
            return None;
        }
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.take_bit()? as u64;
        }
        Some(v)
    }
}
