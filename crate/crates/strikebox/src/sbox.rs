//! The 8x8 substitution box value object.
//!
//! An [`SBox`] is a bijective mapping over the byte values: index in,
//! value out. Construction checks bijectivity; after that the table is
//! immutable and freely shareable.

use sha3::{Digest, Sha3_256};
use thiserror::Error;

/// Number of table entries.
pub const SBOX_SIZE: usize = 256;

#[derive(Debug, Error)]
pub enum SBoxError {
    #[error("S-box table must have 256 entries, found {found}")]
    WrongLength { found: usize },
    #[error("not bijective: value {value} appears at indices {first_index} and {second_index}")]
    NotBijective { value: u8, first_index: usize, second_index: usize },
    #[error("parse error at row {row}, column {col}: {reason}")]
    ParseError { row: usize, col: usize, reason: String },
}

/// Text layouts for S-box serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SBoxFormat {
    /// 16 rows of 16 decimal values, space separated.
    Grid16,
    /// One line of 512 hex characters.
    HexLine,
}

/// A bijective byte substitution table.
#[derive(Clone, PartialEq, Eq)]
pub struct SBox {
    table: [u8; SBOX_SIZE],
}

impl std::fmt::Debug for SBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SBox({})", self.digest())
    }
}

/// SHA-3-256 digest of an S-box table, used as its canonical identity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SBoxDigest([u8; 32]);

impl SBoxDigest {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl std::fmt::Display for SBoxDigest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl std::fmt::Debug for SBoxDigest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SBoxDigest({})", self.to_hex())
    }
}

impl SBox {
    /// Validates a 256-byte table and wraps it. Reports the first duplicated
    /// value together with both indices where it occurs.
    pub fn from_bytes(raw: &[u8]) -> Result<Self, SBoxError> {
        if raw.len() != SBOX_SIZE {
            return Err(SBoxError::WrongLength { found: raw.len() });
        }
        let mut first_seen = [usize::MAX; SBOX_SIZE];
        for (i, &v) in raw.iter().enumerate() {
            if first_seen[v as usize] != usize::MAX {
                return Err(SBoxError::NotBijective {
                    value: v,
                    first_index: first_seen[v as usize],
                    second_index: i,
                });
            }
            first_seen[v as usize] = i;
        }
        let mut table = [0u8; SBOX_SIZE];
        table.copy_from_slice(raw);
        Ok(Self { table })
    }

    /// The identity permutation.
    pub fn identity() -> Self {
        let mut table = [0u8; SBOX_SIZE];
        for (i, t) in table.iter_mut().enumerate() {
            *t = i as u8;
        }
        Self { table }
    }

    pub fn table(&self) -> &[u8; SBOX_SIZE] {
        &self.table
    }

    /// Looks up one byte.
    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.table[x as usize]
    }

    /// The inverse permutation: `r[s[x]] = x` for all `x`.
    pub fn reverse(&self) -> Self {
        let mut table = [0u8; SBOX_SIZE];
        for (x, &v) in self.table.iter().enumerate() {
            table[v as usize] = x as u8;
        }
        Self { table }
    }

    /// SHA-3-256 over the table bytes in index order.
    pub fn digest(&self) -> SBoxDigest {
        SBoxDigest(Sha3_256::digest(self.table).into())
    }

    /// Renders the table in the given text format.
    pub fn serialize(&self, format: SBoxFormat) -> String {
        match format {
            SBoxFormat::Grid16 => {
                let mut out = String::with_capacity(SBOX_SIZE * 4);
                for row in self.table.chunks_exact(16) {
                    let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    out.push_str(&line.join(" "));
                    out.push('\n');
                }
                out
            }
            SBoxFormat::HexLine => {
                let mut out: String = self.table.iter().map(|b| format!("{b:02x}")).collect();
                out.push('\n');
                out
            }
        }
    }

    /// Parses either serialization format, detecting which one applies.
    pub fn parse(text: &str) -> Result<Self, SBoxError> {
        let meaningful: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if meaningful.len() == 1 && meaningful[0].split_whitespace().count() == 1 {
            Self::parse_with(text, SBoxFormat::HexLine)
        } else {
            Self::parse_with(text, SBoxFormat::Grid16)
        }
    }

    /// Parses a specific serialization format.
    pub fn parse_with(text: &str, format: SBoxFormat) -> Result<Self, SBoxError> {
        match format {
            SBoxFormat::Grid16 => Self::parse_grid16(text),
            SBoxFormat::HexLine => Self::parse_hex_line(text),
        }
    }

    fn parse_grid16(text: &str) -> Result<Self, SBoxError> {
        let mut values = Vec::with_capacity(SBOX_SIZE);
        let mut row = 0usize;
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            row += 1;
            if row > 16 {
                return Err(SBoxError::ParseError {
                    row,
                    col: 1,
                    reason: "more than 16 rows".into(),
                });
            }
            let mut col = 0usize;
            for tok in line.split_whitespace() {
                col += 1;
                if col > 16 {
                    return Err(SBoxError::ParseError {
                        row,
                        col,
                        reason: "more than 16 values in row".into(),
                    });
                }
                let v: u8 = tok.parse().map_err(|_| SBoxError::ParseError {
                    row,
                    col,
                    reason: format!("not a byte value: {tok:?}"),
                })?;
                values.push(v);
            }
            if col != 16 {
                return Err(SBoxError::ParseError {
                    row,
                    col,
                    reason: format!("expected 16 values in row, found {col}"),
                });
            }
        }
        if row != 16 {
            return Err(SBoxError::ParseError {
                row,
                col: 1,
                reason: format!("expected 16 rows, found {row}"),
            });
        }
        Self::from_bytes(&values)
    }

    fn parse_hex_line(text: &str) -> Result<Self, SBoxError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.len() != SBOX_SIZE * 2 {
            return Err(SBoxError::ParseError {
                row: 1,
                col: compact.len() + 1,
                reason: format!("expected 512 hex characters, found {}", compact.len()),
            });
        }
        let mut values = Vec::with_capacity(SBOX_SIZE);
        for (i, pair) in compact.as_bytes().chunks_exact(2).enumerate() {
            let s = std::str::from_utf8(pair).expect("hex chars are ascii");
            let v = u8::from_str_radix(s, 16).map_err(|_| SBoxError::ParseError {
                row: 1,
                col: i * 2 + 1,
                reason: format!("not hex: {s:?}"),
            })?;
            values.push(v);
        }
        Self::from_bytes(&values)
    }
}
