//! Round material for the SPN: per-round S-boxes, bit permutations and
//! subkeys, with a text serialization so encrypt and decrypt runs can
//! share the exact same material.

use super::SpnError;
use crate::bits::{BitCursor, BitStream};
use crate::sbox::{SBox, SBoxFormat};
use crate::walker::{construct_sboxes, ConstructConfig};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Number of SPN rounds.
pub const ROUNDS: usize = 16;

/// Everything one channel encryption needs: 16 S-boxes, 16 bit-position
/// permutations and 16 subkeys, all bound to a channel length.
///
/// A permutation entry `pbox[j] = k` moves bit `k` of the round state to
/// bit `j`; permuting at bit rather than byte granularity is what makes a
/// single flipped input bit avalanche across the whole plane over the
/// rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundMaterial {
    channel_len: usize,
    sboxes: Vec<SBox>,
    pboxes: Vec<Vec<u32>>,
    keys: Vec<Vec<u8>>,
}

impl RoundMaterial {
    pub fn new(
        channel_len: usize,
        sboxes: Vec<SBox>,
        pboxes: Vec<Vec<u32>>,
        keys: Vec<Vec<u8>>,
    ) -> Result<Self, SpnError> {
        if channel_len == 0 {
            return Err(SpnError::InvalidMaterial("channel length must be positive".into()));
        }
        if sboxes.len() != ROUNDS || pboxes.len() != ROUNDS || keys.len() != ROUNDS {
            return Err(SpnError::InvalidMaterial(format!(
                "need {ROUNDS} s-boxes/p-boxes/keys, found {}/{}/{}",
                sboxes.len(),
                pboxes.len(),
                keys.len()
            )));
        }
        let bit_len = channel_len * 8;
        for (i, pbox) in pboxes.iter().enumerate() {
            if pbox.len() != bit_len {
                return Err(SpnError::InvalidMaterial(format!(
                    "p-box {i} has {} entries, expected {bit_len}",
                    pbox.len()
                )));
            }
            let mut seen = vec![false; bit_len];
            for &v in pbox {
                if (v as usize) >= bit_len || seen[v as usize] {
                    return Err(SpnError::InvalidMaterial(format!(
                        "p-box {i} is not a permutation of 0..{bit_len}"
                    )));
                }
                seen[v as usize] = true;
            }
        }
        for (i, key) in keys.iter().enumerate() {
            if key.len() != channel_len {
                return Err(SpnError::InvalidMaterial(format!(
                    "key {i} has {} bytes, expected {channel_len}",
                    key.len()
                )));
            }
        }
        Ok(Self { channel_len, sboxes, pboxes, keys })
    }

    pub fn channel_len(&self) -> usize {
        self.channel_len
    }

    pub fn sboxes(&self) -> &[SBox] {
        &self.sboxes
    }

    pub fn pboxes(&self) -> &[Vec<u32>] {
        &self.pboxes
    }

    pub fn keys(&self) -> &[Vec<u8>] {
        &self.keys
    }

    /// Identity material: identity S-boxes, identity permutations, zero
    /// keys. Encryption under it is the identity map.
    pub fn identity(channel_len: usize) -> Self {
        let bit_len = channel_len * 8;
        Self {
            channel_len,
            sboxes: vec![SBox::identity(); ROUNDS],
            pboxes: vec![(0..bit_len as u32).collect(); ROUNDS],
            keys: vec![vec![0u8; channel_len]; ROUNDS],
        }
    }

    /// Derives material from a bit stream: 16 subkeys as raw stream bytes,
    /// then one 64-bit seed per P-box driving a Fisher-Yates shuffle of the
    /// bit positions. S-boxes come from `pool` (cycled if short); with an
    /// empty pool they are constructed from the remainder of the stream.
    pub fn derive(bits: &BitStream, channel_len: usize, pool: &[SBox]) -> Result<Self, SpnError> {
        if channel_len == 0 {
            return Err(SpnError::InvalidMaterial("channel length must be positive".into()));
        }
        let mut cursor = BitCursor::new(bits);
        let mut keys = Vec::with_capacity(ROUNDS);
        for _ in 0..ROUNDS {
            let mut key = Vec::with_capacity(channel_len);
            for _ in 0..channel_len {
                let byte = cursor.take_bits(8).ok_or(SpnError::InsufficientBits)?;
                key.push(byte as u8);
            }
            keys.push(key);
        }
        let bit_len = channel_len * 8;
        let mut pboxes = Vec::with_capacity(ROUNDS);
        for _ in 0..ROUNDS {
            let seed = cursor.take_bits(64).ok_or(SpnError::InsufficientBits)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut perm: Vec<u32> = (0..bit_len as u32).collect();
            // Fisher-Yates
            for i in (1..perm.len()).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            pboxes.push(perm);
        }
        let sboxes = if pool.is_empty() {
            let rest = BitStream::from_bits(&bits.as_slice()[cursor.consumed()..], bits.origin());
            let built = construct_sboxes(&rest, ROUNDS, &ConstructConfig::default())
                .map_err(|_| SpnError::InsufficientBits)?;
            built.sboxes
        } else {
            (0..ROUNDS).map(|i| pool[i % pool.len()].clone()).collect()
        };
        Self::new(channel_len, sboxes, pboxes, keys)
    }

    /// Text serialization: a header binding the channel length, then 16
    /// S-box grids, 16 permutation lines and 16 hex key lines.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("spn-material v1\n");
        out.push_str(&format!("channel_len {}\n", self.channel_len));
        for (i, sbox) in self.sboxes.iter().enumerate() {
            out.push_str(&format!("sbox {i}\n"));
            out.push_str(&sbox.serialize(SBoxFormat::Grid16));
        }
        for (i, pbox) in self.pboxes.iter().enumerate() {
            out.push_str(&format!("pbox {i}\n"));
            let line: Vec<String> = pbox.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        for (i, key) in self.keys.iter().enumerate() {
            out.push_str(&format!("key {i}\n"));
            let hex: String = key.iter().map(|b| format!("{b:02x}")).collect();
            out.push_str(&hex);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SpnError> {
        let bad = |msg: String| SpnError::InvalidMaterial(msg);
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty material file".into()))?;
        if header.trim() != "spn-material v1" {
            return Err(bad(format!("unrecognized header {header:?}")));
        }
        let len_line = lines.next().ok_or_else(|| bad("missing channel_len".into()))?;
        let channel_len: usize = len_line
            .strip_prefix("channel_len ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad(format!("bad channel_len line {len_line:?}")))?;

        let expect = |tag: String, lines: &mut std::str::Lines| -> Result<(), SpnError> {
            match lines.next() {
                Some(l) if l.trim() == tag => Ok(()),
                other => Err(bad(format!("expected {tag:?}, found {other:?}"))),
            }
        };

        let mut sboxes = Vec::with_capacity(ROUNDS);
        for i in 0..ROUNDS {
            expect(format!("sbox {i}"), &mut lines)?;
            let grid: Vec<&str> = (&mut lines).take(16).collect();
            if grid.len() != 16 {
                return Err(bad(format!("s-box {i} grid truncated")));
            }
            let sbox = SBox::parse_with(&grid.join("\n"), SBoxFormat::Grid16)
                .map_err(|e| bad(format!("s-box {i}: {e}")))?;
            sboxes.push(sbox);
        }
        let mut pboxes = Vec::with_capacity(ROUNDS);
        for i in 0..ROUNDS {
            expect(format!("pbox {i}"), &mut lines)?;
            let line = lines.next().ok_or_else(|| bad(format!("p-box {i} line missing")))?;
            let perm: Result<Vec<u32>, _> = line.split_whitespace().map(str::parse).collect();
            pboxes.push(perm.map_err(|_| bad(format!("p-box {i} has non-numeric entries")))?);
        }
        let mut keys = Vec::with_capacity(ROUNDS);
        for i in 0..ROUNDS {
            expect(format!("key {i}"), &mut lines)?;
            let line = lines.next().ok_or_else(|| bad(format!("key {i} line missing")))?.trim();
            if line.len() % 2 != 0 {
                return Err(bad(format!("key {i} hex has odd length")));
            }
            let mut key = Vec::with_capacity(line.len() / 2);
            for pair in line.as_bytes().chunks_exact(2) {
                let s = std::str::from_utf8(pair).expect("ascii");
                key.push(
                    u8::from_str_radix(s, 16)
                        .map_err(|_| bad(format!("key {i} is not hex")))?,
                );
            }
            keys.push(key);
        }
        Self::new(channel_len, sboxes, pboxes, keys)
    }
}
