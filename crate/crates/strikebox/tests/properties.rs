//! Property tests for the serialization and extraction invariants.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use strikebox::bits::{BitOrigin, BitStream};
use strikebox::entropy::ldar::{parse_ldar, serialize_records, StrikeRecord};
use strikebox::entropy::von_neumann;
use strikebox::evolver::repair;
use strikebox::sbox::{SBox, SBoxFormat};

fn permutation_strategy() -> impl Strategy<Value = SBox> {
    any::<u64>().prop_map(|seed| common::random_permutation_8(&mut ChaCha20Rng::seed_from_u64(seed)))
}

fn record_strategy() -> impl Strategy<Value = StrikeRecord> {
    (
        1i64..=31,
        0i64..24,
        0i64..60,
        0i64..60,
        0i64..1_000_000,
        any::<i64>(),
        any::<i64>(),
        any::<i64>(),
    )
        .prop_map(|(d, h, m, s, us, x, y, z)| StrikeRecord::new(d, h, m, s, us, x, y, z).unwrap())
}

proptest! {
    #[test]
    fn sbox_serialize_parse_round_trips(sbox in permutation_strategy()) {
        for fmt in [SBoxFormat::Grid16, SBoxFormat::HexLine] {
            let text = sbox.serialize(fmt);
            prop_assert_eq!(&SBox::parse_with(&text, fmt).unwrap(), &sbox);
            prop_assert_eq!(&SBox::parse(&text).unwrap(), &sbox);
        }
    }

    #[test]
    fn ldar_serialize_parse_round_trips(records in prop::collection::vec(record_strategy(), 0..64)) {
        let text = serialize_records(&records);
        let parsed = parse_ldar(&text, true).unwrap();
        prop_assert_eq!(parsed.records, records);
        prop_assert!(parsed.skipped.is_empty());
    }

    #[test]
    fn von_neumann_never_exceeds_half_length(bits in prop::collection::vec(0u8..2, 0..4096)) {
        let input = BitStream::from_bits(&bits, BitOrigin::Raw);
        let out = von_neumann(&input);
        prop_assert!(out.len() <= input.len() / 2);
        prop_assert_eq!(out.origin(), BitOrigin::Whitened);
    }

    #[test]
    fn repair_always_returns_a_permutation(raw in prop::array::uniform32(any::<u64>())) {
        // spread the entropy over 256 bytes
        let mut table = [0u8; 256];
        for (i, chunk) in raw.iter().enumerate() {
            for b in 0..8 {
                table[i * 8 + b] = (chunk >> (8 * b)) as u8;
            }
        }
        let fixed = repair(&table); // constructor inside validates bijectivity
        // the first slot is never in conflict, and repair is idempotent
        prop_assert_eq!(fixed.apply(0), table[0]);
        prop_assert_eq!(&repair(fixed.table()), &fixed);
    }

    #[test]
    fn sbox_parse_never_panics_on_garbage(text in ".{0,600}") {
        let _ = SBox::parse(&text);
    }

    #[test]
    fn ldar_parse_never_panics_on_garbage(text in ".{0,400}") {
        let _ = parse_ldar(&text, false);
        let _ = parse_ldar(&text, true);
    }

    #[test]
    fn bit_ascii_parse_never_panics(text in ".{0,400}") {
        let _ = BitStream::from_ascii(&text, BitOrigin::Raw);
    }
}

/// Whitening a heavily biased source still yields an empirically balanced
/// stream: on a 10^5-bit biased fixture the ones fraction sits within
/// 0.02 of one half.
#[test]
fn von_neumann_balances_biased_input() {
    use rand::RngExt;
    let mut rng = ChaCha20Rng::seed_from_u64(0xB1A5);
    let biased: Vec<u8> = (0..600_000)
        .map(|_| if rng.random_range(0..100) < 75 { 1u8 } else { 0 })
        .collect();
    let input = BitStream::from_bits(&biased, BitOrigin::Raw);
    let out = von_neumann(&input);
    assert!(out.len() >= 100_000, "need a 10^5-bit whitened fixture, got {}", out.len());
    let ones = out.count_ones() as f64 / out.len() as f64;
    assert!((ones - 0.5).abs() < 0.02, "ones fraction {ones}");
}
