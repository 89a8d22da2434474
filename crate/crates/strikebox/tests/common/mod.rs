//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here recomputes results from definitions (distance
//! enumeration, direct counting, step-by-step replay) without touching
//! the library's computation paths, so agreement is meaningful.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::sync::OnceLock;
use strikebox::bits::BitStream;
use strikebox::entropy::{ldar::StrikeRecord, strike_diff_bits, von_neumann};
use strikebox::sbox::SBox;
use strikebox::walker::{EntropyGrid, WalkTrace};

/// Deterministic whitened fixture produced by the real extraction
/// pipeline: synthetic strike records -> coordinate differences ->
/// Von Neumann extractor, truncated to exactly `target_bits`.
pub fn synthetic_whitened_fixture(seed: u64, target_bits: usize) -> BitStream {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n_records = target_bits / 6 + 2000;
    let mut records = Vec::with_capacity(n_records);
    for _ in 0..n_records {
        records.push(
            StrikeRecord::new(
                rng.random_range(1..=28),
                rng.random_range(0..24),
                rng.random_range(0..60),
                rng.random_range(0..60),
                rng.random_range(0..1_000_000),
                rng.random_range(-200_000..200_000),
                rng.random_range(-200_000..200_000),
                rng.random_range(0..20_000),
            )
            .unwrap(),
        );
    }
    let raw = strike_diff_bits(&records).expect("enough records");
    let mut white = von_neumann(&raw);
    assert!(white.len() >= target_bits, "fixture too short: {}", white.len());
    white.truncate(target_bits);
    white
}

/// The shared million-bit fixture (seed 0xC0FFEE), built once per process.
pub fn fixture_1m() -> &'static BitStream {
    static FIXTURE: OnceLock<BitStream> = OnceLock::new();
    FIXTURE.get_or_init(|| synthetic_whitened_fixture(0xC0FFEE, 1_000_000))
}

pub fn random_permutation_8(rng: &mut ChaCha20Rng) -> SBox {
    let mut t: Vec<u8> = (0..=255).collect();
    t.shuffle(rng);
    SBox::from_bytes(&t).unwrap()
}

pub fn random_permutation_4(rng: &mut ChaCha20Rng) -> Vec<u8> {
    let mut t: Vec<u8> = (0..16).collect();
    t.shuffle(rng);
    t
}

fn parity(x: usize) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Brute-force oracles over a table of length 2^n: every figure is
/// recomputed from its definition by exhaustive enumeration.
pub mod oracle {
    use super::parity;

    fn truth_of(table: &[u8], mask: usize) -> Vec<u8> {
        table.iter().map(|&v| parity(v as usize & mask)).collect()
    }

    /// Hamming distance of a truth table to the nearest affine function,
    /// by enumerating every affine function.
    pub fn boolean_nl(truth: &[u8]) -> u32 {
        let size = truth.len();
        let mut best = u32::MAX;
        for phi in 0..size {
            let mut dist = 0u32;
            for (x, &t) in truth.iter().enumerate() {
                if t != parity(x & phi) {
                    dist += 1;
                }
            }
            // the complemented affine function is at the mirrored distance
            best = best.min(dist).min(size as u32 - dist);
        }
        best
    }

    /// S-box nonlinearity: minimum affine distance over all nonzero
    /// component combinations.
    pub fn nonlinearity(table: &[u8]) -> u32 {
        (1..table.len()).map(|m| boolean_nl(&truth_of(table, m))).min().unwrap()
    }

    /// Per-output-bit nonlinearities (masks 1, 2, 4, ...).
    pub fn single_bit_nls(table: &[u8]) -> Vec<u32> {
        let n = table.len().trailing_zeros() as usize;
        (0..n).map(|b| boolean_nl(&truth_of(table, 1 << b))).collect()
    }

    /// Dependence matrix by direct flip counting.
    pub fn sac(table: &[u8]) -> Vec<Vec<f64>> {
        let size = table.len();
        let n = size.trailing_zeros() as usize;
        let mut q = vec![vec![0.0; n]; n];
        for (r, row) in q.iter_mut().enumerate() {
            for (w, cell) in row.iter_mut().enumerate() {
                let mut count = 0usize;
                for x in 0..size {
                    let d = table[x] ^ table[x ^ (1 << r)];
                    count += ((d >> w) & 1) as usize;
                }
                *cell = count as f64 / size as f64;
            }
        }
        q
    }

    /// Linear probability by counting every (input mask, output mask) pair.
    pub fn lp(table: &[u8]) -> f64 {
        let size = table.len();
        let mut best = 0.0f64;
        for g2 in 1..size {
            for g1 in 0..size {
                let count = (0..size)
                    .filter(|&x| parity(x & g1) == parity(table[x] as usize & g2))
                    .count();
                best = best.max((count as f64 / size as f64 - 0.5).abs());
            }
        }
        best
    }

    /// Difference distribution by direct counting.
    pub fn dp(table: &[u8]) -> Vec<Vec<u32>> {
        let size = table.len();
        let mut counts = vec![vec![0u32; size]; size];
        for dx in 0..size {
            for x in 0..size {
                counts[dx][(table[x] ^ table[x ^ dx]) as usize] += 1;
            }
        }
        counts
    }

    /// BIC by exhaustive pair enumeration: (min pair nonlinearity,
    /// mean pair SAC, max avalanche correlation). Also returns the
    /// per-pair nonlinearities for finer-grained comparison.
    pub fn bic(table: &[u8]) -> (u32, f64, f64, Vec<u32>) {
        let size = table.len();
        let n = size.trailing_zeros() as usize;
        let mut pair_nls = Vec::new();
        let mut sac_sum = 0.0;
        let mut sac_count = 0usize;
        let mut max_corr = 0.0f64;
        for j in 0..n {
            for k in (j + 1)..n {
                let mask = (1 << j) | (1 << k);
                let truth = truth_of(table, mask);
                pair_nls.push(boolean_nl(&truth));
                for r in 0..n {
                    let changed =
                        (0..size).filter(|&x| truth[x] != truth[x ^ (1 << r)]).count();
                    sac_sum += changed as f64 / size as f64;
                    sac_count += 1;
                }
                for i in 0..n {
                    let a: Vec<f64> = (0..size)
                        .map(|x| (((table[x] ^ table[x ^ (1 << i)]) >> j) & 1) as f64)
                        .collect();
                    let b: Vec<f64> = (0..size)
                        .map(|x| (((table[x] ^ table[x ^ (1 << i)]) >> k) & 1) as f64)
                        .collect();
                    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
                    let (ma, mb) = (mean(&a), mean(&b));
                    let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>()
                        / size as f64;
                    let va = a.iter().map(|x| (x - ma) * (x - ma)).sum::<f64>() / size as f64;
                    let vb = b.iter().map(|y| (y - mb) * (y - mb)).sum::<f64>() / size as f64;
                    if va > 0.0 && vb > 0.0 {
                        max_corr = max_corr.max((cov / (va * vb).sqrt()).abs());
                    }
                }
            }
        }
        let min_nl = *pair_nls.iter().min().unwrap();
        (min_nl, sac_sum / sac_count as f64, max_corr, pair_nls)
    }
}

/// Independent walk replay: re-executes a trace over the grid with its
/// own movement table and returns the collected values.
pub fn replay_walk(grid: &EntropyGrid, trace: &WalkTrace) -> Vec<u8> {
    const DELTAS: [(isize, isize); 8] =
        [(0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)];
    let side = grid.side() as isize;
    let (mut row, mut col) = (trace.start.0 as isize, trace.start.1 as isize);
    let mut seen = [false; 256];
    let mut collected = Vec::new();
    let visit = |row: isize, col: isize, collected: &mut Vec<u8>, seen: &mut [bool; 256]| {
        let v = grid.get(row as usize, col as usize);
        if !seen[v as usize] {
            seen[v as usize] = true;
            collected.push(v);
        }
    };
    visit(row, col, &mut collected, &mut seen);
    for dir in &trace.steps {
        let (dr, dc) = DELTAS[dir.code() as usize];
        row = (row + dr + side) % side;
        col = (col + dc + side) % side;
        visit(row, col, &mut collected, &mut seen);
    }
    collected
}
