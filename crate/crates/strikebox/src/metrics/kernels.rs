//! Size-generic metric kernels.
//!
//! Everything here works on a plain substitution table of length `2^n`
//! (values `< 2^n`), so the same code backs the public 8-bit API and the
//! exhaustive small-size cross-checks in the test suites. `n` is inferred
//! from the table length.

/// log2 of a power-of-two table length.
pub fn table_bits(len: usize) -> u32 {
    assert!(len.is_power_of_two() && len >= 2, "table length must be a power of two");
    len.trailing_zeros()
}

/// Parity of `x & mask` — the GF(2) dot product of bit vectors.
#[inline]
pub fn dot(x: u16, mask: u16) -> u8 {
    ((x & mask).count_ones() & 1) as u8
}

/// Truth table of the component `x -> parity(table[x] & mask)`.
pub fn component_truth(table: &[u8], mask: u16) -> Vec<u8> {
    table.iter().map(|&v| dot(v as u16, mask)).collect()
}

/// In-place fast Walsh-Hadamard transform over a +-1 sign vector.
pub fn fwht(data: &mut [i32]) {
    let n = data.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(h * 2) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Walsh spectrum of a 0/1 truth table via the fast transform:
/// `W[phi] = sum_x (-1)^(f(x) XOR x.phi)`.
pub fn walsh_from_truth(truth: &[u8]) -> Vec<i32> {
    let mut signs: Vec<i32> = truth.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect();
    fwht(&mut signs);
    signs
}

/// Walsh spectrum by the defining double loop. Quadratic; exists as the
/// independent route the fast transform is checked against.
pub fn walsh_naive(truth: &[u8]) -> Vec<i32> {
    let n = truth.len();
    (0..n as u16)
        .map(|phi| {
            (0..n as u16)
                .map(|x| if truth[x as usize] ^ dot(x, phi) == 0 { 1 } else { -1 })
                .sum()
        })
        .collect()
}

/// Nonlinearity of a Boolean truth table:
/// `2^(n-1) - max|W| / 2`, the Hamming distance to the nearest affine function.
pub fn boolean_nonlinearity(truth: &[u8]) -> u32 {
    let spectrum = walsh_from_truth(truth);
    let max_abs = spectrum.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
    (truth.len() as u32) / 2 - max_abs / 2
}

/// Nonlinearity of every nonzero component mask, indexed `mask - 1`.
pub fn component_nonlinearities(table: &[u8]) -> Vec<u32> {
    let size = table.len();
    (1..size as u16)
        .map(|mask| boolean_nonlinearity(&component_truth(table, mask)))
        .collect()
}

/// S-box nonlinearity: the minimum over all nonzero component combinations.
pub fn min_component_nonlinearity(table: &[u8]) -> u32 {
    component_nonlinearities(table).into_iter().min().expect("at least one mask")
}

/// Nonlinearity of each single output bit viewed as a Boolean function
/// (masks 1, 2, 4, ...).
pub fn single_bit_nonlinearities(table: &[u8]) -> Vec<u32> {
    let n = table_bits(table.len());
    (0..n)
        .map(|bit| boolean_nonlinearity(&component_truth(table, 1 << bit)))
        .collect()
}

/// Dependence matrix: entry `(r, w)` is the fraction of inputs for which
/// flipping input bit `r` flips output bit `w`.
pub fn sac_matrix(table: &[u8]) -> Vec<Vec<f64>> {
    let size = table.len();
    let n = table_bits(size) as usize;
    let mut q = vec![vec![0.0f64; n]; n];
    for (r, q_row) in q.iter_mut().enumerate() {
        for x in 0..size {
            let d = table[x] ^ table[x ^ (1 << r)];
            for (w, cell) in q_row.iter_mut().enumerate() {
                *cell += ((d >> w) & 1) as f64;
            }
        }
        for cell in q_row.iter_mut() {
            *cell /= size as f64;
        }
    }
    q
}

/// SAC value of one Boolean truth table under one flip bit: the fraction
/// of inputs where the output changes.
fn boolean_sac(truth: &[u8], flip: usize) -> f64 {
    let size = truth.len();
    let changed: usize = (0..size).filter(|&x| truth[x] != truth[x ^ flip]).count();
    changed as f64 / size as f64
}

/// Scores for the independence of output-bit pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BicScores {
    /// Minimum nonlinearity over the XOR of every output-bit pair.
    pub nonlinearity: u32,
    /// Mean SAC value over every pair and every flip bit.
    pub sac: f64,
    /// Largest absolute correlation between avalanche variables of any
    /// output-bit pair, over all flip bits.
    pub max_correlation: f64,
}

/// Pairwise output-bit independence: nonlinearity and SAC of the XOR
/// components `bit_j(S(x)) ^ bit_k(S(x))`, plus the maximum avalanche
/// correlation.
pub fn bic_scores(table: &[u8]) -> BicScores {
    let size = table.len();
    let n = table_bits(size) as usize;
    let mut nl_min = u32::MAX;
    let mut sac_sum = 0.0;
    let mut sac_count = 0usize;
    let mut max_corr: f64 = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            let mask = (1u16 << j) | (1u16 << k);
            let truth = component_truth(table, mask);
            nl_min = nl_min.min(boolean_nonlinearity(&truth));
            for r in 0..n {
                sac_sum += boolean_sac(&truth, 1 << r);
                sac_count += 1;
            }
            for i in 0..n {
                max_corr = max_corr.max(avalanche_correlation(table, i, j, k).abs());
            }
        }
    }
    BicScores { nonlinearity: nl_min, sac: sac_sum / sac_count as f64, max_correlation: max_corr }
}

/// Pearson correlation between the avalanche variables of output bits `j`
/// and `k` under a flip of input bit `i`. Returns 0 when either variable
/// is constant.
fn avalanche_correlation(table: &[u8], i: usize, j: usize, k: usize) -> f64 {
    let size = table.len();
    let (mut sum_j, mut sum_k, mut sum_jk) = (0u32, 0u32, 0u32);
    for x in 0..size {
        let d = table[x] ^ table[x ^ (1 << i)];
        let a = (d >> j) & 1;
        let b = (d >> k) & 1;
        sum_j += a as u32;
        sum_k += b as u32;
        sum_jk += (a & b) as u32;
    }
    let n = size as f64;
    let mean_j = sum_j as f64 / n;
    let mean_k = sum_k as f64 / n;
    let cov = sum_jk as f64 / n - mean_j * mean_k;
    let var_j = mean_j * (1.0 - mean_j);
    let var_k = mean_k * (1.0 - mean_k);
    if var_j == 0.0 || var_k == 0.0 {
        return 0.0;
    }
    cov / (var_j * var_k).sqrt()
}

/// Linear approximation probability from the Walsh spectra:
/// `max |W| / 2^(n+1)` over all nonzero output masks.
pub fn lp_from_walsh(table: &[u8]) -> f64 {
    let size = table.len();
    let mut max_abs = 0u32;
    for mask in 1..size as u16 {
        let spectrum = walsh_from_truth(&component_truth(table, mask));
        let m = spectrum.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
        max_abs = max_abs.max(m);
    }
    max_abs as f64 / (2.0 * size as f64)
}

/// Difference distribution table:
/// `counts[dx][dy] = #{x : S(x) ^ S(x ^ dx) = dy}`.
pub fn dp_counts(table: &[u8]) -> Vec<Vec<u32>> {
    let size = table.len();
    let mut counts = vec![vec![0u32; size]; size];
    for (dx, row) in counts.iter_mut().enumerate() {
        for x in 0..size {
            row[(table[x] ^ table[x ^ dx]) as usize] += 1;
        }
    }
    counts
}

/// Maximum differential probability over nonzero input differences.
pub fn dp_max(counts: &[Vec<u32>]) -> f64 {
    let size = counts.len();
    let max = counts[1..]
        .iter()
        .flat_map(|row| row.iter())
        .copied()
        .max()
        .unwrap_or(0);
    max as f64 / size as f64
}
