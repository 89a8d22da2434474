//! Statistical randomness tests for bit streams.
//!
//! Nine tests in the style of the NIST SP 800-22 battery: monobit
//! frequency, block frequency, runs, longest run of ones, spectral (DFT),
//! serial, approximate entropy, and forward/reverse cumulative sums.
//! Each test yields a p-value; a stream passes a test when the p-value is
//! at or above the significance level (0.01 by default).

use crate::bits::BitStream;
use rustfft::{num_complex::Complex, FftPlanner};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;
use std::f64::consts::LN_2;
use thiserror::Error;

/// Identifier of one statistical test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestName {
    Monobit,
    BlockFrequency,
    Runs,
    LongestRun,
    Dft,
    Serial,
    ApproxEntropy,
    CusumForward,
    CusumReverse,
}

impl TestName {
    /// All implemented tests, in battery order.
    pub const ALL: [TestName; 9] = [
        TestName::Monobit,
        TestName::BlockFrequency,
        TestName::Runs,
        TestName::LongestRun,
        TestName::Dft,
        TestName::Serial,
        TestName::ApproxEntropy,
        TestName::CusumForward,
        TestName::CusumReverse,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TestName::Monobit => "monobit",
            TestName::BlockFrequency => "block_frequency",
            TestName::Runs => "runs",
            TestName::LongestRun => "longest_run",
            TestName::Dft => "dft",
            TestName::Serial => "serial",
            TestName::ApproxEntropy => "approx_entropy",
            TestName::CusumForward => "cusum_forward",
            TestName::CusumReverse => "cusum_reverse",
        }
    }
}

impl std::fmt::Display for TestName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TestName {
    type Err = StatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TestName::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| StatError::UnknownTest(s.to_string()))
    }
}

/// Tunable test parameters. `block_len` is the block/pattern length for
/// the tests that take one (block frequency, serial, approximate entropy);
/// the rest ignore it.
#[derive(Debug, Clone, Copy)]
pub struct TestParams {
    pub significance: f64,
    pub block_len: Option<usize>,
}

impl Default for TestParams {
    fn default() -> Self {
        Self { significance: 0.01, block_len: None }
    }
}

/// Outcome of one statistical test.
#[derive(Debug, Clone)]
pub struct StatTestResult {
    pub test_name: String,
    pub p_value: f64,
    pub pass: bool,
    pub significance: f64,
    /// Secondary figures (statistics, extra p-values) as free text.
    pub detail: String,
}

impl StatTestResult {
    fn new(name: TestName, p_value: f64, significance: f64, detail: String) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            test_name: name.as_str().to_string(),
            p_value,
            pass: p_value >= significance,
            significance,
            detail,
        }
    }
}

#[derive(Debug, Error)]
pub enum StatError {
    #[error("{test}: need at least {needed} bits, got {got}")]
    InsufficientBits { test: &'static str, needed: usize, got: usize },
    #[error("unknown test {0:?}")]
    UnknownTest(String),
    #[error("{test}: bad parameter: {reason}")]
    BadParams { test: &'static str, reason: String },
}

/// Runs the named test on `bits`.
pub fn stat_test(
    name: TestName,
    bits: &BitStream,
    params: &TestParams,
) -> Result<StatTestResult, StatError> {
    let eps = bits.as_slice();
    let sig = params.significance;
    match name {
        TestName::Monobit => monobit(eps, sig),
        TestName::BlockFrequency => block_frequency(eps, params.block_len.unwrap_or(128), sig),
        TestName::Runs => runs(eps, sig),
        TestName::LongestRun => longest_run(eps, sig),
        TestName::Dft => dft(eps, sig),
        TestName::Serial => serial(eps, params.block_len.unwrap_or(8), sig),
        TestName::ApproxEntropy => approx_entropy(eps, params.block_len.unwrap_or(5), sig),
        TestName::CusumForward => cusum(eps, false, sig),
        TestName::CusumReverse => cusum(eps, true, sig),
    }
}

/// Runs the named test, resolving the name at run time (CLI entry point).
pub fn stat_test_by_name(
    name: &str,
    bits: &BitStream,
    params: &TestParams,
) -> Result<StatTestResult, StatError> {
    stat_test(name.parse()?, bits, params)
}

/// Runs the whole battery, one result (or error) per test.
pub fn run_battery(bits: &BitStream, params: &TestParams) -> Vec<Result<StatTestResult, StatError>> {
    TestName::ALL.iter().map(|&t| stat_test(t, bits, params)).collect()
}

fn require(test: &'static str, needed: usize, got: usize) -> Result<(), StatError> {
    if got < needed {
        Err(StatError::InsufficientBits { test, needed, got })
    } else {
        Ok(())
    }
}

/// Regularized upper incomplete gamma; `gamma_ur` rejects x = 0, where the
/// value is exactly 1 (a zero chi-square statistic).
fn igamc(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(a, x)
    }
}

fn monobit(eps: &[u8], sig: f64) -> Result<StatTestResult, StatError> {
    require("monobit", 100, eps.len())?;
    let n = eps.len() as f64;
    let s: i64 = eps.iter().map(|&b| if b == 1 { 1 } else { -1 }).sum();
    let s_obs = (s as f64).abs() / n.sqrt();
    let p = erfc(s_obs / std::f64::consts::SQRT_2);
    Ok(StatTestResult::new(TestName::Monobit, p, sig, format!("S={s} n={}", eps.len())))
}

fn block_frequency(eps: &[u8], m: usize, sig: f64) -> Result<StatTestResult, StatError> {
    if m < 2 {
        return Err(StatError::BadParams { test: "block_frequency", reason: format!("block length {m} too small") });
    }
    require("block_frequency", 100.max(m), eps.len())?;
    let n_blocks = eps.len() / m;
    let mut chi2 = 0.0;
    for block in eps.chunks_exact(m).take(n_blocks) {
        let ones: usize = block.iter().map(|&b| b as usize).sum();
        let pi = ones as f64 / m as f64;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * m as f64;
    let p = igamc(n_blocks as f64 / 2.0, chi2 / 2.0);
    Ok(StatTestResult::new(
        TestName::BlockFrequency,
        p,
        sig,
        format!("M={m} N={n_blocks} chi2={chi2:.4}"),
    ))
}

fn runs(eps: &[u8], sig: f64) -> Result<StatTestResult, StatError> {
    require("runs", 100, eps.len())?;
    let n = eps.len() as f64;
    let pi = eps.iter().map(|&b| b as usize).sum::<usize>() as f64 / n;
    let tau = 2.0 / n.sqrt();
    if (pi - 0.5).abs() >= tau {
        // frequency pre-test failed; the runs statistic is meaningless
        return Ok(StatTestResult::new(
            TestName::Runs,
            0.0,
            sig,
            format!("pre-test failed: pi={pi:.4}"),
        ));
    }
    let v = 1 + eps.windows(2).filter(|w| w[0] != w[1]).count();
    let num = (v as f64 - 2.0 * n * pi * (1.0 - pi)).abs();
    let den = 2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi);
    let p = erfc(num / den);
    Ok(StatTestResult::new(TestName::Runs, p, sig, format!("V={v} pi={pi:.4}")))
}

fn longest_run(eps: &[u8], sig: f64) -> Result<StatTestResult, StatError> {
    require("longest_run", 128, eps.len())?;
    let n = eps.len();
    // class probabilities depend on the block size tier
    let (m, classes, pi): (usize, &[usize], &[f64]) = if n < 6272 {
        (8, &[1, 2, 3, 4], &[0.2148, 0.3672, 0.2305, 0.1875])
    } else if n < 750_000 {
        (128, &[4, 5, 6, 7, 8, 9], &[0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124])
    } else {
        (
            10_000,
            &[10, 11, 12, 13, 14, 15, 16],
            &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        )
    };
    let k = classes.len() - 1;
    let n_blocks = n / m;
    let mut nu = vec![0usize; classes.len()];
    for block in eps.chunks_exact(m).take(n_blocks) {
        let mut longest = 0usize;
        let mut run = 0usize;
        for &b in block {
            if b == 1 {
                run += 1;
                longest = longest.max(run);
            } else {
                run = 0;
            }
        }
        let idx = if longest <= classes[0] {
            0
        } else if longest >= classes[k] {
            k
        } else {
            classes.iter().position(|&c| c == longest).unwrap()
        };
        nu[idx] += 1;
    }
    let mut chi2 = 0.0;
    for (count, &p_i) in nu.iter().zip(pi) {
        let expected = n_blocks as f64 * p_i;
        chi2 += (*count as f64 - expected) * (*count as f64 - expected) / expected;
    }
    let p = igamc(k as f64 / 2.0, chi2 / 2.0);
    Ok(StatTestResult::new(
        TestName::LongestRun,
        p,
        sig,
        format!("M={m} N={n_blocks} chi2={chi2:.4}"),
    ))
}

fn dft(eps: &[u8], sig: f64) -> Result<StatTestResult, StatError> {
    require("dft", 1000, eps.len())?;
    let n = eps.len();
    let mut buf: Vec<Complex<f64>> = eps
        .iter()
        .map(|&b| Complex::new(if b == 1 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let threshold = (2.995732273553991 * n as f64).sqrt(); // sqrt(n ln 20)
    let n1 = buf[..n / 2].iter().filter(|c| c.norm() < threshold).count();
    let n0 = 0.95 * n as f64 / 2.0;
    let d = (n1 as f64 - n0) / (n as f64 * 0.95 * 0.05 / 4.0).sqrt();
    let p = erfc(d.abs() / std::f64::consts::SQRT_2);
    Ok(StatTestResult::new(TestName::Dft, p, sig, format!("N1={n1} N0={n0:.1} d={d:.4}")))
}

/// Counts of overlapping `m`-bit patterns over the circularly extended
/// sequence (the first `m - 1` bits are appended).
fn overlapping_counts(eps: &[u8], m: usize) -> Vec<u64> {
    let n = eps.len();
    let mask = (1usize << m) - 1;
    let mut counts = vec![0u64; 1 << m];
    let mut idx = 0usize;
    for &b in &eps[..m - 1] {
        idx = (idx << 1) | b as usize;
    }
    for i in m - 1..n + m - 1 {
        idx = ((idx << 1) | eps[i % n] as usize) & mask;
        counts[idx] += 1;
    }
    counts
}

fn psi_squared(eps: &[u8], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = eps.len() as f64;
    let sum_sq: f64 = overlapping_counts(eps, m)
        .iter()
        .map(|&c| (c as f64) * (c as f64))
        .sum();
    (1u64 << m) as f64 / n * sum_sq - n
}

fn serial(eps: &[u8], m: usize, sig: f64) -> Result<StatTestResult, StatError> {
    if !(2..=20).contains(&m) {
        return Err(StatError::BadParams { test: "serial", reason: format!("pattern length {m} out of range 2..=20") });
    }
    require("serial", 1 << (m + 2), eps.len())?;
    let psi_m = psi_squared(eps, m);
    let psi_m1 = psi_squared(eps, m - 1);
    let psi_m2 = psi_squared(eps, m - 2);
    let d1 = psi_m - psi_m1;
    let d2 = psi_m - 2.0 * psi_m1 + psi_m2;
    let p1 = igamc(f64::powi(2.0, m as i32 - 2), d1 / 2.0);
    let p2 = igamc(f64::powi(2.0, m as i32 - 3), d2 / 2.0);
    // conservative single figure: the worse of the two p-values
    let p = p1.min(p2);
    Ok(StatTestResult::new(
        TestName::Serial,
        p,
        sig,
        format!("m={m} p1={p1:.6} p2={p2:.6}"),
    ))
}

fn approx_entropy(eps: &[u8], m: usize, sig: f64) -> Result<StatTestResult, StatError> {
    if !(1..=16).contains(&m) {
        return Err(StatError::BadParams { test: "approx_entropy", reason: format!("pattern length {m} out of range 1..=16") });
    }
    require("approx_entropy", 1 << (m + 5), eps.len())?;
    let n = eps.len() as f64;
    let phi = |b: usize| -> f64 {
        overlapping_counts(eps, b)
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let f = c as f64 / n;
                f * f.ln()
            })
            .sum()
    };
    let apen = phi(m) - phi(m + 1);
    let chi2 = 2.0 * n * (LN_2 - apen);
    let p = igamc(f64::powi(2.0, m as i32 - 1), chi2 / 2.0);
    Ok(StatTestResult::new(
        TestName::ApproxEntropy,
        p,
        sig,
        format!("m={m} ApEn={apen:.6} chi2={chi2:.4}"),
    ))
}

fn cusum(eps: &[u8], reverse: bool, sig: f64) -> Result<StatTestResult, StatError> {
    let name = if reverse { TestName::CusumReverse } else { TestName::CusumForward };
    require(name.as_str(), 100, eps.len())?;
    let n = eps.len();
    let mut z: i64 = 0;
    let mut sum: i64 = 0;
    let iter: Box<dyn Iterator<Item = &u8>> =
        if reverse { Box::new(eps.iter().rev()) } else { Box::new(eps.iter()) };
    for &b in iter {
        sum += if b == 1 { 1 } else { -1 };
        z = z.max(sum.abs());
    }
    let z = z as f64;
    let sqrt_n = (n as f64).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let phi = |x: f64| normal.cdf(x);
    let ratio = n as f64 / z;
    let mut p = 1.0;
    let lo1 = ((-ratio + 1.0) / 4.0).floor() as i64;
    let hi = ((ratio - 1.0) / 4.0).floor() as i64;
    for k in lo1..=hi {
        let k = k as f64;
        p -= phi((4.0 * k + 1.0) * z / sqrt_n) - phi((4.0 * k - 1.0) * z / sqrt_n);
    }
    let lo2 = ((-ratio - 3.0) / 4.0).floor() as i64;
    for k in lo2..=hi {
        let k = k as f64;
        p += phi((4.0 * k + 3.0) * z / sqrt_n) - phi((4.0 * k + 1.0) * z / sqrt_n);
    }
    Ok(StatTestResult::new(name, p, sig, format!("z={z}")))
}
