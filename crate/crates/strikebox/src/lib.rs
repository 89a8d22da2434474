//! Construction, optimization and evaluation of cryptographic S-boxes
//! from physical entropy.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`entropy`] — parse lightning strike location records, difference
//!    them into raw bits, whiten with the Von Neumann extractor and
//!    check the result with a statistical test battery.
//! 2. [`walker`] — materialize the bits as a byte grid and collect
//!    bijective S-boxes with 8-direction random walks over it.
//! 3. [`evolver`] — improve a population of S-boxes with an island-model
//!    genetic algorithm (one-point crossover, bit-flip bijectivity
//!    repair, SHA-3 duplicate removal).
//! 4. [`metrics`] — score any S-box on nonlinearity, SAC, BIC, linear and
//!    differential approximation probability.
//!
//! [`spn`] demonstrates the boxes inside a 16-round substitution-
//! permutation image cipher with NPCR/UACI sensitivity measurements.

pub mod bits;
pub mod entropy;
pub mod evolver;
pub mod metrics;
pub mod sbox;
pub mod spn;
pub mod testdata;
pub mod walker;

pub use bits::{BitCursor, BitOrigin, BitStream};
pub use sbox::{SBox, SBoxDigest, SBoxError, SBoxFormat};
