//! Inverse large sieve toolkit over `Q` and `F_q(T)`.
//!
//! Point sets in `[N]_{O_K}^d` that occupy few residue classes modulo many
//! primes are audited with the larger sieve, decomposed into generic
//! families and characteristic subsets, and finally explained by a
//! low-degree polynomial found with a small-height linear solve.

pub mod error;
pub mod experiment;
pub mod field;
pub mod heights;
pub mod lift;
pub mod linalg;
pub mod noether;
pub mod poly;
pub mod reconstruct;
pub mod siegel;
pub mod sieve;
pub mod structure;

pub use error::{Error, Result};
