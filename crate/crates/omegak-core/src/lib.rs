//! Exact and asymptotic statistics of irreducible-factor multiplicities in
//! F_q[t]: for a monic polynomial f, omega_k(f) counts the distinct monic
//! irreducible factors dividing f with multiplicity exactly k. The crate
//! computes these statistics three independent ways — brute-force
//! enumeration, exact big-integer moment formulas, and truncated generating
//! series — plus the constants and distributional reports that tie them to
//! their asymptotic behavior.
//!
//! Module map:
//! - [`field`]: finite field contexts F_{p^e} with index-based elements
//! - [`poly`]: dense polynomial arithmetic over a field context
//! - [`factor`]: squarefree / distinct-degree / equal-degree factorization
//! - [`prime_count`]: exact counts of monic irreducibles and Mertens sums
//! - [`stats`]: omega_k profiles, exact moments, censuses, weighted sums
//! - [`series`]: truncated power series over exact rationals
//! - [`constants`]: asymptotic constants with rigorous truncation tails
//! - [`dist`]: normal CDF, empirical CDFs, KS distance, variance reports
//!
//! Hot loops (enumeration, sampling) run data-parallel under the default
//! `parallel` feature; sequential twins of those entry points are always
//! compiled and produce bit-identical results.

pub mod constants;
pub mod dist;
pub mod error;
pub mod factor;
pub mod field;
mod gf2;
pub mod numeric;
pub mod poly;
pub mod prime_count;
pub mod series;
pub mod stats;

pub use error::{Error, Result};
