//! Exact-arithmetic construction of reals whose digit expansions have
//! controlled discrepancy in every base.
//!
//! The crate builds towers of nested b-adic intervals (base 2 up to some
//! base t), refines them so that every per-base expansion keeps its digit
//! counts near uniform, and streams the digits of the real singled out by
//! the intersection. All interval endpoints, discrepancies, and thresholds
//! are exact rationals or integers; no floating point participates in any
//! comparison.

pub mod block;
pub mod control;
pub mod discrepancy;
pub mod error;
pub mod intervals;
pub mod params;
pub mod pipeline;
pub mod predicate;
pub mod refine;
mod search;
pub mod trace;
pub mod tsequence;

pub use error::{Error, Result};

/// Exact rational number; the only number type discrepancies are stated in.
pub type Rat = num_rational::BigRational;

/// Small-literal rational constructor for thresholds like 1/(i+2).
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}
