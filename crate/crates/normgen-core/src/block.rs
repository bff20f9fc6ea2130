//! Finite digit strings in a fixed base, the common currency of the whole
//! crate: expansions, discrepancy inputs, interval labels.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::Zero;
use std::fmt;

/// A finite digit string in a fixed base. Empty blocks are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitBlock {
    base: u32,
    digits: Vec<u32>,
}

impl DigitBlock {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        if base < 2 {
            return Err(Error::invalid(format!("base must be >= 2, got {base}")));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::invalid(format!("digit {d} out of range for base {base}")));
        }
        Ok(DigitBlock { base, digits })
    }

    pub fn empty(base: u32) -> Self {
        DigitBlock { base, digits: Vec::new() }
    }

    /// Parse a block from text. For bases up to 10 the text is contiguous
    /// characters '0'..'9'; for larger bases it is whitespace-separated
    /// decimal digit values.
    pub fn parse(base: u32, text: &str) -> Result<Self> {
        if base < 2 {
            return Err(Error::invalid(format!("base must be >= 2, got {base}")));
        }
        let mut digits = Vec::new();
        if base <= 10 {
            for ch in text.chars() {
                if ch.is_whitespace() {
                    continue;
                }
                let d = ch
                    .to_digit(10)
                    .ok_or_else(|| Error::invalid(format!("non-digit character {ch:?}")))?;
                digits.push(d);
            }
        } else {
            for tok in text.split_whitespace() {
                let d: u32 = tok
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad digit token {tok:?}")))?;
                digits.push(d);
            }
        }
        DigitBlock::new(base, digits)
    }

    /// Block of given length whose positional value is `value`, written with
    /// leading zeros. Fails if `value >= base^len`.
    pub fn from_value(base: u32, len: usize, value: &BigUint) -> Result<Self> {
        let mut digits = vec![0u32; len];
        if value.is_zero() {
            return DigitBlock::new(base, digits);
        }
        let mut rem = value.to_radix_le(base);
        if rem.len() > len {
            return Err(Error::invalid(format!(
                "value needs {} digits, block has room for {len}",
                rem.len()
            )));
        }
        for (i, d) in rem.drain(..).enumerate() {
            digits[len - 1 - i] = d as u32;
        }
        DigitBlock::new(base, digits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Positional value of the block read as a base-b integer.
    pub fn value(&self) -> BigUint {
        if self.digits.is_empty() {
            return BigUint::zero();
        }
        let bytes: Vec<u8> = self.digits.iter().map(|&d| d as u8).collect();
        if self.base <= 256 {
            BigUint::from_radix_be(&bytes, self.base).expect("digits validated at construction")
        } else {
            let mut v = BigUint::zero();
            for &d in &self.digits {
                v = v * self.base + d;
            }
            v
        }
    }

    /// First `n` digits as a new block.
    pub fn prefix(&self, n: usize) -> Self {
        DigitBlock { base: self.base, digits: self.digits[..n.min(self.digits.len())].to_vec() }
    }

    pub fn concat(&self, other: &DigitBlock) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        Ok(DigitBlock { base: self.base, digits })
    }

    pub fn push(&mut self, d: u32) {
        assert!(d < self.base, "digit out of range");
        self.digits.push(d);
    }

    /// True when every digit equals zero (false for the empty block).
    pub fn is_all_zeros(&self) -> bool {
        !self.digits.is_empty() && self.digits.iter().all(|&d| d == 0)
    }
}

impl fmt::Display for DigitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base <= 10 {
            for &d in &self.digits {
                write!(f, "{d}")?;
            }
        } else {
            let mut first = true;
            for &d in &self.digits {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{d}")?;
                first = false;
            }
        }
        Ok(())
    }
}

/// Incremental per-digit occurrence tally. Single-owner accumulator: absorb
/// digits as they are produced instead of rescanning ever-growing blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitCounter {
    base: u32,
    counts: Vec<u64>,
    length: u64,
}

impl DigitCounter {
    pub fn new(base: u32) -> Self {
        DigitCounter { base, counts: vec![0; base as usize], length: 0 }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn push(&mut self, d: u32) {
        assert!(d < self.base, "digit out of range");
        self.counts[d as usize] += 1;
        self.length += 1;
    }

    pub fn absorb(&mut self, block: &DigitBlock) -> Result<()> {
        if block.base() != self.base {
            return Err(Error::BaseMismatch(self.base, block.base()));
        }
        for &d in block.digits() {
            self.counts[d as usize] += 1;
        }
        self.length += block.len() as u64;
        Ok(())
    }

    /// Add raw counts produced elsewhere (e.g. by the candidate search).
    pub fn add_counts(&mut self, counts: &[u64]) {
        assert_eq!(counts.len(), self.counts.len());
        for (c, &a) in self.counts.iter_mut().zip(counts) {
            *c += a;
        }
        self.length += counts.iter().sum::<u64>();
    }
}
