//! Exact occurrence counts and discrepancy of digit blocks, plus the
//! binomial tail checks used to justify the refinement schedule.
//!
//! Everything here is exact rational arithmetic; there is no floating point
//! anywhere in a comparison.

use crate::block::DigitBlock;
use crate::error::{Error, Result};
use crate::Rat;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

/// Number of (overlapping) occurrences of `u` in `x`.
pub fn occ(x: &DigitBlock, u: &DigitBlock) -> Result<u64> {
    if x.base() != u.base() {
        return Err(Error::BaseMismatch(x.base(), u.base()));
    }
    if u.is_empty() {
        return Err(Error::invalid("occ: pattern block must be nonempty"));
    }
    if u.len() > x.len() {
        return Ok(0);
    }
    let xs = x.digits();
    let us = u.digits();
    Ok(xs.windows(us.len()).filter(|w| *w == us).count() as u64)
}

/// Max deviation of single-digit frequencies from 1/b, given a count table.
/// All counts share the denominator `len * b`, so the maximum deviation is
/// decided on integer numerators before a single reduction at the end.
pub fn simple_discrepancy_from_counts(counts: &[u64], len: u64, base: u32) -> Rat {
    assert!(len > 0, "discrepancy of an empty block");
    let n = BigInt::from(len);
    let b = BigInt::from(base);
    let mut best = BigInt::zero();
    for &c in counts {
        let dev = (BigInt::from(c) * &b - &n).abs();
        if dev > best {
            best = dev;
        }
    }
    Rat::new(best, n * b)
}

/// Simple discrepancy D(u, b): max over digits d of |occ(u,d)/|u| - 1/b|.
pub fn simple_discrepancy(u: &DigitBlock) -> Result<Rat> {
    if u.is_empty() {
        return Err(Error::invalid("simple_discrepancy: empty block"));
    }
    let mut counts = vec![0u64; u.base() as usize];
    for &d in u.digits() {
        counts[d as usize] += 1;
    }
    Ok(simple_discrepancy_from_counts(&counts, u.len() as u64, u.base()))
}

/// Block discrepancy D_ell(u, b): max over all length-ell blocks v of
/// |occ(u,v)/|u| - 1/b^ell|, with overlapping occurrences and normalization
/// by |u|. Only windows that actually occur are tallied; absent blocks
/// contribute 1/b^ell without being materialized.
pub fn block_discrepancy(u: &DigitBlock, ell: usize) -> Result<Rat> {
    if u.is_empty() {
        return Err(Error::invalid("block_discrepancy: empty block"));
    }
    if ell == 0 {
        return Err(Error::invalid("block_discrepancy: ell must be >= 1"));
    }
    let n = u.len() as u64;
    let digits = u.digits();
    let mut tally: HashMap<&[u32], u64> = HashMap::new();
    if u.len() >= ell {
        for w in digits.windows(ell) {
            *tally.entry(w).or_insert(0) += 1;
        }
    }
    // All deviations share the denominator n * b^ell; compare numerators.
    let bn = BigInt::from(n);
    let bpow = BigInt::from(u.base()).pow(ell as u32);
    let mut best = BigInt::zero();
    for &c in tally.values() {
        let dev = (BigInt::from(c) * &bpow - &bn).abs();
        if dev > best {
            best = dev;
        }
    }
    if pow_exceeds(u.base() as u64, ell as u64, tally.len() as u64) {
        // Some length-ell block is missing entirely: deviation 1/b^ell,
        // numerator n over the common denominator.
        if bn > best {
            best = bn.clone();
        }
    }
    Ok(Rat::new(best, bn * bpow))
}

/// Whether D_ell(u, b) > threshold.
///
/// Tries the missing-block shortcut first: with fewer than b^ell windows some
/// length-ell block must be absent, so D_ell >= 1/b^ell > threshold and no
/// window enumeration is needed. The power comparison exits early, so b^ell
/// is never materialized at real parameters.
pub fn block_discrepancy_exceeds(u: &DigitBlock, ell: usize, threshold: &Rat) -> Result<bool> {
    if u.is_empty() {
        return Err(Error::invalid("block_discrepancy_exceeds: empty block"));
    }
    if ell == 0 {
        return Err(Error::invalid("block_discrepancy_exceeds: ell must be >= 1"));
    }
    if threshold.is_negative() {
        return Ok(true);
    }
    // The missing-block shortcut needs threshold < 1/b^ell (a missing window
    // gives D >= 1/b^ell, which only settles strict inequality below that).
    // threshold * b^ell < 1 is decided with an early-exit power loop.
    if pow_times_below(u.base() as u64, ell as u64, threshold.numer(), threshold.denom()) {
        let windows = if u.len() >= ell { (u.len() - ell + 1) as u64 } else { 0 };
        if pow_exceeds(u.base() as u64, ell as u64, windows) {
            return Ok(true);
        }
    }
    Ok(block_discrepancy(u, ell)? > *threshold)
}

/// Upper bound for the simple discrepancy of a concatenation:
/// sum of D(u_j, b) * |u_j| divided by the total length.
pub fn concat_bound(blocks: &[DigitBlock]) -> Result<Rat> {
    let Some(first) = blocks.first() else {
        return Err(Error::invalid("concat_bound: no blocks"));
    };
    let base = first.base();
    let mut total: u64 = 0;
    let mut acc = Rat::zero();
    for b in blocks {
        if b.base() != base {
            return Err(Error::BaseMismatch(base, b.base()));
        }
        if b.is_empty() {
            continue;
        }
        total += b.len() as u64;
        acc += simple_discrepancy(b)? * Rat::from(BigInt::from(b.len()));
    }
    if total == 0 {
        return Err(Error::invalid("concat_bound: all blocks empty"));
    }
    Ok(acc / Rat::from(BigInt::from(total)))
}

/// Number of length-k base-b blocks in which a fixed digit occurs exactly
/// i times: C(k, i) * (b-1)^(k-i).
pub fn tail_count(b: u32, k: u64, i: u64) -> Result<BigUint> {
    if b < 2 {
        return Err(Error::invalid("tail_count: base must be >= 2"));
    }
    if i > k {
        return Err(Error::invalid(format!("tail_count: i = {i} out of range 0..={k}")));
    }
    Ok(binomial(k, i) * BigUint::from(b - 1).pow((k - i) as u32))
}

/// Report from `tail_bound_check`.
#[derive(Debug, Clone)]
pub struct TailReport {
    /// Exact count of blocks where the digit occurs at most k/b - eps*k times.
    pub lhs_low: BigUint,
    /// Exact count of blocks where the digit occurs at least k/b + eps*k times.
    pub lhs_high: BigUint,
    /// Certified rational upper bound of b^k * e^(-b eps^2 k / 6).
    pub rhs_upper: Rat,
    pub holds: bool,
}

/// Checks that both exact binomial tails are dominated by the certified
/// exponential bound b^k * e^(-b eps^2 k / 6).
pub fn tail_bound_check(b: u32, k: u64, eps: &Rat) -> Result<TailReport> {
    if b < 2 || k == 0 {
        return Err(Error::invalid("tail_bound_check: need b >= 2, k >= 1"));
    }
    let eps_lo = Rat::new(BigInt::from(6), BigInt::from(k));
    let eps_hi = Rat::new(BigInt::one(), BigInt::from(b));
    if *eps < eps_lo || *eps > eps_hi {
        return Err(Error::invalid(format!(
            "tail_bound_check: eps must satisfy 6/k <= eps <= 1/b, got {eps}"
        )));
    }
    let kb = Rat::new(BigInt::from(k), BigInt::from(b));
    let ek = eps * Rat::from(BigInt::from(k));
    let low_cut = &kb - &ek; // i <= k/b - eps k
    let high_cut = &kb + &ek; // i >= k/b + eps k
    let mut lhs_low = BigUint::zero();
    let mut lhs_high = BigUint::zero();
    for i in 0..=k {
        let ir = Rat::from(BigInt::from(i));
        if ir <= low_cut {
            lhs_low += tail_count(b, k, i)?;
        }
        if ir >= high_cut {
            lhs_high += tail_count(b, k, i)?;
        }
    }
    let x = Rat::from(BigInt::from(b)) * eps * eps * Rat::new(BigInt::from(k), BigInt::from(6));
    let rhs_upper = Rat::from(BigInt::from(BigUint::from(b).pow(k as u32))) * exp_neg_upper(&x);
    let holds = Rat::from(BigInt::from(lhs_low.clone())) <= rhs_upper
        && Rat::from(BigInt::from(lhs_high.clone())) <= rhs_upper;
    Ok(TailReport { lhs_low, lhs_high, rhs_upper, holds })
}

/// Certified rational upper bound of e^(-x) for rational x >= 0.
///
/// The argument is halved until it lies in [0, 1], where the alternating
/// series truncated after a positive term is an upper bound; squaring the
/// result the same number of times preserves the bound because everything
/// is nonnegative.
pub fn exp_neg_upper(x: &Rat) -> Rat {
    assert!(!x.is_negative(), "exp_neg_upper: x must be >= 0");
    let one = Rat::one();
    let mut halvings = 0u32;
    let mut y = x.clone();
    let two = Rat::from(BigInt::from(2));
    while y > one {
        y /= &two;
        halvings += 1;
    }
    // Partial sum of sum_j (-y)^j / j!, stopping after an even (positive)
    // term so the truncation is an over-approximation.
    let mut term = Rat::one();
    let mut sum = Rat::one();
    let mut j = 0u32;
    loop {
        j += 1;
        term = term * &y / Rat::from(BigInt::from(j));
        if j % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
            if term < Rat::new(BigInt::one(), BigInt::from(10u64).pow(24)) {
                break;
            }
        }
    }
    if sum.is_negative() {
        sum = Rat::zero();
    }
    for _ in 0..halvings {
        sum = &sum * &sum;
    }
    sum
}

/// Whether b^e > n, via incremental exponentiation with early exit; b^e is
/// never fully materialized when it is astronomically large.
pub fn pow_exceeds(b: u64, e: u64, n: u64) -> bool {
    debug_assert!(b >= 2);
    if e >= 64 {
        return true;
    }
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc *= b as u128;
        if acc > n as u128 {
            return true;
        }
    }
    acc > n as u128
}

/// Whether num * b^e < den, with early exit once the product can no longer
/// be below den.
fn pow_times_below(b: u64, e: u64, num: &BigInt, den: &BigInt) -> bool {
    debug_assert!(b >= 2);
    if num.is_zero() {
        return true;
    }
    let mut acc = num.clone();
    let bb = BigInt::from(b);
    for _ in 0..e {
        acc *= &bb;
        if acc >= *den {
            return false;
        }
    }
    acc < *den
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k.min(n));
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..k {
        num *= BigUint::from(n - j);
        den *= BigUint::from(j + 1);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn blk(base: u32, s: &str) -> DigitBlock {
        DigitBlock::parse(base, s).unwrap()
    }

    #[test]
    fn occ_counts_overlaps() {
        assert_eq!(occ(&blk(2, "0101"), &blk(2, "01")).unwrap(), 2);
        assert_eq!(occ(&blk(2, "1111"), &blk(2, "11")).unwrap(), 3);
        assert_eq!(occ(&blk(2, "0101"), &blk(2, "00")).unwrap(), 0);
        assert_eq!(occ(&blk(2, "01"), &blk(2, "0101")).unwrap(), 0);
        assert!(occ(&blk(2, "01"), &blk(3, "01")).is_err());
    }

    #[test]
    fn simple_discrepancy_examples() {
        assert_eq!(simple_discrepancy(&blk(2, "0011")).unwrap(), rat(0, 1));
        assert_eq!(simple_discrepancy(&blk(2, "000")).unwrap(), rat(1, 2));
        // counts 2,1,1 over length 4: max deviation |2/4 - 1/3| = 1/6
        assert_eq!(simple_discrepancy(&blk(3, "0012")).unwrap(), rat(1, 6));
        assert!(simple_discrepancy(&DigitBlock::empty(2)).is_err());
    }

    #[test]
    fn block_discrepancy_examples() {
        assert_eq!(block_discrepancy(&blk(2, "0101"), 2).unwrap(), rat(1, 4));
        assert_eq!(block_discrepancy(&blk(2, "01"), 1).unwrap(), rat(0, 1));
        assert_eq!(block_discrepancy(&blk(2, "0000000000"), 3).unwrap(), rat(27, 40));
        assert_eq!(
            block_discrepancy(&blk(2, "0101"), 1).unwrap(),
            simple_discrepancy(&blk(2, "0101")).unwrap()
        );
    }

    #[test]
    fn exceeds_shortcut_and_slow_path() {
        let u100 = DigitBlock::new(2, vec![0, 1].repeat(50)).unwrap();
        assert!(block_discrepancy_exceeds(&u100, 10, &rat(1, 1 << 21)).unwrap());
        assert!(block_discrepancy_exceeds(&blk(2, "0101"), 2, &rat(1, 5)).unwrap());
        assert!(!block_discrepancy_exceeds(&blk(2, "0101"), 2, &rat(1, 4)).unwrap());
        // at threshold >= 1/b^ell the shortcut is invalid; exact fallback
        assert!(!block_discrepancy_exceeds(&blk(2, "0101"), 2, &rat(1, 3)).unwrap());
    }

    #[test]
    fn concat_bound_examples() {
        let b = |s| blk(2, s);
        assert_eq!(concat_bound(&[b("01"), b("01")]).unwrap(), rat(0, 1));
        assert_eq!(concat_bound(&[b("00"), b("11")]).unwrap(), rat(1, 2));
        assert_eq!(concat_bound(&[b("000"), b("01")]).unwrap(), rat(3, 10));
        assert_eq!(simple_discrepancy(&b("00001")).unwrap(), rat(3, 10));
        assert!(concat_bound(&[DigitBlock::empty(2)]).is_err());
    }

    #[test]
    fn tail_count_examples() {
        assert_eq!(tail_count(2, 3, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(tail_count(3, 2, 0).unwrap(), BigUint::from(4u32));
        assert_eq!(tail_count(2, 30, 7).unwrap(), BigUint::from(2035800u64));
        assert!(tail_count(2, 3, 4).is_err());
    }

    #[test]
    fn tail_bound_cases() {
        for (b, k, e) in [(2u32, 36u64, rat(1, 6)), (2, 30, rat(1, 5)), (3, 30, rat(1, 5))] {
            let rep = tail_bound_check(b, k, &e).unwrap();
            assert!(rep.holds, "tail bound {b},{k} failed: {rep:?}");
        }
        // eps = 1/b is the top of the admissible range
        assert!(tail_bound_check(2, 30, &rat(1, 2)).unwrap().holds);
        assert!(tail_bound_check(2, 30, &rat(2, 3)).is_err());
        assert!(tail_bound_check(2, 30, &rat(1, 100)).is_err());
    }

    #[test]
    fn exp_upper_is_an_upper_bound() {
        // e^-1 = 0.36787...; the certified bound must sit above it.
        let u = exp_neg_upper(&rat(1, 1));
        assert!(u > rat(36787, 100000) && u < rat(3679, 10000));
        // halving path: e^-4 = 0.018315...
        let u4 = exp_neg_upper(&rat(4, 1));
        assert!(u4 > rat(18315, 1000000) && u4 < rat(18317, 1000000));
        assert_eq!(exp_neg_upper(&rat(0, 1)), rat(1, 1));
    }

    #[test]
    fn pow_helpers() {
        assert!(pow_exceeds(2, 10, 1023));
        assert!(!pow_exceeds(2, 10, 1024));
        assert!(pow_exceeds(2, 1000, u64::MAX));
    }
}
