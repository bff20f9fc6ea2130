//! Nested interval towers: one interval per base 2..t, each b-adic in its
//! own base, nested, and losing at most a factor 2(b+1) of measure per base.
//! Such a tower pins a digit prefix simultaneously in every base it covers.

use crate::block::DigitBlock;
use crate::error::{Error, Result};
use crate::intervals::{block_of, leftmost_badic_subinterval, BadicInterval};
use num_bigint::BigUint;
use num_traits::One;
use once_cell::sync::OnceCell;

/// A tower (I_2, ..., I_t): I_b is b-adic, I_{b+1} is contained in I_b, and
/// measure(I_{b+1}) >= measure(I_b) / (2(b+1)).
#[derive(Debug, Clone)]
pub struct TSequence {
    intervals: Vec<BadicInterval>,
    blocks: Vec<OnceCell<DigitBlock>>,
}

impl TSequence {
    pub fn new(intervals: Vec<BadicInterval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::invalid("a tower needs at least the base-2 interval"));
        }
        for (idx, iv) in intervals.iter().enumerate() {
            let expect = idx as u32 + 2;
            if iv.base() != expect {
                return Err(Error::invalid(format!(
                    "interval {idx} has base {}, expected {expect}",
                    iv.base()
                )));
            }
        }
        let blocks = intervals.iter().map(|_| OnceCell::new()).collect();
        Ok(TSequence { intervals, blocks })
    }

    /// The degenerate starting tower: t = 2 with I_2 = [0, 1).
    pub fn initial() -> Self {
        TSequence::new(vec![BadicInterval::unit(2)]).expect("valid by construction")
    }

    /// t: intervals cover bases 2..=t.
    pub fn t(&self) -> u32 {
        self.intervals.len() as u32 + 1
    }

    pub fn interval(&self, b: u32) -> Result<&BadicInterval> {
        if b < 2 || b > self.t() {
            return Err(Error::invalid(format!("base {b} outside 2..={}", self.t())));
        }
        Ok(&self.intervals[(b - 2) as usize])
    }

    pub fn intervals(&self) -> &[BadicInterval] {
        &self.intervals
    }

    /// The base-b digit block of the left endpoint (length = interval depth).
    /// Computed from the interval on first access and memoized; the
    /// intervals remain the source of truth.
    pub fn x_b(&self, b: u32) -> Result<&DigitBlock> {
        let iv = self.interval(b)?;
        Ok(self.blocks[(b - 2) as usize].get_or_init(|| block_of(iv)))
    }

    /// Empty list iff all tower invariants hold; each entry describes one
    /// violation. Checks nesting, the per-step measure ratio, and the
    /// telescoped factorial ratio between every pair of bases, all in exact
    /// arithmetic.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for w in self.intervals.windows(2) {
            let (outer, inner) = (&w[0], &w[1]);
            if !outer.to_rat().contains(&inner.to_rat()) {
                out.push(format!(
                    "nesting violated: base-{} interval not inside base-{}",
                    inner.base(),
                    outer.base()
                ));
            }
            let ratio_floor = outer.measure() / crate::rat(2 * inner.base() as i64, 1);
            if inner.measure() < ratio_floor {
                out.push(format!(
                    "measure ratio violated at base {}: measure < measure(I_{})/{}",
                    inner.base(),
                    outer.base(),
                    2 * inner.base()
                ));
            }
        }
        // derived: for b > b', measure(I_b) >= measure(I_b') / (2^(b-b') * b!/b'!)
        for hi in 0..self.intervals.len() {
            for lo in 0..hi {
                let b = self.intervals[hi].base();
                let bp = self.intervals[lo].base();
                let mut factor = BigUint::one() << (b - bp) as usize;
                for j in (bp + 1)..=b {
                    factor *= BigUint::from(j);
                }
                let bound = self.intervals[lo].measure()
                    / crate::Rat::from(num_bigint::BigInt::from(factor));
                if self.intervals[hi].measure() < bound {
                    out.push(format!("factorial measure ratio violated between bases {bp} and {b}"));
                }
            }
        }
        out
    }
}

/// Extends a dyadic interval to a full tower for bases 2..=t by iterating
/// the deterministic subinterval selection rule one base at a time.
pub fn extend_to_tsequence(i2: BadicInterval, t: u32) -> Result<TSequence> {
    if i2.base() != 2 {
        return Err(Error::invalid("tower must start from a dyadic interval"));
    }
    if t < 2 {
        return Err(Error::invalid("t must be >= 2"));
    }
    let mut intervals = Vec::with_capacity((t - 1) as usize);
    intervals.push(i2);
    for b in 3..=t {
        let prev = intervals.last().expect("nonempty").to_rat();
        intervals.push(leftmost_badic_subinterval(&prev, b)?);
    }
    TSequence::new(intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::RatInterval;
    use crate::rat;
    use num_bigint::BigUint;

    fn dyadic(depth: u64, index: u64) -> BadicInterval {
        BadicInterval::new(2, depth, BigUint::from(index)).unwrap()
    }

    #[test]
    fn extend_examples() {
        // [0, 1/2) at t = 3 picks the leftmost ninth
        let seq = extend_to_tsequence(dyadic(1, 0), 3).unwrap();
        assert_eq!(seq.x_b(3).unwrap().to_string(), "00");
        assert!(seq.validate().is_empty());

        // t = 2: nothing to extend
        let seq = extend_to_tsequence(BadicInterval::unit(2), 2).unwrap();
        assert_eq!(seq.t(), 2);
        assert_eq!(seq.x_b(2).unwrap().to_string(), "");

        // [3/8, 1/2): depth-3 triadic, leftmost aligned 27th inside is 11/27
        let seq = extend_to_tsequence(dyadic(3, 3), 3).unwrap();
        let i3 = seq.interval(3).unwrap();
        assert_eq!(
            i3.to_rat(),
            RatInterval::new(rat(11, 27), rat(12, 27)).unwrap()
        );
        assert_eq!(seq.x_b(3).unwrap().to_string(), "102");
        assert!(seq.validate().is_empty());
    }

    #[test]
    fn validate_flags_violations() {
        // measure ratio violation: I_3 much smaller than a sixth of I_2
        let bad = TSequence::new(vec![
            dyadic(1, 0),
            BadicInterval::new(3, 4, BigUint::from(0u32)).unwrap(),
        ])
        .unwrap();
        let violations = bad.validate();
        assert!(violations.iter().any(|v| v.contains("measure ratio")));

        // nesting violation: disjoint intervals
        let bad = TSequence::new(vec![
            dyadic(2, 3),
            BadicInterval::new(3, 2, BigUint::from(0u32)).unwrap(),
        ])
        .unwrap();
        assert!(bad.validate().iter().any(|v| v.contains("nesting")));
    }

    #[test]
    fn x_b_range_checks() {
        let seq = TSequence::initial();
        assert_eq!(seq.t(), 2);
        assert!(seq.x_b(3).is_err());
        assert!(seq.x_b(1).is_err());
    }
}
