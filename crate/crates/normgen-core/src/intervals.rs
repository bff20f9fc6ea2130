//! Exact b-adic and rational subintervals of [0, 1), the block/interval
//! correspondence, deterministic subinterval selection, and extraction of
//! digit prefixes that an interval pins down.

use crate::block::DigitBlock;
use crate::error::{Error, Result};
use crate::Rat;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// [a / b^m, (a+1) / b^m), stored as exact integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadicInterval {
    base: u32,
    depth: u64,
    index: BigUint,
}

impl BadicInterval {
    pub fn new(base: u32, depth: u64, index: BigUint) -> Result<Self> {
        if base < 2 {
            return Err(Error::invalid("interval base must be >= 2"));
        }
        if index.bits() > depth.saturating_mul(32)
            || index >= BigUint::from(base).pow(depth as u32)
        {
            return Err(Error::invalid(format!(
                "index {index} out of range for depth {depth} in base {base}"
            )));
        }
        Ok(BadicInterval { base, depth, index })
    }

    /// The whole unit interval, i.e. depth 0.
    pub fn unit(base: u32) -> Self {
        BadicInterval { base, depth: 0, index: BigUint::zero() }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    pub fn index(&self) -> &BigUint {
        &self.index
    }

    pub fn measure(&self) -> Rat {
        Rat::new(BigInt::one(), BigInt::from(self.base).pow(self.depth as u32))
    }

    pub fn to_rat(&self) -> RatInterval {
        let den = BigInt::from(BigUint::from(self.base).pow(self.depth as u32));
        let left = Rat::new(BigInt::from(self.index.clone()), den.clone());
        let right = Rat::new(BigInt::from(&self.index + 1u32), den);
        RatInterval { left, right }
    }
}

/// Half-open rational interval [left, right) with 0 <= left < right <= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    left: Rat,
    right: Rat,
}

impl RatInterval {
    pub fn new(left: Rat, right: Rat) -> Result<Self> {
        if left.is_negative() || left >= right || right > Rat::one() {
            return Err(Error::invalid(format!(
                "need 0 <= left < right <= 1, got [{left}, {right})"
            )));
        }
        Ok(RatInterval { left, right })
    }

    pub fn left(&self) -> &Rat {
        &self.left
    }

    pub fn right(&self) -> &Rat {
        &self.right
    }

    pub fn measure(&self) -> Rat {
        &self.right - &self.left
    }

    pub fn contains(&self, inner: &RatInterval) -> bool {
        self.left <= inner.left && inner.right <= self.right
    }
}

/// The b-adic interval corresponding to a digit block: [.x, .x + b^-|x|).
pub fn interval_of(x: &DigitBlock) -> BadicInterval {
    BadicInterval { base: x.base(), depth: x.len() as u64, index: x.value() }
}

/// The digit block corresponding to a b-adic interval, with leading zeros.
pub fn block_of(i: &BadicInterval) -> DigitBlock {
    DigitBlock::from_value(i.base, i.depth as usize, &i.index)
        .expect("index < base^depth by construction")
}

/// The deterministic subinterval selection rule: let m be the least integer
/// with b^-m <= measure(I)/2 and return the leftmost depth-m b-adic interval
/// contained in I. The result J satisfies measure(J) > measure(I) / (2b).
pub fn leftmost_badic_subinterval(i: &RatInterval, b: u32) -> Result<BadicInterval> {
    if b < 2 {
        return Err(Error::invalid("base must be >= 2"));
    }
    let mu = i.measure();
    // least m with mu * b^m >= 2
    let mu_num = mu.numer();
    let mu_den = mu.denom();
    let mut m: u64 = 0;
    let mut pow = BigInt::one();
    let two_den = mu_den * 2;
    let bb = BigInt::from(b);
    while mu_num * &pow < two_den {
        pow *= &bb;
        m += 1;
    }
    // leftmost aligned index at depth m: ceil(left * b^m)
    let scaled_num = i.left().numer() * &pow;
    let index = scaled_num.div_ceil(i.left().denom());
    // two aligned intervals of this depth fit inside I, so the leftmost one
    // is contained; checked anyway because it is cheap relative to misuse
    let right_ok = Rat::new(&index + 1, pow.clone()) <= *i.right();
    if !right_ok {
        return Err(Error::internal(format!(
            "subinterval selection produced an uncontained interval at depth {m}"
        )));
    }
    BadicInterval::new(b, m, index.to_biguint().expect("nonnegative by construction"))
}

/// The longest base-b block x with I contained in [.x, .x + b^-|x|); every
/// real in I then has x as a base-b expansion prefix. Monotone under
/// shrinking I. Digits are emitted only when the half-open containment
/// holds, never by extrapolation.
pub fn determined_digits(i: &RatInterval, b: u32) -> Result<DigitBlock> {
    if b < 2 {
        return Err(Error::invalid("base must be >= 2"));
    }
    let lp = i.left().numer();
    let lq = i.left().denom();
    let rp = i.right().numer();
    let rq = i.right().denom();
    let mut out = DigitBlock::empty(b);
    let mut pow = BigInt::one(); // b^(m+1) at loop entry
    let mut prev_floor = BigInt::zero(); // floor(left * b^m)
    let bb = BigInt::from(b);
    loop {
        pow *= &bb;
        let f = (lp * &pow).div_floor(lq); // floor(left * b^(m+1))
        let d = &f - &prev_floor * &bb;
        // cell end (f+1) / b^(m+1) must reach past the right endpoint
        if rp * &pow > rq * (&f + 1) {
            return Ok(out);
        }
        let d_u32 = u32::try_from(d.to_biguint().expect("digit nonnegative"))
            .map_err(|_| Error::internal("digit overflow"))?;
        out.push(d_u32);
        prev_floor = f;
    }
}

/// `determined_digits` specialized to a dyadic source interval
/// [a/2^M, (a+1)/2^M). Long division against the power-of-two denominator
/// replaces the per-digit rational arithmetic: with r = a*b^m mod 2^M after
/// m digits, the next digit is floor(r*b / 2^M) and the m+1 digit prefix is
/// determined exactly when r*b mod 2^M <= 2^M - b^(m+1).
pub fn dyadic_determined_digits(i: &BadicInterval, b: u32) -> Result<DigitBlock> {
    if i.base != 2 {
        return Err(Error::invalid(format!(
            "dyadic digit extraction needs a base-2 interval, got base {}",
            i.base
        )));
    }
    if b < 2 {
        return Err(Error::invalid("base must be >= 2"));
    }
    if b == 2 {
        return Ok(block_of(i));
    }
    let m_depth = i.depth;
    let modulus = BigUint::one() << m_depth;
    let mut r = i.index.clone();
    let mut pow = BigUint::one();
    let mut out = DigitBlock::empty(b);
    loop {
        r *= b;
        pow *= b;
        let d = &r >> m_depth;
        r -= &d << m_depth;
        if &r + &pow > modulus {
            return Ok(out);
        }
        out.push(u32::try_from(&d).map_err(|_| Error::internal("digit overflow"))?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn ri(ln: i64, ld: i64, rn: i64, rd: i64) -> RatInterval {
        RatInterval::new(rat(ln, ld), rat(rn, rd)).unwrap()
    }

    #[test]
    fn block_interval_round_trip() {
        let x = DigitBlock::parse(2, "011").unwrap();
        let i = interval_of(&x);
        assert_eq!(i.to_rat(), ri(3, 8, 1, 2));
        assert_eq!(block_of(&i), x);

        let e = DigitBlock::empty(3);
        assert_eq!(interval_of(&e).to_rat(), ri(0, 1, 1, 1));

        let y = DigitBlock::parse(3, "120").unwrap();
        assert_eq!(interval_of(&y).to_rat(), ri(15, 27, 16, 27));
        assert_eq!(block_of(&interval_of(&y)), y);

        let z = BadicInterval::new(5, 2, BigUint::zero()).unwrap();
        assert_eq!(block_of(&z), DigitBlock::parse(5, "00").unwrap());
    }

    #[test]
    fn subinterval_rule_examples() {
        let j = leftmost_badic_subinterval(&ri(1, 3, 2, 3), 2).unwrap();
        assert_eq!((j.base(), j.depth()), (2, 3));
        assert_eq!(j.to_rat(), ri(3, 8, 1, 2));

        let j = leftmost_badic_subinterval(&ri(0, 1, 1, 1), 3).unwrap();
        assert_eq!(j.to_rat(), ri(0, 1, 1, 3));

        let j = leftmost_badic_subinterval(&ri(0, 1, 1, 2), 3).unwrap();
        assert_eq!(j.to_rat(), ri(0, 1, 1, 9));
        // ratio (1/9) / (1/2) = 2/9 >= 1/6
        assert!(j.measure() >= ri(0, 1, 1, 2).measure() / rat(6, 1));
    }

    #[test]
    fn determined_digit_examples() {
        assert_eq!(determined_digits(&ri(3, 8, 1, 2), 10).unwrap().to_string(), "");
        assert_eq!(determined_digits(&ri(3, 8, 25, 64), 10).unwrap().to_string(), "3");
        assert_eq!(determined_digits(&ri(3, 8, 1, 2), 2).unwrap().to_string(), "011");
        // b-adic interval in its own base: exactly its block
        let i = BadicInterval::new(3, 3, BigUint::from(15u32)).unwrap();
        assert_eq!(determined_digits(&i.to_rat(), 3).unwrap(), block_of(&i));
    }

    #[test]
    fn determined_digits_monotone() {
        let outer = ri(3, 8, 1, 2);
        let inner = ri(25, 64, 13, 32);
        assert!(outer.contains(&inner));
        let a = determined_digits(&outer, 10).unwrap();
        let b = determined_digits(&inner, 10).unwrap();
        assert!(b.to_string().starts_with(&a.to_string()));
    }

    #[test]
    fn dyadic_extraction_matches_rational_extraction() {
        for depth in [0u64, 1, 5, 9, 13] {
            let cells = 1u64 << depth;
            for a in (0..cells).step_by(if depth > 9 { 991 } else { 1 }) {
                let iv = BadicInterval::new(2, depth, a.into()).unwrap();
                for b in [2u32, 3, 7, 10] {
                    let fast = dyadic_determined_digits(&iv, b).unwrap();
                    let slow = determined_digits(&iv.to_rat(), b).unwrap();
                    assert_eq!(fast, slow, "depth {depth}, a {a}, base {b}");
                }
            }
        }
        let iv = BadicInterval::new(3, 2, BigUint::from(4u32)).unwrap();
        assert!(dyadic_determined_digits(&iv, 10).is_err());
    }

    #[test]
    fn measure_and_contains() {
        assert_eq!(ri(3, 8, 1, 2).measure(), rat(1, 8));
        assert!(ri(0, 1, 1, 1).contains(&ri(3, 8, 1, 2)));
        assert!(!ri(3, 8, 1, 2).contains(&ri(1, 4, 3, 8)));
        assert!(RatInterval::new(rat(1, 2), rat(1, 2)).is_err());
        assert!(RatInterval::new(rat(1, 2), rat(3, 2)).is_err());
    }
}
