//! The refinement schedule: per level i, an accuracy target delta_i, a
//! minimum extension length k_i, and a maximum extension length ell_i.
//!
//! k_i is defined through a logarithm of a rational and is pinned down by
//! shrinking certified rational enclosures of ln until the integer floor is
//! unambiguous. Two independent evaluation routes (different series,
//! different argument reductions, both with explicit remainder bounds) must
//! agree; disagreement is an internal error.

use crate::error::{Error, Result};
use crate::Rat;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

/// delta_i = 1 / (2^(2i-2) * ((i+1)!)^2), exactly.
pub fn delta(i: u32) -> Result<Rat> {
    if i < 1 {
        return Err(Error::invalid("parameter index must be >= 1"));
    }
    Ok(Rat::new(BigInt::one(), inverse_delta(i)))
}

/// 1/delta_i as an exact integer.
fn inverse_delta(i: u32) -> BigInt {
    let mut fact = BigInt::one();
    for j in 2..=(i + 1) {
        fact *= BigInt::from(j);
    }
    (BigInt::one() << (2 * i - 2) as usize) * &fact * &fact
}

/// k_i: the least integer strictly greater than
/// max(6(i+2), -ln(delta_i / (2(i+1)^2)) * 6(i+2)^2).
pub fn k(i: u32) -> Result<u64> {
    if i < 1 {
        return Err(Error::invalid("parameter index must be >= 1"));
    }
    static CACHE: Lazy<Mutex<HashMap<u32, u64>>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(&v) = CACHE.lock().unwrap().get(&i) {
        return Ok(v);
    }
    let (a, b) = k_routes(i)?;
    if a != b {
        return Err(Error::internal(format!(
            "certified ln routes disagree at i = {i}: {a} vs {b}"
        )));
    }
    CACHE.lock().unwrap().insert(i, a);
    Ok(a)
}

/// Both certified evaluations of k_i, for cross-checking.
pub fn k_routes(i: u32) -> Result<(u64, u64)> {
    // -ln(delta_i / (2(i+1)^2)) = ln(2 (i+1)^2 / delta_i), an integer > 1
    let n = Rat::from(inverse_delta(i) * 2 * (i + 1) * (i + 1));
    let scale = Rat::from(BigInt::from(6 * (i as u64 + 2) * (i as u64 + 2)));
    let floor_term = 6 * (i as u64 + 2);
    let a = k_from_enclosure(i, floor_term, &n, &scale, ln_enclosure_atanh)?;
    let b = k_from_enclosure(i, floor_term, &n, &scale, ln_enclosure_mercator)?;
    Ok((a, b))
}

/// ell_i = k_i * ceil(log2(i+1)) + ceil(log2(1/delta_i)).
pub fn ell(i: u32) -> Result<u64> {
    let ki = k(i)?;
    let dd = ceil_log2(&inverse_delta(i).to_biguint().expect("positive"));
    Ok(ki * ceil_log2(&num_bigint::BigUint::from(i + 1)) + dd)
}

/// ceil(log2 delta_p^-1): the dyadic depth needed to resolve delta_p.
pub fn ceil_log2_inverse_delta(p: u32) -> Result<u64> {
    if p < 1 {
        return Err(Error::invalid("parameter index must be >= 1"));
    }
    Ok(ceil_log2(&inverse_delta(p).to_biguint().expect("positive")))
}

/// Least e with 2^e >= n; 0 for n = 1.
pub fn ceil_log2(n: &num_bigint::BigUint) -> u64 {
    assert!(!n.is_zero(), "ceil_log2 of zero");
    let bits = n.bits();
    if n.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

/// One row of the printed schedule.
#[derive(Debug, Clone)]
pub struct ParamRow {
    pub i: u32,
    pub delta: Rat,
    pub k: u64,
    pub ell: u64,
}

pub fn param_table(max_i: u32) -> Result<Vec<ParamRow>> {
    (1..=max_i)
        .map(|i| Ok(ParamRow { i, delta: delta(i)?, k: k(i)?, ell: ell(i)? }))
        .collect()
}

/// Parameter source for a refinement run. Overrides exist so the search can
/// be cross-checked against exhaustive references at tiny sizes; every
/// override run is non-conforming and must say so in its outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamSet {
    Standard,
    Override { k: u64, ell: u64 },
}

impl ParamSet {
    pub fn k(&self, i: u32) -> Result<u64> {
        match self {
            ParamSet::Standard => k(i),
            ParamSet::Override { k, .. } => Ok(*k),
        }
    }

    pub fn ell(&self, i: u32) -> Result<u64> {
        match self {
            ParamSet::Standard => ell(i),
            ParamSet::Override { ell, .. } => Ok(*ell),
        }
    }

    pub fn is_conforming(&self) -> bool {
        matches!(self, ParamSet::Standard)
    }
}

type LnRoute = fn(&Rat, u32) -> (Rat, Rat);

/// Shrinks a certified enclosure of ln(n) * scale until its integer floor is
/// pinned, then returns max(floor_term, floor) + 1 (least integer strictly
/// greater than the max; the log term is irrational, so the floor is
/// eventually unique).
fn k_from_enclosure(
    i: u32,
    floor_term: u64,
    n: &Rat,
    scale: &Rat,
    route: LnRoute,
) -> Result<u64> {
    let mut terms = 8u32;
    loop {
        let (lo, hi) = route(n, terms);
        let slo = lo * scale;
        let shi = hi * scale;
        let flo = slo.floor().to_integer();
        let fhi = shi.floor().to_integer();
        if flo == fhi {
            let f = u64::try_from(flo.to_biguint().ok_or_else(|| {
                Error::internal("negative log term")
            })?)
            .map_err(|_| Error::internal("k overflow"))?;
            return Ok(f.max(floor_term) + 1);
        }
        terms *= 2;
        if terms > 1 << 20 {
            return Err(Error::internal(format!(
                "ln enclosure for i = {i} failed to pin an integer"
            )));
        }
    }
}

/// Splits q >= 1 as 2^e * m with m in [1, 2).
fn normalize_pow2(q: &Rat) -> (u64, Rat) {
    assert!(*q >= Rat::one());
    let mut e = q.numer().bits().saturating_sub(q.denom().bits());
    let two = Rat::from(BigInt::from(2));
    let mut m = q / pow2_rat(e);
    while m >= two {
        m /= &two;
        e += 1;
    }
    while m < Rat::one() {
        m *= &two;
        e -= 1;
    }
    (e, m)
}

fn pow2_rat(e: u64) -> Rat {
    Rat::from(BigInt::one() << e as usize)
}

/// Route A: ln q = e ln 2 + ln m with m in [1, 2);
/// ln m = 2 atanh((m-1)/(m+1)) via the odd series with a geometric tail
/// bound, and ln 2 = 2 atanh(1/3) by the same series.
fn ln_enclosure_atanh(q: &Rat, terms: u32) -> (Rat, Rat) {
    let (e, m) = normalize_pow2(q);
    let t = (&m - Rat::one()) / (&m + Rat::one());
    let (mlo, mhi) = atanh_enclosure(&t, terms);
    let third = Rat::new(BigInt::one(), BigInt::from(3));
    let (l2lo, l2hi) = atanh_enclosure(&third, terms);
    let er = Rat::from(BigInt::from(e));
    (&er * &l2lo + mlo, &er * &l2hi + mhi)
}

/// Enclosure of 2 atanh(t) = 2 sum t^(2j+1) / (2j+1) for 0 <= t < 1.
fn atanh_enclosure(t: &Rat, terms: u32) -> (Rat, Rat) {
    if t.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let t2 = t * t;
    let mut sum = Rat::zero();
    let mut power = t.clone();
    let mut last_exp = 1u32;
    for j in 0..terms {
        let denom = Rat::from(BigInt::from(2 * j + 1));
        sum += &power / denom;
        power *= &t2;
        last_exp = 2 * j + 3;
    }
    // remaining terms: sum_{odd n >= last_exp} t^n / n < t^last_exp /
    // (last_exp (1 - t^2))
    let tail = &power / (Rat::from(BigInt::from(last_exp)) * (Rat::one() - t2));
    let two = Rat::from(BigInt::from(2));
    ((&two * &sum), two * (sum + tail))
}

/// Route B: ln q = e ln 2 + ln(1+z) with 1+z = q / 2^e in [3/4, 3/2);
/// ln(1+z) by the Mercator series with a geometric remainder bound, and
/// ln 2 = sum 1/(j 2^j).
fn ln_enclosure_mercator(q: &Rat, terms: u32) -> (Rat, Rat) {
    let (mut e, mut m) = normalize_pow2(q);
    // shift m from [1,2) into [3/4, 3/2) so |z| <= 1/2
    if m >= Rat::new(BigInt::from(3), BigInt::from(2)) {
        m /= Rat::from(BigInt::from(2));
        e += 1;
    }
    let z = &m - Rat::one();
    let (mlo, mhi) = mercator_enclosure(&z, terms);
    let (l2lo, l2hi) = ln2_harmonic_enclosure(terms);
    let er = Rat::from(BigInt::from(e));
    (&er * &l2lo + mlo, &er * &l2hi + mhi)
}

/// Enclosure of ln(1+z) = sum_{j>=1} (-1)^(j+1) z^j / j for |z| <= 1/2.
fn mercator_enclosure(z: &Rat, terms: u32) -> (Rat, Rat) {
    if z.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let mut sum = Rat::zero();
    let mut power = Rat::one();
    for j in 1..=terms {
        power *= z;
        let term = &power / Rat::from(BigInt::from(j));
        if j % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    // |remainder| <= |z|^(terms+1) / ((terms+1)(1-|z|))
    let az = z.abs();
    let bound = az.clone().pow((terms + 1) as i32)
        / (Rat::from(BigInt::from(terms + 1)) * (Rat::one() - az));
    (&sum - &bound, sum + bound)
}

/// Enclosure of ln 2 = sum_{j>=1} 1 / (j 2^j).
fn ln2_harmonic_enclosure(terms: u32) -> (Rat, Rat) {
    let mut sum = Rat::zero();
    for j in 1..=terms {
        sum += Rat::new(BigInt::one(), BigInt::from(j) << j as usize);
    }
    // tail < 1 / ((terms+1) 2^terms)
    let tail = Rat::new(BigInt::one(), BigInt::from(terms + 1) << terms as usize);
    (sum.clone(), sum + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn delta_values() {
        assert_eq!(delta(1).unwrap(), rat(1, 4));
        assert_eq!(delta(2).unwrap(), rat(1, 144));
        assert_eq!(delta(3).unwrap(), rat(1, 9216));
        assert!(delta(0).is_err());
    }

    #[test]
    fn schedule_frozen_values() {
        let expect: [(u32, u64, u64); 8] = [
            (1, 188, 190),
            (2, 755, 1518),
            (3, 1890, 3794),
            (4, 3812, 11456),
            (5, 6757, 20298),
            (6, 10970, 32945),
            (7, 16709, 50170),
            (8, 24238, 97003),
        ];
        for (i, ki, elli) in expect {
            assert_eq!(k(i).unwrap(), ki, "k({i})");
            assert_eq!(ell(i).unwrap(), elli, "ell({i})");
        }
    }

    #[test]
    fn routes_agree() {
        for i in 1..=8 {
            let (a, b) = k_routes(i).unwrap();
            assert_eq!(a, b, "routes differ at i = {i}");
        }
    }

    #[test]
    fn ceil_log2_contract() {
        use num_bigint::BigUint;
        assert_eq!(ceil_log2(&BigUint::from(1u32)), 0);
        for n in 2u64..=300 {
            let e = ceil_log2(&BigUint::from(n));
            assert!(BigUint::from(1u32) << e as usize >= BigUint::from(n));
            assert!((BigUint::from(1u32) << ((e - 1) as usize)) < BigUint::from(n));
        }
    }

    #[test]
    fn ln_routes_bracket_known_values() {
        // ln 32 = 3.4657...; scaled by 54 this is the i=1 term 187.15...
        let q = Rat::from(BigInt::from(32));
        for route in [ln_enclosure_atanh as LnRoute, ln_enclosure_mercator as LnRoute] {
            let (lo, hi) = route(&q, 40);
            assert!(lo <= hi);
            assert!(lo > rat(34657, 10000) && hi < rat(34658, 10000));
        }
    }

    #[test]
    fn override_mode() {
        let p = ParamSet::Override { k: 2, ell: 8 };
        assert_eq!(p.k(5).unwrap(), 2);
        assert_eq!(p.ell(5).unwrap(), 8);
        assert!(!p.is_conforming());
        assert!(ParamSet::Standard.is_conforming());
    }
}
