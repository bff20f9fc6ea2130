//! The first reduction: from a predicate C(x, y) to the control sequence f.
//!
//! Pairs are coded by the bijection n = 2^(x-1) (2y - 1). For n = 1, 2, 3,
//! ... in order the pair (x, y) is decoded, and whenever y = 1 or C(x, y)
//! holds the run x, x+1, ..., x+y-1 is appended to the stream. The resulting
//! sequence visits 1, 2, 3, ... as its subsequence of first occurrences, and
//! some value recurs infinitely often exactly when the sentence
//! "for all x, C(x, y) holds for only finitely many y" fails.

use std::collections::VecDeque;

use crate::predicate::Predicate;
use crate::{Error, Result};

/// Default cap on the number of pairs a simulated stream may scan.
pub const DEFAULT_MAX_N: u64 = 10_000_000;

/// Decodes a code n >= 1 into the pair (x, y) with n = 2^(x-1) (2y - 1).
///
/// The coding is a bijection between the positive integers and pairs of
/// positive integers. Doubling a code increments x; the codes of (x+1, y)
/// and (x, y+1) both exceed the code of (x, y).
pub fn pair_decode(n: u64) -> (u64, u64) {
    assert!(n >= 1, "pair codes start at 1");
    let x = u64::from(n.trailing_zeros()) + 1;
    let odd = n >> (x - 1);
    (x, (odd + 1) / 2)
}

/// A pull-based stream of positive integers driving the refinement rounds.
///
/// Streams replay deterministically: two sequences built from the same
/// source produce identical values.
pub struct ControlSequence {
    inner: Inner,
}

enum Inner {
    /// The stream of C identically false: only y = 1 pairs append, so the
    /// values are exactly 1, 2, 3, ... with value x appearing at n = 2^(x-1).
    /// Walking n literally would take 2^9999 iterations to produce ten
    /// thousand values, so this case is emitted in closed form.
    Analytic { next: u64 },
    /// Literal simulation of the appending-tuple loop. `pred` of `None`
    /// means C identically true (every pair appends).
    Simulated {
        pred: Option<Predicate>,
        n: u64,
        max_n: u64,
        pending: VecDeque<u64>,
    },
    /// An explicitly given prefix of f, bypassing the first reduction.
    Fixed { values: VecDeque<u64> },
}

impl ControlSequence {
    /// The control sequence of the builtin-false predicate: 1, 2, 3, ...
    pub fn builtin_false() -> Self {
        ControlSequence { inner: Inner::Analytic { next: 1 } }
    }

    /// The control sequence of the builtin-true predicate, by simulation.
    pub fn builtin_true() -> Self {
        ControlSequence {
            inner: Inner::Simulated {
                pred: None,
                n: 0,
                max_n: DEFAULT_MAX_N,
                pending: VecDeque::new(),
            },
        }
    }

    /// The control sequence of an arbitrary predicate, by simulation.
    pub fn from_predicate(pred: Predicate) -> Self {
        ControlSequence {
            inner: Inner::Simulated {
                pred: Some(pred),
                n: 0,
                max_n: DEFAULT_MAX_N,
                pending: VecDeque::new(),
            },
        }
    }

    /// A stream that replays the given values and then reports exhaustion.
    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Self {
        ControlSequence { inner: Inner::Fixed { values: values.into_iter().collect() } }
    }

    /// Caps the number of pairs a simulated stream may scan before giving
    /// up with a resource-limit error. No effect on analytic or fixed
    /// streams, which never scan.
    pub fn with_max_n(mut self, max_n: u64) -> Self {
        if let Inner::Simulated { max_n: m, .. } = &mut self.inner {
            *m = max_n;
        }
        self
    }

    /// Pulls the next value of f.
    pub fn next_value(&mut self) -> Result<u64> {
        match &mut self.inner {
            Inner::Analytic { next } => {
                let v = *next;
                *next += 1;
                Ok(v)
            }
            Inner::Simulated { pred, n, max_n, pending } => {
                while pending.is_empty() {
                    if *n >= *max_n {
                        return Err(Error::ResourceLimit(format!(
                            "control sequence scanned {max_n} pairs without \
                             producing the next value"
                        )));
                    }
                    *n += 1;
                    let (x, y) = pair_decode(*n);
                    let appends = y == 1
                        || match pred {
                            None => true,
                            Some(c) => c.eval(x, y)?,
                        };
                    if appends {
                        pending.extend(x..x + y);
                    }
                }
                Ok(pending.pop_front().expect("nonempty"))
            }
            Inner::Fixed { values } => values.pop_front().ok_or_else(|| {
                Error::ResourceLimit("explicit control sequence exhausted".into())
            }),
        }
    }

    /// Pulls the next `count` values.
    pub fn take_values(&mut self, count: usize) -> Result<Vec<u64>> {
        (0..count).map(|_| self.next_value()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::parse_predicate;

    fn pair_encode(x: u64, y: u64) -> u64 {
        (2 * y - 1) << (x - 1)
    }

    #[test]
    fn decode_examples() {
        assert_eq!(pair_decode(1), (1, 1));
        assert_eq!(pair_decode(6), (2, 2));
        assert_eq!(pair_decode(12), (3, 2));
    }

    #[test]
    fn decode_is_a_bijection_on_a_small_range() {
        let mut seen = std::collections::HashSet::new();
        for n in 1..=1024u64 {
            let (x, y) = pair_decode(n);
            assert!(x >= 1 && y >= 1);
            assert_eq!(pair_encode(x, y), n);
            assert!(seen.insert((x, y)), "pair ({x}, {y}) repeated");
        }
    }

    #[test]
    fn coding_monotonicity() {
        for n in 1..=256u64 {
            let (x, y) = pair_decode(n);
            assert_eq!(pair_decode(2 * n), (x + 1, y));
            assert!(pair_encode(x + 1, y) > n);
            assert!(pair_encode(x, y + 1) > n);
        }
    }

    #[test]
    fn builtin_false_is_the_identity_stream() {
        let mut f = ControlSequence::builtin_false();
        assert_eq!(f.take_values(10).unwrap(), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn builtin_true_prefix() {
        let mut f = ControlSequence::builtin_true();
        assert_eq!(f.take_values(10).unwrap(), vec![1, 2, 1, 2, 3, 1, 2, 3, 2, 3]);
    }

    #[test]
    fn builtin_true_agrees_with_the_parsed_true_predicate() {
        let mut a = ControlSequence::builtin_true();
        let mut b = ControlSequence::from_predicate(parse_predicate("true").unwrap());
        assert_eq!(a.take_values(500).unwrap(), b.take_values(500).unwrap());
    }

    #[test]
    fn x_equals_one_prefix() {
        let pred = parse_predicate("x = 1").unwrap();
        let mut f = ControlSequence::from_predicate(pred);
        assert_eq!(f.take_values(6).unwrap(), vec![1, 2, 1, 2, 3, 1]);
    }

    #[test]
    fn first_occurrences_are_increasing() {
        let mut f = ControlSequence::builtin_true();
        let vals = f.take_values(2000).unwrap();
        let mut seen = std::collections::HashSet::new();
        let firsts: Vec<u64> =
            vals.iter().copied().filter(|v| seen.insert(*v)).collect();
        let want: Vec<u64> = (1..=firsts.len() as u64).collect();
        assert_eq!(firsts, want);
    }

    #[test]
    fn scan_budget_is_enforced() {
        let pred = parse_predicate("false").unwrap();
        let mut f = ControlSequence::from_predicate(pred).with_max_n(1000);
        assert_eq!(f.take_values(10).unwrap(), (1..=10).collect::<Vec<_>>());
        assert!(matches!(f.next_value(), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn fixed_stream_replays_and_exhausts() {
        let mut f = ControlSequence::from_values([1, 2, 3]);
        assert_eq!(f.take_values(3).unwrap(), vec![1, 2, 3]);
        assert!(matches!(f.next_value(), Err(Error::ResourceLimit(_))));
    }
}
