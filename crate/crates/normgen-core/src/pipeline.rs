//! The driver that turns a control sequence into digit output: one
//! refinement round per control value, with per-base digit streams fed by
//! whatever the shrinking dyadic interval pins down after each round.
//!
//! Digits are emitted only when determined by interval containment, so a
//! stream cut short by a resource limit is still a correct prefix.

use std::collections::BTreeMap;

use crate::block::DigitBlock;
use crate::control::ControlSequence;
use crate::error::{Error, Result};
use crate::intervals::dyadic_determined_digits;
use crate::params::ParamSet;
use crate::refine::{refine_budgeted, RefineResult, RunLimits};
use crate::tsequence::TSequence;

/// Default cap on refinement rounds for a digit request. Round cost grows
/// superexponentially with the largest control value seen, and a control
/// value of 4 is already out of reach, so a small cap is the honest default.
pub const DEFAULT_MAX_ROUNDS: u32 = 3;

/// Evolving state of a run: the current tower, completed-round count, and
/// the digits already emitted in each subscribed base. Emitted digits are
/// exactly the determined digits of the current dyadic interval, truncated
/// to nothing shorter than any earlier emission.
pub struct PipelineState {
    seq: TSequence,
    round: u32,
    params: ParamSet,
    limits: RunLimits,
    emitted: BTreeMap<u32, DigitBlock>,
}

impl PipelineState {
    pub fn new(params: ParamSet) -> Self {
        Self::with_limits(params, RunLimits::default())
    }

    pub fn with_limits(params: ParamSet, limits: RunLimits) -> Self {
        PipelineState {
            seq: TSequence::initial(),
            round: 0,
            params,
            limits,
            emitted: BTreeMap::new(),
        }
    }

    /// Register a base for digit emission; digits the current interval
    /// already determines are emitted immediately. Idempotent.
    pub fn subscribe(&mut self, b: u32) -> Result<()> {
        if b < 2 {
            return Err(Error::invalid(format!("digit base must be >= 2, got {b}")));
        }
        if !self.emitted.contains_key(&b) {
            let block = dyadic_determined_digits(self.seq.interval(2)?, b)?;
            self.emitted.insert(b, block);
        }
        Ok(())
    }

    /// Completed rounds.
    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn sequence(&self) -> &TSequence {
        &self.seq
    }

    /// Digits emitted so far in a subscribed base.
    pub fn emitted(&self, b: u32) -> Result<&DigitBlock> {
        self.emitted
            .get(&b)
            .ok_or_else(|| Error::invalid(format!("base {b} is not subscribed")))
    }

    /// One round: refine the tower with the next control value, then extend
    /// every subscribed digit stream. Earlier digits are rechecked against
    /// the new interval; a contradiction is an internal error, since the
    /// new interval nests inside the old one.
    pub fn advance(&mut self, f_next: u64) -> Result<RefineResult> {
        if f_next < 1 {
            return Err(Error::invalid("control values must be positive"));
        }
        let i = u32::try_from(f_next)
            .map_err(|_| Error::invalid(format!("control value {f_next} out of range")))?;
        let result = refine_budgeted(&self.seq, i, &self.params, &self.limits)?;
        self.seq = result.output.clone();
        self.round += 1;
        let i2 = self.seq.interval(2)?;
        for (&b, block) in self.emitted.iter_mut() {
            let new = dyadic_determined_digits(i2, b)?;
            if new.len() < block.len() || new.digits()[..block.len()] != *block.digits() {
                return Err(Error::internal(format!(
                    "base {b}: refined interval contradicts previously emitted digits"
                )));
            }
            *block = new;
        }
        Ok(result)
    }
}

/// A digit request's result: the digits, the rounds it took, and an
/// explicit notice when a resource limit cut the request short (in which
/// case the block holds every digit that was determined in time).
#[derive(Debug, Clone)]
pub struct DigitsOutcome {
    pub block: DigitBlock,
    pub rounds: u32,
    pub notice: Option<String>,
}

impl DigitsOutcome {
    pub fn truncated(&self) -> bool {
        self.notice.is_some()
    }
}

/// First `n` base-`b` digits of the real determined by the control
/// sequence, advancing rounds until enough digits are pinned down. The
/// callback sees every completed round (round number, that round's input
/// tower, result) and may abort the run by returning an error. A round that
/// trips the search budget in `limits` truncates the request like an
/// exhausted control sequence: the digits pinned by completed rounds come
/// back with a notice.
pub fn digits_with<F>(
    control: &mut ControlSequence,
    b: u32,
    n: u64,
    params: &ParamSet,
    max_rounds: u32,
    limits: &RunLimits,
    mut on_round: F,
) -> Result<DigitsOutcome>
where
    F: FnMut(u32, &TSequence, &RefineResult) -> Result<()>,
{
    if n < 1 {
        return Err(Error::invalid("digit count must be at least 1"));
    }
    let mut state = PipelineState::with_limits(params.clone(), *limits);
    state.subscribe(b)?;
    let mut notice = None;
    while (state.emitted(b)?.len() as u64) < n {
        if state.round() >= max_rounds {
            notice = Some(format!(
                "round limit {max_rounds} reached with {} of {n} base-{b} digits determined",
                state.emitted(b)?.len()
            ));
            break;
        }
        let f_next = match control.next_value() {
            Ok(v) => v,
            Err(Error::ResourceLimit(msg)) => {
                notice = Some(format!(
                    "control sequence exhausted ({msg}) with {} of {n} base-{b} digits determined",
                    state.emitted(b)?.len()
                ));
                break;
            }
            Err(e) => return Err(e),
        };
        let input = state.sequence().clone();
        let result = match state.advance(f_next) {
            Ok(r) => r,
            Err(Error::ResourceLimit(msg)) => {
                notice = Some(format!(
                    "round {} hit the search budget ({msg}) with {} of {n} base-{b} digits determined",
                    state.round() + 1,
                    state.emitted(b)?.len()
                ));
                break;
            }
            Err(e) => return Err(e),
        };
        on_round(state.round(), &input, &result)?;
    }
    let block = state.emitted(b)?.prefix(n as usize);
    Ok(DigitsOutcome { block, rounds: state.round(), notice })
}

/// `digits_with` without a round observer.
pub fn digits(
    control: &mut ControlSequence,
    b: u32,
    n: u64,
    params: &ParamSet,
    max_rounds: u32,
    limits: &RunLimits,
) -> Result<DigitsOutcome> {
    digits_with(control, b, n, params, max_rounds, limits, |_, _, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::interval_of;
    use crate::params::ParamSet;

    fn toy() -> ParamSet {
        ParamSet::Override { k: 2, ell: 8 }
    }

    #[test]
    fn streams_agree_with_equal_control_prefixes() {
        let mut fixed = ControlSequence::from_values([1]);
        let a = digits(&mut fixed, 2, 20, &toy(), 1).unwrap();
        let mut builtin = ControlSequence::builtin_false();
        let b = digits(&mut builtin, 2, 20, &toy(), 1).unwrap();
        assert_eq!(a.block, b.block);
        assert_eq!(a.block.len(), 20);
        assert!(!a.truncated());
    }

    #[test]
    fn round_limit_truncates_with_notice() {
        let mut control = ControlSequence::builtin_false();
        let out = digits(&mut control, 2, 1_000_000, &toy(), 2).unwrap();
        assert_eq!(out.rounds, 2);
        let notice = out.notice.expect("a two-round toy run cannot pin a million digits");
        assert!(notice.contains("round limit 2"), "{notice}");
        assert!(out.block.len() < 1_000_000);
    }

    #[test]
    fn exhausted_control_truncates_with_notice() {
        let mut control = ControlSequence::from_values([1]);
        let out = digits(&mut control, 2, 1_000_000, &toy(), 10).unwrap();
        assert_eq!(out.rounds, 1);
        assert!(out.notice.unwrap().contains("control sequence exhausted"));
    }

    #[test]
    fn subscribed_streams_are_prefix_monotone_and_consistent() {
        let mut state = PipelineState::new(toy());
        state.subscribe(2).unwrap();
        state.subscribe(10).unwrap();
        let mut prev2 = state.emitted(2).unwrap().clone();
        let mut prev10 = state.emitted(10).unwrap().clone();
        for f in [1u64, 2, 1] {
            state.advance(f).unwrap();
            let cur2 = state.emitted(2).unwrap();
            let cur10 = state.emitted(10).unwrap();
            assert!(cur2.digits().starts_with(prev2.digits()));
            assert!(cur10.digits().starts_with(prev10.digits()));
            // both blocks denote intervals around the same real
            let i2 = interval_of(cur2).to_rat();
            let i10 = interval_of(cur10).to_rat();
            let left = i2.left().max(i10.left());
            let right = i2.right().min(i10.right());
            assert!(left < right, "emitted blocks denote disjoint intervals");
            prev2 = cur2.clone();
            prev10 = cur10.clone();
        }
        assert_eq!(state.round(), 3);
    }

    #[test]
    fn rejects_bad_requests() {
        let mut control = ControlSequence::builtin_false();
        assert!(digits(&mut control, 1, 10, &toy(), 1).is_err());
        let mut control = ControlSequence::builtin_false();
        assert!(digits(&mut control, 2, 0, &toy(), 1).is_err());
        let mut state = PipelineState::new(toy());
        assert!(state.advance(0).is_err());
        assert!(state.emitted(2).is_err());
    }

    #[test]
    fn eval_errors_propagate() {
        let pred = crate::predicate::parse_predicate("div(x % (y - y), 2)").unwrap();
        let mut control = ControlSequence::from_predicate(pred);
        // n = 2 decodes to (2, 1), emitted unconditionally; n = 3 decodes to
        // (1, 2) and evaluates the predicate, dividing by zero
        let err = digits(&mut control, 2, 1_000_000, &toy(), 50).unwrap_err();
        assert!(matches!(err, Error::Eval(_)), "{err:?}");
    }
}
