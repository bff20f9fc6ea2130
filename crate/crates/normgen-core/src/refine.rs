//! One round of tower refinement: starting from a (p+1)-sequence, produce an
//! (i+1)-sequence every one of whose per-base expansions has simple
//! discrepancy at most 2/(i+2), by repeatedly extending the tower with the
//! leftmost suitable candidate subinterval.
//!
//! A round is an initial step (re-anchor the tower inside the leftmost
//! not-too-small dyadic subinterval of the input's deepest interval) followed
//! by recursive steps. Each recursive step partitions the current anchor
//! interval into 2^w equal dyadic candidates and commits the leftmost one
//! whose per-base extension blocks u_b all satisfy D(u_b, b) <= 1/(i+2);
//! the candidate scan is delegated to the branch-and-bound engine in
//! `search`. Steps repeat until three termination conditions hold in every
//! base: the expansion is long enough, its simple discrepancy is at most
//! 2/(i+2), and its block discrepancy at window 2*ell_i is provably above
//! b^(-2*ell_i - 1).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedSub, One};

use crate::block::DigitBlock;
use crate::discrepancy::{block_discrepancy_exceeds, pow_exceeds, simple_discrepancy_from_counts};
use crate::error::{Error, Result};
use crate::intervals::BadicInterval;
use crate::params::{ceil_log2, ceil_log2_inverse_delta, ParamSet};
use crate::search::{
    digit_band, digit_counts, err_const, MiddleBase, SearchOutcome, SearchProblem, SearchVerdict,
};
use crate::tsequence::TSequence;
use crate::{rat, Rat};

/// One committed recursive step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: u64,
    /// Number of candidates strictly left of the committed one.
    pub scanned: BigUint,
    /// Per-base extension blocks u_b (x_b grows by exactly this block).
    pub u_blocks: BTreeMap<u32, DigitBlock>,
    pub u_discrepancies: BTreeMap<u32, Rat>,
    /// Per-base expansion lengths |x_b| after the step.
    pub x_lens: BTreeMap<u32, u64>,
    /// Search-tree telemetry (deterministic for a given input).
    pub nodes: u64,
    pub leaves: u64,
}

/// The initial step's accounting: x_b(after) = x_b(input) * v_b per common
/// base; v_b is the whole expansion for bases the input did not carry.
#[derive(Debug, Clone)]
pub struct InitialRecord {
    pub v_blocks: BTreeMap<u32, DigitBlock>,
    pub x_lens: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone)]
pub struct RefineResult {
    pub i: u32,
    pub output: TSequence,
    pub initial: InitialRecord,
    pub steps: Vec<StepRecord>,
}

/// Resource ceilings for a round. Nothing bounds how many candidates a step
/// may have to scan before the leftmost suitable one, and at i >= 3 single
/// steps have been observed to pass 10^8 search nodes without committing; a
/// budget turns such a scan into a `ResourceLimit` error instead of an
/// open-ended computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunLimits {
    /// Cap on search-tree nodes per step (each step gets the full budget
    /// afresh). `None` runs every scan to completion.
    pub max_search_nodes: Option<u64>,
}

impl RunLimits {
    pub fn max_search_nodes(nodes: u64) -> RunLimits {
        RunLimits { max_search_nodes: Some(nodes) }
    }
}

/// Outcome of the post-round invariant suite; empty `violations` means every
/// checked inequality held.
#[derive(Debug, Clone, Default)]
pub struct RoundReport {
    pub violations: Vec<String>,
    pub notices: Vec<String>,
}

impl RoundReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Working state of a round: per base b in 2..=i+1, the current interval as
/// (depth m_b, index a_b) plus incrementally maintained digit counts of x_b.
struct RefState {
    i: u32,
    depths: Vec<u64>,
    indices: Vec<BigUint>,
    counts: Vec<Vec<u64>>,
}

impl RefState {
    fn slot(&self, b: u32) -> usize {
        (b - 2) as usize
    }

    fn depth(&self, b: u32) -> u64 {
        self.depths[self.slot(b)]
    }

    fn index(&self, b: u32) -> &BigUint {
        &self.indices[self.slot(b)]
    }

    fn counts_of(&self, b: u32) -> &[u64] {
        &self.counts[self.slot(b)]
    }

    fn block(&self, b: u32) -> Result<DigitBlock> {
        DigitBlock::from_value(b, self.depth(b) as usize, self.index(b))
    }

    fn to_tsequence(&self) -> Result<TSequence> {
        let mut ivs = Vec::with_capacity(self.depths.len());
        for b in 2..=self.i + 1 {
            ivs.push(BadicInterval::new(b, self.depth(b), self.index(b).clone())?);
        }
        TSequence::new(ivs)
    }

    fn from_tsequence(seq: &TSequence, i: u32) -> Result<RefState> {
        if seq.t() != i + 1 {
            return Err(Error::invalid(format!(
                "expected an ({}+1)-sequence, got t = {}",
                i,
                seq.t()
            )));
        }
        let mut depths = Vec::new();
        let mut indices = Vec::new();
        let mut counts = Vec::new();
        for b in 2..=i + 1 {
            let iv = seq.interval(b)?;
            depths.push(iv.depth());
            indices.push(iv.index().clone());
            counts.push(digit_counts(iv.index(), b, iv.depth()));
        }
        Ok(RefState { i, depths, indices, counts })
    }

    fn x_lens(&self) -> BTreeMap<u32, u64> {
        (2..=self.i + 1).map(|b| (b, self.depth(b))).collect()
    }
}

/// Least m with base^m >= x, returning (m, base^m).
fn least_m_pow_ge(base: u32, x: &BigUint) -> (u64, BigUint) {
    if *x <= BigUint::one() {
        return (0, BigUint::one());
    }
    let bl = x.bits();
    let mut m = (((bl - 1) as f64) / (base as f64).log2()).floor() as u64;
    let mut p = BigUint::from(base).pow(m as u32);
    while &p < x {
        p *= base;
        m += 1;
    }
    while m > 0 {
        let q = &p / base;
        if &q >= x {
            p = q;
            m -= 1;
        } else {
            break;
        }
    }
    (m, p)
}

fn checked_suffix(whole: &BigUint, prefix_scaled: BigUint, what: &str) -> Result<BigUint> {
    whole.checked_sub(&prefix_scaled).ok_or_else(|| {
        Error::internal(format!("{what}: extension index below its prefix"))
    })
}

/// Initial step: state anchored at the leftmost dyadic subinterval of the
/// input's deepest interval with measure at least a quarter of it, extended
/// down to base i+1 by leftmost-subinterval selection.
fn initial_state(input: &TSequence, i: u32, params: &ParamSet) -> Result<(RefState, InitialRecord)> {
    let t_in = input.t();
    let p = t_in - 1;
    let last = input.interval(t_in)?;
    let pow_t = BigUint::from(t_in).pow(last.depth() as u32);
    let (m_l0, _) = least_m_pow_ge(2, &(&pow_t * 2u32));
    let a0 = (last.index() << m_l0).div_ceil(&pow_t);

    let mut depths = vec![m_l0];
    let mut indices = vec![a0.clone()];
    let mut counts = Vec::new();
    let mut v_blocks = BTreeMap::new();

    let in2 = input.interval(2)?;
    let v2_len = m_l0 - in2.depth();
    let v2_val = checked_suffix(&a0, in2.index() << v2_len, "initial step base 2")?;
    let mut c2 = digit_counts(in2.index(), 2, in2.depth());
    let vc2 = digit_counts(&v2_val, 2, v2_len);
    c2[0] += vc2[0];
    c2[1] += vc2[1];
    counts.push(c2);
    v_blocks.insert(2, DigitBlock::from_value(2, v2_len as usize, &v2_val)?);

    let mut pden = BigUint::one() << m_l0;
    let mut pa = a0;
    for b in 3..=i + 1 {
        let (mb, pb) = least_m_pow_ge(b, &(&pden * 2u32));
        let ab = (&pa * &pb).div_ceil(&pden);
        if b <= t_in {
            let iv = input.interval(b)?;
            let vlen = mb - iv.depth();
            let r = checked_suffix(&ab, iv.index() * BigUint::from(b).pow(vlen as u32), "initial step")?;
            let mut cs = digit_counts(iv.index(), b, iv.depth());
            for (c, v) in cs.iter_mut().zip(digit_counts(&r, b, vlen)) {
                *c += v;
            }
            counts.push(cs);
            v_blocks.insert(b, DigitBlock::from_value(b, vlen as usize, &r)?);
        } else {
            counts.push(digit_counts(&ab, b, mb));
            v_blocks.insert(b, DigitBlock::from_value(b, mb as usize, &ab)?);
        }
        depths.push(mb);
        indices.push(ab.clone());
        pden = pb;
        pa = ab;
    }

    let state = RefState { i, depths, indices, counts };
    if params.is_conforming() {
        let dd_p = ceil_log2_inverse_delta(p)?;
        for b in 2..=i.min(p) + 1 {
            let vlen = v_blocks[&b].len() as u64;
            if vlen > dd_p {
                return Err(Error::internal(format!(
                    "initial step: |v_{b}| = {vlen} exceeds the depth budget {dd_p}"
                )));
            }
        }
    }
    let record = InitialRecord { v_blocks, x_lens: state.x_lens() };
    Ok((state, record))
}

fn termination_ok(state: &RefState, i: u32, params: &ParamSet) -> Result<bool> {
    let ell_i = params.ell(i)?;
    let ell_ip1 = params.ell(i + 1)?;
    let bar = ell_ip1
        .checked_mul((i + 3) as u64)
        .ok_or_else(|| Error::internal("termination length bound overflows"))?;
    let two_ell = 2 * ell_i;
    for b in 2..=i + 1 {
        let m_b = state.depth(b);
        // (a) expansion long enough
        if m_b <= bar {
            return Ok(false);
        }
        // (b) simple discrepancy at most 2/(i+2), decided on counts
        for &c in state.counts_of(b) {
            let dev = (c as i128 * b as i128 - m_b as i128).unsigned_abs() * (i as u128 + 2);
            if dev > 2 * m_b as u128 * b as u128 {
                return Ok(false);
            }
        }
        // (c) block discrepancy at window 2*ell_i above b^(-2*ell_i-1):
        // missing-block shortcut on the window count first
        let wins = (m_b + 1).saturating_sub(two_ell);
        if pow_exceeds(b as u64, two_ell, wins) {
            continue;
        }
        let threshold = Rat::new(One::one(), BigInt::from(b).pow(two_ell as u32 + 1));
        if !block_discrepancy_exceeds(&state.block(b)?, two_ell as usize, &threshold)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn run_search(prob: &SearchProblem) -> SearchVerdict {
    // the descent recurses once per candidate bit (thousands of frames at
    // real parameters); give it its own roomy stack
    std::thread::scope(|s| {
        let h = std::thread::Builder::new()
            .name("candidate-search".into())
            .stack_size(64 * 1024 * 1024)
            .spawn_scoped(s, || crate::search::search(prob))
            .expect("spawn candidate search thread");
        match h.join() {
            Ok(v) => v,
            Err(payload) => std::panic::resume_unwind(payload),
        }
    })
}

fn step_once(
    state: &mut RefState,
    i: u32,
    params: &ParamSet,
    step: u64,
    limits: &RunLimits,
) -> Result<StepRecord> {
    let k_i = params.k(i)?;
    let ell_i = params.ell(i)?;
    let w = k_i * ceil_log2(&BigUint::from(i + 1));

    let m_last = state.depth(i + 1);
    let pow_last = BigUint::from(i + 1).pow(m_last as u32);
    let (m_l, _) = least_m_pow_ge(2, &(&pow_last * 2u32));
    let a_l = (state.index(i + 1) << m_l).div_ceil(&pow_last);
    let m_big = m_l + w;
    let a_base = &a_l << w;

    let m2 = state.depth(2);
    let bridge_len = m_l - m2;
    let bridge_val = checked_suffix(&a_l, state.index(2) << bridge_len, "step bridge")?;
    let bridge_ones = bridge_val.count_ones();
    let u2len = m_big - m2;
    if u2len <= k_i || u2len > ell_i {
        return Err(Error::internal(format!(
            "step {step}: base-2 extension length {u2len} outside ({k_i}, {ell_i}]"
        )));
    }

    let mut bases = Vec::new();
    let mut pden = BigUint::one() << m_big;
    for (pos, b) in (3..=i + 1).enumerate() {
        let (mb, pb) = least_m_pow_ge(b, &(&pden * 2u32));
        let ulen = mb - state.depth(b);
        if ulen <= k_i || ulen > ell_i {
            return Err(Error::internal(format!(
                "step {step}: base-{b} extension length {ulen} outside ({k_i}, {ell_i}]"
            )));
        }
        let off = state.index(b) * BigUint::from(b).pow(ulen as u32);
        bases.push(MiddleBase::new(
            b,
            pb.clone(),
            mb,
            ulen,
            off,
            err_const(pos),
            digit_band(ulen, b as u64, i as u64),
        ));
        pden = pb;
    }

    let prob = SearchProblem {
        m: m_big,
        w,
        a_base,
        band2: digit_band(u2len, 2, i as u64),
        bridge_ones,
        bases,
        node_budget: limits.max_search_nodes,
    };
    let outcome: SearchOutcome = match run_search(&prob) {
        SearchVerdict::Found(o) => o,
        SearchVerdict::Exhausted => {
            return Err(Error::internal(format!("step {step}: candidate scan exhausted")));
        }
        SearchVerdict::OverBudget { nodes, leaves } => {
            return Err(Error::ResourceLimit(format!(
                "step {step}: candidate scan stopped at the node budget \
                 ({nodes} nodes, {leaves} leaf evaluations, no suitable candidate found yet)"
            )));
        }
    };

    // commit base 2
    let a_new = &prob.a_base + &outcome.c;
    let u2_val = checked_suffix(&a_new, state.index(2) << u2len, "step base 2")?;
    let u2_block = DigitBlock::from_value(2, u2len as usize, &u2_val)?;
    let ones = bridge_ones + outcome.c.count_ones();
    let (lo2, hi2) = prob.band2;
    if ones < lo2 || ones > hi2 {
        return Err(Error::internal(format!(
            "step {step}: committed ones-count {ones} outside band [{lo2}, {hi2}]"
        )));
    }
    let s2 = state.slot(2);
    state.depths[s2] = m_big;
    state.indices[s2] = a_new;
    state.counts[s2][0] += u2len - ones;
    state.counts[s2][1] += ones;

    let mut u_blocks = BTreeMap::new();
    let mut u_discrepancies = BTreeMap::new();
    u_discrepancies.insert(2, simple_discrepancy_from_counts(&[u2len - ones, ones], u2len, 2));
    u_blocks.insert(2, u2_block);

    // commit middle bases
    for (mb, (a_abs, cs)) in prob.bases.iter().zip(&outcome.per_base) {
        let rel = checked_suffix(a_abs, mb.off.clone(), "step commit")?;
        let block = DigitBlock::from_value(mb.b, mb.ulen as usize, &rel)?;
        let recount = digit_counts(&rel, mb.b, mb.ulen);
        if recount != *cs {
            return Err(Error::internal(format!(
                "step {step}: base-{} digit accounting mismatch between search and commit",
                mb.b
            )));
        }
        let sb = state.slot(mb.b);
        state.depths[sb] = mb.m_b;
        state.indices[sb] = a_abs.clone();
        for (tot, c) in state.counts[sb].iter_mut().zip(cs) {
            *tot += c;
        }
        u_discrepancies.insert(mb.b, simple_discrepancy_from_counts(cs, mb.ulen, mb.b));
        u_blocks.insert(mb.b, block);
    }

    let record = StepRecord {
        step,
        scanned: outcome.c,
        u_blocks,
        u_discrepancies,
        x_lens: state.x_lens(),
        nodes: outcome.nodes,
        leaves: outcome.leaves,
    };
    verify_step(&record, i, k_i, ell_i)?;
    Ok(record)
}

/// The four per-step invariants, asserted on every record as it is created.
fn verify_step(rec: &StepRecord, i: u32, k_i: u64, ell_i: u64) -> Result<()> {
    let threshold = rat(1, (i + 2) as i64);
    for (&b, u) in &rec.u_blocks {
        let d = &rec.u_discrepancies[&b];
        if *d > threshold {
            return Err(Error::internal(format!(
                "step {}: D(u_{b}) = {d} exceeds 1/{}",
                rec.step,
                i + 2
            )));
        }
        let len = u.len() as u64;
        if len <= k_i {
            return Err(Error::internal(format!(
                "step {}: |u_{b}| = {len} not above k = {k_i}",
                rec.step
            )));
        }
        if len == 0 || len > ell_i {
            return Err(Error::internal(format!(
                "step {}: |u_{b}| = {len} outside [1, {ell_i}]",
                rec.step
            )));
        }
        if u.is_all_zeros() {
            return Err(Error::internal(format!("step {}: u_{b} is all zeros", rec.step)));
        }
    }
    Ok(())
}

/// Initial step as a standalone operation.
pub fn initial_step(input: &TSequence, i: u32, params: &ParamSet) -> Result<(TSequence, InitialRecord)> {
    let (state, record) = initial_state(input, i, params)?;
    Ok((state.to_tsequence()?, record))
}

/// One recursive step as a standalone operation.
pub fn recursive_step(prev: &TSequence, i: u32, params: &ParamSet) -> Result<(TSequence, StepRecord)> {
    let mut state = RefState::from_tsequence(prev, i)?;
    let record = step_once(&mut state, i, params, 1, &RunLimits::default())?;
    Ok((state.to_tsequence()?, record))
}

/// The three stopping conditions, on an arbitrary (i+1)-sequence.
pub fn termination_met(current: &TSequence, i: u32, params: &ParamSet) -> Result<bool> {
    let state = RefState::from_tsequence(current, i)?;
    termination_ok(&state, i, params)
}

/// Run a full round: initial step, then recursive steps until termination.
pub fn refine(input: &TSequence, i: u32, params: &ParamSet) -> Result<RefineResult> {
    refine_budgeted(input, i, params, &RunLimits::default())
}

/// `refine` under resource ceilings. The budget is per step, so a run either
/// matches the unbudgeted one exactly or fails with `ResourceLimit` at a
/// deterministic step; nothing partial is committed.
pub fn refine_budgeted(
    input: &TSequence,
    i: u32,
    params: &ParamSet,
    limits: &RunLimits,
) -> Result<RefineResult> {
    if i < 1 {
        return Err(Error::invalid("refine: i must be at least 1"));
    }
    let issues = input.validate();
    if !issues.is_empty() {
        return Err(Error::invalid(format!("refine: invalid input tower: {}", issues.join("; "))));
    }
    let (mut state, initial) = initial_state(input, i, params)?;
    let mut steps = Vec::new();
    while !termination_ok(&state, i, params)? {
        let record = step_once(&mut state, i, params, steps.len() as u64 + 1, limits)?;
        steps.push(record);
    }
    Ok(RefineResult { i, output: state.to_tsequence()?, initial, steps })
}

/// Post-round invariant suite over the common bases b <= min(i,p)+1:
/// (1) the output's dyadic interval sits inside the input's deepest interval;
/// (2) D(x_b) <= 2/(i+2); (3) block discrepancy at window 2*ell_i exceeds
/// b^(-2*ell_i-1); (4) |x_b| > ell_{i+1}*(i+3); (5) every prefix of the
/// output expansion no shorter than the input expansion obeys the additive
/// discrepancy growth bound, sampled at `stride` when the range is large.
pub fn check_round_invariants(
    input: &TSequence,
    result: &RefineResult,
    i: u32,
    p: u32,
    params: &ParamSet,
    stride: u64,
) -> RoundReport {
    let mut report = RoundReport::default();
    if !params.is_conforming() {
        report
            .notices
            .push("override parameters are non-conforming; invariant suite skipped".into());
        return report;
    }
    if result.i != i {
        report.violations.push(format!("result was produced at i = {}, not {i}", result.i));
        return report;
    }
    if input.t() != p + 1 {
        report
            .violations
            .push(format!("input is a {}-sequence, expected t = p+1 = {}", input.t(), p + 1));
        return report;
    }
    match check_round_inner(input, result, i, p, params, stride, &mut report) {
        Ok(()) => {}
        Err(e) => report.violations.push(format!("invariant checker aborted: {e}")),
    }
    report
}

fn check_round_inner(
    input: &TSequence,
    result: &RefineResult,
    i: u32,
    p: u32,
    params: &ParamSet,
    stride: u64,
    report: &mut RoundReport,
) -> Result<()> {
    let ell_i = params.ell(i)?;
    let ell_ip1 = params.ell(i + 1)?;
    let dd_p = ceil_log2_inverse_delta(p)?;
    let out = &result.output;

    let outer = input.interval(p + 1)?.to_rat();
    let inner = out.interval(2)?.to_rat();
    if !outer.contains(&inner) {
        report
            .violations
            .push("output dyadic interval escapes the input's deepest interval".into());
    }

    let slack = rat(2, (i + 2) as i64);
    let two_ell = 2 * ell_i;
    let bar = ell_ip1 * (i as u64 + 3);
    for b in 2..=i.min(p) + 1 {
        let x_out = out.x_b(b)?;
        let n_out = x_out.len() as u64;
        let counts = {
            let mut c = vec![0u64; b as usize];
            for &d in x_out.digits() {
                c[d as usize] += 1;
            }
            c
        };
        let d_out = simple_discrepancy_from_counts(&counts, n_out, b);
        if d_out > slack {
            report.violations.push(format!("base {b}: D(x_b) = {d_out} exceeds 2/{}", i + 2));
        }
        let threshold = Rat::new(One::one(), BigInt::from(b).pow(two_ell as u32 + 1));
        match block_discrepancy_exceeds(x_out, two_ell as usize, &threshold) {
            Ok(true) => {}
            Ok(false) => report.violations.push(format!(
                "base {b}: block discrepancy at window {two_ell} not above the threshold"
            )),
            Err(e) => report.violations.push(format!("base {b}: block discrepancy check failed: {e}")),
        }
        if n_out <= bar {
            report
                .violations
                .push(format!("base {b}: |x_b| = {n_out} not above {bar}"));
        }

        // (5) prefix discrepancy growth
        let x_in = input.x_b(b)?;
        let n_in = x_in.len() as u64;
        if n_in == 0 {
            report
                .notices
                .push(format!("base {b}: input expansion empty; prefix bound skipped"));
            continue;
        }
        if x_out.digits()[..n_in as usize] != *x_in.digits() {
            report
                .violations
                .push(format!("base {b}: output expansion does not extend the input expansion"));
            continue;
        }
        let d_in = simple_discrepancy_from_counts(
            &{
                let mut c = vec![0u64; b as usize];
                for &d in x_in.digits() {
                    c[d as usize] += 1;
                }
                c
            },
            n_in,
            b,
        );
        let n_in_rat = rat(n_in as i64, 1);
        let bound = d_in
            + rat(dd_p as i64, 1) / &n_in_rat
            + rat(1, (i + 2) as i64)
            + rat(ell_i as i64, 1) / &n_in_rat;
        let range = n_out - n_in;
        let eff_stride = if range > 10_000 { stride.max(1) } else { 1 };
        let mut c = vec![0u64; b as usize];
        let digits = x_out.digits();
        for &d in &digits[..n_in as usize] {
            c[d as usize] += 1;
        }
        let mut ell = n_in;
        loop {
            let d_pref = simple_discrepancy_from_counts(&c, ell, b);
            if d_pref > bound {
                report.violations.push(format!(
                    "base {b}: prefix length {ell} has discrepancy {d_pref} above the bound {bound}"
                ));
                break;
            }
            if ell == n_out {
                break;
            }
            let next = (ell + eff_stride).min(n_out);
            for &d in &digits[ell as usize..next as usize] {
                c[d as usize] += 1;
            }
            ell = next;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::interval_of;
    use crate::rat;

    fn standard() -> ParamSet {
        ParamSet::Standard
    }

    fn toy(k: u64, ell: u64) -> ParamSet {
        ParamSet::Override { k, ell }
    }

    #[test]
    fn initial_step_examples() {
        let (seq, rec) = initial_step(&TSequence::initial(), 1, &standard()).unwrap();
        assert_eq!(seq.t(), 2);
        let iv = seq.interval(2).unwrap();
        assert_eq!((iv.depth(), iv.index().clone()), (1, 0u32.into()));
        assert_eq!(rec.v_blocks[&2].to_string(), "0");

        let (seq, _) = initial_step(&TSequence::initial(), 2, &standard()).unwrap();
        assert_eq!(seq.t(), 3);
        let i3 = seq.interval(3).unwrap();
        assert_eq!((i3.depth(), i3.index().clone()), (2, 0u32.into()));

        // input whose deepest interval is [11/27, 12/27)
        let i2 = BadicInterval::new(2, 3, 3u32.into()).unwrap();
        let i3 = BadicInterval::new(3, 3, 11u32.into()).unwrap();
        let input = TSequence::new(vec![i2, i3]).unwrap();
        let (seq, _) = initial_step(&input, 1, &standard()).unwrap();
        let iv = seq.interval(2).unwrap();
        assert_eq!((iv.depth(), iv.index().clone()), (6, 27u32.into()));
    }

    #[test]
    fn first_round_frozen_values() {
        let res = refine(&TSequence::initial(), 1, &standard()).unwrap();
        assert_eq!(res.steps.len(), 33);
        let expected_rank = (BigUint::one() << 32) - BigUint::one();
        for rec in &res.steps {
            assert_eq!(rec.scanned, expected_rank);
            assert_eq!(rec.u_blocks[&2].len(), 189);
        }
        let x2 = res.output.x_b(2).unwrap();
        assert_eq!(x2.len(), 6238);
        let ones: u64 = x2.digits().iter().map(|&d| d as u64).sum();
        assert_eq!(ones, 1056);
        let d = crate::discrepancy::simple_discrepancy(x2).unwrap();
        assert_eq!(d, rat(2063, 6238));
        assert_eq!(res.initial.v_blocks[&2].to_string(), "0");
    }

    #[test]
    fn standalone_recursive_step_matches_round_start() {
        let (seq0, _) = initial_step(&TSequence::initial(), 1, &standard()).unwrap();
        let (seq1, rec) = recursive_step(&seq0, 1, &standard()).unwrap();
        assert_eq!(rec.u_blocks[&2].len(), 189);
        assert_eq!(rec.scanned, (BigUint::one() << 32) - BigUint::one());
        assert_eq!(seq1.interval(2).unwrap().depth(), 190);
    }

    #[test]
    fn termination_examples() {
        // alternating bits: balanced, so (b) holds; (a) pivots at 6072
        for (n, expect) in [(6072u64, false), (6073, true)] {
            let digits: Vec<u32> = (0..n).map(|j| (j % 2) as u32).collect();
            let block = DigitBlock::new(2, digits).unwrap();
            let seq = TSequence::new(vec![interval_of(&block)]).unwrap();
            assert_eq!(termination_met(&seq, 1, &standard()).unwrap(), expect, "n = {n}");
        }
        // in base 2 condition (b) cannot fail at i=1 (D is at most 1/2 < 2/3),
        // so even the all-zeros expansion terminates once long enough
        let block = DigitBlock::new(2, vec![0; 6100]).unwrap();
        let seq = TSequence::new(vec![interval_of(&block)]).unwrap();
        assert!(termination_met(&seq, 1, &standard()).unwrap());
        // at i=2 an all-zeros base-3 expansion busts (b): D = 2/3 > 1/2
        let iv2 = BadicInterval::new(2, 19000, 0u32.into()).unwrap();
        let iv3 = BadicInterval::new(3, 19000, 0u32.into()).unwrap();
        let seq = TSequence::new(vec![iv2, iv3]).unwrap();
        assert!(!termination_met(&seq, 2, &standard()).unwrap());
    }

    #[test]
    fn toy_round_reconstructs_and_repeats() {
        let params = toy(2, 8);
        let res = refine(&TSequence::initial(), 1, &params).unwrap();
        assert!(!res.steps.is_empty());
        // concatenation identity: x_2(out) = x_2(in) * v_2 * prod u_2
        let mut rebuilt = res.initial.v_blocks[&2].clone();
        for rec in &res.steps {
            rebuilt = rebuilt.concat(&rec.u_blocks[&2]).unwrap();
        }
        assert_eq!(&rebuilt, res.output.x_b(2).unwrap());
        for rec in &res.steps {
            let len = rec.u_blocks[&2].len();
            assert!(len > 2 && len <= 8);
        }
        // determinism
        let again = refine(&TSequence::initial(), 1, &params).unwrap();
        assert_eq!(again.steps.len(), res.steps.len());
        for (a, b) in res.steps.iter().zip(&again.steps) {
            assert_eq!(a.scanned, b.scanned);
            assert_eq!(a.nodes, b.nodes);
        }
        assert_eq!(
            res.output.interval(2).unwrap().index(),
            again.output.interval(2).unwrap().index()
        );
    }

    #[test]
    fn first_round_invariant_report_is_clean() {
        let input = TSequence::initial();
        let res = refine(&input, 1, &standard()).unwrap();
        let report = check_round_invariants(&input, &res, 1, 1, &standard(), 16);
        assert!(report.is_clean(), "violations: {:?}", report.violations);
        // first round: input expansion is empty, so the prefix bound is skipped
        assert!(report.notices.iter().any(|n| n.contains("skipped")));
    }

    #[test]
    fn toy_rounds_excluded_from_invariant_suite() {
        let params = toy(2, 8);
        let input = TSequence::initial();
        let res = refine(&input, 1, &params).unwrap();
        let report = check_round_invariants(&input, &res, 1, 1, &params, 1);
        assert!(report.is_clean());
        assert!(report.notices.iter().any(|n| n.contains("non-conforming")));
    }
}
