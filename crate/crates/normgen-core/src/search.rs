//! Leftmost-first branch-and-bound over candidate dyadic subintervals.
//!
//! A refinement step must find, among 2^w equally spaced dyadic candidates
//! ordered left to right, the first one whose tower extension keeps every
//! per-base digit-count within its suitability band. Scanning candidates one
//! by one is hopeless (the first suitable candidate can sit at rank ~2^2000),
//! so the search walks the binary tree of candidate-bit prefixes and prunes
//! whole subtrees with exact index bounds:
//!
//! - For base 2 the digit counts of a candidate are its own bits; a running
//!   ones-count plus the remaining depth bounds the final count.
//! - For each base b >= 3 the extension index is a short chain of ceilinged
//!   rescalings of the candidate index A. The chain value lies within an
//!   additive constant of A * P_b / 2^M, so exact floors of that product at
//!   the subtree's minimal and maximal A bound the reachable index range.
//!   Both floors are maintained incrementally: the low M bits of the product
//!   live in a residue and carries/borrows propagate into a small quotient.
//!   Per-base indices are astronomically large; nothing here ever divides by
//!   P_b or 2^M during the descent.
//! - Digits shared by the whole index range are fixed once per node and
//!   inherited down the subtree (child ranges nest inside parent ranges, so
//!   fixed digits stay fixed). A feasibility test over the open digits then
//!   prunes on per-digit caps, deficits, and total room; it is exact, walking
//!   the digit expansions of the two range endpoints so that even ranges
//!   hugging a digit boundary (which fix no digits but force long digit runs)
//!   prune as soon as no in-range completion can satisfy the band.
//!
//! Exact ceiling chains run only at leaves, via the residues (no division).
//! The search is exhaustive left of the reported candidate, so the result is
//! exactly the leftmost suitable candidate.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Inclusive digit-count band: [lo, hi] occurrences per digit keeps the
/// extension's simple discrepancy within 1/(i+2).
pub(crate) fn digit_band(n: u64, b: u64, i: u64) -> (u64, u64) {
    let n = n as i128;
    let b = b as i128;
    let i = i as i128;
    let den = b * (i + 2);
    let ceil = |a: i128| -((-a).div_euclid(den));
    let lo = ceil(n * (i + 2 - b)).max(0);
    let hi = (n * (i + 2 + b)).div_euclid(den).min(n);
    (lo as u64, hi as u64)
}

/// Per-base (b >= 3) description of one refinement step.
pub(crate) struct MiddleBase {
    pub b: u32,
    /// b^{m_b}, the depth the extension reaches in this base.
    pub pb: BigUint,
    pub m_b: u64,
    /// Extension length in digits.
    pub ulen: u64,
    /// a_prev * b^ulen: index of the leftmost possible extension.
    pub off: BigUint,
    pub band: (u64, u64),
    /// b^0 ..= b^ulen.
    pub pows: Vec<BigUint>,
    /// b^ulen - 1: the largest valid extension value, relative to off.
    pub top_uint: BigUint,
    /// Additive bound on (ceil-chain value) - floor(A * P_b / 2^M),
    /// from the ceiling-chain drift constants.
    pub err_int: BigInt,
}

impl MiddleBase {
    pub(crate) fn new(
        b: u32,
        pb: BigUint,
        m_b: u64,
        ulen: u64,
        off: BigUint,
        err_c: u64,
        band: (u64, u64),
    ) -> MiddleBase {
        let pows: Vec<BigUint> = {
            let mut v = Vec::with_capacity(ulen as usize + 1);
            let mut p = BigUint::one();
            for _ in 0..=ulen {
                v.push(p.clone());
                p *= b;
            }
            v
        };
        let top_uint = &pows[ulen as usize] - BigUint::one();
        let err_int = BigInt::from(err_c);
        MiddleBase { b, pb, m_b, ulen, off, band, pows, top_uint, err_int }
    }
}

/// Ceiling-chain drift allowance for the base at position `pos` of the chain
/// (pos 0 is base 3). Chain: c_3 = 1, c_b = 2b * c_{b-1} + 1, from the
/// minimality bound P_b < 2b * P_{b-1}; plus one unit of headroom.
pub(crate) fn err_const(pos: usize) -> u64 {
    let mut c: u64 = 1;
    let mut b: u64 = 3;
    for _ in 0..pos {
        b += 1;
        c = c * 2 * b + 1;
    }
    c + 1
}

/// One refinement step's candidate-search instance.
pub(crate) struct SearchProblem {
    /// Dyadic depth of the candidates (J_2 = [A/2^M, (A+1)/2^M)).
    pub m: u64,
    /// Number of free candidate bits; candidates are A = a_base + c, c < 2^w.
    pub w: u64,
    pub a_base: BigUint,
    /// Ones-count band for the whole base-2 extension (bridge + candidate).
    pub band2: (u64, u64),
    pub bridge_ones: u64,
    pub bases: Vec<MiddleBase>,
    /// Abort the scan after this many tree nodes (None = run to completion).
    pub node_budget: Option<u64>,
}

pub(crate) struct SearchOutcome {
    /// Candidate rank: number of candidates strictly left of the selected one.
    pub c: BigUint,
    /// Per middle base: exact extension index a_b and its digit counts.
    pub per_base: Vec<(BigUint, Vec<u64>)>,
    pub nodes: u64,
    pub leaves: u64,
}

pub(crate) enum SearchVerdict {
    Found(SearchOutcome),
    /// The whole candidate space was scanned without a hit.
    Exhausted,
    /// The node budget tripped; nodes and leaves spent so far.
    OverBudget { nodes: u64, leaves: u64 },
}

/// Exact floor/residue pair for A_partial * P_b / 2^M at the subtree's
/// minimal completion (remaining bits zero) and maximal completion
/// (remaining bits one), kept relative to `off`.
struct BasePair {
    /// floor(A_min * P_b / 2^M) - off
    g_min: BigInt,
    /// (A_min * P_b) mod 2^M
    r_min: BigUint,
    g_max: BigInt,
    r_max: BigUint,
    kind: PairKind,
}

enum PairKind {
    /// P_b = 2^(M + tau): products are exact shifts, no residue needed.
    Pow2 { addend: Vec<BigInt> },
    /// General P_b: residues mod 2^M with per-shift tables of
    /// (P_b << s) mod 2^M and (P_b << s) >> M.
    General { lo_tab: Vec<BigUint>, hi_tab: Vec<BigInt>, pow2m: BigUint },
}

/// Narrowing state threaded down the tree: digits of the index range already
/// pinned for every completion in the subtree.
#[derive(Clone)]
struct NarrowState {
    /// Open (not yet pinned) low digits.
    e: u64,
    /// Value of the pinned high digits, relative to off.
    fixed: BigUint,
    counts: Vec<u64>,
}

struct Engine<'a> {
    prob: &'a SearchProblem,
    pairs: Vec<BasePair>,
    path: Vec<bool>,
    nodes: u64,
    leaves: u64,
    over_budget: bool,
    progress: bool,
}

pub(crate) fn search(prob: &SearchProblem) -> SearchVerdict {
    let mut pairs = Vec::with_capacity(prob.bases.len());
    for mb in &prob.bases {
        pairs.push(BasePair::new(prob, mb));
    }
    let init: Vec<NarrowState> = prob
        .bases
        .iter()
        .map(|mb| NarrowState {
            e: mb.ulen,
            fixed: BigUint::zero(),
            counts: vec![0; mb.b as usize],
        })
        .collect();
    let mut eng = Engine {
        prob,
        pairs,
        path: Vec::with_capacity(prob.w as usize),
        nodes: 0,
        leaves: 0,
        over_budget: false,
        progress: std::env::var_os("NORMGEN_SEARCH_PROGRESS").is_some(),
    };
    let found = eng.rec(0, prob.bridge_ones, &init);
    match found {
        Some(per_base) => {
            let mut c = BigUint::zero();
            for &bit in &eng.path {
                c <<= 1u8;
                if bit {
                    c |= BigUint::one();
                }
            }
            SearchVerdict::Found(SearchOutcome {
                c,
                per_base,
                nodes: eng.nodes,
                leaves: eng.leaves,
            })
        }
        None if eng.over_budget => {
            SearchVerdict::OverBudget { nodes: eng.nodes, leaves: eng.leaves }
        }
        None => SearchVerdict::Exhausted,
    }
}

impl BasePair {
    fn new(prob: &SearchProblem, mb: &MiddleBase) -> BasePair {
        let m = prob.m;
        let w = prob.w;
        let a_min = &prob.a_base;
        let a_max = a_min + ((BigUint::one() << w as usize) - BigUint::one());
        // P_b a power of two exactly when b is and the exponents line up
        let pow2_tau = if mb.pb.count_ones() == 1 {
            let bits = mb.pb.bits() - 1;
            if bits >= m {
                Some(bits - m)
            } else {
                None
            }
        } else {
            None
        };
        let off_int = BigInt::from(mb.off.clone());
        match pow2_tau {
            Some(tau) => {
                let g_min = BigInt::from(a_min << tau as usize) - &off_int;
                let g_max = BigInt::from(&a_max << tau as usize) - &off_int;
                let addend = (0..w)
                    .map(|s| BigInt::one() << (s + tau) as usize)
                    .collect();
                BasePair {
                    g_min,
                    r_min: BigUint::zero(),
                    g_max,
                    r_max: BigUint::zero(),
                    kind: PairKind::Pow2 { addend },
                }
            }
            None => {
                let pow2m = BigUint::one() << m as usize;
                let mask = &pow2m - BigUint::one();
                let prod_min = a_min * &mb.pb;
                let prod_max = &a_max * &mb.pb;
                let g_min = BigInt::from(&prod_min >> m as usize) - &off_int;
                let r_min = prod_min & &mask;
                let g_max = BigInt::from(&prod_max >> m as usize) - &off_int;
                let r_max = prod_max & &mask;
                let lo_tab: Vec<BigUint> =
                    (0..w).map(|s| (&mb.pb << s as usize) & &mask).collect();
                let hi_tab: Vec<BigInt> =
                    (0..w).map(|s| BigInt::from(&mb.pb >> (m - s) as usize)).collect();
                BasePair {
                    g_min,
                    r_min,
                    g_max,
                    r_max,
                    kind: PairKind::General { lo_tab, hi_tab, pow2m },
                }
            }
        }
    }

    /// Descending into the left child (bit 0 at shift s): the maximal
    /// completion shrinks by 2^s, so the max pair loses (P_b << s).
    /// Returns the borrow flag needed to undo.
    fn left_apply(&mut self, s: u64) -> bool {
        match &self.kind {
            PairKind::Pow2 { addend } => {
                self.g_max -= &addend[s as usize];
                false
            }
            PairKind::General { lo_tab, hi_tab, pow2m } => {
                let lo = &lo_tab[s as usize];
                let mut borrow = false;
                if self.r_max < *lo {
                    self.r_max += pow2m;
                    borrow = true;
                }
                self.r_max -= lo;
                self.g_max -= &hi_tab[s as usize];
                if borrow {
                    self.g_max -= 1;
                }
                borrow
            }
        }
    }

    fn left_undo(&mut self, s: u64, borrow: bool) {
        match &self.kind {
            PairKind::Pow2 { addend } => {
                self.g_max += &addend[s as usize];
            }
            PairKind::General { lo_tab, hi_tab, pow2m } => {
                self.r_max += &lo_tab[s as usize];
                if self.r_max >= *pow2m {
                    self.r_max -= pow2m;
                }
                self.g_max += &hi_tab[s as usize];
                if borrow {
                    self.g_max += 1;
                }
            }
        }
    }

    /// Descending into the right child (bit 1 at shift s): the minimal
    /// completion grows by 2^s, so the min pair gains (P_b << s).
    fn right_apply(&mut self, s: u64) -> bool {
        match &self.kind {
            PairKind::Pow2 { addend } => {
                self.g_min += &addend[s as usize];
                false
            }
            PairKind::General { lo_tab, hi_tab, pow2m } => {
                self.r_min += &lo_tab[s as usize];
                let mut carry = false;
                if self.r_min >= *pow2m {
                    self.r_min -= pow2m;
                    carry = true;
                }
                self.g_min += &hi_tab[s as usize];
                if carry {
                    self.g_min += 1;
                }
                carry
            }
        }
    }

    fn right_undo(&mut self, s: u64, carry: bool) {
        match &self.kind {
            PairKind::Pow2 { addend } => {
                self.g_min -= &addend[s as usize];
            }
            PairKind::General { lo_tab, hi_tab, pow2m } => {
                if carry {
                    self.r_min += pow2m;
                }
                self.r_min -= &lo_tab[s as usize];
                self.g_min -= &hi_tab[s as usize];
                if carry {
                    self.g_min -= 1;
                }
            }
        }
    }

    /// Exact ceil(A * P_b / 2^M) - off at a leaf, where the min pair holds
    /// the exact product decomposition for the leaf's A.
    fn leaf_exact_rel(&self) -> BigInt {
        let bump = match &self.kind {
            PairKind::Pow2 { .. } => false,
            PairKind::General { .. } => !self.r_min.is_zero(),
        };
        if bump {
            &self.g_min + 1
        } else {
            self.g_min.clone()
        }
    }
}

impl<'a> Engine<'a> {
    fn rec(&mut self, depth: u64, ones: u64, st: &[NarrowState]) -> Option<Vec<(BigUint, Vec<u64>)>> {
        if self.over_budget {
            return None;
        }
        self.nodes += 1;
        if let Some(budget) = self.prob.node_budget {
            if self.nodes > budget {
                self.over_budget = true;
                return None;
            }
        }
        if self.progress && self.nodes % 1_000_000 == 0 {
            eprintln!(
                "search progress: {}M nodes, {} leaves, depth {}",
                self.nodes / 1_000_000,
                self.leaves,
                depth,
            );
        }
        let rem = self.prob.w - depth;
        let (lo2, hi2) = self.prob.band2;
        if ones > hi2 || ones + rem < lo2 {
            return None;
        }
        let mut nst: Vec<NarrowState> = Vec::with_capacity(st.len());
        for (idx, mb) in self.prob.bases.iter().enumerate() {
            let pair = &self.pairs[idx];
            let general = matches!(pair.kind, PairKind::General { .. });
            // reachable index range, relative to off and clamped to the
            // valid extension window; the chain value at the minimal
            // completion is at least ceil(A_min * P_b / 2^M)
            let o_lo = if general && !pair.r_min.is_zero() {
                &pair.g_min + 1
            } else {
                pair.g_min.clone()
            };
            if !o_lo.is_negative() && *o_lo.magnitude() > mb.top_uint {
                return None;
            }
            // first base: a single ceiling, exact at the maximal completion;
            // chained bases carry the accumulated drift allowance
            let o_hi = if idx == 0 {
                if general && !pair.r_max.is_zero() {
                    &pair.g_max + 1
                } else {
                    pair.g_max.clone()
                }
            } else {
                &pair.g_max + &mb.err_int
            };
            if o_hi.is_negative() {
                return None;
            }
            let mut state = st[idx].clone();
            let mut r_lo: BigUint = if o_lo.is_negative() {
                BigUint::zero()
            } else {
                o_lo.into_parts().1
            };
            let mut r_hi: BigUint = if *o_hi.magnitude() > mb.top_uint {
                mb.top_uint.clone()
            } else {
                o_hi.into_parts().1
            };
            // rebase by the pinned prefix inherited from the parent
            r_lo -= &state.fixed;
            r_hi -= &state.fixed;
            debug_assert!(r_hi < mb.pows[state.e as usize]);
            // pin digits shared by the entire range; the range width is
            // invariant under pinning, so one width test per level decides
            // whether a division is even worth attempting
            let width = &r_hi - &r_lo;
            while state.e > 0 {
                let p = &mb.pows[(state.e - 1) as usize];
                if width >= *p {
                    break;
                }
                let dlo = (&r_lo / p).to_u64().expect("digit fits u64");
                let sub = p * dlo;
                if r_hi >= &sub + p {
                    break;
                }
                state.counts[dlo as usize] += 1;
                r_lo -= &sub;
                r_hi -= &sub;
                state.fixed += sub;
                state.e -= 1;
            }
            if !range_feasible(&state.counts, state.e, &r_lo, &r_hi, mb) {
                return None;
            }
            nst.push(state);
        }
        if rem == 0 {
            self.leaves += 1;
            return self.leaf_exact();
        }
        let s = rem - 1;
        // left child first: candidates are ordered by their bits
        let mut flags = Vec::with_capacity(self.pairs.len());
        for pair in &mut self.pairs {
            flags.push(pair.left_apply(s));
        }
        self.path.push(false);
        let hit = self.rec(depth + 1, ones, &nst);
        for (pair, &fl) in self.pairs.iter_mut().zip(&flags) {
            pair.left_undo(s, fl);
        }
        if hit.is_some() {
            return hit;
        }
        self.path.pop();
        flags.clear();
        for pair in &mut self.pairs {
            flags.push(pair.right_apply(s));
        }
        self.path.push(true);
        let hit = self.rec(depth + 1, ones + 1, &nst);
        for (pair, &fl) in self.pairs.iter_mut().zip(&flags) {
            pair.right_undo(s, fl);
        }
        if hit.is_some() {
            return hit;
        }
        self.path.pop();
        None
    }

    /// Exact evaluation at a leaf: the base-2 band already held (the prune
    /// covers both sides at rem = 0); run the ceiling chain through the
    /// middle bases from the residues, recount digits, and check bands.
    fn leaf_exact(&mut self) -> Option<Vec<(BigUint, Vec<u64>)>> {
        let mut out = Vec::with_capacity(self.prob.bases.len());
        let mut prev: Option<(BigUint, &MiddleBase)> = None;
        for (idx, mb) in self.prob.bases.iter().enumerate() {
            let rel = match prev {
                None => {
                    let r = self.pairs[idx].leaf_exact_rel();
                    if r.is_negative() {
                        return None;
                    }
                    r.to_biguint().expect("checked sign")
                }
                Some((ref prev_a, prev_mb)) => {
                    // a_b = ceil(a_prev * P_b / P_prev), a_prev = off + rel
                    let num = prev_a * &mb.pb;
                    let a_b = num.div_ceil(&prev_mb.pb);
                    if a_b < mb.off {
                        return None;
                    }
                    a_b - &mb.off
                }
            };
            if rel >= mb.pows[mb.ulen as usize] {
                return None;
            }
            let counts = digit_counts(&rel, mb.b, mb.ulen);
            let (blo, bhi) = mb.band;
            if counts.iter().any(|&c| c < blo || c > bhi) {
                return None;
            }
            let a_abs = &mb.off + &rel;
            out.push((a_abs.clone(), counts));
            prev = Some((a_abs, mb));
        }
        Some(out)
    }
}

/// Digit counts of `rel` written with `width` base-b digits (leading zeros
/// included).
pub(crate) fn digit_counts(rel: &BigUint, b: u32, width: u64) -> Vec<u64> {
    let mut counts = vec![0u64; b as usize];
    if rel.is_zero() {
        counts[0] = width;
        return counts;
    }
    let digs = rel.to_radix_le(b);
    debug_assert!(digs.len() as u64 <= width);
    for &d in &digs {
        counts[d as usize] += 1;
    }
    counts[0] += width - digs.len() as u64;
    counts
}

/// Running digit-count slack against the band [blo, bhi].
#[derive(Clone)]
struct Slack {
    counts: Vec<u64>,
    /// Sum over digits of max(blo - count, 0).
    deficit: u64,
    /// Sum over digits of bhi - count.
    room: u64,
}

impl Slack {
    fn new(counts: &[u64], blo: u64, bhi: u64) -> Option<Slack> {
        let mut deficit = 0u64;
        let mut room = 0u64;
        for &c in counts {
            if c > bhi {
                return None;
            }
            deficit += blo.saturating_sub(c);
            room += bhi - c;
        }
        Some(Slack { counts: counts.to_vec(), deficit, room })
    }

    /// Pins one more occurrence of `d`; false if the cap breaks.
    fn pin(&mut self, d: u64, blo: u64, bhi: u64) -> bool {
        let c = &mut self.counts[d as usize];
        if *c >= bhi {
            return false;
        }
        if *c < blo {
            self.deficit -= 1;
        }
        *c += 1;
        self.room -= 1;
        true
    }

    /// Could `free` wholly unconstrained digits complete the pinned
    /// counts into the band? Per-digit caps are in `room`; the deficit
    /// must be coverable and the surplus absorbable.
    fn completable(&self, free: u64) -> bool {
        self.deficit <= free && free <= self.room
    }

    /// `completable` after hypothetically pinning one `d`.
    fn completable_with(&self, d: u64, free: u64, blo: u64, bhi: u64) -> bool {
        let c = self.counts[d as usize];
        if c >= bhi {
            return false;
        }
        let deficit = if c < blo { self.deficit - 1 } else { self.deficit };
        let room = self.room - 1;
        deficit <= free && free <= room
    }
}

/// Boundary walk for the exact range-feasibility test. Starting below the
/// top digit `d_top` of one range endpoint, descends the endpoint's digit
/// expansion; at each level every digit strictly on the open side of the
/// boundary leaves the lower positions fully free, and the boundary digit
/// itself is pinned and walked into. `upper` selects which endpoint.
fn boundary_walk(
    mut rem: BigUint,
    d_top: u64,
    e: u64,
    mut slack: Slack,
    mb: &MiddleBase,
    upper: bool,
) -> bool {
    let (blo, bhi) = mb.band;
    let b = mb.b as u64;
    if !slack.pin(d_top, blo, bhi) {
        return false;
    }
    for level in (0..e).rev() {
        let p = &mb.pows[level as usize];
        let d = (&rem / p).to_u64().expect("digit fits u64");
        let open = if upper { 0..d } else { d + 1..b };
        for dd in open {
            if slack.completable_with(dd, level, blo, bhi) {
                return true;
            }
        }
        if !slack.pin(d, blo, bhi) {
            return false;
        }
        rem -= p * d;
    }
    // the walk pinned the endpoint exactly
    slack.completable(0)
}

/// Can some value in [r_lo, r_hi], written with e open digits on top of the
/// given fixed counts, keep every digit count within [blo, bhi]? Exact:
/// returns true precisely when such a value exists. Expects the top open
/// digit to differ between the endpoints (the caller's narrowing loop
/// guarantees it).
fn range_feasible(
    counts: &[u64],
    e: u64,
    r_lo: &BigUint,
    r_hi: &BigUint,
    mb: &MiddleBase,
) -> bool {
    let (blo, bhi) = mb.band;
    let Some(slack) = Slack::new(counts, blo, bhi) else {
        return false;
    };
    if e == 0 {
        return slack.completable(0);
    }
    if !slack.completable(e) {
        return false;
    }
    let p = &mb.pows[(e - 1) as usize];
    let dlo = (r_lo / p).to_u64().expect("digit fits u64");
    let dhi = (r_hi / p).to_u64().expect("digit fits u64");
    debug_assert!(dlo < dhi, "caller must narrow shared digits first");
    // any strictly-between top digit leaves the rest of the window free
    for d in dlo + 1..dhi {
        if slack.completable_with(d, e - 1, blo, bhi) {
            return true;
        }
    }
    if boundary_walk(r_lo - p * dlo, dlo, e - 1, slack.clone(), mb, false) {
        return true;
    }
    boundary_walk(r_hi - p * dhi, dhi, e - 1, slack, mb, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_band_values() {
        // base-2, i=1, n=189: the minimal-popcount band of a step extension
        assert_eq!(digit_band(189, 2, 1), (32, 157));
        assert_eq!(digit_band(3785, 2, 3), (1136, 2649));
        assert_eq!(digit_band(1893, 4, 3), (95, 851));
        assert_eq!(digit_band(1892, 4, 3), (95, 851));
    }

    #[test]
    fn err_const_chain() {
        assert_eq!(err_const(0), 2); // base 3
        assert_eq!(err_const(1), 10); // base 4: 2*4*1 + 1, plus headroom
        assert_eq!(err_const(2), 92); // base 5: 2*5*9 + 1, plus headroom
    }

    #[test]
    fn digit_counts_padding() {
        use num_bigint::BigUint;
        let c = digit_counts(&BigUint::from(5u32), 3, 4); // 5 = "0012" base 3
        assert_eq!(c, vec![2, 1, 1]);
        let z = digit_counts(&BigUint::zero(), 3, 4);
        assert_eq!(z, vec![4, 0, 0]);
    }

    #[test]
    fn range_feasible_is_exact_on_boundary_straddles() {
        // [53, 54] with four open base-3 digits is {1222, 2000}; both bust
        // a [1, 2] per-digit band even though the top digits differ
        let mb = MiddleBase::new(
            3,
            BigUint::from(81u32),
            4,
            4,
            BigUint::zero(),
            0,
            (1, 2),
        );
        let lo = BigUint::from(53u32);
        assert!(!range_feasible(&[0, 0, 0], 4, &lo, &BigUint::from(54u32), &mb));
        // widening to 55 = 2001 admits the completion with counts (2, 1, 1)
        assert!(range_feasible(&[0, 0, 0], 4, &lo, &BigUint::from(55u32), &mb));
    }
}
