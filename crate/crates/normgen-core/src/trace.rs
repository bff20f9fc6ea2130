//! Line-delimited trace records for refinement runs, plus the offline
//! verifier that re-checks the per-round assertions from a trace alone.
//!
//! A trace is JSON Lines: a header naming the parameter schedule, then for
//! each round a `round_start` record, one `initial` record, one `step`
//! record per scan, and a `round_end` summary. Field names are stable;
//! numbers that can exceed 64 bits (scanned ranks) are decimal strings, and
//! discrepancies are exact `"num/den"` strings. Only runs under the
//! standard parameter schedule are verifiable; traces produced with test
//! overrides carry an `override` header and are refused with a notice.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::params::{self, ParamSet};
use crate::refine::RefineResult;
use crate::{rat, Error, Rat, Result};

pub const TRACE_VERSION: u32 = 1;

/// JSON object keys are strings, and the internally tagged record enum
/// buffers its content in a way that defeats serde_json's usual integer-key
/// conversion, so base-keyed maps spell their keys out explicitly.
mod base_keys {
    use std::collections::BTreeMap;
    use std::marker::PhantomData;

    use serde::de::{Deserializer, Error as _, MapAccess, Visitor};
    use serde::ser::{SerializeMap, Serializer};
    use serde::{Deserialize, Serialize};

    pub fn serialize<S: Serializer, V: Serialize>(
        map: &BTreeMap<u32, V>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(map.len()))?;
        for (k, v) in map {
            m.serialize_entry(&k.to_string(), v)?;
        }
        m.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>, V: Deserialize<'de>>(
        d: D,
    ) -> Result<BTreeMap<u32, V>, D::Error> {
        struct BaseMap<V>(PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for BaseMap<V> {
            type Value = BTreeMap<u32, V>;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a map keyed by base numbers")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut a: A,
            ) -> Result<Self::Value, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((k, v)) = a.next_entry::<String, V>()? {
                    let k: u32 = k
                        .parse()
                        .map_err(|_| A::Error::custom(format!("bad base key {k:?}")))?;
                    out.insert(k, v);
                }
                Ok(out)
            }
        }
        d.deserialize_map(BaseMap(PhantomData))
    }
}

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum TraceRecord {
    Header {
        version: u32,
        /// `"standard"` or `"override"`.
        mode: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        k: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        ell: Option<u64>,
    },
    RoundStart {
        round: u32,
        /// The refinement index i applied this round (the value f_j).
        f: u32,
        /// Number of bases in the round's input sequence.
        input_t: u32,
    },
    Initial {
        round: u32,
        #[serde(with = "base_keys")]
        v_lens: BTreeMap<u32, u64>,
        #[serde(with = "base_keys")]
        x_lens: BTreeMap<u32, u64>,
    },
    Step {
        round: u32,
        step: u64,
        /// Candidate rank scanned before success, in decimal.
        scanned: String,
        #[serde(with = "base_keys")]
        u_lens: BTreeMap<u32, u64>,
        /// Simple discrepancies of the extension blocks, as "num/den".
        #[serde(with = "base_keys")]
        u_discs: BTreeMap<u32, String>,
        #[serde(with = "base_keys")]
        x_lens: BTreeMap<u32, u64>,
    },
    RoundEnd {
        round: u32,
        steps: u64,
        #[serde(with = "base_keys")]
        x_lens: BTreeMap<u32, u64>,
    },
}

impl TraceRecord {
    pub fn header(params: &ParamSet) -> TraceRecord {
        match params {
            ParamSet::Standard => TraceRecord::Header {
                version: TRACE_VERSION,
                mode: "standard".into(),
                k: None,
                ell: None,
            },
            ParamSet::Override { k, ell } => TraceRecord::Header {
                version: TRACE_VERSION,
                mode: "override".into(),
                k: Some(*k),
                ell: Some(*ell),
            },
        }
    }
}

/// Sequential writer producing one JSON record per line.
pub struct TraceWriter<W: Write> {
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Self {
        TraceWriter { out }
    }

    pub fn record(&mut self, rec: &TraceRecord) -> Result<()> {
        let line = serde_json::to_string(rec)
            .map_err(|e| Error::internal(format!("trace serialization: {e}")))?;
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(|e| Error::internal(format!("trace write: {e}")))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out
            .flush()
            .map_err(|e| Error::internal(format!("trace flush: {e}")))
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

fn disc_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Writes the full record set of one completed round.
pub fn emit_round<W: Write>(
    w: &mut TraceWriter<W>,
    round: u32,
    input_t: u32,
    result: &RefineResult,
) -> Result<()> {
    w.record(&TraceRecord::RoundStart { round, f: result.i, input_t })?;
    let v_lens: BTreeMap<u32, u64> = result
        .initial
        .v_blocks
        .iter()
        .map(|(b, blk)| (*b, blk.len() as u64))
        .collect();
    w.record(&TraceRecord::Initial {
        round,
        v_lens,
        x_lens: result.initial.x_lens.clone(),
    })?;
    for rec in &result.steps {
        let u_lens: BTreeMap<u32, u64> = rec
            .u_blocks
            .iter()
            .map(|(b, blk)| (*b, blk.len() as u64))
            .collect();
        let u_discs: BTreeMap<u32, String> = rec
            .u_discrepancies
            .iter()
            .map(|(b, d)| (*b, disc_string(d)))
            .collect();
        w.record(&TraceRecord::Step {
            round,
            step: rec.step,
            scanned: rec.scanned.to_string(),
            u_lens,
            u_discs,
            x_lens: rec.x_lens.clone(),
        })?;
    }
    let final_lens = result
        .steps
        .last()
        .map(|r| r.x_lens.clone())
        .unwrap_or_else(|| result.initial.x_lens.clone());
    w.record(&TraceRecord::RoundEnd {
        round,
        steps: result.steps.len() as u64,
        x_lens: final_lens,
    })
}

/// Parses a trace file; structural damage is a parse error with the
/// offending line number.
pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: idx + 1,
            col: 1,
            msg: format!("trace read: {e}"),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            col: e.column().max(1),
            msg: format!("trace record: {e}"),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Verdict for one round of a verified trace.
#[derive(Debug, Clone)]
pub struct RoundVerdict {
    pub round: u32,
    pub f: u32,
    pub steps: u64,
    pub violations: Vec<String>,
}

impl RoundVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Outcome of offline verification.
#[derive(Debug, Clone, Default)]
pub struct TraceReport {
    /// Set when the trace cannot be verified at all (e.g. override mode);
    /// `rounds` is empty in that case.
    pub refused: Option<String>,
    pub rounds: Vec<RoundVerdict>,
}

impl TraceReport {
    pub fn all_passed(&self) -> bool {
        self.refused.is_none() && self.rounds.iter().all(|r| r.passed())
    }
}

fn parse_disc(s: &str) -> Option<Rat> {
    let (n, d) = s.split_once('/')?;
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    if d <= num_traits::Zero::zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

/// Re-checks every per-round assertion recoverable from a trace: block
/// length windows, suitability of the recorded discrepancies, scan-rank
/// range, length bookkeeping within and across rounds, and the initial
/// carry-block bound.
pub fn verify_trace(records: &[TraceRecord]) -> Result<TraceReport> {
    let mut it = records.iter().peekable();
    let Some(TraceRecord::Header { version, mode, .. }) = it.next() else {
        return Err(Error::invalid("trace does not start with a header record"));
    };
    if *version != TRACE_VERSION {
        return Err(Error::invalid(format!("unknown trace version {version}")));
    }
    if mode != "standard" {
        return Ok(TraceReport {
            refused: Some(format!(
                "trace was produced with {mode} parameters; only standard-schedule \
                 runs are verifiable"
            )),
            rounds: Vec::new(),
        });
    }

    let mut report = TraceReport::default();
    let mut expected_round = 1u32;
    // final x-lengths of the previous round, for the cross-round v check
    let mut prev_final: Option<BTreeMap<u32, u64>> = None;

    while let Some(rec) = it.next() {
        let TraceRecord::RoundStart { round, f, input_t } = rec else {
            return Err(Error::invalid(format!("expected round_start, got {rec:?}")));
        };
        if *round != expected_round {
            return Err(Error::invalid(format!(
                "round {round} out of order (expected {expected_round})"
            )));
        }
        let i = *f;
        let p = input_t
            .checked_sub(1)
            .filter(|p| *p >= 1)
            .ok_or_else(|| Error::invalid("round input_t must be at least 2"))?;
        let mut v = RoundVerdict { round: *round, f: i, steps: 0, violations: Vec::new() };

        let k_i = params::k(i)?;
        let ell_i = params::ell(i)?;
        let suit = rat(1, i as i64 + 2);
        let w_bits = k_i * params::ceil_log2(&BigUint::from(i as u64 + 1));
        let rank_limit = BigUint::one() << w_bits;

        let Some(TraceRecord::Initial { round: r2, v_lens, x_lens }) = it.next() else {
            return Err(Error::invalid(format!("round {round}: missing initial record")));
        };
        if r2 != round {
            return Err(Error::invalid(format!("round {round}: initial record labeled {r2}")));
        }
        let v_cap = params::ceil_log2_inverse_delta(p)?;
        for (b, len) in v_lens {
            if *len > v_cap {
                v.violations.push(format!(
                    "initial: |v_{b}| = {len} exceeds the carry bound {v_cap}"
                ));
            }
        }
        if let Some(prev) = &prev_final {
            for (b, len) in x_lens {
                if let (Some(pl), Some(vl)) = (prev.get(b), v_lens.get(b)) {
                    if pl + vl != *len {
                        v.violations.push(format!(
                            "initial: |x_{b}| = {len} but previous round ended at {pl} \
                             with |v_{b}| = {vl}"
                        ));
                    }
                }
            }
        }

        let mut cur_lens = x_lens.clone();
        let mut step_no = 0u64;
        while let Some(TraceRecord::Step { .. }) = it.peek() {
            let Some(TraceRecord::Step { round: r3, step, scanned, u_lens, u_discs, x_lens }) =
                it.next()
            else {
                unreachable!()
            };
            if r3 != round {
                return Err(Error::invalid(format!(
                    "round {round}: step record labeled {r3}"
                )));
            }
            step_no += 1;
            if *step != step_no {
                v.violations.push(format!(
                    "step {step}: out of order (expected {step_no})"
                ));
            }
            match scanned.parse::<BigUint>() {
                Ok(rank) => {
                    if rank >= rank_limit {
                        v.violations.push(format!(
                            "step {step}: scanned rank {rank} outside the 2^{w_bits} \
                             candidate space"
                        ));
                    }
                }
                Err(_) => v.violations.push(format!(
                    "step {step}: unreadable scanned rank {scanned:?}"
                )),
            }
            let want_bases: Vec<u32> = (2..=i + 1).collect();
            let have: Vec<u32> = u_lens.keys().copied().collect();
            if have != want_bases {
                v.violations.push(format!(
                    "step {step}: extension bases {have:?}, expected {want_bases:?}"
                ));
            }
            for (b, len) in u_lens {
                if !(*len > k_i && *len <= ell_i) {
                    v.violations.push(format!(
                        "step {step}: |u_{b}| = {len} outside ({k_i}, {ell_i}]"
                    ));
                }
                let grown = cur_lens.get(b).copied().unwrap_or(0) + len;
                match x_lens.get(b) {
                    Some(total) if *total == grown => {}
                    Some(total) => v.violations.push(format!(
                        "step {step}: |x_{b}| = {total}, expected {grown}"
                    )),
                    None => v.violations.push(format!(
                        "step {step}: missing |x_{b}|"
                    )),
                }
            }
            for (b, disc) in u_discs {
                match parse_disc(disc) {
                    Some(d) => {
                        if d > suit {
                            v.violations.push(format!(
                                "step {step}: D(u_{b}) = {disc} breaks suitability \
                                 (> 1/{})",
                                i + 2
                            ));
                        }
                    }
                    None => v.violations.push(format!(
                        "step {step}: unreadable discrepancy {disc:?} for base {b}"
                    )),
                }
            }
            cur_lens = x_lens.clone();
        }

        let Some(TraceRecord::RoundEnd { round: r4, steps, x_lens }) = it.next() else {
            return Err(Error::invalid(format!("round {round}: missing round_end")));
        };
        if r4 != round {
            return Err(Error::invalid(format!("round {round}: round_end labeled {r4}")));
        }
        if *steps != step_no {
            v.violations.push(format!(
                "round_end claims {steps} steps, trace has {step_no}"
            ));
        }
        if *x_lens != cur_lens {
            v.violations.push("round_end lengths disagree with the last step".into());
        }
        v.steps = step_no;
        prev_final = Some(cur_lens);
        report.rounds.push(v);
        expected_round += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refine::refine;
    use crate::tsequence::TSequence;

    fn round1_trace() -> Vec<TraceRecord> {
        let params = ParamSet::Standard;
        let res = refine(&TSequence::initial(), 1, &params).unwrap();
        let mut w = TraceWriter::new(Vec::new());
        w.record(&TraceRecord::header(&params)).unwrap();
        emit_round(&mut w, 1, 2, &res).unwrap();
        read_trace(std::io::Cursor::new(w.into_inner())).unwrap()
    }

    #[test]
    fn round_trip_and_verify() {
        let recs = round1_trace();
        assert!(matches!(recs[0], TraceRecord::Header { .. }));
        assert_eq!(recs.len(), 2 + 33 + 2);
        let report = verify_trace(&recs).unwrap();
        assert!(report.refused.is_none());
        assert_eq!(report.rounds.len(), 1);
        assert!(report.all_passed(), "{:?}", report.rounds[0].violations);
        assert_eq!(report.rounds[0].steps, 33);
    }

    #[test]
    fn serialization_is_stable() {
        let recs = round1_trace();
        let mut w = TraceWriter::new(Vec::new());
        for r in &recs {
            w.record(r).unwrap();
        }
        let once = w.into_inner();
        let again = {
            let mut w = TraceWriter::new(Vec::new());
            for r in &read_trace(std::io::Cursor::new(once.clone())).unwrap() {
                w.record(r).unwrap();
            }
            w.into_inner()
        };
        assert_eq!(once, again);
        let first = String::from_utf8(once).unwrap();
        let header = first.lines().next().unwrap();
        assert_eq!(
            header,
            format!("{{\"record\":\"header\",\"version\":{TRACE_VERSION},\"mode\":\"standard\"}}")
        );
    }

    #[test]
    fn tampered_discrepancy_is_a_suitability_violation() {
        let mut recs = round1_trace();
        for r in &mut recs {
            if let TraceRecord::Step { step, u_discs, .. } = r {
                if *step == 7 {
                    u_discs.insert(2, "2/3".into());
                }
            }
        }
        let report = verify_trace(&recs).unwrap();
        assert!(!report.all_passed());
        let msgs = &report.rounds[0].violations;
        assert!(
            msgs.iter().any(|m| m.contains("suitability")),
            "violations: {msgs:?}"
        );
    }

    #[test]
    fn tampered_length_is_caught() {
        let mut recs = round1_trace();
        for r in &mut recs {
            if let TraceRecord::Step { step, u_lens, .. } = r {
                if *step == 3 {
                    u_lens.insert(2, 10);
                }
            }
        }
        let report = verify_trace(&recs).unwrap();
        let msgs = &report.rounds[0].violations;
        assert!(msgs.iter().any(|m| m.contains("outside (188, 190]")), "{msgs:?}");
        assert!(msgs.iter().any(|m| m.contains("expected")), "{msgs:?}");
    }

    #[test]
    fn override_traces_are_refused() {
        let mut recs = round1_trace();
        recs[0] = TraceRecord::header(&ParamSet::Override { k: 2, ell: 8 });
        let report = verify_trace(&recs).unwrap();
        assert!(report.refused.is_some());
        assert!(!report.all_passed());
    }

    #[test]
    fn malformed_traces_are_parse_errors() {
        let text = "{\"record\":\"header\",\"version\":1,\"mode\":\"standard\"}\nnot json\n";
        let err = read_trace(std::io::Cursor::new(text)).unwrap_err();
        let Error::Parse { line, .. } = err else { panic!("want parse error") };
        assert_eq!(line, 2);

        let recs = vec![TraceRecord::RoundStart { round: 1, f: 1, input_t: 2 }];
        assert!(matches!(verify_trace(&recs), Err(Error::InvalidArgument(_))));
    }
}
