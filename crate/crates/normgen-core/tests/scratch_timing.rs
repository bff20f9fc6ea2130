use std::time::Instant;

use normgen_core::params::ParamSet;
use normgen_core::refine::{initial_step, recursive_step, termination_met};
use normgen_core::tsequence::TSequence;

#[test]
fn three_rounds_timing() {
    let params = ParamSet::Standard;
    let t0 = Instant::now();
    let mut cur = TSequence::initial();
    for i in 1..=3u32 {
        let tr = Instant::now();
        let (next, _init) = initial_step(&cur, i, &params).unwrap();
        cur = next;
        eprintln!("[{:?}] round {i} initial done", t0.elapsed());
        let mut step = 1u64;
        loop {
            let ts = Instant::now();
            let (next, rec) = recursive_step(&cur, i, &params).unwrap();
            cur = next;
            let lens: Vec<(u32, u64)> =
                rec.x_lens.iter().map(|(a, b)| (*a, *b)).collect();
            eprintln!(
                "[{:?}] r{i} s{step}: {:?} rankbits {} nodes {} leaves {} lens {:?}",
                t0.elapsed(),
                ts.elapsed(),
                rec.scanned.bits(),
                rec.nodes,
                rec.leaves,
                lens
            );
            if termination_met(&cur, i, &params).unwrap() {
                break;
            }
            step += 1;
        }
        eprintln!(
            "[{:?}] round {i} done: {} steps, {:?} for the round",
            t0.elapsed(),
            step,
            tr.elapsed()
        );
    }
    eprintln!("total {:?}", t0.elapsed());
}
