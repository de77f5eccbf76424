use std::collections::BTreeMap;

use proptest::prelude::*;
use segsift::cimsim::{simulate, simulate_with, HwConfig, SimError, SimOptions, TimingTable, TraceKind};
use segsift::filter::filter_batch;
use segsift::seq::{generate_pairs, DatasetSpec, PhiDist};

fn config(word_bits: usize, n: usize, ws: usize, nbg: usize, nb: usize, ns: usize, depth: usize, wpb: usize) -> HwConfig {
    HwConfig {
        n_bank_groups: nbg,
        n_banks_per_group: nb,
        n_subarrays_per_bank: ns,
        n_tiles_per_subarray: 2 * word_bits / n,
        sa_per_tile: n,
        crossbar_rows: 1 + 40 * ws,
        crossbar_cols: 4 * n,
        word_bits,
        wpb,
        ws,
        fifo_depth: depth,
        ..HwConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn verdicts_equal_filter(
        seed in any::<u64>(),
        wb_idx in 0usize..3, n_idx in 0usize..3, ws in 1usize..10,
        nbg in 1usize..5, nb in 1usize..4, ns in 1usize..4, depth in 1usize..4, wpb in 1usize..5,
        t_pick in 0usize..8, e in 0usize..9, len in 10usize..150,
    ) {
        let word_bits = [16, 32, 64][wb_idx];
        let cfg = config(word_bits, [2, 4, 8][n_idx], ws, nbg, nb, ns, depth, wpb);
        let ts: Vec<usize> = (1..=word_bits / 2).filter(|t| (word_bits / 2) % t == 0).collect();
        let t = ts[t_pick % ts.len()];
        let mut spec = DatasetSpec::new(30, len, 0.05, e + 1, seed);
        spec.phi = PhiDist::Uniform { lo: 0, hi: 2000 };
        let pairs = generate_pairs(&spec).unwrap();
        let params = cfg.filter_params(t, e);
        match simulate(&pairs, &cfg, &params) {
            Ok(stats) => {
                let want: BTreeMap<u64, bool> = filter_batch(&pairs, &params).unwrap().0.iter().map(|v| (v.id, v.accept)).collect();
                prop_assert_eq!(&stats.verdicts, &want);
                prop_assert_eq!(stats.jobs_dispatched, stats.jobs_expected);
                prop_assert!(stats.subarray_busy.iter().all(|b| b.busy_cycles <= stats.total_cycles));
            }
            Err(SimError::CapacityExceeded { .. }) => {}
            Err(other) => prop_assert!(false, "{}", other),
        }
    }
}

#[test]
fn identical_inputs_identical_stats() {
    let cfg = config(32, 8, 8, 4, 2, 2, 2, 4);
    let mut spec = DatasetSpec::new(40, 250, 0.04, 12, 77);
    spec.phi = PhiDist::Uniform { lo: 0, hi: 800 };
    let pairs = generate_pairs(&spec).unwrap();
    let p = cfg.filter_params(8, 12);
    assert_eq!(simulate(&pairs, &cfg, &p).unwrap(), simulate(&pairs, &cfg, &p).unwrap());
}

#[test]
fn stall_implies_full_fifo_in_trace() {
    for depth in [1usize, 2, 3] {
        let cfg = HwConfig {
            n_banks_per_group: 1,
            n_subarrays_per_bank: 1,
            fifo_depth: depth,
            timing: TimingTable::cmos(),
            ..HwConfig::default()
        };
        let pairs = generate_pairs(&DatasetSpec::new(15, 200, 0.03, 9, depth as u64)).unwrap();
        let run = simulate_with(&pairs, &cfg, &cfg.filter_params(8, 9), &SimOptions { trace: true, tcam: None }).unwrap();
        assert!(run.stats.stall_count > 0);
        let full_dispatch = run
            .trace
            .iter()
            .any(|e| e.kind == TraceKind::Dispatch && e.value as usize == depth);
        assert!(full_dispatch, "depth {depth}");
        for s in run.trace.iter().filter(|e| e.kind == TraceKind::Stall) {
            assert_eq!(s.value as usize, depth);
        }
    }
}
