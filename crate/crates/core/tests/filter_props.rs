mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use segsift::filter::{filter_batch, filter_pair, segments, trace_shifts, FilterMode, FilterParams};
use segsift::oracle::label_pair;
use segsift::seq::{generate_pairs, DatasetSpec, PhiDist};

const MODES: [FilterMode; 2] = [FilterMode::Reference, FilterMode::HardwareFaithful];

#[test]
fn zero_false_negatives() {
    let mut positives = 0;
    let mut seed = 0;
    for len in [64usize, 200, 700, 2048] {
        for e in 1..=8usize {
            seed += 1;
            let n = if len == 2048 { 200 } else { 450 };
            let mut spec = DatasetSpec::new(n, len, 0.7 * e as f64 / len as f64, e + (seed as usize % 3), seed);
            spec.phi = PhiDist::Uniform { lo: 0, hi: 1 << 16 };
            let pairs = generate_pairs(&spec).unwrap();
            let labels: Vec<bool> = pairs.iter().map(|p| label_pair(p, e)).collect();
            positives += labels.iter().filter(|l| **l).count();
            for t in [4, 8, 16] {
                for mode in MODES {
                    let (v, _) = filter_batch(&pairs, &FilterParams::new(t, e).with_mode(mode)).unwrap();
                    for (v, &l) in v.iter().zip(&labels) {
                        assert!(!l || v.accept, "L={len} E={e} T={t} {mode:?} id={}", v.id);
                    }
                }
            }
        }
    }
    assert!(positives >= 10_000, "{positives}");
}

#[test]
fn every_segment_sees_every_shift_once() {
    let mut spec = DatasetSpec::new(20, 150, 0.05, 13, 5);
    spec.phi = PhiDist::Uniform { lo: 0, hi: 300 };
    for p in generate_pairs(&spec).unwrap() {
        for mode in MODES {
            for (e, ws) in [(0, 8), (5, 8), (12, 8), (13, 3)] {
                let params = FilterParams::new(8, e).with_mode(mode).with_shift_set_width(ws);
                let mut seen: HashMap<usize, Vec<i64>> = HashMap::new();
                trace_shifts(&p, &params, |probe| seen.entry(probe.segment).or_default().push(probe.shift)).unwrap();
                let n = segments(p.read_len(), p.phi, &params).len();
                assert_eq!(seen.len(), n);
                for shifts in seen.values_mut() {
                    shifts.sort_unstable();
                    assert_eq!(*shifts, (-(e as i64)..=e as i64).collect::<Vec<_>>());
                }
            }
        }
    }
}

#[test]
fn modes_agree_at_aligned_placement() {
    for t in [4usize, 8, 16] {
        for e in [0usize, 1, 3] {
            let mut spec = DatasetSpec::new(150, 8 * t, 0.06, 5, (t * 10 + e) as u64);
            spec.phi = PhiDist::Uniform { lo: 0, hi: 1000 };
            let mut pairs = generate_pairs(&spec).unwrap();
            for p in &mut pairs {
                p.phi -= p.phi % t as u64;
            }
            let refm = filter_batch(&pairs, &FilterParams::new(t, e)).unwrap().0;
            let hw = filter_batch(&pairs, &FilterParams::new(t, e).with_mode(FilterMode::HardwareFaithful)).unwrap().0;
            for (a, b) in refm.iter().zip(&hw) {
                assert_eq!(a.accept, b.accept, "T={t} E={e} id={}", a.id);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn accept_monotone_in_e(seed in any::<u64>(), len in 8usize..200, t in 1usize..17, phi in 0u64..500, hw in any::<bool>()) {
        let mut spec = DatasetSpec::new(1, len, 0.1, 12, seed);
        spec.phi = PhiDist::Fixed(phi);
        let p = generate_pairs(&spec).unwrap().remove(0);
        let mode = if hw { FilterMode::HardwareFaithful } else { FilterMode::Reference };
        let mut prev = false;
        for e in 0..=12 {
            let a = filter_pair(&p, &FilterParams::new(t, e).with_mode(mode)).unwrap().accept;
            prop_assert!(a || !prev, "accept dropped at E={}", e);
            prev = a;
        }
    }

    #[test]
    fn verdict_is_consistent(seed in any::<u64>(), len in 1usize..300, t in 1usize..20, e in 0usize..10, phi in 0u64..1000, hw in any::<bool>()) {
        let mut spec = DatasetSpec::new(1, len, 0.08, e, seed);
        spec.phi = PhiDist::Fixed(phi);
        let p = generate_pairs(&spec).unwrap().remove(0);
        let mode = if hw { FilterMode::HardwareFaithful } else { FilterMode::Reference };
        let v = filter_pair(&p, &FilterParams::new(t, e).with_mode(mode)).unwrap();
        prop_assert_eq!(v.matches, v.segment_bits.iter().filter(|b| **b).count());
        prop_assert_eq!(v.n_segments, v.segment_bits.len());
        prop_assert_eq!(v.accept, v.matches + e >= v.n_segments);
        for (bit, s) in v.segment_bits.iter().zip(&v.best_shift) {
            prop_assert_eq!(*bit, s.is_some());
            prop_assert!(s.is_none_or(|s| s.unsigned_abs() as usize <= e));
        }
    }

    #[test]
    fn small_alphabet_pairs_match_naive(read in "[AC]{1,64}", ctx in "[AC]{16}", e in 0usize..4, t in 1usize..9, phi in 0u64..64) {
        let slice: String = read.chars().rev().collect();
        let pad = e + 1;
        let window = format!("{}{}{}", &ctx[..pad], slice, &ctx[16 - pad..]);
        let p = common::pair(phi, &read, &window);
        let v = filter_pair(&p, &FilterParams::new(t, e)).unwrap();
        // naive: reference-mode cuts every T bases, shifts in |e| order, negative first
        let (r, w) = (read.as_bytes(), window.as_bytes());
        let mut expect = Vec::new();
        for s in (0..r.len()).step_by(t) {
            let end = (s + t).min(r.len());
            let mut order = vec![0i64];
            for d in 1..=e as i64 { order.push(-d); order.push(d); }
            expect.push(order.into_iter().find(|&x| (s..end).all(|g| {
                let j = pad as i64 + g as i64 + x;
                j >= 0 && (j as usize) < w.len() && w[j as usize] == r[g]
            })));
        }
        prop_assert_eq!(v.best_shift, expect);
    }
}
