use std::collections::BTreeSet;

use segsift::eval::{compute_labels, evaluate, evaluate_with, sweep_e, LabelCache};
use segsift::filter::{filter_batch, FilterMode, FilterParams};
use segsift::seq::{generate_pairs, DatasetSpec, EditMix, PairRecord, PhiDist};

fn mixed(seed: u64) -> Vec<PairRecord> {
    let mut out = Vec::new();
    for (k, rate) in [0.01, 0.04, 0.2, 0.75].into_iter().enumerate() {
        let mut spec = DatasetSpec::new(40, 300, rate, 20, seed + k as u64);
        spec.first_id = 40 * k as u64;
        spec.phi = PhiDist::Uniform { lo: 0, hi: 1000 };
        if rate > 0.5 {
            spec.mix = EditMix::SUBSTITUTIONS_ONLY;
        }
        out.extend(generate_pairs(&spec).unwrap());
    }
    out
}

#[test]
fn conservation_and_zero_fn() {
    let pairs = mixed(1);
    for mode in [FilterMode::Reference, FilterMode::HardwareFaithful] {
        for t in [4, 8, 16] {
            for e in [3, 9, 15, 20] {
                let m = evaluate(&pairs, &FilterParams::new(t, e).with_mode(mode)).unwrap();
                assert_eq!(m.total(), pairs.len() as u64);
                assert_eq!(m.fn_, 0, "T={t} E={e} {mode:?}");
            }
        }
    }
}

#[test]
fn accepted_ids_contain_true_positive_ids() {
    let pairs = mixed(2);
    for e in [5, 12, 20] {
        let labels = compute_labels(&pairs, e);
        let (v, _) = filter_batch(&pairs, &FilterParams::new(8, e)).unwrap();
        let accepted: BTreeSet<u64> = v.iter().filter(|v| v.accept).map(|v| v.id).collect();
        let truth: BTreeSet<u64> = pairs.iter().zip(&labels).filter(|(_, l)| **l).map(|(p, _)| p.id).collect();
        assert!(truth.is_subset(&accepted));
        let m = evaluate_with(&pairs, &FilterParams::new(8, e), &labels).unwrap();
        assert!(m.p_rate() >= m.oracle_positive_rate());
    }
}

#[test]
fn cached_labels_equal_fresh() {
    let pairs = mixed(3);
    let mut cache = LabelCache::new();
    let rows = sweep_e(&pairs, &[2, 6, 10, 14, 20], &FilterParams::new(8, 0), &mut cache).unwrap();
    assert_eq!(rows.len(), 5);
    let checksum = |l: &[bool]| l.iter().enumerate().fold(0u64, |h, (i, &b)| h.wrapping_mul(31).wrapping_add((i as u64) << 1 | b as u64));
    for e in [2, 6, 10, 14, 20] {
        let cached = cache.labels(&pairs, e).unwrap();
        assert_eq!(checksum(&cached), checksum(&compute_labels(&pairs, e)));
    }
    assert_eq!(cache.computed(), 5);
    // a different dataset must not hit the same entry
    let other = mixed(4);
    cache.labels(&other, 2).unwrap();
    assert_eq!(cache.computed(), 6);
}
