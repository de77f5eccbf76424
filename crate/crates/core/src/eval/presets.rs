//! Desk-scale long-read datasets.
//!
//! Each preset mixes three strata: reads that map (low edit rate), divergent
//! reads well beyond any threshold in the region of interest, and decoys that
//! are unrelated to their window. Every stratum has its own seed and id range.

use crate::seq::{generate_pairs, DatasetSpec, EditMix, PairRecord, PhiDist, SeqError};

struct Stratum {
    share: f64,
    edit_rate: f64,
    mix: EditMix,
}

const STRATA: [Stratum; 3] = [
    Stratum { share: 0.5, edit_rate: 0.015, mix: EditMix { sub: 0.5, ins: 0.25, del: 0.25 } },
    Stratum { share: 0.2, edit_rate: 0.15, mix: EditMix { sub: 0.5, ins: 0.25, del: 0.25 } },
    // every base substituted with probability 3/4: identical to a random read
    Stratum { share: 0.3, edit_rate: 0.75, mix: EditMix::SUBSTITUTIONS_ONLY },
];

pub fn preset_names() -> &'static [&'static str] {
    &["ont10k-mini", "ont100k-micro"]
}

fn build(read_len: usize, n_pairs: usize, seed: u64) -> Result<Vec<PairRecord>, SeqError> {
    let pad = (0.07 * read_len as f64).round() as usize;
    let mut out = Vec::with_capacity(n_pairs);
    let mut first_id = 0u64;
    for (k, s) in STRATA.iter().enumerate() {
        let n = if k + 1 == STRATA.len() {
            n_pairs - out.len()
        } else {
            (s.share * n_pairs as f64).round() as usize
        };
        let mut spec = DatasetSpec::new(n, read_len, s.edit_rate, pad, seed.wrapping_add(k as u64));
        spec.mix = s.mix;
        spec.phi = PhiDist::Uniform { lo: 0, hi: 1 << 30 };
        spec.first_id = first_id;
        out.extend(generate_pairs(&spec)?);
        first_id += n as u64;
    }
    Ok(out)
}

/// Generates a named preset, or `None` for an unknown name.
pub fn preset(name: &str, seed: u64) -> Option<Result<Vec<PairRecord>, SeqError>> {
    match name {
        "ont10k-mini" => Some(build(10_000, 500, seed)),
        "ont100k-micro" => Some(build(100_000, 50, seed)),
        _ => None,
    }
}
