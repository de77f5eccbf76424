//! Planted-edit dataset generator.
//!
//! Each record gets its own ChaCha stream (`stream = record id`), so records
//! can be generated in any order or on any number of threads and still come
//! out byte-identical for a given seed.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EncodedSeq, PairRecord, SeqError};

/// Fractions of substitutions, insertions and deletions among planted edits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditMix {
    pub sub: f64,
    pub ins: f64,
    pub del: f64,
}

impl Default for EditMix {
    fn default() -> Self {
        Self {
            sub: 0.5,
            ins: 0.25,
            del: 0.25,
        }
    }
}

impl EditMix {
    pub const SUBSTITUTIONS_ONLY: EditMix = EditMix {
        sub: 1.0,
        ins: 0.0,
        del: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiDist {
    Fixed(u64),
    /// Uniform over `lo..hi` (exclusive upper bound).
    Uniform { lo: u64, hi: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub n_pairs: usize,
    pub read_len: usize,
    /// Edits per base, `0 <= edit_rate <= 1`.
    pub edit_rate: f64,
    pub mix: EditMix,
    pub pad: usize,
    pub phi: PhiDist,
    pub rng_seed: u64,
    /// Id of the first record; later records count up from here.
    #[serde(default)]
    pub first_id: u64,
}

impl DatasetSpec {
    pub fn new(n_pairs: usize, read_len: usize, edit_rate: f64, pad: usize, rng_seed: u64) -> Self {
        Self {
            n_pairs,
            read_len,
            edit_rate,
            mix: EditMix::default(),
            pad,
            phi: PhiDist::Fixed(0),
            rng_seed,
            first_id: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SeqError> {
        let m = self.mix;
        if m.sub < 0.0 || m.ins < 0.0 || m.del < 0.0 {
            return Err(SeqError::SpecInvalid("edit fractions must be non-negative".into()));
        }
        if (m.sub + m.ins + m.del - 1.0).abs() > 1e-9 {
            return Err(SeqError::SpecInvalid(format!(
                "edit fractions sum to {}, not 1",
                m.sub + m.ins + m.del
            )));
        }
        if self.read_len < 1 {
            return Err(SeqError::SpecInvalid("read length must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.edit_rate) {
            return Err(SeqError::SpecInvalid(format!(
                "edit rate {} outside [0, 1]",
                self.edit_rate
            )));
        }
        if let PhiDist::Uniform { lo, hi } = self.phi {
            if hi <= lo {
                return Err(SeqError::SpecInvalid(format!("empty phi range {lo}..{hi}")));
            }
        }
        Ok(())
    }

    /// Number of edits planted per record.
    pub fn edits_per_read(&self) -> usize {
        ((self.edit_rate * self.read_len as f64).round() as usize).min(self.read_len)
    }
}

#[derive(Clone, Copy)]
enum Edit {
    Sub,
    Ins,
    Del,
}

fn random_other_base(rng: &mut ChaCha8Rng, base: u8) -> u8 {
    (base + rng.gen_range(1..4u8)) & 0b11
}

/// Generates the record at position `index` of the dataset.
pub fn generate_record(spec: &DatasetSpec, index: usize) -> PairRecord {
    let id = spec.first_id + index as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    rng.set_stream(id);

    let len = spec.read_len;
    let pad = spec.pad;
    let window: Vec<u8> = (0..len + 2 * pad).map(|_| rng.gen_range(0..4u8)).collect();
    let slice = &window[pad..pad + len];

    let k = spec.edits_per_read();
    let mut positions = sample(&mut rng, len, k).into_vec();
    positions.sort_unstable();

    let mut read = Vec::with_capacity(len + k);
    let (mut inserted, mut deleted) = (0usize, 0usize);
    let mut next = positions.iter().peekable();
    for (i, &base) in slice.iter().enumerate() {
        if next.peek() == Some(&&i) {
            next.next();
            let draw: f64 = rng.gen();
            let edit = if draw < spec.mix.sub {
                Edit::Sub
            } else if draw < spec.mix.sub + spec.mix.ins {
                Edit::Ins
            } else {
                Edit::Del
            };
            match edit {
                Edit::Sub => read.push(random_other_base(&mut rng, base)),
                Edit::Ins => {
                    read.push(rng.gen_range(0..4u8));
                    read.push(base);
                    inserted += 1;
                }
                Edit::Del => deleted += 1,
            }
        } else {
            read.push(base);
        }
    }

    // restore |read| = L from the window tail, then from fresh random bases
    read.truncate(len);
    let mut tail = pad + len;
    while read.len() < len {
        if tail < window.len() {
            read.push(window[tail]);
            tail += 1;
        } else {
            read.push(rng.gen_range(0..4u8));
        }
    }

    let phi = match spec.phi {
        PhiDist::Fixed(v) => v,
        PhiDist::Uniform { lo, hi } => rng.gen_range(lo..hi),
    };

    // The trim/extension contributes one edit per base of net length change.
    let planted = k + inserted.abs_diff(deleted);
    PairRecord {
        id,
        read: EncodedSeq::from_codes(&read),
        ref_window: EncodedSeq::from_codes(&window),
        pad,
        phi,
        planted_edits: Some(planted as u32),
    }
}

pub fn generate_pairs(spec: &DatasetSpec) -> Result<Vec<PairRecord>, SeqError> {
    spec.validate()?;
    Ok((0..spec.n_pairs)
        .into_par_iter()
        .map(|i| generate_record(spec, i))
        .collect())
}
