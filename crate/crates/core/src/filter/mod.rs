//! Segment/shift exact-match pre-alignment filter.
//!
//! The read is cut into segments. A segment "matches" when it occurs verbatim
//! in the reference window at some relative shift `e` in `[-E, +E]`. A pair
//! is accepted when at least `n_segments - E` segments match. If the read is
//! within `E` edits of its anchored slice, every segment not touched by an
//! edit matches at its cumulative indel offset, so accepted pairs are a
//! superset of true positives.
//!
//! Out-of-window reference positions never match. Both modes probe exactly
//! the relative shifts `-E..=E`; they differ only in where segment boundaries
//! fall (see [`segments`]) and in how a shift is addressed (see [`ShiftSet`]).

mod params;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::seq::PairRecord;

pub use params::{
    FilterMode, FilterParams, DEFAULT_SEGMENT_LEN, DEFAULT_SHIFT_SET_WIDTH, DEFAULT_WORDSET_BASES,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FilterError {
    #[error("pair {id}: pad {pad} is smaller than threshold {threshold}")]
    PadTooSmall { id: u64, pad: usize, threshold: usize },
    #[error("invalid filter parameters: {0}")]
    InvalidParams(String),
    #[error("pair {id}: segment {index} out of range ({n_segments} segments)")]
    SegmentOutOfRange {
        id: u64,
        index: usize,
        n_segments: usize,
    },
}

/// `ceil(L / T)`.
pub fn n_segments(read_len: usize, segment_len: usize) -> usize {
    read_len.div_ceil(segment_len)
}

/// A segment as a half-open range of read positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
}

/// Segment boundaries for a read of length `read_len` placed at `phi`.
///
/// Reference mode cuts at multiples of `T` from the read start. Hardware mode
/// cuts at multiples of `T` measured from each word-set origin (and at every
/// word-set boundary), so a read starting mid-segment gets a shorter first
/// segment and possibly one extra segment.
pub fn segments(read_len: usize, phi: u64, params: &FilterParams) -> Vec<Segment> {
    let t = params.segment_len;
    match params.mode {
        FilterMode::Reference => (0..read_len)
            .step_by(t)
            .map(|start| Segment {
                start,
                len: t.min(read_len - start),
            })
            .collect(),
        FilterMode::HardwareFaithful => {
            let b = params.wordset_bases as u64;
            let t = t as u64;
            let end = phi + read_len as u64;
            let mut out = Vec::with_capacity(read_len / t as usize + 2);
            let mut pos = phi;
            while pos < end {
                let origin = pos - pos % b;
                let next_cut = origin + b.min((pos - origin) / t * t + t);
                let next = next_cut.min(end);
                out.push(Segment {
                    start: (pos - phi) as usize,
                    len: (next - pos) as usize,
                });
                pos = next;
            }
            out
        }
    }
}

/// A block of consecutive relative shifts evaluated together.
///
/// Shift `base + r` (for row `r < size`) is realised by displacing the read by
/// `base` columns and comparing it with a reference row stored `r` columns
/// ahead, so only `Ws` shifted reference rows are ever stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftSet {
    pub index: usize,
    pub base: i64,
    pub size: usize,
}

pub fn shift_sets(threshold: usize, width: usize) -> Vec<ShiftSet> {
    let e = threshold as i64;
    let w = width as i64;
    let total = 2 * e + 1;
    (0..total.div_euclid(w) + (total % w != 0) as i64)
        .map(|j| {
            let base = -e + j * w;
            ShiftSet {
                index: j as usize,
                base,
                size: (w.min(e - base + 1)) as usize,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub id: u64,
    pub accept: bool,
    pub matches: usize,
    pub n_segments: usize,
    /// One entry per segment; `true` when it matched at some shift.
    pub segment_bits: Vec<bool>,
    /// Smallest-|e| matching shift per segment (negative wins ties).
    pub best_shift: Vec<Option<i64>>,
}

/// Accept rule: `matches >= n_segments - E`, always true when `E >= n_segments`.
#[inline]
pub fn accepts(matches: usize, n_segments: usize, threshold: usize) -> bool {
    matches + threshold >= n_segments
}

/// One probe of the comparison trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftProbe {
    pub segment: usize,
    pub shift: i64,
    /// Shift-set index (hardware mode only).
    pub shift_set: Option<usize>,
    /// First read base compared.
    pub read_start: usize,
    /// First reference-window base compared; may be out of range.
    pub ref_start: i64,
    pub len: usize,
    pub matched: bool,
}

struct Prepared<'a> {
    pair: &'a PairRecord,
    segs: Vec<Segment>,
    params: FilterParams,
}

impl<'a> Prepared<'a> {
    fn new(pair: &'a PairRecord, params: &FilterParams) -> Result<Self, FilterError> {
        params.validate()?;
        if pair.pad < params.threshold {
            return Err(FilterError::PadTooSmall {
                id: pair.id,
                pad: pair.pad,
                threshold: params.threshold,
            });
        }
        Ok(Self {
            pair,
            segs: segments(pair.read_len(), pair.phi, params),
            params: *params,
        })
    }

    /// Reference-window start compared against `seg` at relative shift `e`.
    ///
    /// In hardware mode the read is placed at column `phi + start + base`
    /// and the stored row `r` supplies reference column `read_col + r`; the
    /// window index is recovered from the window's own column origin
    /// `phi - pad`.
    #[inline]
    fn ref_start(&self, seg: Segment, e: i64) -> (i64, Option<usize>) {
        let pad = self.pair.pad as i64;
        match self.params.mode {
            FilterMode::Reference => (pad + seg.start as i64 + e, None),
            FilterMode::HardwareFaithful => {
                let ws = self.params.shift_set_width as i64;
                let lowest = -(self.params.threshold as i64);
                let set = (e - lowest).div_euclid(ws);
                let base = lowest + set * ws;
                let row = e - base;
                let read_col = self.pair.phi as i64 + seg.start as i64 + base;
                let ref_col = read_col + row;
                let window_origin = self.pair.phi as i64 - pad;
                (ref_col - window_origin, Some(set as usize))
            }
        }
    }

    #[inline]
    fn probe(&self, seg: Segment, e: i64) -> bool {
        let (start, _) = self.ref_start(seg, e);
        let window = &self.pair.ref_window;
        if start < 0 || start as usize + seg.len > window.len() {
            return false;
        }
        self.pair
            .read
            .range_eq(seg.start, window, start as usize, seg.len)
    }

    /// Probes shifts in order 0, -1, +1, -2, +2, ... and stops at the first hit.
    fn segment_match(&self, i: usize) -> Option<i64> {
        let seg = self.segs[i];
        let e_max = self.params.threshold as i64;
        if self.probe(seg, 0) {
            return Some(0);
        }
        for d in 1..=e_max {
            if self.probe(seg, -d) {
                return Some(-d);
            }
            if self.probe(seg, d) {
                return Some(d);
            }
        }
        None
    }

    fn verdict(&self) -> Verdict {
        let best_shift: Vec<Option<i64>> = (0..self.segs.len()).map(|i| self.segment_match(i)).collect();
        let segment_bits: Vec<bool> = best_shift.iter().map(Option::is_some).collect();
        let matches = segment_bits.iter().filter(|b| **b).count();
        let n = self.segs.len();
        Verdict {
            id: self.pair.id,
            accept: accepts(matches, n, self.params.threshold),
            matches,
            n_segments: n,
            segment_bits,
            best_shift,
        }
    }
}

/// Whether segment `i` matches at some shift, and the preferred matching shift.
pub fn segment_match(
    pair: &PairRecord,
    i: usize,
    params: &FilterParams,
) -> Result<(bool, Option<i64>), FilterError> {
    let prep = Prepared::new(pair, params)?;
    if i >= prep.segs.len() {
        return Err(FilterError::SegmentOutOfRange {
            id: pair.id,
            index: i,
            n_segments: prep.segs.len(),
        });
    }
    let shift = prep.segment_match(i);
    Ok((shift.is_some(), shift))
}

pub fn filter_pair(pair: &PairRecord, params: &FilterParams) -> Result<Verdict, FilterError> {
    Ok(Prepared::new(pair, params)?.verdict())
}

/// Order-preserving [`filter_pair`] over a batch, with wall time of the whole batch.
pub fn filter_batch(
    pairs: &[PairRecord],
    params: &FilterParams,
) -> Result<(Vec<Verdict>, Duration), FilterError> {
    params.validate()?;
    if let Some(bad) = pairs.iter().find(|p| p.pad < params.threshold) {
        return Err(FilterError::PadTooSmall {
            id: bad.id,
            pad: bad.pad,
            threshold: params.threshold,
        });
    }
    let start = Instant::now();
    let verdicts = pairs
        .par_iter()
        .map(|p| filter_pair(p, params))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((verdicts, start.elapsed()))
}

/// Visits every probe of every segment without early exit.
///
/// Reference mode visits shifts in ascending order; hardware mode visits
/// shift-set by shift-set, rows in order.
pub fn trace_shifts(
    pair: &PairRecord,
    params: &FilterParams,
    mut visit: impl FnMut(ShiftProbe),
) -> Result<(), FilterError> {
    let prep = Prepared::new(pair, params)?;
    let e_max = params.threshold as i64;
    for (i, &seg) in prep.segs.iter().enumerate() {
        let mut emit = |e: i64| {
            let (ref_start, shift_set) = prep.ref_start(seg, e);
            visit(ShiftProbe {
                segment: i,
                shift: e,
                shift_set,
                read_start: seg.start,
                ref_start,
                len: seg.len,
                matched: prep.probe(seg, e),
            });
        };
        match params.mode {
            FilterMode::Reference => (-e_max..=e_max).for_each(&mut emit),
            FilterMode::HardwareFaithful => {
                for set in shift_sets(params.threshold, params.shift_set_width) {
                    (0..set.size as i64).for_each(|r| emit(set.base + r));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::EncodedSeq;

    fn pair(read: &str, window: &str) -> PairRecord {
        PairRecord::new(0, 0, EncodedSeq::encode(read).unwrap(), EncodedSeq::encode(window).unwrap())
            .unwrap()
    }

    /// Character loop over decoded strings, no packing.
    fn naive_segment_match(read: &str, window: &str, pad: usize, start: usize, len: usize, e_max: i64) -> Vec<i64> {
        let (r, w) = (read.as_bytes(), window.as_bytes());
        (-e_max..=e_max)
            .filter(|&e| {
                (0..len).all(|k| {
                    let q = pad as i64 + (start + k) as i64 + e;
                    q >= 0 && (q as usize) < w.len() && w[q as usize] == r[start + k]
                })
            })
            .collect()
    }

    #[test]
    fn n_segments_examples() {
        assert_eq!(n_segments(100_000, 8), 12_500);
        assert_eq!(n_segments(10, 4), 3);
        assert_eq!(n_segments(8, 8), 1);
    }

    #[test]
    fn identity_matches_at_zero() {
        let p = pair("ACGTTGCAAC", "GACGTTGCAACT");
        for e in 0..=1 {
            for t in 1..=10 {
                let params = FilterParams::new(t, e);
                for i in 0..n_segments(10, t) {
                    assert_eq!(segment_match(&p, i, &params).unwrap(), (true, Some(0)));
                }
            }
        }
    }

    #[test]
    fn substitution_in_first_segment() {
        // anchored slice ACCTACGT, pad 1
        let p = pair("ACGTACGT", "TACCTACGTG");
        let params = FilterParams::new(4, 1);
        assert_eq!(segment_match(&p, 0, &params).unwrap(), (false, None));
        assert_eq!(segment_match(&p, 1, &params).unwrap(), (true, Some(0)));
        assert!(naive_segment_match("ACGTACGT", "TACCTACGTG", 1, 0, 4, 1).is_empty());
        assert_eq!(naive_segment_match("ACGTACGT", "TACCTACGTG", 1, 4, 4, 1), vec![0]);
    }

    #[test]
    fn deletion_at_segment_boundary() {
        // anchored slice ACGTCACGTA; the read drops the C at slice position 4
        // and is refilled from the window tail
        let read = "ACGTACGTAG";
        let window = "TACGTCACGTAG";
        let p = pair(read, window);
        assert_eq!(p.pad, 1);
        let params = FilterParams::new(4, 1);
        assert_eq!(segment_match(&p, 0, &params).unwrap(), (true, Some(0)));
        assert_eq!(segment_match(&p, 1, &params).unwrap(), (true, Some(1)));
        assert_eq!(naive_segment_match(read, window, 1, 4, 4, 1), vec![1]);
    }

    #[test]
    fn filter_examples() {
        let params = FilterParams::new(4, 1);
        let v = filter_pair(&pair("ACGTACGT", "GACGTACGTC"), &params).unwrap();
        assert!(v.accept);
        assert_eq!((v.matches, v.n_segments), (2, 2));

        // one substitution in each segment
        let v = filter_pair(&pair("ACGTACGT", "GACCTACTTC"), &params).unwrap();
        assert_eq!(v.matches, 0);
        assert!(!v.accept);

        // two substitutions in the same segment
        let v = filter_pair(&pair("ACGTACGT", "GATCTACGTC"), &params).unwrap();
        assert_eq!(v.matches, 1);
        assert!(v.accept);
    }

    #[test]
    fn threshold_at_least_segments_always_accepts() {
        let p = pair("AAAAAAAA", "TTTTTTTTTTTT");
        let v = filter_pair(&p, &FilterParams::new(4, 2)).unwrap();
        assert_eq!(v.matches, 0);
        assert!(v.accept);
    }

    #[test]
    fn pad_too_small() {
        let p = pair("ACGT", "ACGT");
        assert_eq!(
            filter_pair(&p, &FilterParams::new(2, 1)),
            Err(FilterError::PadTooSmall { id: 0, pad: 0, threshold: 1 })
        );
        assert!(segment_match(&p, 0, &FilterParams::new(2, 1)).is_err());
    }

    #[test]
    fn segment_index_out_of_range() {
        let p = pair("ACGT", "ACGT");
        assert!(matches!(
            segment_match(&p, 2, &FilterParams::new(2, 0)),
            Err(FilterError::SegmentOutOfRange { index: 2, n_segments: 2, .. })
        ));
    }

    #[test]
    fn best_shift_prefers_small_negative() {
        // segment AA found at shifts -2 and +2 only
        let p = pair("AA", "AACCAA");
        assert_eq!(p.pad, 2);
        let (_, s) = segment_match(&p, 0, &FilterParams::new(2, 2)).unwrap();
        assert_eq!(s, Some(-2));
    }

    #[test]
    fn hardware_segments_follow_wordset_grid() {
        let params = FilterParams::new(8, 0).with_mode(FilterMode::HardwareFaithful);
        let lens: Vec<usize> = segments(20, 5, &params).iter().map(|s| s.len).collect();
        assert_eq!(lens, vec![3, 8, 8, 1]);
        let lens: Vec<usize> = segments(16, 0, &params).iter().map(|s| s.len).collect();
        assert_eq!(lens, vec![8, 8]);
        // word-set of 12 bases with T = 8: cuts at 8, 12, 20, 24, ...
        let params = params.with_wordset_bases(12);
        let cuts: Vec<(usize, usize)> = segments(20, 2, &params).iter().map(|s| (s.start, s.len)).collect();
        assert_eq!(cuts, vec![(0, 6), (6, 4), (10, 8), (18, 2)]);
        let total: usize = segments(97, 13, &params).iter().map(|s| s.len).sum();
        assert_eq!(total, 97);
    }

    #[test]
    fn shift_set_sizes() {
        let sizes: Vec<usize> = shift_sets(12, 8).iter().map(|s| s.size).collect();
        assert_eq!(sizes, vec![8, 8, 8, 1]);
        let bases: Vec<i64> = shift_sets(12, 8).iter().map(|s| s.base).collect();
        assert_eq!(bases, vec![-12, -4, 4, 12]);
        assert_eq!(shift_sets(0, 8).len(), 1);
        assert_eq!(shift_sets(3, 7).len(), 1);
        assert_eq!(FilterParams::new(8, 12).n_shift_sets(), 4);
    }

    #[test]
    fn trace_covers_every_shift_once() {
        let p = pair("ACGTACGTAC", "GGGACGTACGTACTTT");
        for mode in [FilterMode::Reference, FilterMode::HardwareFaithful] {
            let params = FilterParams::new(4, 3).with_mode(mode).with_shift_set_width(2);
            let mut seen = vec![Vec::new(); 4];
            trace_shifts(&p, &params, |probe| seen[probe.segment].push(probe.shift)).unwrap();
            let n = segments(10, 0, &params).len();
            for shifts in &mut seen[..n] {
                shifts.sort();
                assert_eq!(*shifts, (-3..=3).collect::<Vec<_>>());
            }
        }
    }
}
