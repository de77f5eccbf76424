//! Exact global edit distance.
//!
//! [`edit_distance_banded`] is the ground truth used to label pairs; it only
//! fills the diagonal band `|i - j| <= k` and stops as soon as every cell in
//! a row exceeds `k`. [`align_full`] is the unbanded quadratic DP and stands
//! in for the aligner that runs on pairs surviving the filter.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::seq::{EncodedSeq, PairRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distance {
    Exact(usize),
    ExceedsBand(usize),
}

impl Distance {
    pub fn exact(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::ExceedsBand(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignResult {
    pub distance: Distance,
    pub within_threshold: bool,
}

impl AlignResult {
    fn new(distance: Distance) -> Self {
        Self {
            distance,
            within_threshold: matches!(distance, Distance::Exact(_)),
        }
    }
}

const INF: u32 = u32::MAX / 2;

fn codes(s: &EncodedSeq) -> Vec<u8> {
    s.codes().collect()
}

/// Global Levenshtein distance if it is at most `k`, else `ExceedsBand(k)`.
pub fn edit_distance_banded(read: &EncodedSeq, target: &EncodedSeq, k: usize) -> AlignResult {
    AlignResult::new(banded_codes(&codes(read), &codes(target), k))
}

pub(crate) fn banded_codes(a: &[u8], b: &[u8], k: usize) -> Distance {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > k {
        return Distance::ExceedsBand(k);
    }
    if n == 0 || m == 0 {
        return Distance::Exact(n.max(m));
    }
    let width = 2 * k + 1;
    // cell (i, j) lives at index j + k - i
    let mut prev = vec![INF; width + 1];
    let mut cur = vec![INF; width + 1];
    for j in 0..=m.min(k) {
        prev[j + k] = j as u32;
    }
    for i in 1..=n {
        let lo = i.saturating_sub(k);
        let hi = (i + k).min(m);
        cur.fill(INF);
        let mut row_min = INF;
        let ai = a[i - 1];
        for j in lo..=hi {
            let d = j + k - i;
            let v = if j == 0 {
                i as u32
            } else {
                let diag = prev[d] + (ai != b[j - 1]) as u32;
                let up = prev[d + 1] + 1;
                let left = if d > 0 { cur[d - 1] + 1 } else { INF };
                diag.min(up).min(left)
            };
            cur[d] = v;
            row_min = row_min.min(v);
        }
        if row_min as usize > k {
            return Distance::ExceedsBand(k);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let v = prev[m + k - n] as usize;
    if v <= k {
        Distance::Exact(v)
    } else {
        Distance::ExceedsBand(k)
    }
}

/// Same contract as [`edit_distance_banded`], but starts from a narrow band
/// and doubles it, so near-identical pairs cost `O(d * L)` instead of `O(k * L)`.
pub fn edit_distance_within(read: &EncodedSeq, target: &EncodedSeq, k: usize) -> AlignResult {
    let (a, b) = (codes(read), codes(target));
    let mut band = 32.min(k);
    loop {
        match banded_codes(&a, &b, band) {
            Distance::Exact(d) => return AlignResult::new(Distance::Exact(d)),
            Distance::ExceedsBand(_) if band >= k => {
                return AlignResult::new(Distance::ExceedsBand(k))
            }
            Distance::ExceedsBand(_) => band = (band * 2).min(k),
        }
    }
}

/// True when the read is within `e` edits of its anchored reference slice.
pub fn label_pair(pair: &PairRecord, e: usize) -> bool {
    edit_distance_within(&pair.read, &pair.anchored_slice(), e).within_threshold
}

/// Unbanded quadratic DP; returns the distance and the time spent.
pub fn align_full(read: &EncodedSeq, target: &EncodedSeq) -> (usize, Duration) {
    let start = Instant::now();
    let d = full_codes(&codes(read), &codes(target));
    (d, start.elapsed())
}

pub(crate) fn full_codes(a: &[u8], b: &[u8]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ai) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &bj) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + (ai != bj) as usize)
                .min(prev[j + 1] + 1)
                .min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
