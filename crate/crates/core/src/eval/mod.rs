//! Accuracy and timing evaluation against oracle labels.

mod presets;
mod report;

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::filter::{filter_batch, FilterError, FilterMode, FilterParams};
use crate::oracle::{align_full, label_pair};
use crate::seq::PairRecord;

pub use presets::{preset, preset_names};
pub use report::{read_report_json, report_rows, write_report, ReportFormat, ReportRow};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl ConfusionMatrix {
    pub fn record(&mut self, accepted: bool, truth: bool) {
        match (accepted, truth) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn merge(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn tp_rate(&self) -> f64 {
        ratio(self.tp, self.total())
    }

    pub fn fp_rate(&self) -> f64 {
        ratio(self.fp, self.total())
    }

    pub fn tn_rate(&self) -> f64 {
        ratio(self.tn, self.total())
    }

    pub fn fn_rate(&self) -> f64 {
        ratio(self.fn_, self.total())
    }

    /// `tp / (tp + fn)`; 1 when there are no true positives to find.
    pub fn sensitivity(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            1.0
        } else {
            ratio(self.tp, self.tp + self.fn_)
        }
    }

    /// Fraction of pairs passed on to alignment.
    pub fn p_rate(&self) -> f64 {
        ratio(self.tp + self.fp, self.total())
    }

    /// Fraction of pairs the oracle labels similar.
    pub fn oracle_positive_rate(&self) -> f64 {
        ratio(self.tp + self.fn_, self.total())
    }
}

/// Content hash of a pair set, used to key cached labels.
pub fn dataset_hash(pairs: &[PairRecord]) -> u64 {
    let mut h = DefaultHasher::new();
    pairs.len().hash(&mut h);
    for p in pairs {
        (p.id, p.phi, p.pad, p.read.len(), p.ref_window.len()).hash(&mut h);
        p.read.payload().hash(&mut h);
        p.ref_window.payload().hash(&mut h);
    }
    h.finish()
}

/// Oracle labels per (dataset content, E), computed once.
#[derive(Debug, Default)]
pub struct LabelCache {
    entries: HashMap<(u64, usize), Arc<Vec<bool>>>,
    computed: usize,
}

impl LabelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn labels(&mut self, pairs: &[PairRecord], e: usize) -> Result<Arc<Vec<bool>>, FilterError> {
        check_pad(pairs, e)?;
        let key = (dataset_hash(pairs), e);
        if let Some(l) = self.entries.get(&key) {
            return Ok(l.clone());
        }
        let labels = Arc::new(compute_labels(pairs, e));
        self.computed += 1;
        self.entries.insert(key, labels.clone());
        Ok(labels)
    }

    /// Number of label sets computed (cache misses).
    pub fn computed(&self) -> usize {
        self.computed
    }
}

fn check_pad(pairs: &[PairRecord], e: usize) -> Result<(), FilterError> {
    match pairs.iter().find(|p| p.pad < e) {
        Some(p) => Err(FilterError::PadTooSmall {
            id: p.id,
            pad: p.pad,
            threshold: e,
        }),
        None => Ok(()),
    }
}

pub fn compute_labels(pairs: &[PairRecord], e: usize) -> Vec<bool> {
    pairs.par_iter().map(|p| label_pair(p, e)).collect()
}

/// Confusion matrix of filter verdicts against `labels` (same order as `pairs`).
pub fn evaluate_with(
    pairs: &[PairRecord],
    params: &FilterParams,
    labels: &[bool],
) -> Result<ConfusionMatrix, FilterError> {
    assert_eq!(pairs.len(), labels.len(), "one label per pair");
    let (verdicts, _) = filter_batch(pairs, params)?;
    Ok(verdicts
        .iter()
        .zip(labels)
        .fold(ConfusionMatrix::default(), |mut m, (v, &l)| {
            m.record(v.accept, l);
            m
        }))
}

pub fn evaluate(pairs: &[PairRecord], params: &FilterParams) -> Result<ConfusionMatrix, FilterError> {
    check_pad(pairs, params.threshold)?;
    evaluate_with(pairs, params, &compute_labels(pairs, params.threshold))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub segment_len: usize,
    pub threshold: usize,
    pub mode: FilterMode,
    /// Whether the threshold lies in the region of interest for the read length.
    pub in_roi: bool,
    pub matrix: ConfusionMatrix,
}

/// Closed interval `[round(0.02 L), round(0.07 L)]`.
pub fn roi(read_len: usize) -> (usize, usize) {
    let f = |x: f64| (x * read_len as f64).round() as usize;
    (f(0.02), f(0.07))
}

fn in_roi(pairs: &[PairRecord], e: usize) -> bool {
    pairs.first().is_some_and(|p| {
        let (lo, hi) = roi(p.read_len());
        (lo..=hi).contains(&e)
    })
}

pub fn sweep_t(
    pairs: &[PairRecord],
    t_list: &[usize],
    base: &FilterParams,
    cache: &mut LabelCache,
) -> Result<Vec<SweepRow>, FilterError> {
    if t_list.is_empty() {
        return Err(FilterError::InvalidParams("empty segment length list".into()));
    }
    let e = base.threshold;
    let labels = cache.labels(pairs, e)?;
    t_list
        .iter()
        .map(|&t| {
            let params = FilterParams { segment_len: t, ..*base };
            Ok(SweepRow {
                segment_len: t,
                threshold: e,
                mode: base.mode,
                in_roi: in_roi(pairs, e),
                matrix: evaluate_with(pairs, &params, &labels)?,
            })
        })
        .collect()
}

pub fn sweep_e(
    pairs: &[PairRecord],
    e_list: &[usize],
    base: &FilterParams,
    cache: &mut LabelCache,
) -> Result<Vec<SweepRow>, FilterError> {
    if e_list.is_empty() {
        return Err(FilterError::InvalidParams("empty threshold list".into()));
    }
    e_list
        .iter()
        .map(|&e| {
            let labels = cache.labels(pairs, e)?;
            let params = FilterParams { threshold: e, ..*base };
            Ok(SweepRow {
                segment_len: base.segment_len,
                threshold: e,
                mode: base.mode,
                in_roi: in_roi(pairs, e),
                matrix: evaluate_with(pairs, &params, &labels)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct E2EBreakdown {
    pub filter_time_s: f64,
    pub align_time_s: f64,
    pub end_to_end_time_s: f64,
    pub accepted_fraction: f64,
    pub filter_fraction: f64,
    pub align_fraction: f64,
    pub n_pairs: usize,
    pub n_aligned: usize,
}

/// Filters (optionally) and then fully aligns every surviving pair.
pub fn end_to_end(
    pairs: &[PairRecord],
    params: &FilterParams,
    use_filter: bool,
) -> Result<E2EBreakdown, FilterError> {
    let (survivors, filter_time): (Vec<&PairRecord>, Duration) = if use_filter {
        let (verdicts, t) = filter_batch(pairs, params)?;
        (
            pairs.iter().zip(&verdicts).filter(|(_, v)| v.accept).map(|(p, _)| p).collect(),
            t,
        )
    } else {
        (pairs.iter().collect(), Duration::ZERO)
    };
    let start = Instant::now();
    let _distances: Vec<usize> = survivors
        .par_iter()
        .map(|p| align_full(&p.read, &p.anchored_slice()).0)
        .collect();
    let align_time = start.elapsed();
    let total = filter_time + align_time;
    let (f, a, t) = (filter_time.as_secs_f64(), align_time.as_secs_f64(), total.as_secs_f64());
    let (filter_fraction, align_fraction) = if t > 0.0 { (f / t, 1.0 - f / t) } else { (0.0, 1.0) };
    Ok(E2EBreakdown {
        filter_time_s: f,
        align_time_s: a,
        end_to_end_time_s: t,
        accepted_fraction: if pairs.is_empty() { 1.0 } else { ratio(survivors.len() as u64, pairs.len() as u64) },
        filter_fraction,
        align_fraction,
        n_pairs: pairs.len(),
        n_aligned: survivors.len(),
    })
}
