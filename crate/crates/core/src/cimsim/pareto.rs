use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate, HwConfig, SimError};
use crate::seq::PairRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoRecord {
    pub config: usize,
    pub total_cycles: u64,
    pub tile_count: u64,
    pub active_tile_proxy: u64,
    /// On the (cycles, tile_count) front.
    pub front_tiles: bool,
    /// On the (cycles, active_tile_proxy) front.
    pub front_active: bool,
}

/// Minimisation front: a point is kept unless another is no worse on both
/// axes and strictly better on one.
pub fn pareto_front(points: &[(u64, u64)]) -> Vec<bool> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by_key(|&i| points[i]);
    let mut keep = vec![false; points.len()];
    let mut best_y = u64::MAX;
    let mut k = 0;
    while k < idx.len() {
        // equal points share a verdict
        let p = points[idx[k]];
        let mut j = k;
        while j < idx.len() && points[idx[j]] == p {
            j += 1;
        }
        if p.1 < best_y {
            for &i in &idx[k..j] {
                keep[i] = true;
            }
            best_y = p.1;
        }
        k = j;
    }
    keep
}

/// Simulates every configuration on the same pairs; configurations run concurrently.
pub fn pareto_sweep(
    pairs: &[PairRecord],
    configs: &[HwConfig],
    segment_len: usize,
    threshold: usize,
) -> Result<Vec<ParetoRecord>, SimError> {
    if configs.is_empty() {
        return Err(SimError::InvalidConfig("no configurations to sweep".into()));
    }
    let runs = configs
        .par_iter()
        .map(|cfg| simulate(pairs, cfg, &cfg.filter_params(segment_len, threshold)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out: Vec<ParetoRecord> = runs
        .iter()
        .zip(configs)
        .enumerate()
        .map(|(i, (s, cfg))| ParetoRecord {
            config: i,
            total_cycles: s.total_cycles,
            tile_count: cfg.tile_count() as u64,
            active_tile_proxy: (s.peak_active_subarrays * cfg.tiles_per_word()) as u64,
            front_tiles: false,
            front_active: false,
        })
        .collect();
    let tiles = pareto_front(&out.iter().map(|r| (r.total_cycles, r.tile_count)).collect::<Vec<_>>());
    let active = pareto_front(&out.iter().map(|r| (r.total_cycles, r.active_tile_proxy)).collect::<Vec<_>>());
    for (r, (a, b)) in out.iter_mut().zip(tiles.into_iter().zip(active)) {
        r.front_tiles = a;
        r.front_active = b;
    }
    Ok(out)
}
