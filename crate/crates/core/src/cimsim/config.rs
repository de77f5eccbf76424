use serde::{Deserialize, Serialize};

use super::SimError;
use crate::filter::{FilterMode, FilterParams};

/// Cycle cost of each simulated event.
///
/// The presets are placeholders chosen to give plausible *relative* costs;
/// they are not derived from any device model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingTable {
    pub tile_write: u64,
    pub tile_xor: u64,
    pub subarray_pipeline: u64,
    pub tcam_query: u64,
    pub bus_transfer: u64,
    pub rank_dispatch: u64,
}

impl TimingTable {
    /// Resistive crossbar: XOR is sensed in place.
    pub fn reram() -> Self {
        Self {
            tile_write: 2,
            tile_xor: 2,
            subarray_pipeline: 7,
            tcam_query: 1,
            bus_transfer: 1,
            rank_dispatch: 1,
        }
    }

    /// DRAM-like tile: every XOR pays an extra row copy.
    pub fn cmos() -> Self {
        Self {
            tile_write: 1,
            tile_xor: 2 + 4,
            subarray_pipeline: 7,
            tcam_query: 1,
            bus_transfer: 1,
            rank_dispatch: 1,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "reram" => Some(Self::reram()),
            "cmos" | "dram" => Some(Self::cmos()),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        let all = [
            ("tile_write", self.tile_write),
            ("tile_xor", self.tile_xor),
            ("subarray_pipeline", self.subarray_pipeline),
            ("tcam_query", self.tcam_query),
            ("bus_transfer", self.bus_transfer),
            ("rank_dispatch", self.rank_dispatch),
        ];
        for (name, v) in all {
            if v < 1 {
                return Err(SimError::InvalidConfig(format!("timing.{name} must be >= 1")));
            }
        }
        Ok(())
    }
}

impl Default for TimingTable {
    fn default() -> Self {
        Self::reram()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HwConfig {
    pub n_bank_groups: usize,
    pub n_banks_per_group: usize,
    pub n_subarrays_per_bank: usize,
    pub n_tiles_per_subarray: usize,
    /// Bits sensed per tile operation.
    pub sa_per_tile: usize,
    pub crossbar_rows: usize,
    pub crossbar_cols: usize,
    pub word_bits: usize,
    /// Words buffered by the rank before they are emptied in parallel.
    pub wpb: usize,
    /// Shift-set width.
    pub ws: usize,
    pub fifo_depth: usize,
    /// Low id bits that travel with a job; the rest stay at the rank.
    pub id_lsb_bits: u32,
    pub timing: TimingTable,
    pub clock_ns: f64,
}

impl Default for HwConfig {
    fn default() -> Self {
        Self {
            n_bank_groups: 4,
            n_banks_per_group: 4,
            n_subarrays_per_bank: 8,
            n_tiles_per_subarray: 16,
            sa_per_tile: 8,
            crossbar_rows: 64,
            crossbar_cols: 64,
            word_bits: 32,
            wpb: 4,
            ws: 8,
            fifo_depth: 4,
            id_lsb_bits: 8,
            timing: TimingTable::default(),
            clock_ns: 1.0,
        }
    }
}

impl HwConfig {
    pub fn wordset_bits(&self) -> usize {
        self.word_bits * self.n_bank_groups
    }

    pub fn wordset_bases(&self) -> usize {
        self.wordset_bits() / 2
    }

    pub fn word_bases(&self) -> usize {
        self.word_bits / 2
    }

    pub fn tiles_per_word(&self) -> usize {
        self.word_bits / self.sa_per_tile
    }

    pub fn n_subarrays(&self) -> usize {
        self.n_bank_groups * self.n_banks_per_group * self.n_subarrays_per_bank
    }

    pub fn tile_count(&self) -> usize {
        self.n_subarrays() * self.n_tiles_per_subarray
    }

    /// Filter parameters whose hardware-mode verdicts this configuration reproduces.
    pub fn filter_params(&self, segment_len: usize, threshold: usize) -> FilterParams {
        FilterParams::new(segment_len, threshold)
            .with_mode(FilterMode::HardwareFaithful)
            .with_shift_set_width(self.ws)
            .with_wordset_bases(self.wordset_bases())
    }

    /// Structural checks independent of the filter parameters.
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        let counts = [
            ("n_bank_groups", self.n_bank_groups),
            ("n_banks_per_group", self.n_banks_per_group),
            ("n_subarrays_per_bank", self.n_subarrays_per_bank),
            ("n_tiles_per_subarray", self.n_tiles_per_subarray),
            ("sa_per_tile", self.sa_per_tile),
            ("crossbar_cols", self.crossbar_cols),
            ("word_bits", self.word_bits),
            ("wpb", self.wpb),
            ("ws", self.ws),
            ("fifo_depth", self.fifo_depth),
        ];
        for (name, v) in counts {
            if v < 1 {
                return bad(format!("{name} must be >= 1"));
            }
        }
        if self.sa_per_tile > 64 {
            return bad(format!("sa_per_tile {} exceeds 64", self.sa_per_tile));
        }
        if !self.word_bits.is_multiple_of(2) || self.word_bits > 128 {
            return bad(format!("word_bits {} must be even and at most 128", self.word_bits));
        }
        if !self.word_bits.is_multiple_of(self.sa_per_tile) {
            return bad(format!(
                "word_bits {} is not a multiple of sa_per_tile {}",
                self.word_bits, self.sa_per_tile
            ));
        }
        if self.n_tiles_per_subarray < self.tiles_per_word() {
            return bad(format!(
                "a word needs {} tiles but a sub-array has {}",
                self.tiles_per_word(),
                self.n_tiles_per_subarray
            ));
        }
        if !self.crossbar_cols.is_multiple_of(self.sa_per_tile) {
            return bad(format!(
                "crossbar_cols {} is not a multiple of sa_per_tile {}",
                self.crossbar_cols, self.sa_per_tile
            ));
        }
        if self.crossbar_rows < self.ws + 1 {
            return bad(format!(
                "crossbar_rows {} < ws + 1 = {}",
                self.crossbar_rows,
                self.ws + 1
            ));
        }
        if self.id_lsb_bits > 20 {
            return bad(format!("id_lsb_bits {} exceeds 20", self.id_lsb_bits));
        }
        if !(self.clock_ns > 0.0) {
            return bad("clock_ns must be positive".into());
        }
        self.timing.validate()
    }

    /// Checks that `params` can run on this configuration.
    pub fn validate_for(&self, params: &FilterParams) -> Result<(), SimError> {
        self.validate()?;
        params.validate().map_err(SimError::Filter)?;
        let t = params.segment_len;
        if params.mode != FilterMode::HardwareFaithful {
            return Err(SimError::InvalidConfig(
                "simulation requires hardware-faithful filter mode".into(),
            ));
        }
        if !self.wordset_bits().is_multiple_of(2 * t) || !self.word_bits.is_multiple_of(2 * t) {
            return Err(SimError::InvalidConfig(format!(
                "segment length {t} does not tile a {}-bit word",
                self.word_bits
            )));
        }
        if params.shift_set_width != self.ws {
            return Err(SimError::InvalidConfig(format!(
                "filter shift-set width {} differs from hardware ws {}",
                params.shift_set_width, self.ws
            )));
        }
        if params.wordset_bases != self.wordset_bases() {
            return Err(SimError::InvalidConfig(format!(
                "filter word-set width {} differs from hardware {}",
                params.wordset_bases,
                self.wordset_bases()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = HwConfig::default();
        c.validate().unwrap();
        assert_eq!(c.wordset_bits(), 128);
        assert_eq!(c.wordset_bases(), 64);
        assert_eq!(c.tiles_per_word(), 4);
        c.validate_for(&c.filter_params(8, 10)).unwrap();
    }

    #[test]
    fn rejects_bad_geometry() {
        let mut c = HwConfig {
            crossbar_rows: 8,
            ..HwConfig::default()
        };
        assert!(c.validate().is_err());
        c.crossbar_rows = 9;
        c.validate().unwrap();
        // 32-bit words hold whole segments only for T dividing 16
        assert!(c.validate_for(&c.filter_params(3, 2)).is_err());
        assert!(c.validate_for(&c.filter_params(16, 2)).is_ok());
        assert!(c.validate_for(&c.filter_params(32, 2)).is_err());
        assert!(c.validate_for(&FilterParams::new(8, 2)).is_err());
        c.timing.tcam_query = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = HwConfig {
            timing: TimingTable::cmos(),
            n_subarrays_per_bank: 3,
            ..HwConfig::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<HwConfig>(&text).unwrap(), c);
        let partial: HwConfig = serde_json::from_str(r#"{"n_banks_per_group": 2}"#).unwrap();
        assert_eq!(partial.n_banks_per_group, 2);
        assert!(serde_json::from_str::<HwConfig>(r#"{"banks": 2}"#).is_err());
    }
}
