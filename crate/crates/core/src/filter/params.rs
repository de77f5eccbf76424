use serde::{Deserialize, Serialize};

use super::FilterError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    /// Segments start at the read's first base; every relative shift is probed directly.
    #[default]
    #[serde(alias = "ref")]
    Reference,
    /// Segments follow the accelerator's word-set grid and shifts are swept in
    /// shift-sets with a read-side displacement.
    #[serde(alias = "hw")]
    HardwareFaithful,
}

impl FilterMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterMode::Reference => "ref",
            FilterMode::HardwareFaithful => "hw",
        }
    }
}

impl std::str::FromStr for FilterMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ref" | "reference" => Ok(FilterMode::Reference),
            "hw" | "hardware" | "hardware-faithful" => Ok(FilterMode::HardwareFaithful),
            other => Err(format!("unknown filter mode {other:?} (expected ref or hw)")),
        }
    }
}

pub const DEFAULT_SEGMENT_LEN: usize = 8;
pub const DEFAULT_SHIFT_SET_WIDTH: usize = 8;
/// 4 bank groups x 32-bit words = 128 bits = 64 bases.
pub const DEFAULT_WORDSET_BASES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterParams {
    /// Segment length in bases.
    pub segment_len: usize,
    /// Edit-distance threshold.
    pub threshold: usize,
    #[serde(default)]
    pub mode: FilterMode,
    /// Shifts per shift-set.
    #[serde(default = "default_ws")]
    pub shift_set_width: usize,
    /// Word-set width in bases.
    #[serde(default = "default_wordset")]
    pub wordset_bases: usize,
}

fn default_ws() -> usize {
    DEFAULT_SHIFT_SET_WIDTH
}

fn default_wordset() -> usize {
    DEFAULT_WORDSET_BASES
}

impl FilterParams {
    pub fn new(segment_len: usize, threshold: usize) -> Self {
        Self {
            segment_len,
            threshold,
            mode: FilterMode::Reference,
            shift_set_width: DEFAULT_SHIFT_SET_WIDTH,
            wordset_bases: DEFAULT_WORDSET_BASES,
        }
    }

    pub fn with_mode(mut self, mode: FilterMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_shift_set_width(mut self, ws: usize) -> Self {
        self.shift_set_width = ws;
        self
    }

    pub fn with_wordset_bases(mut self, bases: usize) -> Self {
        self.wordset_bases = bases;
        self
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        if self.segment_len < 1 {
            return Err(FilterError::InvalidParams("segment length must be >= 1".into()));
        }
        if self.shift_set_width < 1 {
            return Err(FilterError::InvalidParams("shift-set width must be >= 1".into()));
        }
        if self.wordset_bases < self.segment_len {
            return Err(FilterError::InvalidParams(format!(
                "word-set width {} is smaller than segment length {}",
                self.wordset_bases, self.segment_len
            )));
        }
        Ok(())
    }

    /// Read-side duplications available inside one shift-set (`Ws - 1`).
    pub fn read_shift_bound(&self) -> usize {
        self.shift_set_width - 1
    }

    /// Number of shift-sets needed to cover `2E + 1` relative shifts.
    pub fn n_shift_sets(&self) -> usize {
        (2 * self.threshold + 1).div_ceil(self.shift_set_width)
    }
}
