/// A ternary entry: bits where `care` is 1 must equal `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TernaryPattern {
    pub value: u64,
    pub care: u64,
}

impl TernaryPattern {
    #[inline]
    pub fn matches(&self, x: u64) -> bool {
        (x ^ self.value) & self.care == 0
    }
}

fn low_mask(t: usize) -> u64 {
    if t >= 64 {
        u64::MAX
    } else {
        (1u64 << t) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcamTables {
    /// Patterns over the `T`-entry base vector; hit `i` sets bit `i` of the hit flags.
    pub pd_patterns: Vec<TernaryPattern>,
    /// Patterns over the PD hit flags; any hit yields a match bit of 1.
    pub os_patterns: Vec<TernaryPattern>,
    pub shd_patterns: Option<Vec<TernaryPattern>>,
    pub count_map: [u8; 16],
}

impl TcamTables {
    /// Exact-match detection: a segment matches when every base entry is 0.
    pub fn exact_match(t: usize) -> Self {
        Self {
            pd_patterns: vec![TernaryPattern {
                value: 0,
                care: low_mask(t),
            }],
            os_patterns: vec![TernaryPattern { value: 1, care: 1 }],
            shd_patterns: None,
            count_map: std::array::from_fn(|n| (n as u8).count_ones() as u8),
        }
    }

    /// Adds the "101" and "1001" streak patterns at every offset of a `T`-entry vector.
    pub fn with_shd(mut self, t: usize) -> Self {
        let mut pats = Vec::new();
        for (value, width) in [(0b101u64, 3usize), (0b1001, 4)] {
            for off in 0..=t.saturating_sub(width) {
                if off + width <= t {
                    pats.push(TernaryPattern {
                        value: value << off,
                        care: low_mask(width) << off,
                    });
                }
            }
        }
        self.shd_patterns = Some(pats);
        self
    }

    pub fn pd_lookup(&self, base_vec: u64) -> u64 {
        self.pd_patterns
            .iter()
            .enumerate()
            .fold(0, |acc, (i, p)| acc | (p.matches(base_vec) as u64) << i)
    }

    pub fn os_lookup(&self, hits: u64) -> bool {
        self.os_patterns.iter().any(|p| p.matches(hits))
    }

    /// Whether any SHD streak pattern occurs in the base vector.
    pub fn shd_detect(&self, base_vec: u64) -> bool {
        self.shd_patterns
            .as_ref()
            .is_some_and(|p| p.iter().any(|p| p.matches(base_vec)))
    }

    pub fn is_valid(&self) -> bool {
        self.count_map[0] == 0 && self.pd_patterns.len() <= 64
    }
}

/// Edit count of a 4-bit nibble of segment-miss bits.
#[inline]
pub fn count_tcam(nibble: u8, tables: &TcamTables) -> u32 {
    tables.count_map[(nibble & 0xf) as usize] as u32
}

/// Sum of per-nibble counts over the low `width` bits of a miss vector.
pub fn count_misses(bits: u64, width: usize, tables: &TcamTables) -> u32 {
    (0..width.div_ceil(4))
        .map(|k| count_tcam((bits >> (4 * k)) as u8 & 0xf, tables))
        .sum()
}
