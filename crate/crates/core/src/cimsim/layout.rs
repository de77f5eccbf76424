use std::collections::{BTreeMap, HashMap};

use super::tile::{tile_op, Tile, TileInstr, QUERY_ROW};
use super::{HwConfig, SimError};
use crate::seq::PairRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileAddr {
    pub bank_group: usize,
    pub bank: usize,
    pub subarray: usize,
    pub tile: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellAddr {
    pub tile: TileAddr,
    pub row: usize,
    pub col: usize,
}

/// Where one word-set of a pair's reference lives.
///
/// The same (bank, sub-array, tile group, column slot, row block) is used in
/// every bank group; bank group `g` holds word `g` of the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Placement {
    pub wordset: i64,
    pub bank: usize,
    pub subarray: usize,
    pub tile_group: usize,
    pub col_slot: usize,
    pub row_block: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairLayout {
    pub id: u64,
    /// Global base range `[lo, hi)` covered by the reference window.
    pub window: (i64, i64),
    pub placements: Vec<Placement>,
}

impl PairLayout {
    fn first_wordset(&self) -> i64 {
        self.placements[0].wordset
    }
}

/// A reference bit: base at global position `base`, `bit` 0 = high, 1 = low,
/// as stored in shifted row `row`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RefBit {
    pub pair: usize,
    pub base: i64,
    pub bit: usize,
    pub row: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Geometry {
    pub wordset_bases: i64,
    pub word_bases: i64,
    pub n: usize,
    pub tiles_per_word: usize,
    pub tile_groups: usize,
    pub col_slots: usize,
    pub row_blocks: usize,
    pub ws: usize,
    pub banks: usize,
    pub subarrays: usize,
}

impl Geometry {
    pub fn new(cfg: &HwConfig) -> Self {
        Self {
            wordset_bases: cfg.wordset_bases() as i64,
            word_bases: cfg.word_bases() as i64,
            n: cfg.sa_per_tile,
            tiles_per_word: cfg.tiles_per_word(),
            tile_groups: cfg.n_tiles_per_subarray / cfg.tiles_per_word(),
            col_slots: cfg.crossbar_cols / cfg.sa_per_tile,
            row_blocks: (cfg.crossbar_rows - 1) / cfg.ws,
            ws: cfg.ws,
            banks: cfg.n_banks_per_group,
            subarrays: cfg.n_subarrays_per_bank,
        }
    }

    pub fn capacity(&self) -> usize {
        self.banks * self.subarrays * self.tile_groups * self.col_slots * self.row_blocks
    }
}

type SlotKey = (usize, usize, usize, usize, usize);

fn slot_key(p: &Placement) -> SlotKey {
    (p.bank, p.subarray, p.tile_group, p.col_slot, p.row_block)
}

/// Reference data of a batch of pairs laid out over the tiles.
#[derive(Debug, Clone)]
pub struct Layout {
    geom: Geometry,
    cfg: HwConfig,
    pairs: Vec<PairLayout>,
    tiles: BTreeMap<TileAddr, Tile>,
    owners: HashMap<SlotKey, (usize, usize)>,
    next_slot: usize,
}

/// Lays out a single pair's reference window.
pub fn map_reference(pair: &PairRecord, cfg: &HwConfig) -> Result<Layout, SimError> {
    Layout::build(std::slice::from_ref(pair), cfg)
}

impl Layout {
    pub fn new(cfg: &HwConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        Ok(Self {
            geom: Geometry::new(cfg),
            cfg: cfg.clone(),
            pairs: Vec::new(),
            tiles: BTreeMap::new(),
            owners: HashMap::new(),
            next_slot: 0,
        })
    }

    /// Consecutive word-sets, within and across pairs, go to consecutive banks.
    pub fn build(pairs: &[PairRecord], cfg: &HwConfig) -> Result<Self, SimError> {
        let mut layout = Self::new(cfg)?;
        for pair in pairs {
            layout.push(pair)?;
        }
        Ok(layout)
    }

    pub fn pairs(&self) -> &[PairLayout] {
        &self.pairs
    }

    pub fn tiles_used(&self) -> usize {
        self.tiles.len()
    }

    fn allocate(&mut self, wordset: i64) -> Result<Placement, SimError> {
        let g = self.geom;
        let k = self.next_slot;
        let s = k / (g.banks * g.subarrays);
        let row_block = s / (g.tile_groups * g.col_slots);
        if row_block >= g.row_blocks {
            return Err(SimError::CapacityExceeded {
                wordsets: k + 1,
                capacity: g.capacity(),
            });
        }
        self.next_slot += 1;
        Ok(Placement {
            wordset,
            bank: k % g.banks,
            subarray: (k / g.banks) % g.subarrays,
            tile_group: s % g.tile_groups,
            col_slot: (s / g.tile_groups) % g.col_slots,
            row_block,
        })
    }

    fn push(&mut self, pair: &PairRecord) -> Result<(), SimError> {
        let g = self.geom;
        let lo = pair.phi as i64 - pair.pad as i64;
        let hi = lo + pair.ref_window.len() as i64;
        let index = self.pairs.len();
        let mut placements = Vec::new();
        if hi > lo {
            for w in lo.div_euclid(g.wordset_bases)..=(hi - 1).div_euclid(g.wordset_bases) {
                let p = self.allocate(w)?;
                self.owners.insert(slot_key(&p), (index, placements.len()));
                placements.push(p);
            }
        }
        self.pairs.push(PairLayout {
            id: pair.id,
            window: (lo, hi),
            placements,
        });
        let code = |x: i64| -> u8 {
            if x >= lo && x < hi {
                pair.ref_window.code((x - lo) as usize)
            } else {
                0
            }
        };
        for pi in 0..self.pairs[index].placements.len() {
            let pl = self.pairs[index].placements[pi];
            for bg in 0..self.cfg.n_bank_groups {
                let word_origin = pl.wordset * g.wordset_bases + bg as i64 * g.word_bases;
                for r in 0..g.ws {
                    for t in 0..g.tiles_per_word {
                        let mut data = 0u64;
                        for k in 0..g.n {
                            let b = t * g.n + k;
                            let c = code(word_origin + (b / 2) as i64 + r as i64);
                            let bit = if b.is_multiple_of(2) { c >> 1 } else { c } & 1;
                            data |= (bit as u64) << k;
                        }
                        let cell = self.cell_of(pl, bg, t * g.n, r);
                        tile_op(self.tile_mut(cell.tile), TileInstr::Write, cell.row, cell.col, data)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn cell_of(&self, pl: Placement, bank_group: usize, word_bit: usize, row: usize) -> CellAddr {
        let g = self.geom;
        CellAddr {
            tile: TileAddr {
                bank_group,
                bank: pl.bank,
                subarray: pl.subarray,
                tile: pl.tile_group * g.tiles_per_word + word_bit / g.n,
            },
            row: 1 + pl.row_block * g.ws + row,
            col: pl.col_slot * g.n + word_bit % g.n,
        }
    }

    pub(crate) fn tile_mut(&mut self, addr: TileAddr) -> &mut Tile {
        let (rows, cols, n) = (self.cfg.crossbar_rows, self.cfg.crossbar_cols, self.cfg.sa_per_tile);
        self.tiles.entry(addr).or_insert_with(|| Tile::new(rows, cols, n))
    }

    pub(crate) fn geometry(&self) -> Geometry {
        self.geom
    }

    /// Placement of word-set `w` of pair `pair`, if stored.
    pub fn placement(&self, pair: usize, w: i64) -> Option<Placement> {
        let pl = &self.pairs[pair];
        if pl.placements.is_empty() {
            return None;
        }
        let i = w - pl.first_wordset();
        (i >= 0).then(|| pl.placements.get(i as usize).copied()).flatten()
    }

    /// Cell holding `bit` of the base at global column `base` in shifted row `row`
    /// (row `usize::MAX` addresses the query row).
    pub fn locate(&self, r: RefBit) -> Option<CellAddr> {
        let g = self.geom;
        if r.bit > 1 || (r.row >= g.ws && r.row != usize::MAX) {
            return None;
        }
        let w = r.base.div_euclid(g.wordset_bases);
        let pl = self.placement(r.pair, w)?;
        let o = r.base - w * g.wordset_bases;
        let bg = (o / g.word_bases) as usize;
        let word_bit = 2 * (o % g.word_bases) as usize + r.bit;
        let mut cell = self.cell_of(pl, bg, word_bit, r.row.min(g.ws - 1));
        if r.row == usize::MAX {
            cell.row = QUERY_ROW;
        }
        Some(cell)
    }

    /// Inverse of [`Layout::locate`] for stored reference cells.
    pub fn resolve(&self, cell: CellAddr) -> Option<RefBit> {
        let g = self.geom;
        if cell.row == QUERY_ROW || cell.col >= g.col_slots * g.n {
            return None;
        }
        let tile_group = cell.tile.tile / g.tiles_per_word;
        let row_block = (cell.row - 1) / g.ws;
        let key = (
            cell.tile.bank,
            cell.tile.subarray,
            tile_group,
            cell.col / g.n,
            row_block,
        );
        let &(pair, pi) = self.owners.get(&key)?;
        let pl = self.pairs[pair].placements[pi];
        let word_bit = (cell.tile.tile % g.tiles_per_word) * g.n + cell.col % g.n;
        let base = pl.wordset * g.wordset_bases
            + cell.tile.bank_group as i64 * g.word_bases
            + (word_bit / 2) as i64;
        Some(RefBit {
            pair,
            base,
            bit: word_bit % 2,
            row: (cell.row - 1) % g.ws,
        })
    }

    pub fn read_cell(&self, cell: CellAddr) -> bool {
        self.tiles.get(&cell.tile).is_some_and(|t| t.get(cell.row, cell.col))
    }
}
