use super::SimError;

/// Row 0 of every tile holds the displaced read.
pub const QUERY_ROW: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileInstr {
    Idle,
    Read,
    /// Stores the low `n` bits of the data word.
    Write,
    /// Query row XOR addressed row.
    Xor,
}

/// A crossbar of `rows x cols` one-bit cells sensed `n` columns at a time.
///
/// Column `c` of an `n`-bit access starting at `col` maps to bit `c - col`
/// of the data word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    rows: usize,
    cols: usize,
    n: usize,
    cells: Vec<u64>,
}

impl Tile {
    pub fn new(rows: usize, cols: usize, n: usize) -> Self {
        assert!((1..=64).contains(&n));
        Self {
            rows,
            cols,
            n,
            cells: vec![0; rows * cols.div_ceil(64)],
        }
    }

    fn stride(&self) -> usize {
        self.cols.div_ceil(64)
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.stride() + col / 64] >> (col % 64) & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, v: bool) {
        let i = row * self.stride() + col / 64;
        let m = 1u64 << (col % 64);
        if v {
            self.cells[i] |= m;
        } else {
            self.cells[i] &= !m;
        }
    }

    fn span(&self, row: usize, col: usize) -> u64 {
        (0..self.n).fold(0, |acc, k| acc | (self.get(row, col + k) as u64) << k)
    }
}

pub fn tile_op(
    tile: &mut Tile,
    instr: TileInstr,
    row: usize,
    col: usize,
    data: u64,
) -> Result<Option<u64>, SimError> {
    if instr == TileInstr::Idle {
        return Ok(None);
    }
    if row >= tile.rows || col + tile.n > tile.cols {
        return Err(SimError::AddressOutOfRange { row, col });
    }
    Ok(match instr {
        TileInstr::Idle => None,
        TileInstr::Read => Some(tile.span(row, col)),
        TileInstr::Write => {
            for k in 0..tile.n {
                tile.set(row, col + k, data >> k & 1 == 1);
            }
            None
        }
        TileInstr::Xor => Some(tile.span(QUERY_ROW, col) ^ tile.span(row, col)),
    })
}
