//! Functional and cycle-level model of the in-memory filter.
//!
//! The reference window of every pair is laid out over the tiles
//! ([`Layout`]); the rank then streams (segment group, shift-set) jobs to
//! sub-arrays, which XOR the displaced read against stored shifted rows,
//! detect exact segment matches with the PD/OS TCAMs and send per-segment
//! miss bits back over a shared bank bus. The rank ANDs the miss bits of all
//! shift-sets of a group, counts them nibble-wise and compares the sum with
//! the threshold. Verdicts are bit-identical to the hardware-mode filter.

mod config;
mod engine;
mod layout;
mod mask;
mod pareto;
mod subarray;
mod tcam;
mod tile;

use thiserror::Error;

use crate::filter::FilterError;

pub use config::{HwConfig, TimingTable};
pub use engine::{
    simulate, simulate_with, write_trace_csv, SimOptions, SimRun, SimStats, SubarrayStats,
    TraceEvent, TraceKind,
};
pub use layout::{map_reference, CellAddr, Layout, PairLayout, Placement, RefBit, TileAddr};
pub use mask::{build_read_mask, WordSetMask};
pub use pareto::{pareto_front, pareto_sweep, ParetoRecord};
pub use subarray::{subarray_step, StepInput};
pub use tcam::{count_misses, count_tcam, TcamTables, TernaryPattern};
pub use tile::{tile_op, Tile, TileInstr, QUERY_ROW};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid hardware configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("layout needs at least {wordsets} word-set slots but only {capacity} exist")]
    CapacityExceeded { wordsets: usize, capacity: usize },
    #[error("tile address row {row}, column {col} out of range")]
    AddressOutOfRange { row: usize, col: usize },
    #[error("no event can progress at cycle {cycle} while work is pending")]
    DeadlockDetected { cycle: u64 },
    #[error("duplicate pair id {0}")]
    DuplicateId(u64),
    #[error("internal simulator error: {0}")]
    Internal(String),
    #[error("{0}")]
    Io(String),
}
