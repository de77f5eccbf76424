//! Segment-based pre-alignment filtering for long reads.
//!
//! The crate is organised bottom-up:
//!
//! - [`seq`]: 2-bit packed sequences, read/reference pair records, a
//!   planted-edit dataset generator and the tab-separated pair file format.
//! - [`filter`]: the segment/shift exact-match filter, in an idealised
//!   software mode and a mode that follows the accelerator's data layout.
//! - [`oracle`]: exact (banded and full) Levenshtein distance, used as ground
//!   truth and as the post-filter alignment stage.
//! - [`cimsim`]: a functional and cycle-level model of the compute-in-memory
//!   accelerator (rank, bank groups, banks, sub-arrays, tiles, TCAM stages).
//! - [`eval`]: confusion matrices, parameter sweeps, end-to-end timing and
//!   report emission.

pub mod cimsim;
pub mod eval;
pub mod filter;
pub mod oracle;
pub mod seq;

pub use filter::{FilterMode, FilterParams, Verdict};
pub use seq::{EncodedSeq, PairRecord};
