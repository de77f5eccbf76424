//! Sequences, pair records, dataset generation and pair-file IO.

mod encoded;
mod generate;
mod io;
mod pair;

pub use encoded::{decode_base, encode_base, EncodedSeq};
pub use generate::{generate_pairs, generate_record, DatasetSpec, EditMix, PhiDist};
pub use io::{format_pairs, parse_pairs, read_pairs, write_pairs};
pub use pair::PairRecord;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("invalid base {ch:?} at position {position}")]
    InvalidBase { position: usize, ch: char },
    #[error("invalid dataset spec: {0}")]
    SpecInvalid(String),
    #[error("line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("line {line}: reference window length {ref_len} and read length {read_len} do not admit a symmetric pad")]
    PadMismatch {
        line: usize,
        read_len: usize,
        ref_len: usize,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
