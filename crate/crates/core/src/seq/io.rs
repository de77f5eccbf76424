//! Tab-separated pair files: `id<TAB>phi<TAB>read<TAB>ref_window`, `#` comments.

use std::fs;
use std::path::Path;

use super::{EncodedSeq, PairRecord, SeqError};

pub fn format_pairs(pairs: &[PairRecord]) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", p.id, p.phi, p.read, p.ref_window));
    }
    out
}

pub fn parse_pairs(text: &str) -> Result<Vec<PairRecord>, SeqError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 4 {
            return Err(SeqError::ParseError {
                line,
                reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let parse_err = |what: &str, e: String| SeqError::ParseError {
            line,
            reason: format!("{what}: {e}"),
        };
        let id: u64 = fields[0].parse().map_err(|e| parse_err("id", format!("{e}")))?;
        let phi: u64 = fields[1].parse().map_err(|e| parse_err("phi", format!("{e}")))?;
        let read = EncodedSeq::encode(fields[2]).map_err(|e| parse_err("read", e.to_string()))?;
        let ref_window =
            EncodedSeq::encode(fields[3]).map_err(|e| parse_err("ref_window", e.to_string()))?;
        let (read_len, ref_len) = (read.len(), ref_window.len());
        let rec = PairRecord::new(id, phi, read, ref_window).ok_or(SeqError::PadMismatch {
            line,
            read_len,
            ref_len,
        })?;
        pairs.push(rec);
    }
    Ok(pairs)
}

pub fn write_pairs(path: impl AsRef<Path>, pairs: &[PairRecord]) -> Result<(), SeqError> {
    let path = path.as_ref();
    fs::write(path, format_pairs(pairs)).map_err(|e| SeqError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<PairRecord>, SeqError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| SeqError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_pairs(&text)
}
