//! Verdict and label CSV files.

use std::collections::BTreeMap;
use std::path::Path;

use segsift::filter::Verdict;
use segsift::oracle::Distance;

use crate::error::{io_error, CliError};

pub const VERDICT_HEADER: &str = "id,accept,matches,n_segments";
pub const LABEL_HEADER: &str = "id,distance,label";

pub fn format_verdicts(verdicts: &[Verdict]) -> String {
    let mut rows: Vec<&Verdict> = verdicts.iter().collect();
    rows.sort_by_key(|v| v.id);
    let mut out = format!("{VERDICT_HEADER}\n");
    for v in rows {
        out.push_str(&format!("{},{},{},{}\n", v.id, v.accept as u8, v.matches, v.n_segments));
    }
    out
}

pub fn format_labels(labels: &[(u64, Distance)]) -> String {
    let mut rows = labels.to_vec();
    rows.sort_by_key(|r| r.0);
    let mut out = format!("{LABEL_HEADER}\n");
    for (id, d) in rows {
        let (dist, label) = match d {
            Distance::Exact(d) => (d.to_string(), 1),
            Distance::ExceedsBand(k) => (format!(">{k}"), 0),
        };
        out.push_str(&format!("{id},{dist},{label}\n"));
    }
    out
}

/// Reads `id -> flag` from column `col` of a CSV written by this tool.
fn read_flags(path: &Path, header: &str, col: usize) -> Result<BTreeMap<u64, bool>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(CliError::Data(format!("{}: expected header {header:?}", path.display())));
    }
    let mut out = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let bad = || CliError::Data(format!("{}:{}: malformed row {line:?}", path.display(), i + 2));
        if fields.len() != header.split(',').count() {
            return Err(bad());
        }
        let id: u64 = fields[0].parse().map_err(|_| bad())?;
        let flag = match fields[col] {
            "1" => true,
            "0" => false,
            _ => return Err(bad()),
        };
        if out.insert(id, flag).is_some() {
            return Err(CliError::Data(format!("{}: duplicate id {id}", path.display())));
        }
    }
    Ok(out)
}

pub fn read_verdicts(path: &Path) -> Result<BTreeMap<u64, bool>, CliError> {
    read_flags(path, VERDICT_HEADER, 1)
}

pub fn read_labels(path: &Path) -> Result<BTreeMap<u64, bool>, CliError> {
    read_flags(path, LABEL_HEADER, 2)
}
