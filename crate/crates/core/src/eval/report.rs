use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SweepRow;
use crate::seq::SeqError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown report format {other:?} (expected csv or json)")),
        }
    }
}

/// One long-format observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset: String,
    pub seed: u64,
    pub t: usize,
    pub e: usize,
    pub mode: String,
    pub metric: String,
    pub value: f64,
}

const HEADER: [&str; 7] = ["dataset", "seed", "t", "e", "mode", "metric", "value"];

/// Flattens sweep rows into one observation per metric.
pub fn report_rows(dataset: &str, seed: u64, rows: &[SweepRow]) -> Vec<ReportRow> {
    let mut out = Vec::new();
    for r in rows {
        let m = &r.matrix;
        let metrics = [
            ("tp", m.tp as f64),
            ("fp", m.fp as f64),
            ("tn", m.tn as f64),
            ("fn", m.fn_ as f64),
            ("tp_rate", m.tp_rate()),
            ("fp_rate", m.fp_rate()),
            ("tn_rate", m.tn_rate()),
            ("fn_rate", m.fn_rate()),
            ("sensitivity", m.sensitivity()),
            ("p_rate", m.p_rate()),
            ("oracle_positive_rate", m.oracle_positive_rate()),
            ("in_roi", r.in_roi as u8 as f64),
        ];
        for (name, value) in metrics {
            out.push(ReportRow {
                dataset: dataset.to_string(),
                seed,
                t: r.segment_len,
                e: r.threshold,
                mode: r.mode.as_str().to_string(),
                metric: name.to_string(),
                value,
            });
        }
    }
    out
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> SeqError {
    SeqError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn write_report(rows: &[ReportRow], path: &Path, format: ReportFormat) -> Result<(), SeqError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
            w.write_record(HEADER).map_err(|e| io_err(path, e))?;
            for r in rows {
                w.serialize(r).map_err(|e| io_err(path, e))?;
            }
            w.flush().map_err(|e| io_err(path, e))?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| io_err(path, e))?;
            out.write_all(b"\n").map_err(|e| io_err(path, e))?;
        }
    }
    out.flush().map_err(|e| io_err(path, e))
}

pub fn read_report_json(path: &Path) -> Result<Vec<ReportRow>, SeqError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| io_err(path, e))
}
