use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::batch::BenchRow;
use crate::BenchError;

/// A line of the summary file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    #[serde(rename = "ID")]
    pub id: String,
    /// Empty when no run was feasible.
    #[serde(rename = "ILS_gap")]
    pub ils_gap: Option<f64>,
    #[serde(rename = "BKS")]
    pub bks: Option<i64>,
    #[serde(rename = "ILS_time")]
    pub ils_time: f64,
    #[serde(rename = "Fea_pct")]
    pub fea_pct: f64,
}

/// A line of the per-run detail file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailRecord {
    #[serde(rename = "ID")]
    pub id: String,
    pub run: usize,
    pub seed: u64,
    pub f: i64,
    pub f_p: i64,
    pub feasible: bool,
    pub gap: Option<f64>,
    pub time: f64,
    pub initial_f: i64,
    pub initial_feasible: bool,
    pub initial_time: f64,
}

const SUMMARY_HEADER: [&str; 5] = ["ID", "ILS_gap", "BKS", "ILS_time", "Fea_pct"];
const DETAIL_HEADER: [&str; 11] = [
    "ID",
    "run",
    "seed",
    "f",
    "f_p",
    "feasible",
    "gap",
    "time",
    "initial_f",
    "initial_feasible",
    "initial_time",
];

fn writer(path: &Path) -> Result<csv::Writer<File>, BenchError> {
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(file))
}

/// Writes the summary (one line per row, in input order) and the per-run
/// detail file. Gaps and percentages carry fixed precision; times are in
/// seconds.
pub fn export_csv(rows: &[BenchRow], summary: &Path, detail: &Path) -> Result<(), BenchError> {
    let mut w = writer(summary)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.id.clone(),
            r.avg_gap.map(|g| format!("{g:.6}")).unwrap_or_default(),
            r.bks.map(|b| b.to_string()).unwrap_or_default(),
            format!("{:.6}", r.avg_time),
            format!("{:.2}", r.fea_pct),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io(summary, e))?;

    let mut w = writer(detail)?;
    w.write_record(DETAIL_HEADER)?;
    for r in rows {
        for x in &r.runs {
            w.write_record([
                r.id.clone(),
                x.run.to_string(),
                x.seed.to_string(),
                x.f.to_string(),
                x.f_p.to_string(),
                x.feasible.to_string(),
                x.gap.map(|g| format!("{g:.6}")).unwrap_or_default(),
                format!("{:.6}", x.time),
                x.initial_f.to_string(),
                x.initial_feasible.to_string(),
                format!("{:.6}", x.initial_time),
            ])?;
        }
    }
    w.flush().map_err(|e| BenchError::io(detail, e))?;
    Ok(())
}

fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, BenchError> {
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(BenchError::from)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRecord>, BenchError> {
    read(path)
}

pub fn read_detail(path: &Path) -> Result<Vec<DetailRecord>, BenchError> {
    read(path)
}
