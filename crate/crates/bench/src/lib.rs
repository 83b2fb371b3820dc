//! Benchmark harness: repeated seeded solves per instance, gap / time /
//! feasibility aggregation against best-known values, CSV and markdown
//! output, and the constructive-vs-ILS comparison.

mod batch;
mod compare;
mod export;
mod family;
mod reference;
mod report;

use std::path::PathBuf;

pub use batch::{run_batch, run_batch_with_threads, run_seed, BenchInstance, BenchRow, RunRecord};
pub use compare::{initial_vs_ils, ComparisonRun, InitialClass, InitialVsIls};
pub use export::{export_csv, read_detail, read_summary, DetailRecord, SummaryRecord};
pub use family::{write_family, FamilyIndexRecord};
pub use reference::{builtin_reference, load_reference, parse_reference, ReferenceRow};
pub use report::{render_comparison, render_markdown};

/// Environment variable overriding the worker-pool width.
pub const THREADS_ENV: &str = "SEATPLAN_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad reference row {line}: {msg}")]
    Reference { line: usize, msg: String },
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Worker-pool width from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}
