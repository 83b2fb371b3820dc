use std::fs;
use std::path::Path;

use serde::Serialize;

use seatplan_core::gen::{GeneratedInstance, Screen};

use crate::BenchError;

/// A line of `index.csv` in a family directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyIndexRecord {
    /// 0 for excluded instances.
    pub id: usize,
    pub n: usize,
    pub conflict_student_pct: f64,
    pub conflict_edge_pct: f64,
    pub replicate: usize,
    pub verdict: String,
    pub reason: String,
    pub file: String,
}

fn verdict(s: &Screen) -> (String, String) {
    match s {
        Screen::Feasible => ("feasible".into(), String::new()),
        Screen::Plausible => ("plausible".into(), String::new()),
        Screen::Infeasible(r) => ("infeasible".into(), r.clone()),
    }
}

/// Writes each kept instance as `instance_NNN.json`, each excluded one as
/// `excluded_NNN.json`, and an `index.csv` listing both.
pub fn write_family(dir: &Path, kept: &[GeneratedInstance], excluded: &[GeneratedInstance]) -> Result<Vec<FamilyIndexRecord>, BenchError> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let mut index = Vec::new();
    let named = kept
        .iter()
        .map(|g| (g, format!("instance_{:03}.json", g.id)))
        .chain(excluded.iter().enumerate().map(|(k, g)| (g, format!("excluded_{:03}.json", k + 1))));
    for (g, name) in named {
        let path = dir.join(&name);
        fs::write(&path, g.file.to_json()).map_err(|e| BenchError::io(&path, e))?;
        let (verdict, reason) = verdict(&g.screen);
        index.push(FamilyIndexRecord {
            id: g.id,
            n: g.n,
            conflict_student_pct: g.conflict_student_pct,
            conflict_edge_pct: g.conflict_edge_pct,
            replicate: g.replicate,
            verdict,
            reason,
            file: name,
        });
    }
    let path = dir.join("index.csv");
    let mut w = csv::Writer::from_path(&path)?;
    for r in &index {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| BenchError::io(&path, e))?;
    Ok(index)
}
