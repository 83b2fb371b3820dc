//! Published best-known values for the 131-instance benchmark family,
//! used as external BKS input.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::BenchError;

const BUILTIN: &str = include_str!("../data/reference_bks.csv");

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReferenceRow {
    #[serde(rename = "ID")]
    pub id: usize,
    #[serde(rename = "BKS")]
    pub bks: i64,
    #[serde(rename = "ILS_gap")]
    pub ils_gap: f64,
    #[serde(rename = "Gurobi_gap")]
    pub gurobi_gap: f64,
    #[serde(rename = "ILS_time")]
    pub ils_time: f64,
    #[serde(rename = "Gurobi_time")]
    pub gurobi_time: f64,
    #[serde(rename = "Fea_pct")]
    pub fea_pct: f64,
}

/// Parses a reference table; only `ID` and `BKS` are required to be
/// meaningful, but all columns must be present.
pub fn parse_reference(text: &str) -> Result<Vec<ReferenceRow>, BenchError> {
    let mut out = Vec::new();
    for (k, rec) in csv::Reader::from_reader(text.as_bytes()).deserialize().enumerate() {
        let row: ReferenceRow = rec.map_err(|e| BenchError::Reference {
            line: k + 2,
            msg: e.to_string(),
        })?;
        out.push(row);
    }
    Ok(out)
}

pub fn load_reference(path: &Path) -> Result<BTreeMap<usize, i64>, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    Ok(parse_reference(&text)?.into_iter().map(|r| (r.id, r.bks)).collect())
}

/// The shipped table, in id order.
pub fn builtin_reference() -> Vec<ReferenceRow> {
    parse_reference(BUILTIN).expect("shipped reference table parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use seatplan_core::gap;

    #[test]
    fn shipped_table_shape() {
        let rows = builtin_reference();
        assert_eq!(rows.len(), 131);
        assert!(rows.iter().enumerate().all(|(k, r)| r.id == k + 1));
        assert!(rows.iter().all(|r| r.bks <= 0 && (0.0..=100.0).contains(&r.fea_pct)));
        let by_id: BTreeMap<usize, i64> = rows.iter().map(|r| (r.id, r.bks)).collect();
        assert_eq!(by_id[&32], -18);
        assert_eq!(by_id[&129], -307);
        assert!((1..=30).all(|id| by_id[&id] == 0));
    }

    #[test]
    fn gap_identities_on_reference() {
        for r in builtin_reference() {
            let b = r.bks as f64;
            assert_eq!(gap(b, b), 0.0);
            // any worse objective gives a positive gap
            assert!(gap(b, b - 1.0) > 0.0);
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let err = parse_reference("ID,BKS,ILS_gap,Gurobi_gap,ILS_time,Gurobi_time,Fea_pct\n1,x,0,0,0,0,0\n").unwrap_err();
        assert!(matches!(err, BenchError::Reference { line: 2, .. }));
    }
}
