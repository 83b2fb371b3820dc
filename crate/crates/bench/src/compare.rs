use serde::Serialize;

use seatplan_core::{gap, SolveParams};

use crate::batch::{run_batch, BenchInstance, BenchRow};

/// How the constructive phase ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InitialClass {
    #[serde(rename = "Initial")]
    Feasible,
    #[serde(rename = "Initial (Infeasible)")]
    Infeasible,
}

impl InitialClass {
    pub fn label(self) -> &'static str {
        match self {
            InitialClass::Feasible => "Initial",
            InitialClass::Infeasible => "Initial (Infeasible)",
        }
    }
}

/// One run seen twice: right after construction and after the full search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRun {
    pub id: String,
    pub run: usize,
    pub class: InitialClass,
    /// Gap of the constructive objective to the BKS; `None` without a BKS.
    pub initial_gap: Option<f64>,
    pub initial_time: f64,
    pub final_gap: Option<f64>,
    pub final_feasible: bool,
    pub final_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialVsIls {
    pub runs: Vec<ComparisonRun>,
    /// Instances where some constructive solution already matched the BKS.
    pub initial_matches_bks: usize,
    pub instances: usize,
}

impl InitialVsIls {
    pub fn from_rows(rows: &[BenchRow]) -> Self {
        let mut runs = Vec::new();
        let mut matches = 0;
        for row in rows {
            let mut matched = false;
            for r in &row.runs {
                let class = if r.initial_feasible {
                    InitialClass::Feasible
                } else {
                    InitialClass::Infeasible
                };
                let initial_gap = row.bks.map(|b| gap(b as f64, r.initial_f as f64));
                matched |= r.initial_feasible && row.bks == Some(r.initial_f);
                runs.push(ComparisonRun {
                    id: row.id.clone(),
                    run: r.run,
                    class,
                    initial_gap,
                    initial_time: r.initial_time,
                    final_gap: r.gap,
                    final_feasible: r.feasible,
                    final_time: r.time,
                });
            }
            matches += usize::from(matched);
        }
        Self {
            runs,
            initial_matches_bks: matches,
            instances: rows.len(),
        }
    }

    /// Mean `(initial, final)` gap per class over runs that have both.
    pub fn mean_gaps(&self, class: InitialClass) -> Option<(f64, f64)> {
        let pairs: Vec<(f64, f64)> = self
            .runs
            .iter()
            .filter(|r| r.class == class)
            .filter_map(|r| Some((r.initial_gap?, r.final_gap?)))
            .collect();
        if pairs.is_empty() {
            return None;
        }
        let n = pairs.len() as f64;
        Some((
            pairs.iter().map(|p| p.0).sum::<f64>() / n,
            pairs.iter().map(|p| p.1).sum::<f64>() / n,
        ))
    }
}

/// Runs the batch and pairs each run's constructive result with its final one.
pub fn initial_vs_ils(instances: &[BenchInstance], params: &SolveParams, runs: usize, base_seed: u64) -> InitialVsIls {
    InitialVsIls::from_rows(&run_batch(instances, params, runs, base_seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use seatplan_core::fixtures;

    #[test]
    fn conflict_free_initial_gap_is_zero() {
        let inst = vec![BenchInstance::new("free", fixtures::conflict_free(vec![4, 5, 4]))];
        let cmp = initial_vs_ils(&inst, &SolveParams::default(), 4, 1);
        assert_eq!(cmp.runs.len(), 4);
        for r in &cmp.runs {
            assert_eq!(r.class, InitialClass::Feasible);
            assert_eq!(r.initial_gap, Some(0.0));
            assert_eq!(r.final_gap, Some(0.0));
        }
        assert_eq!(cmp.initial_matches_bks, 1);
    }

    #[test]
    fn infeasible_start_is_labelled() {
        let inst = BenchInstance::new("x", fixtures::tiny());
        let mut rows = run_batch(&[inst], &SolveParams::default(), 1, 0);
        rows[0].runs[0].initial_feasible = false;
        let cmp = InitialVsIls::from_rows(&rows);
        assert_eq!(cmp.runs[0].class.label(), "Initial (Infeasible)");
        assert!(cmp.runs[0].final_feasible);
    }
}
