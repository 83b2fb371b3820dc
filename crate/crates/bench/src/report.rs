use std::fmt::Write;

use crate::batch::BenchRow;
use crate::compare::{InitialClass, InitialVsIls};

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

/// Markdown table with the summary columns.
pub fn render_markdown(rows: &[BenchRow]) -> String {
    let mut s = String::from("| ID | ILS gap | BKS | ILS time (s) | % Fea |\n|---|---:|---:|---:|---:|\n");
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {:.2} | {:.2} |",
            r.id,
            opt(r.avg_gap.map(|g| format!("{g:.2}"))),
            opt(r.bks),
            r.avg_time,
            r.fea_pct
        );
    }
    s
}

/// Short markdown summary of a constructive-vs-ILS comparison.
pub fn render_comparison(cmp: &InitialVsIls) -> String {
    let mut s = String::from("| Start | Runs | Mean initial gap | Mean final gap | Mean initial time (s) | Mean final time (s) |\n|---|---:|---:|---:|---:|---:|\n");
    for class in [InitialClass::Feasible, InitialClass::Infeasible] {
        let runs: Vec<_> = cmp.runs.iter().filter(|r| r.class == class).collect();
        if runs.is_empty() {
            continue;
        }
        let n = runs.len() as f64;
        let (gi, gf) = cmp
            .mean_gaps(class)
            .map(|(a, b)| (format!("{a:.3}"), format!("{b:.3}")))
            .unwrap_or(("-".into(), "-".into()));
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {:.3} | {:.3} |",
            class.label(),
            runs.len(),
            gi,
            gf,
            runs.iter().map(|r| r.initial_time).sum::<f64>() / n,
            runs.iter().map(|r| r.final_time).sum::<f64>() / n,
        );
    }
    let _ = writeln!(
        s,
        "\nInitial solution matched the BKS on {} of {} instances.",
        cmp.initial_matches_bks, cmp.instances
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batch::{run_batch, BenchInstance};
    use seatplan_core::{fixtures, SolveParams};

    #[test]
    fn one_line_per_row() {
        let rows = run_batch(
            &[
                BenchInstance::new("tiny", fixtures::tiny()),
                BenchInstance::new("k4", fixtures::k4()),
            ],
            &SolveParams::default(),
            2,
            0,
        );
        let md = render_markdown(&rows);
        assert_eq!(md.lines().count(), 4);
        assert!(md.contains("| tiny | 0.00 | 0 |"));
        assert!(md.contains("| k4 | - | - |"));
        let cmp = render_comparison(&InitialVsIls::from_rows(&rows));
        assert!(cmp.contains("matched the BKS on"));
    }
}
