//! Instance validation. Problems are collected, never thrown.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::io::InstanceFile;

/// Upper bound on the number of desks an instance may declare.
pub const MAX_SEATS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationIssue {
    EmptyLayout,
    EmptyRow { row: usize },
    LayoutTooLarge { seats: usize },
    FrontBackOverlap { row: usize, desks: usize },
    TooManyStudents { students: usize, desks: usize },
    DMinBelowTwo { d_min: usize },
    DMinSameRowBelowTwo { d_min_same_row: usize },
    DMinExceedsShortestRow { d_min: usize, shortest: usize },
    DMinSameRowExceedsShortestRow { d_min_same_row: usize, shortest: usize },
    PsiTooSmall { psi: i64, longest: usize },
    SelfLoop { student: usize },
    DuplicateEdge { a: usize, b: usize },
    UnknownStudent { student: usize, context: &'static str },
    DuplicateRequirement { student: usize },
    FrontAndBack { student: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            EmptyLayout => write!(f, "layout has no rows"),
            EmptyRow { row } => write!(f, "row {row} has no desks"),
            LayoutTooLarge { seats } => {
                write!(f, "layout has {seats} desks, more than {MAX_SEATS}")
            }
            FrontBackOverlap { row, desks } => {
                write!(f, "front/back overlap: row {row} has only {desks} desks")
            }
            TooManyStudents { students, desks } => {
                write!(f, "{students} students do not fit in {desks} desks")
            }
            DMinBelowTwo { d_min } => write!(f, "d_min below 2 (got {d_min})"),
            DMinSameRowBelowTwo { d_min_same_row } => {
                write!(f, "d_min_same_row below 2 (got {d_min_same_row})")
            }
            DMinExceedsShortestRow { d_min, shortest } => {
                write!(f, "d_min exceeds shortest row ({d_min} > {shortest})")
            }
            DMinSameRowExceedsShortestRow {
                d_min_same_row,
                shortest,
            } => write!(
                f,
                "d_min_same_row exceeds shortest row ({d_min_same_row} > {shortest})"
            ),
            PsiTooSmall { psi, longest } => write!(
                f,
                "psi must exceed the longest row minus one ({psi} <= {})",
                longest.saturating_sub(1)
            ),
            SelfLoop { student } => write!(f, "student {student} conflicts with itself"),
            DuplicateEdge { a, b } => write!(f, "conflict ({a}, {b}) listed twice"),
            UnknownStudent { student, context } => {
                write!(f, "unknown student {student} in {context}")
            }
            DuplicateRequirement { student } => {
                write!(f, "student {student} listed twice in a requirement list")
            }
            FrontAndBack { student } => {
                write!(f, "student {student} requires both front and back")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, pred: impl Fn(&ValidationIssue) -> bool) -> bool {
        self.issues.iter().any(pred)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for (k, issue) in self.issues.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Checks every instance invariant and reports all violations.
pub fn validate_instance(file: &InstanceFile) -> ValidationReport {
    use ValidationIssue::*;
    let mut issues = Vec::new();

    if file.rows.is_empty() {
        issues.push(EmptyLayout);
    }
    let mut desks = 0usize;
    for (r, &len) in file.rows.iter().enumerate() {
        if len == 0 {
            issues.push(EmptyRow { row: r + 1 });
        } else if len < 4 {
            issues.push(FrontBackOverlap {
                row: r + 1,
                desks: len,
            });
        }
        desks = desks.saturating_add(len);
    }
    if desks > MAX_SEATS {
        issues.push(LayoutTooLarge { seats: desks });
    }
    if file.students > desks {
        issues.push(TooManyStudents {
            students: file.students,
            desks,
        });
    }

    let shortest = file.rows.iter().copied().min().unwrap_or(0);
    let longest = file.rows.iter().copied().max().unwrap_or(0);
    let same_row = file.d_min_same_row.unwrap_or(file.d_min);
    if file.d_min < 2 {
        issues.push(DMinBelowTwo { d_min: file.d_min });
    } else if file.d_min > shortest {
        issues.push(DMinExceedsShortestRow {
            d_min: file.d_min,
            shortest,
        });
    }
    if let Some(d) = file.d_min_same_row {
        if d < 2 {
            issues.push(DMinSameRowBelowTwo { d_min_same_row: d });
        } else if same_row > shortest {
            issues.push(DMinSameRowExceedsShortestRow {
                d_min_same_row: same_row,
                shortest,
            });
        }
    }
    if let Some(psi) = file.psi {
        if psi <= longest.saturating_sub(1) as i64 {
            issues.push(PsiTooSmall { psi, longest });
        }
    }

    let known = |s: usize| s >= 1 && s <= file.students;
    let mut seen = BTreeSet::new();
    for &[a, b] in &file.conflicts {
        let mut ok = true;
        for s in [a, b] {
            if !known(s) {
                issues.push(UnknownStudent {
                    student: s,
                    context: "conflicts",
                });
                ok = false;
            }
        }
        if a == b {
            issues.push(SelfLoop { student: a });
            continue;
        }
        if ok && !seen.insert((a.min(b), a.max(b))) {
            issues.push(DuplicateEdge {
                a: a.min(b),
                b: a.max(b),
            });
        }
    }

    let mut front = BTreeSet::new();
    for &s in &file.front {
        if !known(s) {
            issues.push(UnknownStudent {
                student: s,
                context: "front",
            });
        } else if !front.insert(s) {
            issues.push(DuplicateRequirement { student: s });
        }
    }
    let mut back = BTreeSet::new();
    for &s in &file.back {
        if !known(s) {
            issues.push(UnknownStudent {
                student: s,
                context: "back",
            });
        } else if !back.insert(s) {
            issues.push(DuplicateRequirement { student: s });
        } else if front.contains(&s) {
            issues.push(FrontAndBack { student: s });
        }
    }

    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn base() -> InstanceFile {
        InstanceFile {
            rows: vec![4, 4],
            students: 8,
            conflicts: vec![[1, 2]],
            front: vec![1],
            back: vec![],
            d_min: 2,
            d_min_same_row: None,
            psi: None,
        }
    }

    #[test]
    fn classroom_one_is_valid() {
        let file = builtin::classroom_file(builtin::Classroom::I);
        assert_eq!(file.rows, vec![4, 4, 5, 6, 4, 6, 4]);
        assert_eq!(file.students, 33);
        assert_eq!(file.conflicts.len(), 32);
        assert!(validate_instance(&file).is_valid());
    }

    #[test]
    fn d_min_below_two() {
        let mut f = base();
        f.d_min = 1;
        let report = validate_instance(&f);
        assert!(report.has(|i| matches!(i, ValidationIssue::DMinBelowTwo { d_min: 1 })));
        assert!(report.to_string().contains("d_min below 2"));
    }

    #[test]
    fn short_rows_and_large_d_min() {
        let mut f = base();
        f.rows = vec![3, 5];
        f.d_min = 4;
        let report = validate_instance(&f);
        let text = report.to_string();
        assert!(text.contains("front/back overlap"), "{text}");
        assert!(text.contains("d_min exceeds shortest row"), "{text}");
    }

    #[test]
    fn graph_and_roster_errors() {
        let mut f = base();
        f.conflicts = vec![[1, 1], [1, 2], [2, 1], [3, 9]];
        f.front = vec![1, 1];
        f.back = vec![1];
        f.psi = Some(3);
        let report = validate_instance(&f);
        assert!(report.has(|i| matches!(i, ValidationIssue::SelfLoop { student: 1 })));
        assert!(report.has(|i| matches!(i, ValidationIssue::DuplicateEdge { a: 1, b: 2 })));
        assert!(report.has(|i| matches!(i, ValidationIssue::UnknownStudent { student: 9, .. })));
        assert!(report.has(|i| matches!(i, ValidationIssue::DuplicateRequirement { student: 1 })));
        assert!(report.has(|i| matches!(i, ValidationIssue::FrontAndBack { student: 1 })));
        assert!(report.has(|i| matches!(i, ValidationIssue::PsiTooSmall { psi: 3, .. })));
    }

    #[test]
    fn too_many_students() {
        let mut f = base();
        f.students = 9;
        assert!(validate_instance(&f)
            .has(|i| matches!(i, ValidationIssue::TooManyStudents { students: 9, desks: 8 })));
    }

    #[test]
    fn huge_layout_is_reported_not_allocated() {
        let mut f = base();
        f.rows = vec![usize::MAX, usize::MAX];
        let report = validate_instance(&f);
        assert!(report.has(|i| matches!(i, ValidationIssue::LayoutTooLarge { .. })));
    }
}
