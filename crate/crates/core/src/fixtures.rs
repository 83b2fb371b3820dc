//! Small canonical instances used by tests, examples and the CLI.

use crate::io::InstanceFile;
use crate::model::Instance;

/// Rows `[4, 4]`, eight students, one conflict `(1, 2)`, student 1 needs
/// the front, `d_min = d_min' = 2`, `Ψ = 4` (so `φ = 4`).
pub fn tiny_file() -> InstanceFile {
    InstanceFile {
        rows: vec![4, 4],
        students: 8,
        conflicts: vec![[1, 2]],
        front: vec![1],
        back: vec![],
        d_min: 2,
        d_min_same_row: Some(2),
        psi: Some(4),
    }
}

pub fn tiny() -> Instance {
    Instance::from_file(&tiny_file()).expect("tiny fixture is valid")
}

/// A conflict clique on students 1–4 in rows `[4, 4]`; no feasible seating
/// exists.
pub fn k4_file() -> InstanceFile {
    InstanceFile {
        rows: vec![4, 4],
        students: 8,
        conflicts: vec![[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]],
        front: vec![],
        back: vec![],
        d_min: 2,
        d_min_same_row: Some(2),
        psi: Some(4),
    }
}

pub fn k4() -> Instance {
    Instance::from_file(&k4_file()).expect("k4 fixture is valid")
}

/// A full classroom without conflicts or requirements.
pub fn conflict_free(rows: Vec<usize>) -> Instance {
    let students = rows.iter().sum();
    Instance::from_file(&InstanceFile {
        rows,
        students,
        conflicts: vec![],
        front: vec![],
        back: vec![],
        d_min: 2,
        d_min_same_row: None,
        psi: None,
    })
    .expect("conflict-free fixture is valid")
}
