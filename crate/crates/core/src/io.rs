//! JSON file formats for instances and assignments.
//!
//! Instance:
//! ```json
//! { "rows": [4, 4], "students": 8, "conflicts": [[1, 2]], "front": [1], "back": [],
//!   "d_min": 2, "d_min_same_row": 2, "psi": 4 }
//! ```
//! Assignment: `{ "seats": { "1": [1, 1], "2": [2, 3] } }`. All ids, rows and
//! positions are one-based.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{Assignment, Instance, Seat, SeatMap};
use crate::validate::ValidationReport;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("invalid assignment: {0}")]
    Assignment(String),
}

/// Canonical on-disk instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub rows: Vec<usize>,
    pub students: usize,
    #[serde(default)]
    pub conflicts: Vec<[usize; 2]>,
    #[serde(default)]
    pub front: Vec<usize>,
    #[serde(default)]
    pub back: Vec<usize>,
    pub d_min: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_min_same_row: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<i64>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

/// Parses and validates an instance from JSON text.
pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let file = InstanceFile::from_json(text)?;
    Instance::from_file(&file).map_err(IoError::Invalid)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_text(path.as_ref(), &instance.to_file().to_json())
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// On-disk assignment. Filler students are never written.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub seats: BTreeMap<usize, [usize; 2]>,
}

impl AssignmentFile {
    pub fn from_assignment(instance: &Instance, assignment: &impl SeatMap) -> Self {
        let seats = (0..instance.num_students())
            .filter_map(|s| {
                assignment
                    .seat(s)
                    .map(|seat| (s + 1, [seat.row + 1, seat.pos + 1]))
            })
            .collect();
        Self { seats }
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("assignment serializes")
    }

    /// Resolves to a partial seat map over all slots. Unknown students,
    /// out-of-range seats and shared seats are rejected.
    pub fn to_seat_map(&self, instance: &Instance) -> Result<Vec<Option<Seat>>, IoError> {
        let layout = instance.layout();
        let mut map = vec![None; instance.num_slots()];
        let mut taken = vec![false; layout.num_seats()];
        for (&id, &[row, pos]) in &self.seats {
            if id == 0 || id > instance.num_students() {
                return Err(IoError::Assignment(format!("unknown student {id}")));
            }
            if row == 0 || pos == 0 || !layout.contains(Seat::new(row - 1, pos - 1)) {
                return Err(IoError::Assignment(format!(
                    "seat ({row}, {pos}) of student {id} is outside the layout"
                )));
            }
            let seat = Seat::new(row - 1, pos - 1);
            let col = layout.column(seat);
            if taken[col] {
                return Err(IoError::Assignment(format!("seat ({row}, {pos}) assigned twice")));
            }
            taken[col] = true;
            map[id - 1] = Some(seat);
        }
        Ok(map)
    }

    /// Resolves to a total assignment; fillers take the free desks in column
    /// order. Every real student must be seated.
    pub fn to_assignment(&self, instance: &Instance) -> Result<Assignment, IoError> {
        let mut map = self.to_seat_map(instance)?;
        if let Some(s) = (0..instance.num_students()).find(|&s| map[s].is_none()) {
            return Err(IoError::Assignment(format!("student {} has no seat", s + 1)));
        }
        let layout = instance.layout();
        let mut taken = vec![false; layout.num_seats()];
        for seat in map.iter().flatten() {
            taken[layout.column(*seat)] = true;
        }
        let mut free = (0..layout.num_seats()).filter(|&c| !taken[c]);
        for slot in map.iter_mut().skip(instance.num_students()) {
            *slot = Some(layout.seat_at(free.next().expect("one desk per slot")));
        }
        Assignment::from_partial(layout, &map).map_err(|e| IoError::Assignment(e.to_string()))
    }
}

pub fn load_assignment(instance: &Instance, path: impl AsRef<Path>) -> Result<Assignment, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    AssignmentFile::from_json(&text)?.to_assignment(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn instance_round_trip() {
        let inst = fixtures::tiny();
        let text = inst.to_file().to_json();
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.to_file(), inst.to_file());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.json");
        save_instance(&fixtures::tiny(), &path).unwrap();
        let loaded = load_instance(&path).unwrap();
        assert_eq!(loaded.to_file(), fixtures::tiny().to_file());
    }

    #[test]
    fn empty_conflicts_are_valid() {
        let inst = parse_instance(r#"{"rows":[4,4],"students":8,"d_min":2}"#).unwrap();
        assert_eq!(inst.graph().num_edges(), 0);
        assert_eq!(inst.psi(), 4);
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(matches!(parse_instance("{"), Err(IoError::Json(_))));
        assert!(matches!(
            parse_instance(r#"{"rows":[4],"students":9,"d_min":2}"#),
            Err(IoError::Invalid(_))
        ));
    }

    #[test]
    fn assignment_json_fills_fillers() {
        let inst = parse_instance(r#"{"rows":[4,4],"students":2,"conflicts":[[1,2]],"d_min":2}"#)
            .unwrap();
        let file = AssignmentFile::from_json(r#"{"seats":{"1":[1,1],"2":[2,3]}}"#).unwrap();
        let a = file.to_assignment(&inst).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a.seat_of(1), Seat::new(1, 2));
        assert_eq!(AssignmentFile::from_assignment(&inst, &a), file);
    }

    #[test]
    fn assignment_json_rejects_shared_seat() {
        let inst = fixtures::tiny();
        let file = AssignmentFile::from_json(r#"{"seats":{"1":[1,1],"2":[1,1]}}"#).unwrap();
        assert!(file.to_seat_map(&inst).is_err());
    }
}
