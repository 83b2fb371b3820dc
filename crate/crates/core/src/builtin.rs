//! The three real classrooms shipped with the crate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::io::InstanceFile;
use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classroom {
    I,
    II,
    III,
}

impl Classroom {
    pub const ALL: [Classroom; 3] = [Classroom::I, Classroom::II, Classroom::III];

    /// Short name, also accepted by [`FromStr`] (`classroom1` … `classroom3`).
    pub fn name(self) -> &'static str {
        match self {
            Classroom::I => "classroom1",
            Classroom::II => "classroom2",
            Classroom::III => "classroom3",
        }
    }

    pub fn json(self) -> &'static str {
        match self {
            Classroom::I => include_str!("../data/classroom1.json"),
            Classroom::II => include_str!("../data/classroom2.json"),
            Classroom::III => include_str!("../data/classroom3.json"),
        }
    }
}

impl fmt::Display for Classroom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown builtin instance {0:?} (expected classroom1, classroom2 or classroom3)")]
pub struct UnknownClassroom(pub String);

impl FromStr for Classroom {
    type Err = UnknownClassroom;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classroom1" | "i" | "1" => Ok(Classroom::I),
            "classroom2" | "ii" | "2" => Ok(Classroom::II),
            "classroom3" | "iii" | "3" => Ok(Classroom::III),
            _ => Err(UnknownClassroom(s.to_string())),
        }
    }
}

pub fn classroom_file(c: Classroom) -> InstanceFile {
    InstanceFile::from_json(c.json()).expect("builtin classroom files are well-formed")
}

pub fn classroom(c: Classroom) -> Instance {
    Instance::from_file(&classroom_file(c)).expect("builtin classroom files are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let cases = [
            (Classroom::I, vec![4, 4, 5, 6, 4, 6, 4], 33, 32, 9, 2),
            (Classroom::II, vec![4, 4, 5, 5, 5, 5, 4], 32, 88, 8, 8),
            (Classroom::III, vec![5, 5, 5, 5, 5, 6], 31, 53, 4, 2),
        ];
        for (c, rows, students, edges, front, back) in cases {
            let f = classroom_file(c);
            assert_eq!(f.rows, rows);
            assert_eq!(f.students, students);
            assert_eq!(f.conflicts.len(), edges);
            assert_eq!((f.front.len(), f.back.len()), (front, back));
            let inst = classroom(c);
            assert_eq!(inst.graph().num_edges(), edges);
            assert_eq!(inst.d_min(), 2);
            assert_eq!(inst.psi(), *rows.iter().max().unwrap() as i64);
        }
    }

    #[test]
    fn preference_sets() {
        assert_eq!(classroom_file(Classroom::III).front, vec![2, 4, 7, 21]);
        assert_eq!(classroom_file(Classroom::I).back, vec![21, 23]);
        assert_eq!(
            classroom_file(Classroom::II).back,
            vec![5, 10, 13, 22, 26, 27, 28, 29]
        );
    }

    #[test]
    fn every_conflict_student_has_a_conflict() {
        for c in Classroom::ALL {
            let inst = classroom(c);
            let g = inst.graph();
            let involved = (0..inst.num_students()).filter(|&v| g.degree(v) > 0).count();
            assert!(involved > 0);
        }
    }

    #[test]
    fn names_parse() {
        for c in Classroom::ALL {
            assert_eq!(c.name().parse::<Classroom>().unwrap(), c);
        }
        assert!("classroom4".parse::<Classroom>().is_err());
    }
}
