//! Students pinned to fixed seats. Locked students are never moved by the
//! constructor or the local search.

use crate::model::{Instance, Seat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LockError {
    #[error("unknown student {0}")]
    UnknownStudent(usize),
    #[error("seat {0} is outside the layout")]
    OutOfBounds(Seat),
    #[error("student {0} locked twice")]
    DuplicateStudent(usize),
    #[error("seat {seat} locked for both {first} and {second}")]
    SharedSeat {
        seat: Seat,
        first: usize,
        second: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Locks {
    seats: Vec<Option<Seat>>,
}

impl Locks {
    pub fn none(inst: &Instance) -> Self {
        Self {
            seats: vec![None; inst.num_slots()],
        }
    }

    /// `pins` holds zero-based `(student, seat)` pairs over real students.
    pub fn new(inst: &Instance, pins: &[(usize, Seat)]) -> Result<Self, LockError> {
        let mut seats = vec![None; inst.num_slots()];
        let mut owner = vec![usize::MAX; inst.layout().num_seats()];
        for &(student, seat) in pins {
            if student >= inst.num_students() {
                return Err(LockError::UnknownStudent(student));
            }
            if !inst.layout().contains(seat) {
                return Err(LockError::OutOfBounds(seat));
            }
            if seats[student].is_some() {
                return Err(LockError::DuplicateStudent(student));
            }
            let col = inst.layout().column(seat);
            if owner[col] != usize::MAX {
                return Err(LockError::SharedSeat {
                    seat,
                    first: owner[col],
                    second: student,
                });
            }
            owner[col] = student;
            seats[student] = Some(seat);
        }
        Ok(Self { seats })
    }

    pub fn seat(&self, student: usize) -> Option<Seat> {
        self.seats[student]
    }

    pub fn is_locked(&self, student: usize) -> bool {
        self.seats[student].is_some()
    }

    pub fn flags(&self) -> Vec<bool> {
        self.seats.iter().map(Option::is_some).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Seat)> + '_ {
        self.seats
            .iter()
            .enumerate()
            .filter_map(|(s, seat)| seat.map(|seat| (s, seat)))
    }

    pub fn is_empty(&self) -> bool {
        self.seats.iter().all(Option::is_none)
    }
}
