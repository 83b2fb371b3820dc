//! Mutable seating state with incremental move evaluation, shared by the
//! constructive phase and the local search.

use crate::eval::{pair_score, requirement_score, Score};
use crate::model::{Assignment, Instance, Seat, SeatMap};

#[derive(Debug, Clone)]
pub struct Seating<'a> {
    inst: &'a Instance,
    seat_of: Vec<Option<Seat>>,
    occupant: Vec<Option<usize>>,
    locked: Vec<bool>,
    score: Score,
}

impl<'a> Seating<'a> {
    pub fn empty(inst: &'a Instance) -> Self {
        Self {
            inst,
            seat_of: vec![None; inst.num_slots()],
            occupant: vec![None; inst.layout().num_seats()],
            locked: vec![false; inst.num_slots()],
            score: Score::default(),
        }
    }

    pub fn from_assignment(inst: &'a Instance, a: &Assignment) -> Self {
        let mut st = Self::empty(inst);
        for (s, &seat) in a.seats().iter().enumerate() {
            st.seat_of[s] = Some(seat);
            st.occupant[inst.layout().column(seat)] = Some(s);
        }
        st.score = crate::eval::score(inst, &st.seat_of);
        st
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn with_locks(mut self, locked: &[bool]) -> Self {
        self.locked.copy_from_slice(locked);
        self
    }

    pub fn lock(&mut self, student: usize) {
        self.locked[student] = true;
    }

    #[inline]
    pub fn is_locked(&self, student: usize) -> bool {
        self.locked[student]
    }

    pub fn locks(&self) -> &[bool] {
        &self.locked
    }

    #[inline]
    pub fn seat_of(&self, student: usize) -> Option<Seat> {
        self.seat_of[student]
    }

    /// Seat of a student known to be placed.
    #[inline]
    pub fn seat(&self, student: usize) -> Seat {
        self.seat_of[student].expect("student is seated")
    }

    #[inline]
    pub fn occupant(&self, seat: Seat) -> Option<usize> {
        self.occupant[self.inst.layout().column(seat)]
    }

    #[inline]
    pub fn occupant_at(&self, col: usize) -> Option<usize> {
        self.occupant[col]
    }

    pub fn seat_map(&self) -> &[Option<Seat>] {
        &self.seat_of
    }

    pub fn score(&self) -> Score {
        self.score
    }

    pub fn fp(&self) -> i64 {
        self.score.penalized(self.inst.phi())
    }

    pub fn is_complete(&self) -> bool {
        self.seat_of.iter().all(Option::is_some)
    }

    pub fn to_assignment(&self) -> Assignment {
        Assignment::from_vec_unchecked(
            self.seat_of
                .iter()
                .map(|s| s.expect("complete seating"))
                .collect(),
        )
    }

    pub fn free_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.occupant
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_none())
            .map(|(c, _)| c)
    }

    /// Contribution of `student` if it sat at `seat`, counting its
    /// requirement and every conflict with a seated neighbour other than
    /// `ignore`.
    #[inline]
    pub fn student_score(&self, student: usize, seat: Seat, ignore: Option<usize>) -> Score {
        let mut s = requirement_score(self.inst, student, seat);
        for &j in self.inst.graph().neighbors(student) {
            if Some(j) == ignore {
                continue;
            }
            if let Some(other) = self.seat_of[j] {
                s += pair_score(self.inst, seat, other);
            }
        }
        s
    }

    /// Change of score if seated students `a` and `b` exchange seats.
    #[inline]
    pub fn swap_delta(&self, a: usize, b: usize) -> Score {
        let (sa, sb) = (self.seat(a), self.seat(b));
        let before = self.student_score(a, sa, Some(b)) + self.student_score(b, sb, Some(a));
        let after = self.student_score(a, sb, Some(b)) + self.student_score(b, sa, Some(a));
        after - before
    }

    /// Change of score if `student` moves (or is placed) on the free `to`.
    #[inline]
    pub fn move_delta(&self, student: usize, to: Seat) -> Score {
        debug_assert!(self.occupant(to).is_none());
        let before = match self.seat_of[student] {
            Some(seat) => self.student_score(student, seat, None),
            None => Score::default(),
        };
        self.student_score(student, to, None) - before
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let delta = self.swap_delta(a, b);
        let (sa, sb) = (self.seat(a), self.seat(b));
        let layout = self.inst.layout();
        self.seat_of[a] = Some(sb);
        self.seat_of[b] = Some(sa);
        self.occupant[layout.column(sb)] = Some(a);
        self.occupant[layout.column(sa)] = Some(b);
        self.score += delta;
    }

    /// Moves `student` to an empty seat, or exchanges it with the occupant.
    pub fn relocate(&mut self, student: usize, to: Seat) {
        match self.occupant(to) {
            Some(other) => self.swap(student, other),
            None => self.place(student, to),
        }
    }

    /// Places (or moves) `student` onto the free seat `to`.
    pub fn place(&mut self, student: usize, to: Seat) {
        let delta = self.move_delta(student, to);
        let layout = self.inst.layout();
        if let Some(old) = self.seat_of[student] {
            self.occupant[layout.column(old)] = None;
        }
        self.seat_of[student] = Some(to);
        self.occupant[layout.column(to)] = Some(student);
        self.score += delta;
    }

    pub fn unplace(&mut self, student: usize) {
        if let Some(old) = self.seat_of[student] {
            let delta = self.student_score(student, old, None);
            self.occupant[self.inst.layout().column(old)] = None;
            self.seat_of[student] = None;
            self.score = self.score - delta;
        }
    }

    /// Whether `student` currently takes part in any violated constraint.
    pub fn is_violating(&self, student: usize) -> bool {
        match self.seat_of[student] {
            Some(seat) => self.student_score(student, seat, None).violations() > 0,
            None => false,
        }
    }

    /// Students not locked in place.
    pub fn movable(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.seat_of.len()).filter(|&s| !self.locked[s])
    }
}

impl SeatMap for Seating<'_> {
    fn seat(&self, student: usize) -> Option<Seat> {
        self.seat_of[student]
    }
    fn num_students(&self) -> usize {
        self.seat_of.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval;
    use crate::fixtures;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn incremental_score_matches_full(moves in proptest::collection::vec((0usize..8, 0usize..8), 1..40)) {
            let inst = fixtures::k4();
            let mut st = Seating::from_assignment(&inst, &Assignment::identity(inst.layout()));
            for (a, b) in moves {
                let predicted = st.score() + st.swap_delta(a, b);
                st.swap(a, b);
                prop_assert_eq!(st.score(), predicted);
                prop_assert_eq!(st.score(), eval::score(&inst, st.seat_map()));
            }
        }
    }

    #[test]
    fn place_and_unplace() {
        let inst = fixtures::tiny();
        let mut st = Seating::empty(&inst);
        st.place(0, Seat::new(0, 2));
        assert_eq!(st.score().alpha, 1);
        st.place(1, Seat::new(1, 2));
        assert_eq!(st.score(), eval::score(&inst, st.seat_map()));
        st.place(0, Seat::new(0, 0));
        assert_eq!(st.score().f, -2);
        st.unplace(1);
        assert_eq!(st.score(), Score::default());
        assert_eq!(st.free_columns().count(), 7);
    }
}
