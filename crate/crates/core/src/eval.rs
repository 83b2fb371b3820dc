//! Pure evaluation: active edges, objective, requirement/distance
//! violations, penalized objective and the optimality gap.
//!
//! All functions accept partial seat maps and evaluate over the seated
//! students only.

use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Seat, SeatMap};

/// A conflict edge whose endpoints sit in consecutive rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActiveEdge {
    /// Lower of the two rows.
    pub row: usize,
    /// Edge endpoints, `i < j`.
    pub i: usize,
    pub j: usize,
    /// Position of `i` and `j` in their rows.
    pub pos_i: usize,
    pub pos_j: usize,
    pub distance: usize,
}

/// `(α, β, γ, δ)`: unmet front and back requirements, same-row conflict
/// pairs closer than `d_min'`, and active edges shorter than `d_min`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ViolationCounts {
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
}

impl ViolationCounts {
    pub fn total(&self) -> u32 {
        self.alpha + self.beta + self.gamma + self.delta
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }
}

/// Additive decomposition of a (partial) solution's value. Deltas of moves
/// are differences of scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Score {
    pub f: i64,
    pub active: i64,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub delta: i64,
}

impl Score {
    pub fn violations(&self) -> i64 {
        self.alpha + self.beta + self.gamma + self.delta
    }

    /// `f − φ·(α+β+γ+δ)`.
    #[inline]
    pub fn penalized(&self, phi: i64) -> i64 {
        self.f - phi * self.violations()
    }

    pub fn counts(&self) -> ViolationCounts {
        let c = |v: i64| u32::try_from(v).expect("violation counts are non-negative");
        ViolationCounts {
            alpha: c(self.alpha),
            beta: c(self.beta),
            gamma: c(self.gamma),
            delta: c(self.delta),
        }
    }
}

impl Add for Score {
    type Output = Score;
    fn add(self, o: Score) -> Score {
        Score {
            f: self.f + o.f,
            active: self.active + o.active,
            alpha: self.alpha + o.alpha,
            beta: self.beta + o.beta,
            gamma: self.gamma + o.gamma,
            delta: self.delta + o.delta,
        }
    }
}

impl AddAssign for Score {
    fn add_assign(&mut self, o: Score) {
        *self = *self + o;
    }
}

impl Sub for Score {
    type Output = Score;
    fn sub(self, o: Score) -> Score {
        Score {
            f: self.f - o.f,
            active: self.active - o.active,
            alpha: self.alpha - o.alpha,
            beta: self.beta - o.beta,
            gamma: self.gamma - o.gamma,
            delta: self.delta - o.delta,
        }
    }
}

/// Contribution of one conflicting pair seated at `a` and `b`.
#[inline]
pub fn pair_score(inst: &Instance, a: Seat, b: Seat) -> Score {
    let dist = a.pos.abs_diff(b.pos);
    if a.row == b.row {
        Score {
            gamma: (dist < inst.d_min_same_row()) as i64,
            ..Score::default()
        }
    } else if a.row.abs_diff(b.row) == 1 {
        Score {
            f: dist as i64 - inst.psi(),
            active: 1,
            delta: (dist < inst.d_min()) as i64,
            ..Score::default()
        }
    } else {
        Score::default()
    }
}

/// Requirement contribution of `student` seated at `seat`.
#[inline]
pub fn requirement_score(inst: &Instance, student: usize, seat: Seat) -> Score {
    use crate::model::Requirement;
    let req = inst.requirement(student);
    let unmet = !inst.layout().satisfies(req, seat);
    Score {
        alpha: (unmet && req == Requirement::Front) as i64,
        beta: (unmet && req == Requirement::Back) as i64,
        ..Score::default()
    }
}

/// Full score of a (partial) seat map.
pub fn score(inst: &Instance, map: &(impl SeatMap + ?Sized)) -> Score {
    let mut total = Score::default();
    for s in 0..inst.num_slots() {
        if let Some(seat) = map.seat(s) {
            total += requirement_score(inst, s, seat);
        }
    }
    for &(i, j) in inst.graph().edges() {
        if let (Some(a), Some(b)) = (map.seat(i), map.seat(j)) {
            total += pair_score(inst, a, b);
        }
    }
    total
}

/// Conflict edges between consecutive rows, sorted by `(row, i, j)`.
pub fn active_edges(inst: &Instance, map: &(impl SeatMap + ?Sized)) -> Vec<ActiveEdge> {
    let mut out: Vec<ActiveEdge> = inst
        .graph()
        .edges()
        .iter()
        .filter_map(|&(i, j)| {
            let (a, b) = (map.seat(i)?, map.seat(j)?);
            (a.row.abs_diff(b.row) == 1).then(|| ActiveEdge {
                row: a.row.min(b.row),
                i,
                j,
                pos_i: a.pos,
                pos_j: b.pos,
                distance: a.pos.abs_diff(b.pos),
            })
        })
        .collect();
    out.sort();
    out
}

/// `Σ (distance − Ψ)` over active edges.
pub fn objective(inst: &Instance, map: &(impl SeatMap + ?Sized)) -> i64 {
    score(inst, map).f
}

pub fn violations(inst: &Instance, map: &(impl SeatMap + ?Sized)) -> ViolationCounts {
    score(inst, map).counts()
}

pub fn penalized_objective(inst: &Instance, map: &(impl SeatMap + ?Sized)) -> i64 {
    score(inst, map).penalized(inst.phi())
}

/// Why a seat map is not a feasible solution.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Infeasibility {
    #[error("student {0} has no seat")]
    Unassigned(usize),
    #[error("seat {0} is outside the layout")]
    OutOfBounds(Seat),
    #[error("students {1} and {2} share seat {0}")]
    SharedSeat(Seat, usize, usize),
    #[error("constraint violations {0:?}")]
    Violations(ViolationCounts),
}

/// Total, injective and violation-free.
pub fn check_feasible(inst: &Instance, map: &(impl SeatMap + ?Sized)) -> Result<(), Infeasibility> {
    let layout = inst.layout();
    let mut owner = vec![usize::MAX; layout.num_seats()];
    for s in 0..inst.num_slots() {
        let seat = map.seat(s).ok_or(Infeasibility::Unassigned(s))?;
        if !layout.contains(seat) {
            return Err(Infeasibility::OutOfBounds(seat));
        }
        let c = layout.column(seat);
        if owner[c] != usize::MAX {
            return Err(Infeasibility::SharedSeat(seat, owner[c], s));
        }
        owner[c] = s;
    }
    let v = violations(inst, map);
    if v.is_zero() {
        Ok(())
    } else {
        Err(Infeasibility::Violations(v))
    }
}

pub fn is_feasible(inst: &Instance, map: &(impl SeatMap + ?Sized)) -> bool {
    check_feasible(inst, map).is_ok()
}

/// `|z_bks − z_primal| / (|z_primal| + 1e-10)`.
pub fn gap(z_bks: f64, z_primal: f64) -> f64 {
    (z_bks - z_primal).abs() / (z_primal.abs() + 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Assignment;

    fn tiny_with(s1: Seat, s2: Seat) -> Vec<Option<Seat>> {
        let mut map = vec![None; 8];
        map[0] = Some(s1);
        map[1] = Some(s2);
        map
    }

    #[test]
    fn tiny_active_edge() {
        let inst = fixtures::tiny();
        let map = tiny_with(Seat::new(0, 0), Seat::new(1, 2));
        let edges = active_edges(&inst, &map);
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].distance, 2);
        assert_eq!(objective(&inst, &map), -2);
        assert_eq!(penalized_objective(&inst, &map), -2);
    }

    #[test]
    fn same_row_is_not_active() {
        let inst = fixtures::tiny();
        let map = tiny_with(Seat::new(0, 0), Seat::new(0, 2));
        assert!(active_edges(&inst, &map).is_empty());
        assert_eq!(objective(&inst, &map), 0);
    }

    #[test]
    fn conflict_free_has_no_edges() {
        let inst = fixtures::conflict_free(vec![4, 4]);
        let a = Assignment::identity(inst.layout());
        assert!(active_edges(&inst, &a).is_empty());
        assert_eq!(objective(&inst, &a), 0);
    }

    #[test]
    fn front_violation() {
        let inst = fixtures::tiny();
        let mut map = vec![None; 8];
        map[0] = Some(Seat::new(0, 2));
        let v = violations(&inst, &map);
        assert_eq!(v.alpha, 1);
        // φ = 2·1·|2−4| = 4, f = 0
        assert_eq!(inst.phi(), 4);
        assert_eq!(penalized_objective(&inst, &map), -4);
    }

    #[test]
    fn same_row_too_close() {
        let inst = fixtures::tiny();
        let map = tiny_with(Seat::new(0, 0), Seat::new(0, 1));
        assert_eq!(violations(&inst, &map).gamma, 1);
    }

    #[test]
    fn feasibility_examples() {
        let inst = fixtures::tiny();
        let mut seats: Vec<Seat> = inst.layout().seats().collect();
        // s1 → (1,1), s2 → (2,3): swap s2 with whoever holds (2,3)
        seats.swap(1, 6);
        let a = Assignment::new(inst.layout(), seats).unwrap();
        assert!(is_feasible(&inst, &a));
        assert!(violations(&inst, &a).is_zero());

        let mut map: Vec<Option<Seat>> = a.seats().iter().copied().map(Some).collect();
        map[2] = map[3];
        assert!(matches!(
            check_feasible(&inst, &map),
            Err(Infeasibility::SharedSeat(..))
        ));
        map[2] = None;
        assert_eq!(check_feasible(&inst, &map), Err(Infeasibility::Unassigned(2)));
    }

    #[test]
    fn gap_examples() {
        assert_eq!(gap(0.0, 0.0), 0.0);
        assert_eq!(gap(-29.0, -29.0), 0.0);
        let g = gap(-18.0, -12.0);
        assert!((g - 0.5).abs() < 1e-9 && g < 0.5, "{g}");
        assert_eq!(gap(-18.0, -24.0), 6.0 / (24.0 + 1e-10));
    }
}
