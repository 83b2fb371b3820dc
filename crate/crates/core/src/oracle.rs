//! Exhaustive branch-and-prune over seat assignments, for instances small
//! enough to enumerate. Serves as ground truth for the heuristics.

use serde::Serialize;

use crate::model::{Assignment, Instance};
use crate::state::Seating;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    BudgetExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub status: OracleStatus,
    /// Best objective over feasible assignments; `None` unless optimal.
    pub best_f: Option<i64>,
    /// Best penalized objective over all assignments (over those explored
    /// when the budget ran out).
    pub best_penalized: Option<i64>,
    /// The feasible optimum when optimal, otherwise the best penalized
    /// assignment found.
    pub witness: Option<Assignment>,
    pub nodes: u64,
}

/// Branches on the constrained students (those with a conflict or a seat
/// requirement) in id order, trying free desks in column order. Everyone
/// else is interchangeable and fills the remaining desks in column order.
///
/// Partial `f` and `f_p` can only decrease as students are added, so a
/// branch is cut once it can beat neither incumbent. Ties keep the first
/// assignment found.
pub fn brute_force(inst: &Instance, node_budget: u64) -> OracleResult {
    let relevant: Vec<usize> = (0..inst.num_slots())
        .filter(|&s| inst.graph().degree(s) > 0 || inst.requirement(s).is_some())
        .collect();
    let mut search = Search {
        inst,
        relevant: &relevant,
        st: Seating::empty(inst),
        budget: node_budget,
        nodes: 0,
        exhausted: false,
        best_f: None,
        best_fp: None,
    };
    search.descend(0);
    let Search {
        nodes,
        exhausted,
        best_f,
        best_fp,
        ..
    } = search;

    let status = match (exhausted, &best_f) {
        (true, _) => OracleStatus::BudgetExceeded,
        (false, Some(_)) => OracleStatus::Optimal,
        (false, None) => OracleStatus::Infeasible,
    };
    let witness = match (&best_f, &best_fp) {
        (Some((_, a)), _) => Some(a.clone()),
        (None, Some((_, a))) => Some(a.clone()),
        _ => None,
    };
    OracleResult {
        status,
        best_f: if status == OracleStatus::Optimal {
            best_f.map(|(f, _)| f)
        } else {
            None
        },
        best_penalized: best_fp.map(|(v, _)| v),
        witness,
        nodes,
    }
}

struct Search<'a> {
    inst: &'a Instance,
    relevant: &'a [usize],
    st: Seating<'a>,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    best_f: Option<(i64, Assignment)>,
    best_fp: Option<(i64, Assignment)>,
}

impl Search<'_> {
    fn promising(&self) -> bool {
        let score = self.st.score();
        let fp = score.penalized(self.inst.phi());
        let beats_fp = self.best_fp.as_ref().is_none_or(|(b, _)| fp > *b);
        let beats_f = score.violations() == 0 && self.best_f.as_ref().is_none_or(|(b, _)| score.f > *b);
        beats_fp || beats_f
    }

    fn descend(&mut self, depth: usize) {
        if self.exhausted {
            return;
        }
        if depth == self.relevant.len() {
            self.complete();
            return;
        }
        let s = self.relevant[depth];
        let layout = self.inst.layout();
        for col in 0..layout.num_seats() {
            if self.st.occupant_at(col).is_some() {
                continue;
            }
            if self.nodes >= self.budget {
                self.exhausted = true;
                return;
            }
            self.nodes += 1;
            self.st.place(s, layout.seat_at(col));
            if self.promising() {
                self.descend(depth + 1);
            }
            self.st.unplace(s);
            if self.exhausted {
                return;
            }
        }
    }

    fn complete(&mut self) {
        let layout = self.inst.layout();
        let mut seats: Vec<_> = (0..self.inst.num_slots()).map(|s| self.st.seat_of(s)).collect();
        let mut free = (0..layout.num_seats()).filter(|&c| self.st.occupant_at(c).is_none());
        for seat in seats.iter_mut().filter(|s| s.is_none()) {
            *seat = Some(layout.seat_at(free.next().expect("one desk per slot")));
        }
        let assignment = Assignment::from_partial(layout, &seats).expect("complete and injective");
        let score = self.st.score();
        let fp = score.penalized(self.inst.phi());
        if self.best_fp.as_ref().is_none_or(|(b, _)| fp > *b) {
            self.best_fp = Some((fp, assignment.clone()));
        }
        if score.violations() == 0 && self.best_f.as_ref().is_none_or(|(b, _)| score.f > *b) {
            self.best_f = Some((score.f, assignment));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval;
    use crate::fixtures;
    use crate::io::InstanceFile;
    use crate::model::Instance;

    #[test]
    fn tiny_is_optimal_at_zero() {
        let r = brute_force(&fixtures::tiny(), u64::MAX);
        assert_eq!(r.status, OracleStatus::Optimal);
        assert_eq!(r.best_f, Some(0));
        assert_eq!(r.best_penalized, Some(0));
        let w = r.witness.unwrap();
        assert!(eval::is_feasible(&fixtures::tiny(), &w));
    }

    #[test]
    fn k4_is_infeasible() {
        let inst = fixtures::k4();
        let r = brute_force(&inst, u64::MAX);
        assert_eq!(r.status, OracleStatus::Infeasible);
        assert_eq!(r.best_f, None);
        let w = r.witness.unwrap();
        assert_eq!(Some(eval::penalized_objective(&inst, &w)), r.best_penalized);
        assert!(r.best_penalized.unwrap() < 0);
    }

    #[test]
    fn no_conflicts_gives_identity() {
        let inst = fixtures::conflict_free(vec![4, 4]);
        let r = brute_force(&inst, u64::MAX);
        assert_eq!(r.status, OracleStatus::Optimal);
        assert_eq!(r.best_f, Some(0));
        assert_eq!(r.witness.unwrap(), Assignment::identity(inst.layout()));
        assert_eq!(r.nodes, 0);
    }

    #[test]
    fn budget_is_reported() {
        let r = brute_force(&fixtures::k4(), 10);
        assert_eq!(r.status, OracleStatus::BudgetExceeded);
        assert_eq!(r.nodes, 10);
    }

    #[test]
    fn forced_active_edge() {
        // d_min' = 5 rules out sharing a row of 5, so the edge must be
        // active; the best it can do is distance 4, f = 4 - 5
        let inst = Instance::from_file(&InstanceFile {
            rows: vec![5, 5],
            students: 10,
            conflicts: vec![[1, 2]],
            front: vec![],
            back: vec![],
            d_min: 2,
            d_min_same_row: Some(5),
            psi: None,
        })
        .unwrap();
        let r = brute_force(&inst, u64::MAX);
        assert_eq!(r.status, OracleStatus::Optimal);
        assert_eq!(r.best_f, Some(-1));
        let w = r.witness.unwrap();
        assert_eq!(eval::active_edges(&inst, &w)[0].distance, 4);
    }

    #[test]
    fn front_pair_in_conflict_is_infeasible() {
        // front seats are positions 1-2 in every row, so the pair is at
        // distance <= 1 whether it shares a row or not
        let inst = Instance::from_file(&InstanceFile {
            rows: vec![4, 4],
            students: 8,
            conflicts: vec![[1, 2]],
            front: vec![1, 2],
            back: vec![],
            d_min: 2,
            d_min_same_row: None,
            psi: None,
        })
        .unwrap();
        assert_eq!(brute_force(&inst, u64::MAX).status, OracleStatus::Infeasible);
    }
}
