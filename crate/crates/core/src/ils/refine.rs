//! Final pass over the incumbent: first push endpoints of active edges into
//! rows away from all their conflicts, then spread the surviving active
//! edges as far apart as their two rows allow without lowering `f_p`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::eval::active_edges;
use crate::model::Seat;
use crate::state::Seating;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefinePhase {
    RemoveEdges,
    Spread,
}

/// One applied refinement move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RefineStep {
    pub phase: RefinePhase,
    pub student: usize,
    pub from: Seat,
    pub to: Seat,
    pub fp: i64,
    pub active: i64,
}

/// Runs both phases in place and returns the applied moves.
pub fn refine(st: &mut Seating<'_>) -> Vec<RefineStep> {
    let mut log = Vec::new();
    remove_edges(st, &mut log);
    spread_edges(st, &mut log);
    log
}

fn endpoints(st: &Seating<'_>) -> Vec<usize> {
    let mut l: Vec<usize> = active_edges(st.instance(), st.seat_map())
        .iter()
        .flat_map(|e| [e.i, e.j])
        .filter(|&s| !st.is_locked(s))
        .collect();
    l.sort_unstable();
    l.dedup();
    l
}

fn remove_edges(st: &mut Seating<'_>, log: &mut Vec<RefineStep>) {
    let inst = st.instance();
    let layout = inst.layout();
    let phi = inst.phi();
    loop {
        let mut moved = false;
        for i in endpoints(st) {
            let own = st.seat(i);
            let neighbour_rows: Vec<usize> = inst
                .graph()
                .neighbors(i)
                .iter()
                .map(|&j| st.seat(j).row)
                .collect();
            if !neighbour_rows.iter().any(|&r| r.abs_diff(own.row) == 1) {
                continue;
            }
            let mut best: Option<(usize, i64)> = None;
            for row in 0..layout.num_rows() {
                if row == own.row || neighbour_rows.iter().any(|&r| r.abs_diff(row) == 1) {
                    continue;
                }
                for seat in layout.row_seats(row) {
                    let Some(other) = st.occupant(seat) else { continue };
                    if st.is_locked(other) {
                        continue;
                    }
                    let d = st.swap_delta(i, other);
                    let gain = d.penalized(phi);
                    if d.active < 0 && gain >= 0 && best.is_none_or(|(_, g)| gain > g) {
                        best = Some((other, gain));
                    }
                }
            }
            if let Some((other, _)) = best {
                let to = st.seat(other);
                st.swap(i, other);
                moved = true;
                log.push(RefineStep {
                    phase: RefinePhase::RemoveEdges,
                    student: i,
                    from: own,
                    to,
                    fp: st.fp(),
                    active: st.score().active,
                });
            }
        }
        if !moved {
            break;
        }
    }
}

fn spread_edges(st: &mut Seating<'_>, log: &mut Vec<RefineStep>) {
    let inst = st.instance();
    let layout = inst.layout();
    loop {
        let mut improved = false;
        for e in active_edges(inst, st.seat_map()) {
            let (i, j) = (e.i, e.j);
            if st.is_locked(i) || st.is_locked(j) {
                continue;
            }
            let (si, sj) = (st.seat(i), st.seat(j));
            if si.row.abs_diff(sj.row) != 1 {
                continue;
            }
            let current = si.pos.abs_diff(sj.pos);
            let before: BTreeMap<(usize, usize), usize> = active_edges(inst, st.seat_map())
                .iter()
                .map(|e| ((e.i, e.j), e.distance))
                .collect();
            let fp_before = st.fp();
            let mut best: Option<(usize, i64, Seating<'_>)> = None;
            for p in 0..layout.row_len(si.row) {
                for q in 0..layout.row_len(sj.row) {
                    let dist = p.abs_diff(q);
                    if dist <= current {
                        continue;
                    }
                    let (ti, tj) = (Seat::new(si.row, p), Seat::new(sj.row, q));
                    if st.occupant(ti).is_some_and(|o| o != i && st.is_locked(o))
                        || st.occupant(tj).is_some_and(|o| o != j && st.is_locked(o))
                    {
                        continue;
                    }
                    let mut trial = st.clone();
                    trial.relocate(i, ti);
                    trial.relocate(j, tj);
                    if trial.fp() < fp_before {
                        continue;
                    }
                    // no new active edge, and none gets shorter
                    let keeps = active_edges(inst, trial.seat_map())
                        .iter()
                        .all(|a| before.get(&(a.i, a.j)).is_some_and(|&d| a.distance >= d));
                    if !keeps {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((bd, bfp, _)) => dist > *bd || (dist == *bd && trial.fp() > *bfp),
                    };
                    if better {
                        best = Some((dist, trial.fp(), trial));
                    }
                }
            }
            if let Some((_, _, trial)) = best {
                let (to_i, to_j) = (trial.seat(i), trial.seat(j));
                *st = trial;
                improved = true;
                for (student, from, to) in [(i, si, to_i), (j, sj, to_j)] {
                    if from != to {
                        log.push(RefineStep {
                            phase: RefinePhase::Spread,
                            student,
                            from,
                            to,
                            fp: st.fp(),
                            active: st.score().active,
                        });
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}
