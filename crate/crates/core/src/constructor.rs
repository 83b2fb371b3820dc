//! Constructive phase: a student-by-desk weight matrix built by simulated
//! placement of the conflicting students, a partial solution read off the
//! matrix, relocation improvement, and completion.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::locks::Locks;
use crate::model::{Assignment, Instance, Requirement, Seat};
use crate::state::Seating;

/// Attempts at the strict (preference-honouring) simulation before falling
/// back to the relaxed one.
pub const MAX_SIMULATION_RETRIES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("no free {requirement:?} desk left for student {student} during weight simulation")]
    NoPreferredSeat {
        student: usize,
        requirement: Requirement,
    },
}

/// `n × n` cost surface: rows are students, columns are desk columns.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    cells: Vec<f64>,
    delta: f64,
    order: Vec<usize>,
}

impl WeightMatrix {
    pub fn zeros(inst: &Instance) -> Self {
        let n = inst.num_slots();
        Self {
            n,
            cells: vec![0.0; n * n],
            delta: (inst.layout().max_row_len() + 1) as f64,
            order: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Scale `Δ = max row length + 1`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Conflicting students in processing order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    #[inline]
    pub fn get(&self, student: usize, col: usize) -> f64 {
        self.cells[student * self.n + col]
    }

    #[inline]
    fn add(&mut self, student: usize, col: usize, v: f64) {
        self.cells[student * self.n + col] += v;
    }

    pub fn min(&self) -> f64 {
        self.cells.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `A ← A − min(A)`.
    pub fn normalize(&mut self) {
        if self.cells.is_empty() {
            return;
        }
        let m = self.min();
        for c in &mut self.cells {
            *c -= m;
        }
    }

    /// Pivot update for `student` simulated at `seat`: the student's row and
    /// the desk's column are raised by `2Δ` (the pivot cell excepted), and
    /// each conflicting neighbour's cells are raised around the desk.
    pub fn apply_pivot(&mut self, inst: &Instance, student: usize, seat: Seat) {
        let layout = inst.layout();
        let w = layout.column(seat);
        let two_delta = 2.0 * self.delta;
        for col in 0..self.n {
            if col != w {
                self.add(student, col, two_delta);
            }
        }
        for row in 0..self.n {
            if row != student {
                self.add(row, w, two_delta);
            }
        }
        let lo = seat.row.saturating_sub(1);
        let hi = (seat.row + 1).min(layout.num_rows() - 1);
        for &j in inst.graph().neighbors(student) {
            for r in lo..=hi {
                for other in layout.row_seats(r) {
                    let dist = other.pos.abs_diff(seat.pos);
                    let col = layout.column(other);
                    let bump = if r == seat.row {
                        if dist == 0 {
                            continue;
                        } else if dist < inst.d_min() {
                            two_delta
                        } else {
                            self.delta - 0.1 * dist as f64
                        }
                    } else if dist <= 1 {
                        two_delta
                    } else {
                        two_delta - 0.1 * dist as f64
                    };
                    self.add(j, col, bump);
                }
            }
        }
    }

    /// Sets `−n·Δ` on the front (back) desks of every conflicting student
    /// that needs the front (back).
    pub fn seed_requirements(&mut self, inst: &Instance) {
        let layout = inst.layout();
        let penalty = -(self.n as f64) * self.delta;
        for &s in &self.order {
            let req = inst.requirement(s);
            if !req.is_some() {
                continue;
            }
            for seat in layout.seats() {
                if layout.satisfies(req, seat) {
                    self.cells[s * self.n + layout.column(seat)] = penalty;
                }
            }
        }
    }

    /// Students × desk columns as CSV, for inspection.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("student");
        for c in 0..self.n {
            let _ = write!(out, ",d{}", c + 1);
        }
        out.push('\n');
        for s in 0..self.n {
            let _ = write!(out, "{}", s + 1);
            for c in 0..self.n {
                let _ = write!(out, ",{}", self.get(s, c));
            }
            out.push('\n');
        }
        out
    }
}

/// Conflicting students by degree (descending), then requirement holders
/// before neutral ones, remaining ties random.
pub fn conflict_order<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Vec<usize> {
    let g = inst.graph();
    let mut order: Vec<usize> = (0..inst.num_slots()).filter(|&s| g.degree(s) > 0).collect();
    order.shuffle(rng);
    order.sort_by_key(|&s| {
        (
            std::cmp::Reverse(g.degree(s)),
            !inst.requirement(s).is_some(),
        )
    });
    order
}

/// Runs the placement simulation over all conflicting students.
pub fn build_weight_matrix<R: Rng + ?Sized>(
    inst: &Instance,
    rng: &mut R,
) -> Result<WeightMatrix, ConstructError> {
    simulate(inst, &Locks::none(inst), rng, false)
}

fn simulate<R: Rng + ?Sized>(
    inst: &Instance,
    locks: &Locks,
    rng: &mut R,
    relaxed: bool,
) -> Result<WeightMatrix, ConstructError> {
    let layout = inst.layout();
    let mut a = WeightMatrix::zeros(inst);
    a.order = conflict_order(inst, rng);

    a.seed_requirements(inst);

    let mut used = vec![false; layout.num_seats()];
    for (_, seat) in locks.iter() {
        used[layout.column(seat)] = true;
    }
    let order = a.order.clone();
    for &s in &order {
        let seat = match locks.seat(s) {
            Some(seat) => seat,
            None => {
                let req = inst.requirement(s);
                let free = |honour: bool| -> Vec<usize> {
                    (0..layout.num_seats())
                        .filter(|&c| !used[c])
                        .filter(|&c| !honour || layout.satisfies(req, layout.seat_at(c)))
                        .collect()
                };
                let mut options = free(true);
                if options.is_empty() && relaxed {
                    options = free(false);
                }
                let Some(&col) = options.get(rng.random_range(0..options.len().max(1))) else {
                    return Err(ConstructError::NoPreferredSeat {
                        student: s,
                        requirement: req,
                    });
                };
                used[col] = true;
                layout.seat_at(col)
            }
        };
        a.apply_pivot(inst, s, seat);
    }
    Ok(a)
}

/// Seats assigned so far plus the students still waiting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSolution {
    pub seat_of: Vec<Option<Seat>>,
    /// Unseated students in ascending id order.
    pub unassigned: Vec<usize>,
}

impl PartialSolution {
    fn from_seating(st: &Seating<'_>) -> Self {
        let seat_of = st.seat_map().to_vec();
        let unassigned = (0..seat_of.len()).filter(|&s| seat_of[s].is_none()).collect();
        Self {
            seat_of,
            unassigned,
        }
    }

    fn to_seating<'a>(&self, inst: &'a Instance, locks: &Locks) -> Seating<'a> {
        let mut st = Seating::empty(inst);
        for (s, seat) in self.seat_of.iter().enumerate() {
            if let Some(seat) = seat {
                st.place(s, *seat);
            }
            if locks.is_locked(s) {
                st.lock(s);
            }
        }
        st
    }
}

/// Normalizes `a` and seats the conflicting students greedily by matrix
/// cost, keeping conflicting neighbours out of adjacent rows where
/// possible.
pub fn construct_partial(inst: &Instance, a: &mut WeightMatrix) -> PartialSolution {
    construct_partial_locked(inst, a, &Locks::none(inst))
}

fn construct_partial_locked(inst: &Instance, a: &mut WeightMatrix, locks: &Locks) -> PartialSolution {
    a.normalize();
    let layout = inst.layout();
    let g = inst.graph();
    let mut st = Seating::empty(inst);
    for (s, seat) in locks.iter() {
        st.place(s, seat);
        st.lock(s);
    }
    for (s, seat) in locks.iter() {
        bump_neighbourhood(inst, a, s, seat);
    }

    let order = a.order.clone();
    for &i in &order {
        if locks.is_locked(i) {
            continue;
        }
        let seated: Vec<Seat> = g
            .neighbors(i)
            .iter()
            .filter_map(|&j| st.seat_of(j))
            .collect();
        let clear = |seat: Seat| seated.iter().all(|o| o.row.abs_diff(seat.row) > 1);
        let spaced = |seat: Seat| {
            seated.iter().all(|o| {
                let dist = o.pos.abs_diff(seat.pos);
                match o.row.abs_diff(seat.row) {
                    0 => dist >= inst.d_min_same_row(),
                    1 => dist >= inst.d_min(),
                    _ => true,
                }
            })
        };
        let pick = |ok: &dyn Fn(Seat) -> bool| -> Option<usize> {
            let mut best: Option<(usize, f64)> = None;
            for col in st.free_columns() {
                if !ok(layout.seat_at(col)) {
                    continue;
                }
                let v = a.get(i, col);
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((col, v));
                }
            }
            best.map(|(c, _)| c)
        };
        let Some(col) = pick(&clear).or_else(|| pick(&spaced)) else {
            continue;
        };
        let seat = layout.seat_at(col);
        st.place(i, seat);
        bump_neighbourhood(inst, a, i, seat);
    }
    PartialSolution::from_seating(&st)
}

/// Raises the neighbours' costs on the 1-neighbourhood of a chosen desk.
fn bump_neighbourhood(inst: &Instance, a: &mut WeightMatrix, student: usize, seat: Seat) {
    let layout = inst.layout();
    let lo = seat.row.saturating_sub(1);
    let hi = (seat.row + 1).min(layout.num_rows() - 1);
    let delta = a.delta;
    for &j in inst.graph().neighbors(student) {
        for r in lo..=hi {
            for other in layout.row_seats(r) {
                let dist = other.pos.abs_diff(seat.pos);
                if dist <= 1 && !(r == seat.row && dist == 0) {
                    a.add(j, layout.column(other), delta);
                }
            }
        }
    }
}

/// Relocates seated students into empty desks while the penalized
/// objective strictly improves. Students are scanned by id, desks by
/// column; the first improving move is taken.
pub fn improve_partial_swaps(inst: &Instance, partial: &PartialSolution) -> PartialSolution {
    improve_partial_locked(inst, partial, &Locks::none(inst))
}

fn improve_partial_locked(inst: &Instance, partial: &PartialSolution, locks: &Locks) -> PartialSolution {
    let mut st = partial.to_seating(inst, locks);
    let layout = inst.layout();
    let phi = inst.phi();
    loop {
        let mut improved = false;
        for s in 0..inst.num_slots() {
            if st.is_locked(s) || st.seat_of(s).is_none() {
                continue;
            }
            let target = st
                .free_columns()
                .map(|c| layout.seat_at(c))
                .find(|&seat| st.move_delta(s, seat).penalized(phi) > 0);
            if let Some(seat) = target {
                st.place(s, seat);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    PartialSolution::from_seating(&st)
}

/// Inserts the remaining conflicting and requirement-holding students
/// where they break no constraint, then fills every other desk at random.
pub fn complete_solution<R: Rng + ?Sized>(
    inst: &Instance,
    partial: &PartialSolution,
    rng: &mut R,
) -> Assignment {
    complete_locked(inst, partial, &Locks::none(inst), rng)
}

fn complete_locked<R: Rng + ?Sized>(
    inst: &Instance,
    partial: &PartialSolution,
    locks: &Locks,
    rng: &mut R,
) -> Assignment {
    let mut st = partial.to_seating(inst, locks);
    let layout = inst.layout();
    let g = inst.graph();

    let mut pending: Vec<usize> = partial
        .unassigned
        .iter()
        .copied()
        .filter(|&s| g.degree(s) > 0)
        .collect();
    pending.sort_by_key(|&s| (std::cmp::Reverse(g.degree(s)), s));
    pending.extend(
        partial
            .unassigned
            .iter()
            .copied()
            .filter(|&s| g.degree(s) == 0 && inst.requirement(s).is_some()),
    );
    for s in pending {
        let target = st
            .free_columns()
            .map(|c| layout.seat_at(c))
            .find(|&seat| st.student_score(s, seat, None).violations() == 0);
        if let Some(seat) = target {
            st.place(s, seat);
        }
    }

    let mut rest: Vec<usize> = (0..inst.num_slots())
        .filter(|&s| st.seat_of(s).is_none())
        .collect();
    rest.shuffle(rng);
    let free: Vec<usize> = st.free_columns().collect();
    for (s, col) in rest.into_iter().zip(free) {
        st.place(s, layout.seat_at(col));
    }
    st.to_assignment()
}

/// Full constructive phase. Deterministic for a given RNG state.
pub fn initial_solution<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Assignment {
    initial_solution_locked(inst, &Locks::none(inst), rng)
}

/// Constructive phase with pinned students, which keep their seats and are
/// excluded from placement.
pub fn initial_solution_locked<R: Rng + ?Sized>(
    inst: &Instance,
    locks: &Locks,
    rng: &mut R,
) -> Assignment {
    let mut matrix = None;
    for _ in 0..MAX_SIMULATION_RETRIES {
        if let Ok(a) = simulate(inst, locks, rng, false) {
            matrix = Some(a);
            break;
        }
    }
    let mut a = match matrix {
        Some(a) => a,
        None => simulate(inst, locks, rng, true).expect("relaxed simulation always finds a desk"),
    };
    let partial = construct_partial_locked(inst, &mut a, locks);
    let improved = improve_partial_locked(inst, &partial, locks);
    complete_locked(inst, &improved, locks, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval;
    use crate::fixtures;
    use crate::io::InstanceFile;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn pivot_update_matches_worked_example() {
        // Rows [4, 5, 5] give Δ = 6; student 3 conflicts with 7, 9 and 13
        // and is simulated on desk 2.
        let inst = Instance::from_file(&InstanceFile {
            rows: vec![4, 5, 5],
            students: 14,
            conflicts: vec![[3, 7], [3, 9], [3, 13]],
            front: vec![],
            back: vec![],
            d_min: 2,
            d_min_same_row: None,
            psi: None,
        })
        .unwrap();
        let mut a = WeightMatrix::zeros(&inst);
        assert_eq!(a.delta(), 6.0);
        a.apply_pivot(&inst, 2, Seat::new(0, 1));
        for j in [6, 8, 12] {
            for desk in [1, 3, 5, 6, 7] {
                assert_eq!(a.get(j, desk - 1), 12.0, "student {} desk {desk}", j + 1);
            }
            assert!((a.get(j, 3) - 5.8).abs() < 1e-12);
            // desk 8 is (2, 4): adjacent row, distance 2
            assert!((a.get(j, 7) - 11.8).abs() < 1e-12);
            // pivot column was raised for everybody but student 3
            assert_eq!(a.get(j, 1), 12.0);
            // rows 3+ untouched
            assert_eq!(a.get(j, 10), 0.0);
        }
        assert_eq!(a.get(2, 1), 0.0);
        assert_eq!(a.get(2, 0), 12.0);
        assert_eq!(a.get(0, 1), 12.0);
    }

    #[test]
    fn conflict_free_matrix_stays_zero() {
        let inst = fixtures::conflict_free(vec![4, 4]);
        let a = build_weight_matrix(&inst, &mut rng(1)).unwrap();
        assert!(a.cells.iter().all(|&v| v == 0.0));
        assert!(a.order().is_empty());
    }

    #[test]
    fn tiny_front_initialization() {
        let inst = fixtures::tiny();
        let mut a = WeightMatrix::zeros(&inst);
        a.order = conflict_order(&inst, &mut rng(0));
        a.seed_requirements(&inst);
        assert_eq!(a.delta(), 5.0);
        for col in [0, 1, 4, 5] {
            assert_eq!(a.get(0, col), -40.0);
        }
        for col in [2, 3, 6, 7] {
            assert_eq!(a.get(0, col), 0.0);
        }
    }

    #[test]
    fn simulation_honours_requirements() {
        let inst = fixtures::tiny();
        for seed in 0..50 {
            let a = build_weight_matrix(&inst, &mut rng(seed)).unwrap();
            // student 1's pivot column holds the lowest value in its row
            let best = (0..8)
                .min_by(|&x, &y| a.get(0, x).total_cmp(&a.get(0, y)))
                .unwrap();
            assert!(inst.layout().is_front(inst.layout().seat_at(best)));
        }
    }

    #[test]
    fn order_is_by_degree_then_requirement() {
        let inst = Instance::from_file(&InstanceFile {
            rows: vec![4, 4],
            students: 8,
            conflicts: vec![[1, 2], [1, 3], [4, 5]],
            front: vec![5],
            back: vec![],
            d_min: 2,
            d_min_same_row: None,
            psi: None,
        })
        .unwrap();
        for seed in 0..20 {
            let order = conflict_order(&inst, &mut rng(seed));
            assert_eq!(order[0], 0);
            assert_eq!(order[1], 4);
            assert_eq!(order.len(), 5);
        }
    }

    #[test]
    fn normalization_makes_minimum_zero() {
        let inst = fixtures::k4();
        let mut a = build_weight_matrix(&inst, &mut rng(3)).unwrap();
        a.normalize();
        assert_eq!(a.min(), 0.0);
        assert!(a.cells.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn tiny_partial_places_both_students() {
        let inst = fixtures::tiny();
        for seed in 0..30 {
            let mut a = build_weight_matrix(&inst, &mut rng(seed)).unwrap();
            let p = construct_partial(&inst, &mut a);
            let s1 = p.seat_of[0].unwrap();
            let s2 = p.seat_of[1].unwrap();
            assert!(inst.layout().is_front(s1), "seed {seed}: {s1}");
            match s1.row.abs_diff(s2.row) {
                0 => assert!(s1.pos.abs_diff(s2.pos) >= 2),
                1 => assert!(s1.pos.abs_diff(s2.pos) >= 2),
                _ => {}
            }
            assert_eq!(p.unassigned, vec![2, 3, 4, 5, 6, 7]);
        }
    }

    #[test]
    fn conflict_free_partial_is_empty() {
        let inst = fixtures::conflict_free(vec![4, 4]);
        let mut a = build_weight_matrix(&inst, &mut rng(0)).unwrap();
        let p = construct_partial(&inst, &mut a);
        assert!(p.seat_of.iter().all(Option::is_none));
        assert_eq!(p.unassigned.len(), 8);
    }

    #[test]
    fn k4_partial_leaves_someone_out() {
        let inst = fixtures::k4();
        for seed in 0..30 {
            let mut a = build_weight_matrix(&inst, &mut rng(seed)).unwrap();
            let p = construct_partial(&inst, &mut a);
            assert!(p.unassigned.iter().any(|&s| s < 4), "seed {seed}");
            // placed clique members respect the relaxed spacing rule
            let placed: Vec<Seat> = (0..4).filter_map(|s| p.seat_of[s]).collect();
            for (x, a) in placed.iter().enumerate() {
                for b in &placed[x + 1..] {
                    let d = a.pos.abs_diff(b.pos);
                    match a.row.abs_diff(b.row) {
                        0 => assert!(d >= 2),
                        1 => assert!(d >= 2),
                        _ => {}
                    }
                }
            }
        }
    }

    #[test]
    fn relocation_resolves_same_row_conflict() {
        let inst = fixtures::tiny();
        let mut seat_of = vec![None; 8];
        seat_of[0] = Some(Seat::new(0, 0));
        seat_of[1] = Some(Seat::new(0, 1));
        let p = PartialSolution {
            seat_of,
            unassigned: (2..8).collect(),
        };
        assert_eq!(eval::penalized_objective(&inst, &p.seat_of), -inst.phi());
        let q = improve_partial_swaps(&inst, &p);
        assert_eq!(eval::penalized_objective(&inst, &q.seat_of), 0);
        // a fixed point is returned unchanged
        assert_eq!(improve_partial_swaps(&inst, &q), q);
        let empty = PartialSolution {
            seat_of: vec![None; 8],
            unassigned: (0..8).collect(),
        };
        assert_eq!(improve_partial_swaps(&inst, &empty), empty);
    }

    #[test]
    fn completion_is_total() {
        let inst = fixtures::tiny();
        for seed in 0..20 {
            let mut r = rng(seed);
            let mut a = build_weight_matrix(&inst, &mut r).unwrap();
            let p = improve_partial_swaps(&inst, &construct_partial(&inst, &mut a));
            let full = complete_solution(&inst, &p, &mut r);
            assert!(Assignment::new(inst.layout(), full.seats().to_vec()).is_ok());
            assert_eq!(eval::penalized_objective(&inst, &full), 0);
        }
    }

    #[test]
    fn k4_completion_is_infeasible() {
        let inst = fixtures::k4();
        let full = initial_solution(&inst, &mut rng(5));
        assert!(eval::violations(&inst, &full).delta + eval::violations(&inst, &full).gamma >= 1);
    }

    #[test]
    fn initial_solution_examples() {
        let tiny = fixtures::tiny();
        let a = initial_solution(&tiny, &mut rng(42));
        assert!(eval::is_feasible(&tiny, &a));
        assert_eq!(eval::objective(&tiny, &a), 0);

        let row = fixtures::conflict_free(vec![8]);
        assert!(eval::is_feasible(&row, &initial_solution(&row, &mut rng(1))));

        let b = initial_solution(&tiny, &mut rng(42));
        assert_eq!(a, b);
    }

    #[test]
    fn overfull_front_demand_falls_back() {
        // five front-requiring conflicting students, four front desks
        let inst = Instance::from_file(&InstanceFile {
            rows: vec![4, 4],
            students: 8,
            conflicts: vec![[1, 2], [3, 4], [5, 1]],
            front: vec![1, 2, 3, 4, 5],
            back: vec![],
            d_min: 2,
            d_min_same_row: None,
            psi: None,
        })
        .unwrap();
        assert!(build_weight_matrix(&inst, &mut rng(0)).is_err());
        let a = initial_solution(&inst, &mut rng(0));
        assert_eq!(a.len(), 8);
    }

    #[test]
    fn locked_students_keep_their_seats() {
        let inst = fixtures::tiny();
        let locks = Locks::new(&inst, &[(0, Seat::new(1, 1)), (5, Seat::new(0, 3))]).unwrap();
        for seed in 0..10 {
            let a = initial_solution_locked(&inst, &locks, &mut rng(seed));
            assert_eq!(a.seat_of(0), Seat::new(1, 1));
            assert_eq!(a.seat_of(5), Seat::new(0, 3));
        }
    }
}
