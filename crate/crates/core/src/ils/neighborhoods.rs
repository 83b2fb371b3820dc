//! The four swap neighbourhoods and the local search that chains them.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::eval::{active_edges, Score};
use crate::model::{Requirement, Seat};
use crate::state::Seating;

use super::SolveParams;

/// Randomized best-improvement swaps. A fraction of each row's students is
/// drawn; requirement holders try the matching section of the room, neutral
/// students try their own row plus two random rows, subsampled.
pub fn swap1<R: Rng + ?Sized>(st: &mut Seating<'_>, params: &SolveParams, rng: &mut R) {
    let inst = st.instance();
    let layout = inst.layout();
    let phi = inst.phi();
    loop {
        let mut improved = false;
        for row in 0..layout.num_rows() {
            let occupants: Vec<usize> = layout
                .row_seats(row)
                .filter_map(|seat| st.occupant(seat))
                .filter(|&s| !st.is_locked(s))
                .collect();
            let take = selection_size(params.psi, layout.row_len(row)).min(occupants.len());
            let picked: Vec<usize> = index::sample(rng, occupants.len(), take)
                .into_iter()
                .map(|k| occupants[k])
                .collect();
            for s in picked {
                let candidates = swap1_candidates(st, s, params, rng);
                let mut best: Option<(usize, i64)> = None;
                for seat in candidates {
                    let Some(other) = st.occupant(seat) else { continue };
                    if other == s || st.is_locked(other) {
                        continue;
                    }
                    let gain = st.swap_delta(s, other).penalized(phi);
                    if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                        best = Some((other, gain));
                    }
                }
                if let Some((other, _)) = best {
                    st.swap(s, other);
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// `⌈ψ · row length⌉` students drawn per row.
pub fn selection_size(psi: f64, row_len: usize) -> usize {
    ceil_frac(psi, row_len)
}

/// Number of neutral-student candidates evaluated: `⌈Γ · available⌉`
/// clamped to the configured window and to what is available.
pub fn candidate_budget(params: &SolveParams, available: usize) -> usize {
    ceil_frac(params.gamma_frac, available)
        .clamp(params.candidate_min, params.candidate_max)
        .min(available)
}

fn ceil_frac(frac: f64, n: usize) -> usize {
    // guard against 0.35 * 20 = 7.000000000000001
    ((frac * n as f64) - 1e-9).ceil().max(0.0) as usize
}

fn swap1_candidates<R: Rng + ?Sized>(
    st: &Seating<'_>,
    s: usize,
    params: &SolveParams,
    rng: &mut R,
) -> Vec<Seat> {
    let inst = st.instance();
    let layout = inst.layout();
    let own = st.seat(s);
    let req = inst.requirement(s);
    match req {
        Requirement::Front | Requirement::Back => layout
            .seats()
            .filter(|&seat| seat != own && layout.satisfies(req, seat))
            .collect(),
        Requirement::None => {
            let mut cands: Vec<Seat> = layout.row_seats(own.row).filter(|&x| x != own).collect();
            let mut others: Vec<usize> = (0..layout.num_rows()).filter(|&r| r != own.row).collect();
            others.shuffle(rng);
            for &r in others.iter().take(2) {
                cands.extend(layout.row_seats(r));
            }
            let budget = candidate_budget(params, cands.len());
            index::sample(rng, cands.len(), budget)
                .into_iter()
                .map(|k| cands[k])
                .collect()
        }
    }
}

/// Moves students missing `req` onto matching desks. An exchange must lower
/// the number of unmet `req` requirements and must not lower `f_p`.
fn fix_requirement(st: &mut Seating<'_>, req: Requirement) {
    let inst = st.instance();
    let layout = inst.layout();
    let phi = inst.phi();
    let unmet = |d: &Score| match req {
        Requirement::Front => d.alpha,
        Requirement::Back => d.beta,
        Requirement::None => 0,
    };
    loop {
        let mut moved = false;
        for s in 0..inst.num_slots() {
            if inst.requirement(s) != req || st.is_locked(s) || layout.satisfies(req, st.seat(s)) {
                continue;
            }
            let mut best: Option<(usize, i64)> = None;
            for seat in layout.seats().filter(|&x| layout.satisfies(req, x)) {
                let Some(other) = st.occupant(seat) else { continue };
                if st.is_locked(other) {
                    continue;
                }
                let d = st.swap_delta(s, other);
                let gain = d.penalized(phi);
                if unmet(&d) < 0 && gain >= 0 && best.is_none_or(|(_, g)| gain > g) {
                    best = Some((other, gain));
                }
            }
            if let Some((other, _)) = best {
                st.swap(s, other);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}

/// Back-requirement repair.
pub fn swap2(st: &mut Seating<'_>) {
    fix_requirement(st, Requirement::Back);
}

/// Front-requirement repair.
pub fn swap3(st: &mut Seating<'_>) {
    fix_requirement(st, Requirement::Front);
}

/// Breaks up active edges shorter than `d_min` by exchanging an endpoint
/// with a student not involved in any violation, first improvement in seat
/// column order.
pub fn swap4(st: &mut Seating<'_>) {
    let inst = st.instance();
    let layout = inst.layout();
    let phi = inst.phi();
    loop {
        let mut improved = false;
        let short: Vec<(usize, usize)> = active_edges(inst, st.seat_map())
            .into_iter()
            .filter(|e| e.distance < inst.d_min())
            .map(|e| (e.i, e.j))
            .collect();
        for (i, j) in short {
            let (a, b) = (st.seat(i), st.seat(j));
            if a.row.abs_diff(b.row) != 1 || a.pos.abs_diff(b.pos) >= inst.d_min() {
                continue;
            }
            'endpoints: for end in [i, j] {
                if st.is_locked(end) {
                    continue;
                }
                for col in 0..layout.num_seats() {
                    let Some(other) = st.occupant_at(col) else { continue };
                    if other == end || st.is_locked(other) || st.is_violating(other) {
                        continue;
                    }
                    let d = st.swap_delta(end, other);
                    if d.penalized(phi) > 0 && d.delta <= 0 {
                        st.swap(end, other);
                        improved = true;
                        break 'endpoints;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Swap I, II, III and IV in sequence, each to its own fixed point.
pub fn local_search<R: Rng + ?Sized>(st: &mut Seating<'_>, params: &SolveParams, rng: &mut R) {
    swap1(st, params, rng);
    swap2(st);
    swap3(st);
    swap4(st);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval;
    use crate::fixtures;
    use crate::io::InstanceFile;
    use crate::model::{Assignment, Instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seating_with<'a>(inst: &'a Instance, moves: &[(usize, Seat)]) -> Seating<'a> {
        let mut st = Seating::from_assignment(inst, &Assignment::identity(inst.layout()));
        for &(s, seat) in moves {
            st.relocate(s, seat);
        }
        st
    }

    #[test]
    fn selection_sizes() {
        assert_eq!(selection_size(0.35, 5), 2);
        assert_eq!(selection_size(0.35, 4), 2);
        assert_eq!(selection_size(0.35, 20), 7);
        let p = SolveParams::default();
        assert_eq!(candidate_budget(&p, 5), 5);
        assert_eq!(candidate_budget(&p, 12), 8);
        assert_eq!(candidate_budget(&p, 40), 14);
        assert_eq!(candidate_budget(&p, 200), 30);
    }

    #[test]
    fn swap1_keeps_optimum() {
        let inst = fixtures::tiny();
        // s1 → (1,1), s2 → (1,3): f_p = 0
        let mut st = seating_with(&inst, &[(1, Seat::new(0, 2))]);
        assert_eq!(st.fp(), 0);
        let before = st.to_assignment();
        swap1(&mut st, &SolveParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(st.to_assignment(), before);
    }

    #[test]
    fn swap1_separates_adjacent_pair() {
        let inst = fixtures::tiny();
        let mut separated = 0;
        for seed in 0..20 {
            // s1 at (1,1), s2 at (1,2): γ = 1
            let mut st = seating_with(&inst, &[]);
            assert_eq!(st.fp(), -inst.phi());
            swap1(&mut st, &SolveParams::default(), &mut ChaCha8Rng::seed_from_u64(seed));
            assert!(st.fp() >= -inst.phi());
            if st.fp() == 0 {
                separated += 1;
            }
        }
        assert!(separated >= 18, "{separated}");
    }

    fn back_instance() -> Instance {
        Instance::from_file(&InstanceFile {
            rows: vec![4, 4],
            students: 8,
            conflicts: vec![],
            front: vec![2, 3],
            back: vec![1],
            d_min: 2,
            d_min_same_row: None,
            psi: None,
        })
        .unwrap()
    }

    #[test]
    fn swap2_moves_back_student() {
        let inst = back_instance();
        // identity: student 1 (back) sits at (1,1)
        let mut st = seating_with(&inst, &[(1, Seat::new(1, 0)), (2, Seat::new(1, 1))]);
        assert_eq!(st.score().beta, 1);
        swap2(&mut st);
        assert_eq!(st.score().beta, 0);
        assert!(inst.layout().is_back(st.seat(0)));
    }

    #[test]
    fn swap3_fixes_two_front_students_in_one_call() {
        let inst = back_instance();
        let mut st = seating_with(&inst, &[(1, Seat::new(1, 3)), (2, Seat::new(1, 2)), (0, Seat::new(0, 3))]);
        assert_eq!(st.score().alpha, 2);
        swap3(&mut st);
        assert_eq!(st.score().alpha, 0);
        // identity when nothing is misplaced
        let before = st.to_assignment();
        swap3(&mut st);
        swap2(&mut st);
        assert_eq!(st.to_assignment(), before);
    }

    #[test]
    fn swap4_breaks_short_edge() {
        let inst = fixtures::tiny();
        // s1 (1,1), s2 (2,2): active, distance 1
        let mut st = seating_with(&inst, &[(1, Seat::new(1, 1))]);
        assert_eq!(st.score().delta, 1);
        let fp = st.fp();
        swap4(&mut st);
        assert_eq!(st.score().delta, 0);
        assert!(st.fp() > fp);
    }

    #[test]
    fn swap4_on_k4_never_worsens() {
        let inst = fixtures::k4();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cols: Vec<usize> = (0..8).collect();
            cols.shuffle(&mut rng);
            let a = Assignment::from_columns(inst.layout(), &cols).unwrap();
            let mut st = Seating::from_assignment(&inst, &a);
            let (fp, delta) = (st.fp(), st.score().delta);
            swap4(&mut st);
            assert!(st.fp() >= fp);
            assert!(st.score().delta <= delta);
            assert_eq!(st.score(), eval::score(&inst, st.seat_map()));
        }
    }

    #[test]
    fn local_search_reaches_tiny_optimum() {
        let inst = fixtures::tiny();
        let params = SolveParams::default();
        let mut hits = 0;
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cols: Vec<usize> = (0..8).collect();
            cols.shuffle(&mut rng);
            let mut st = Seating::from_assignment(&inst, &Assignment::from_columns(inst.layout(), &cols).unwrap());
            let before = st.fp();
            local_search(&mut st, &params, &mut rng);
            assert!(st.fp() >= before);
            if st.fp() == 0 {
                hits += 1;
            }
        }
        assert!(hits >= 90, "{hits}/100");
    }

    #[test]
    fn local_search_counters_do_not_grow() {
        // α = β = γ = δ = 1 start: front student at the back, back student at
        // the front, a same-row pair and a short active edge
        let inst = Instance::from_file(&InstanceFile {
            rows: vec![5, 5, 5],
            students: 15,
            conflicts: vec![[3, 4], [5, 8]],
            front: vec![1],
            back: vec![2],
            d_min: 2,
            d_min_same_row: None,
            psi: None,
        })
        .unwrap();
        let mut st = seating_with(
            &inst,
            &[
                (0, Seat::new(0, 4)),
                (1, Seat::new(2, 0)),
                (2, Seat::new(1, 1)),
                (3, Seat::new(1, 2)),
                (4, Seat::new(0, 2)),
                (7, Seat::new(1, 3)),
            ],
        );
        let c = st.score().counts();
        assert_eq!((c.alpha, c.beta, c.gamma, c.delta), (1, 1, 1, 1));
        let fp = st.fp();
        local_search(&mut st, &SolveParams::default(), &mut ChaCha8Rng::seed_from_u64(9));
        let d = st.score().counts();
        assert!(d.alpha <= 1 && d.beta <= 1 && d.gamma <= 1 && d.delta <= 1);
        assert!(st.fp() >= fp);
    }
}
