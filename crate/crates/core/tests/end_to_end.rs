use seatplan_core::builtin::{classroom, classroom_file, Classroom};
use seatplan_core::io::AssignmentFile;
use seatplan_core::oracle::{brute_force, OracleStatus};
use seatplan_core::{eval, fixtures, lp, solve, Instance, InstanceFile, SolveParams};

#[test]
fn tiny_reaches_its_known_optimum() {
    // student 1 on a front desk, student 2 in the other row's far half or
    // two desks along the same row: f = 0 is attainable by hand
    let inst = fixtures::tiny();
    let r = solve(&inst, &SolveParams::with_seed(11));
    assert!(r.feasible);
    assert_eq!(r.f, 0);
    assert_eq!(brute_force(&inst, u64::MAX).best_f, Some(0));
}

#[test]
fn clique_on_two_rows_is_infeasible_everywhere() {
    // four mutually conflicting students in two rows of four: at most two
    // fit in one row at distance 2, and any pair across rows is active
    let inst = fixtures::k4();
    assert_eq!(brute_force(&inst, u64::MAX).status, OracleStatus::Infeasible);
    for seed in 0..5 {
        let r = solve(&inst, &SolveParams::with_seed(seed));
        assert!(!r.feasible);
        assert!(r.f_p < 0);
    }
}

#[test]
fn result_files_round_trip() {
    let inst = classroom(Classroom::III);
    let r = solve(&inst, &SolveParams::with_seed(2));
    let file = AssignmentFile::from_assignment(&inst, &r.assignment);
    let back = AssignmentFile::from_json(&file.to_json()).unwrap().to_assignment(&inst).unwrap();
    assert_eq!(eval::objective(&inst, &back), r.f);
    assert_eq!(eval::is_feasible(&inst, &back), r.feasible);

    // defaults for d' and Ψ are written out explicitly
    let normalized = classroom(Classroom::II).to_file();
    assert_eq!((normalized.d_min_same_row, normalized.psi), (Some(2), Some(5)));
    let again = InstanceFile::from_json(&normalized.to_json()).unwrap();
    assert_eq!(again, normalized);
    assert_eq!(Instance::from_file(&again).unwrap().to_file(), normalized);
}

#[test]
fn lp_counts_for_builtin_rooms() {
    for c in Classroom::ALL {
        let inst = classroom(c);
        let f = classroom_file(c);
        let seats: usize = f.rows.iter().sum();
        let pairs: usize = f.rows.windows(2).map(|w| w[0] * w[1]).sum();
        assert_eq!(lp::x_count(&inst), f.students * seats);
        assert_eq!(lp::w_count(&inst), 2 * f.conflicts.len() * pairs);
    }
}
