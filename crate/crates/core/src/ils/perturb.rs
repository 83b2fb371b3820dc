use rand::seq::{index, IndexedRandom};
use rand::Rng;

use crate::eval::pair_score;
use crate::state::Seating;

/// `ρ = max(1, ⌈n·θ⌉)`.
pub fn perturbation_size(n: usize, theta: f64) -> usize {
    (((n as f64) * theta) - 1e-9).ceil().max(1.0) as usize
}

/// Swaps `ρ` uniformly drawn students with uniformly drawn viable partners.
/// A swap is viable unless it breaks a constraint that held before it;
/// students already involved in a violation may go anywhere.
pub fn perturb<R: Rng + ?Sized>(st: &mut Seating<'_>, theta: f64, rng: &mut R) {
    let movable: Vec<usize> = st.movable().collect();
    if movable.len() < 2 {
        return;
    }
    let rho = perturbation_size(st.instance().num_slots(), theta).min(movable.len());
    let chosen: Vec<usize> = index::sample(rng, movable.len(), rho)
        .into_iter()
        .map(|k| movable[k])
        .collect();
    for s in chosen {
        let free_to_roam = st.is_violating(s);
        let partners: Vec<usize> = movable
            .iter()
            .copied()
            .filter(|&o| o != s && (free_to_roam || st.is_violating(o) || !breaks_constraint(st, s, o)))
            .collect();
        if let Some(&o) = partners.choose(rng) {
            st.swap(s, o);
        }
    }
}

/// Whether moving `a` into `b`'s seat turns one of `a`'s satisfied
/// constraints into a violated one. Only the destination is checked; `b`
/// takes whatever `a` leaves behind.
pub fn breaks_constraint(st: &Seating<'_>, a: usize, b: usize) -> bool {
    let inst = st.instance();
    let (from, to) = (st.seat(a), st.seat(b));
    let req = inst.requirement(a);
    if inst.layout().satisfies(req, from) && !inst.layout().satisfies(req, to) {
        return true;
    }
    inst.graph().neighbors(a).iter().any(|&j| {
        // after the exchange `b` sits where `a` was
        let other = if j == b { from } else { st.seat(j) };
        let before = pair_score(inst, from, st.seat(j));
        let after = pair_score(inst, to, other);
        before.gamma + before.delta == 0 && after.gamma + after.delta > 0
    })
}
