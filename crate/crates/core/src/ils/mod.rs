//! Iterated local search: constructive start, perturbation, four swap
//! neighbourhoods and a final refinement of the active edges.

mod neighborhoods;
mod perturb;
mod refine;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructor::initial_solution_locked;
use crate::eval::{self, ViolationCounts};
use crate::locks::Locks;
use crate::model::{Assignment, Instance};
use crate::state::Seating;

pub use neighborhoods::{candidate_budget, local_search, selection_size, swap1, swap2, swap3, swap4};
pub use perturb::{breaks_constraint, perturb, perturbation_size};
pub use refine::{RefinePhase, RefineStep};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("theta out of range (0, 1]: {0}")]
    Theta(f64),
    #[error("psi out of range (0, 1): {0}")]
    Psi(f64),
    #[error("gamma fraction out of range (0, 1): {0}")]
    GammaFrac(f64),
    #[error("candidate bounds must satisfy 1 <= min <= max, got [{0}, {1}]")]
    CandidateBounds(usize, usize),
    #[error("it_max must be positive")]
    ItMax,
    #[error("eta_max must be positive")]
    EtaMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveParams {
    /// Fraction of students swapped by a perturbation.
    pub theta: f64,
    pub it_max: usize,
    /// Iterations without improvement before giving up.
    pub eta_max: usize,
    /// Fraction of each row drawn by Swap I.
    pub psi: f64,
    /// Fraction of candidate seats examined per student in Swap I, clamped
    /// to `[candidate_min, candidate_max]`.
    pub gamma_frac: f64,
    pub candidate_min: usize,
    pub candidate_max: usize,
    pub seed: u64,
    pub time_limit: Option<Duration>,
    /// Record per-iteration values and refinement moves.
    pub trace: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            theta: 0.25,
            it_max: 10_000,
            eta_max: 500,
            psi: 0.35,
            gamma_frac: 0.35,
            candidate_min: 8,
            candidate_max: 30,
            seed: 0,
            time_limit: None,
            trace: false,
        }
    }
}

impl SolveParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(ParamError::Theta(self.theta));
        }
        if !open(self.psi) {
            return Err(ParamError::Psi(self.psi));
        }
        if !open(self.gamma_frac) {
            return Err(ParamError::GammaFrac(self.gamma_frac));
        }
        if self.candidate_min == 0 || self.candidate_min > self.candidate_max {
            return Err(ParamError::CandidateBounds(self.candidate_min, self.candidate_max));
        }
        if self.it_max == 0 {
            return Err(ParamError::ItMax);
        }
        if self.eta_max == 0 {
            return Err(ParamError::EtaMax);
        }
        Ok(())
    }
}

/// Values of the constructive solution, before any search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialStats {
    pub f: i64,
    pub f_p: i64,
    pub feasible: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// One ILS iteration: current penalized value after local search and the
/// incumbent's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub f_p: i64,
    pub best_f_p: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub assignment: Assignment,
    pub f: i64,
    pub f_p: i64,
    pub feasible: bool,
    pub violations: ViolationCounts,
    pub active_edges: usize,
    pub iterations: usize,
    /// Stopped by the stagnation limit rather than `it_max`, the target or
    /// the deadline.
    pub stagnation_hit: bool,
    pub seed: u64,
    pub initial: InitialStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<IterationRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine_trace: Option<Vec<RefineStep>>,
    /// Wall time; left out of the JSON so that output is reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Runs the full method with the given parameters.
pub fn solve(inst: &Instance, params: &SolveParams) -> SolveResult {
    solve_locked(inst, params, &Locks::none(inst))
}

/// As [`solve`], keeping locked students at their seats throughout.
pub fn solve_locked(inst: &Instance, params: &SolveParams, locks: &Locks) -> SolveResult {
    let start = Instant::now();
    let deadline = params.time_limit.map(|t| start + t);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let initial = initial_solution_locked(inst, locks, &mut rng);
    let initial_score = eval::score(inst, &initial);
    let initial_stats = InitialStats {
        f: initial_score.f,
        f_p: initial_score.penalized(inst.phi()),
        feasible: initial_score.violations() == 0,
        elapsed: start.elapsed(),
    };

    let flags = locks.flags();
    let mut best = Seating::from_assignment(inst, &initial).with_locks(&flags);
    swap1(&mut best, params, &mut rng);

    let mut trace = params.trace.then(Vec::new);
    let mut iterations = 0;
    let mut stagnation = 0;
    let mut stagnation_hit = false;
    // f_p never exceeds 0, so 0 is optimal.
    while iterations < params.it_max && best.fp() < 0 {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        if stagnation >= params.eta_max {
            stagnation_hit = true;
            break;
        }
        iterations += 1;
        let mut current = best.clone();
        perturb(&mut current, params.theta, &mut rng);
        local_search(&mut current, params, &mut rng);
        let current_fp = current.fp();
        if current.fp() > best.fp() {
            best = current;
            stagnation = 0;
        } else {
            stagnation += 1;
        }
        if let Some(t) = trace.as_mut() {
            t.push(IterationRecord {
                iteration: iterations,
                f_p: current_fp,
                best_f_p: best.fp(),
            });
        }
    }

    let steps = refine::refine(&mut best);
    finish(inst, best, params, initial_stats, iterations, stagnation_hit, trace, steps, start)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    inst: &Instance,
    st: Seating<'_>,
    params: &SolveParams,
    initial: InitialStats,
    iterations: usize,
    stagnation_hit: bool,
    trace: Option<Vec<IterationRecord>>,
    steps: Vec<RefineStep>,
    start: Instant,
) -> SolveResult {
    let score = st.score();
    let assignment = st.to_assignment();
    SolveResult {
        active_edges: eval::active_edges(inst, &assignment).len(),
        assignment,
        f: score.f,
        f_p: score.penalized(inst.phi()),
        feasible: score.violations() == 0,
        violations: score.counts(),
        iterations,
        stagnation_hit,
        seed: params.seed,
        initial,
        trace,
        refine_trace: params.trace.then_some(steps),
        elapsed: start.elapsed(),
    }
}

/// Applies only the refinement pass to an existing assignment.
pub fn refine(inst: &Instance, assignment: &Assignment) -> (Assignment, Vec<RefineStep>) {
    let mut st = Seating::from_assignment(inst, assignment);
    let steps = refine::refine(&mut st);
    (st.to_assignment(), steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn defaults_are_valid() {
        let p = SolveParams::default();
        assert!(p.validate().is_ok());
        assert_eq!((p.theta, p.it_max, p.eta_max), (0.25, 10_000, 500));
        assert_eq!((p.psi, p.gamma_frac), (0.35, 0.35));
    }

    #[test]
    fn rejects_bad_theta() {
        let p = SolveParams {
            theta: 1.5,
            ..SolveParams::default()
        };
        assert!(p.validate().unwrap_err().to_string().contains("theta out of range"));
    }

    #[test]
    fn tiny_is_solved_to_zero() {
        let inst = fixtures::tiny();
        for seed in 0..20 {
            let r = solve(&inst, &SolveParams::with_seed(seed));
            assert!(r.feasible);
            assert_eq!(r.f_p, 0);
            assert_eq!(eval::penalized_objective(&inst, &r.assignment), 0);
        }
    }

    #[test]
    fn reported_values_match_assignment() {
        let inst = fixtures::k4();
        let r = solve(&inst, &SolveParams::with_seed(3));
        assert_eq!(r.f, eval::objective(&inst, &r.assignment));
        assert_eq!(r.f_p, eval::penalized_objective(&inst, &r.assignment));
        assert_eq!(r.violations, eval::violations(&inst, &r.assignment));
        assert!(r.f_p >= r.initial.f_p || !r.initial.feasible);
    }

    #[test]
    fn same_seed_same_json() {
        let inst = fixtures::k4();
        let p = SolveParams::with_seed(17);
        let a = serde_json::to_string(&solve(&inst, &p)).unwrap();
        let b = serde_json::to_string(&solve(&inst, &p)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trace_is_monotone() {
        let inst = fixtures::k4();
        let p = SolveParams {
            trace: true,
            eta_max: 50,
            ..SolveParams::with_seed(5)
        };
        let r = solve(&inst, &p);
        let t = r.trace.unwrap();
        assert_eq!(t.len(), r.iterations);
        assert!(t.windows(2).all(|w| w[1].best_f_p >= w[0].best_f_p));
    }

    #[test]
    fn locked_students_keep_seats() {
        let inst = fixtures::k4();
        let pins = [(0, crate::model::Seat::new(1, 3)), (2, crate::model::Seat::new(0, 0))];
        let locks = Locks::new(&inst, &pins).unwrap();
        let r = solve_locked(&inst, &SolveParams::with_seed(1), &locks);
        for (s, seat) in pins {
            assert_eq!(r.assignment.seat_of(s), seat);
        }
    }
}
