//! Random instance generation: the artificial benchmark family (class size ×
//! share of students in conflict × conflict density, five replicates each)
//! and tiny instances for exhaustive cross-checks.

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::io::InstanceFile;
use crate::model::Instance;
use crate::oracle::{brute_force, OracleStatus};

/// Instances up to this many desks are screened with the exact oracle.
pub const ORACLE_SCREEN_MAX: usize = 12;
const ORACLE_SCREEN_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    /// Students, equal to the number of desks.
    pub n: usize,
    /// Share of students with at least one conflict.
    pub conflict_student_pct: f64,
    /// Edge density of the conflict graph among those students.
    pub conflict_edge_pct: f64,
    pub rows_choices: Vec<usize>,
    pub min_desks_per_row: usize,
    pub front_pref_range: (f64, f64),
    pub back_pref_range: (f64, f64),
    pub replicates: usize,
    pub d_min: usize,
    pub seed: u64,
    /// Graph draws allowed before giving up on the degree condition.
    pub max_resamples: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 30,
            conflict_student_pct: 0.35,
            conflict_edge_pct: 0.30,
            rows_choices: vec![5, 6, 7],
            min_desks_per_row: 4,
            front_pref_range: (0.13, 0.27),
            back_pref_range: (0.06, 0.25),
            replicates: 5,
            d_min: 2,
            seed: 0,
            max_resamples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("no graph with min degree >= 1 after {attempts} draws (seed {seed})")]
    ResampleLimit { seed: u64, attempts: usize },
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Config(m.to_string()));
        let pct = |v: f64| v > 0.0 && v <= 1.0;
        if !pct(self.conflict_student_pct) || !pct(self.conflict_edge_pct) {
            return bad("percentages must lie in (0, 1]");
        }
        for (lo, hi) in [self.front_pref_range, self.back_pref_range] {
            if !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
                return bad("preference range must satisfy 0 <= lo <= hi <= 1");
            }
        }
        if self.min_desks_per_row < 4 {
            return bad("rows need at least four desks");
        }
        if !self.rows_choices.iter().any(|&r| r > 0 && r * self.min_desks_per_row <= self.n) {
            return bad("no row count fits the class size");
        }
        if self.d_min < 2 || self.d_min > self.min_desks_per_row {
            return bad("d_min must lie in [2, min desks per row]");
        }
        let (v, m) = conflict_counts(self.n, self.conflict_student_pct, self.conflict_edge_pct);
        if v > 0 && m * 2 < v {
            return bad("too few edges to give every conflict student a conflict");
        }
        if v == 1 {
            return bad("a single conflict student cannot have a conflict");
        }
        Ok(())
    }
}

/// `⌊x + 0.5⌋`, robust to values like `16.499999999`.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// `(V, M)`: conflict students `round(n·p_s)` and edges
/// `round(p_e · V(V−1)/2)`.
pub fn conflict_counts(n: usize, student_pct: f64, edge_pct: f64) -> (usize, usize) {
    let v = round_half_up(n as f64 * student_pct);
    let pairs = v * v.saturating_sub(1) / 2;
    (v, round_half_up(edge_pct * pairs as f64))
}

/// A uniform graph on `v` vertices with exactly `m` edges, redrawn until
/// no vertex is isolated.
pub fn gnm_min_degree<R: Rng + ?Sized>(
    v: usize,
    m: usize,
    rng: &mut R,
    max_attempts: usize,
) -> Option<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..v)
        .flat_map(|a| (a + 1..v).map(move |b| (a, b)))
        .collect();
    if m > pairs.len() {
        return None;
    }
    for _ in 0..max_attempts {
        let mut edges: Vec<(usize, usize)> = index::sample(rng, pairs.len(), m)
            .into_iter()
            .map(|k| pairs[k])
            .collect();
        let mut deg = vec![0usize; v];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        if deg.iter().all(|&d| d > 0) {
            edges.sort_unstable();
            return Some(edges);
        }
    }
    None
}

/// Row lengths summing to `n`: a row count drawn from `choices` (among
/// those that fit), `min` desks each, the surplus handed out one desk at a
/// time to uniformly drawn rows.
pub fn draw_rows<R: Rng + ?Sized>(n: usize, choices: &[usize], min: usize, rng: &mut R) -> Vec<usize> {
    let fitting: Vec<usize> = choices.iter().copied().filter(|&r| r > 0 && r * min <= n).collect();
    let count = fitting[rng.random_range(0..fitting.len())];
    let mut rows = vec![min; count];
    for _ in 0..n - count * min {
        rows[rng.random_range(0..count)] += 1;
    }
    rows
}

fn draw_count<R: Rng + ?Sized>(n: usize, (lo, hi): (f64, f64), rng: &mut R) -> usize {
    let a = (lo * n as f64 - 1e-9).ceil() as usize;
    let b = ((hi * n as f64 + 1e-9).floor() as usize).max(a);
    rng.random_range(a..=b)
}

/// One replicate. Student ids in the returned file are one-based.
pub fn generate_one(cfg: &GenConfig, replicate: usize) -> Result<InstanceFile, GenError> {
    cfg.validate()?;
    let seed = derive_seed(cfg.seed, replicate as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.n;
    let (v, m) = conflict_counts(n, cfg.conflict_student_pct, cfg.conflict_edge_pct);

    let mut students: Vec<usize> = (1..=n).collect();
    students.shuffle(&mut rng);
    let mut vertices = students[..v].to_vec();
    vertices.sort_unstable();
    let edges = gnm_min_degree(v, m, &mut rng, cfg.max_resamples).ok_or(GenError::ResampleLimit {
        seed,
        attempts: cfg.max_resamples,
    })?;
    let conflicts = edges.iter().map(|&(a, b)| [vertices[a], vertices[b]]).collect();

    let rows = draw_rows(n, &cfg.rows_choices, cfg.min_desks_per_row, &mut rng);

    let n_front = draw_count(n, cfg.front_pref_range, &mut rng);
    let n_back = draw_count(n, cfg.back_pref_range, &mut rng).min(n - n_front);
    let prefs: Vec<usize> = index::sample(&mut rng, n, n_front + n_back)
        .into_iter()
        .map(|k| k + 1)
        .collect();
    let mut front = prefs[..n_front].to_vec();
    let mut back = prefs[n_front..].to_vec();
    front.sort_unstable();
    back.sort_unstable();

    Ok(InstanceFile {
        rows,
        students: n,
        conflicts,
        front,
        back,
        d_min: cfg.d_min,
        d_min_same_row: None,
        psi: None,
    })
}

/// splitmix64 over `base ^ k·φ`; independent streams for nearby inputs.
pub fn derive_seed(base: u64, k: u64) -> u64 {
    let mut z = base ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Outcome of the structural feasibility screen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Screen {
    /// Proven feasible by the oracle.
    Feasible,
    /// Proven infeasible.
    Infeasible(String),
    /// Passed every necessary condition; not proven either way.
    Plausible,
}

impl Screen {
    pub fn keep(&self) -> bool {
        !matches!(self, Screen::Infeasible(_))
    }
}

/// Exact for small instances, necessary conditions otherwise:
/// front/back capacity, the largest conflict clique against the number of
/// pairwise-spaced desks, and cliques of front (back) students, who can
/// neither share a row nor sit in adjacent rows.
pub fn screen(inst: &Instance) -> Screen {
    let layout = inst.layout();
    if inst.num_slots() <= ORACLE_SCREEN_MAX {
        return match brute_force(inst, ORACLE_SCREEN_BUDGET).status {
            OracleStatus::Optimal => Screen::Feasible,
            OracleStatus::Infeasible => Screen::Infeasible("no feasible assignment".into()),
            OracleStatus::BudgetExceeded => Screen::Plausible,
        };
    }
    let rows = layout.num_rows();
    let reqs = inst.requirements();
    let n_front = reqs.iter().filter(|&&r| r == crate::model::Requirement::Front).count();
    let n_back = reqs.iter().filter(|&&r| r == crate::model::Requirement::Back).count();
    if n_front > 2 * rows {
        return Screen::Infeasible(format!("{n_front} front students, {} front desks", 2 * rows));
    }
    if n_back > 2 * rows {
        return Screen::Infeasible(format!("{n_back} back students, {} back desks", 2 * rows));
    }
    let d = inst.d_min_same_row();
    let per_row: usize = layout.rows().iter().map(|&len| (len - 1) / d + 1).sum();
    let all: Vec<usize> = (0..inst.num_slots()).collect();
    let clique = max_clique(inst, &all);
    if clique > per_row {
        return Screen::Infeasible(format!("conflict clique of {clique} exceeds {per_row} spaced desks"));
    }
    // two front desks in one row are adjacent, and front desks of adjacent
    // rows are within distance 1 < d_min
    let spaced_rows = rows.div_ceil(2);
    for req in [crate::model::Requirement::Front, crate::model::Requirement::Back] {
        let group: Vec<usize> = (0..inst.num_slots()).filter(|&s| reqs[s] == req).collect();
        let c = max_clique(inst, &group);
        if c > spaced_rows {
            return Screen::Infeasible(format!("{c} mutually conflicting {req:?} students, {spaced_rows} usable rows"));
        }
    }
    Screen::Plausible
}

/// Largest clique of the conflict graph restricted to `vertices`
/// (simple branch and bound; conflict graphs here have at most ~40 vertices).
pub fn max_clique(inst: &Instance, vertices: &[usize]) -> usize {
    let g = inst.graph();
    let mut cand: Vec<usize> = vertices.iter().copied().filter(|&v| g.degree(v) > 0).collect();
    if cand.is_empty() {
        return usize::from(!vertices.is_empty());
    }
    cand.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut best = 1;
    expand(inst, &mut Vec::new(), cand, &mut best);
    best
}

fn expand(inst: &Instance, clique: &mut Vec<usize>, cand: Vec<usize>, best: &mut usize) {
    let g = inst.graph();
    for (k, &v) in cand.iter().enumerate() {
        if clique.len() + cand.len() - k <= *best {
            return;
        }
        clique.push(v);
        let next: Vec<usize> = cand[k + 1..].iter().copied().filter(|&u| g.has_edge(u, v)).collect();
        if next.is_empty() {
            *best = (*best).max(clique.len());
        } else {
            expand(inst, clique, next, best);
        }
        clique.pop();
    }
}

/// One member of a generated family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratedInstance {
    /// One-based position in the kept family.
    pub id: usize,
    pub n: usize,
    pub conflict_student_pct: f64,
    pub conflict_edge_pct: f64,
    pub replicate: usize,
    pub screen: Screen,
    pub file: InstanceFile,
}

/// The 27 configurations: n ∈ {30, 35, 40} × students in conflict
/// {35, 55, 85}% × density {30, 40, 50}%, in that nesting order.
pub fn family_configs(seed: u64) -> Vec<GenConfig> {
    let mut out = Vec::new();
    for n in [30, 35, 40] {
        for sp in [0.35, 0.55, 0.85] {
            for ep in [0.30, 0.40, 0.50] {
                out.push(GenConfig {
                    n,
                    conflict_student_pct: sp,
                    conflict_edge_pct: ep,
                    seed: derive_seed(seed, out.len() as u64 + 1),
                    ..GenConfig::default()
                });
            }
        }
    }
    out
}

/// Generated instances of `configs`, replicates innermost. Returns the
/// kept instances (numbered from 1) and the excluded ones (`id` 0).
pub fn generate_family(
    configs: &[GenConfig],
) -> Result<(Vec<GeneratedInstance>, Vec<GeneratedInstance>), GenError> {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for cfg in configs {
        for rep in 0..cfg.replicates {
            let file = generate_one(cfg, rep)?;
            let verdict = match Instance::from_file(&file) {
                Ok(inst) => screen(&inst),
                Err(report) => Screen::Infeasible(report.to_string()),
            };
            let mut g = GeneratedInstance {
                id: 0,
                n: cfg.n,
                conflict_student_pct: cfg.conflict_student_pct,
                conflict_edge_pct: cfg.conflict_edge_pct,
                replicate: rep + 1,
                screen: verdict,
                file,
            };
            if g.screen.keep() {
                g.id = kept.len() + 1;
                kept.push(g);
            } else {
                excluded.push(g);
            }
        }
    }
    Ok((kept, excluded))
}

/// A tiny instance for exhaustive cross-checks, drawn with the family
/// generator scaled down: two rows of 4–5 desks (8 to `max_desks` students)
/// and a share of conflict students, density and preference rates taken
/// from the family's settings.
pub fn micro_instance(seed: u64, max_desks: usize) -> InstanceFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_desks = max_desks.clamp(8, 10);
    loop {
        let cfg = GenConfig {
            n: rng.random_range(8..=max_desks),
            conflict_student_pct: *[0.35, 0.55, 0.85].choose(&mut rng).expect("non-empty"),
            conflict_edge_pct: *[0.30, 0.40, 0.50].choose(&mut rng).expect("non-empty"),
            rows_choices: vec![2],
            seed: rng.random(),
            ..GenConfig::default()
        };
        // the smallest settings can leave too few edges to cover every
        // conflict student, and the desk split may give a row of 6; draw again
        if let Ok(f) = generate_one(&cfg, 0) {
            if f.rows.iter().all(|r| (4..=5).contains(r)) {
                return f;
            }
        }
    }
}
