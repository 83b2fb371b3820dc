//! `seatplan`: solve, generate, benchmark and inspect seat assignment
//! instances.
//!
//! Exit codes: 0 success, 1 invalid input or parameters, 2 I/O failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use seatplan_bench::{self as bench, BenchError, BenchInstance};
use seatplan_core::builtin::{classroom_file, Classroom};
use seatplan_core::constructor::build_weight_matrix;
use seatplan_core::gen::{family_configs, generate_family, generate_one, GenConfig};
use seatplan_core::ils::ParamError;
use seatplan_core::oracle::{brute_force, OracleStatus};
use seatplan_core::{lp, solve_locked, Instance, InstanceFile, IoError, Locks, Seat, SolveParams, SolveResult};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Reference { .. } | BenchError::Pool(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

#[derive(Parser)]
#[command(name = "seatplan", version, about = "Conflict-aware classroom seat assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the seat chart.
    Solve(SolveCmd),
    /// Generate one instance or the full benchmark family.
    Generate(GenerateCmd),
    /// Repeated seeded runs with gap / time / feasibility summaries.
    Bench(BenchCmd),
    /// Constructive start versus final search result, per run.
    CompareInitial(BenchCmd),
    /// Write the integer programming model in LP format.
    ExportLp(ExportLpCmd),
    /// Exhaustive search for small instances.
    Oracle(OracleCmd),
    /// Run the HTTP service.
    Serve(ServeCmd),
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Fraction of students moved by a perturbation.
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    /// Fraction of each row drawn by Swap I.
    #[arg(long, default_value_t = 0.35)]
    psi: f64,
    /// Fraction of candidate seats examined in Swap I.
    #[arg(long, default_value_t = 0.35)]
    gamma_frac: f64,
    #[arg(long, default_value_t = 10_000)]
    it_max: usize,
    /// Non-improving iterations before stopping.
    #[arg(long, default_value_t = 500)]
    eta_max: usize,
    #[arg(long, default_value_t = 8)]
    candidate_min: usize,
    #[arg(long, default_value_t = 30)]
    candidate_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit per run, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SolverArgs {
    fn params(&self) -> Result<SolveParams, CliError> {
        let time_limit = match self.time_limit {
            Some(t) if !(t.is_finite() && t > 0.0) => {
                return Err(CliError::Invalid(format!("time limit must be positive, got {t}")))
            }
            t => t.map(Duration::from_secs_f64),
        };
        let p = SolveParams {
            theta: self.theta,
            it_max: self.it_max,
            eta_max: self.eta_max,
            psi: self.psi,
            gamma_frac: self.gamma_frac,
            candidate_min: self.candidate_min,
            candidate_max: self.candidate_max,
            seed: self.seed,
            time_limit,
            trace: false,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct SolveCmd {
    /// Instance JSON path, or `builtin:classroom1` .. `builtin:classroom3`.
    instance: String,
    #[command(flatten)]
    solver: SolverArgs,
    /// Override the instance's minimum distance between consecutive rows.
    #[arg(long)]
    dmin: Option<usize>,
    /// Pin a student: `ID=ROW,POS` (one-based). Repeatable.
    #[arg(long = "lock", value_name = "ID=ROW,POS")]
    locks: Vec<String>,
    /// Write the full result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-iteration values as CSV.
    #[arg(long)]
    iter_trace: Option<PathBuf>,
    /// Write the refinement moves as CSV.
    #[arg(long)]
    refine_trace: Option<PathBuf>,
    /// Write the constructive weight matrix as CSV.
    #[arg(long)]
    dump_weights: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateCmd {
    /// Generate the 27-configuration family into `--out-dir`.
    #[arg(long)]
    family: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "family")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 0.35)]
    student_pct: f64,
    #[arg(long, default_value_t = 0.30)]
    edge_pct: f64,
    #[arg(long, default_value_t = 1)]
    replicate: usize,
    /// Single instance output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchCmd {
    /// Instance paths or `builtin:` names.
    instances: Vec<String>,
    /// Also regenerate the benchmark family with this seed.
    #[arg(long)]
    family_seed: Option<u64>,
    /// Keep family instances with id up to this value.
    #[arg(long)]
    max_id: Option<usize>,
    /// CSV with `ID` and `BKS` columns, matched against instance ids.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = "bench_summary.csv")]
    summary: PathBuf,
    #[arg(long, default_value = "bench_runs.csv")]
    detail: PathBuf,
    /// Also write a markdown table.
    #[arg(long)]
    markdown: Option<PathBuf>,
}

#[derive(Args)]
struct ExportLpCmd {
    instance: String,
    #[arg(long)]
    dmin: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCmd {
    instance: String,
    #[arg(long)]
    dmin: Option<usize>,
    /// Search nodes before giving up.
    #[arg(long, default_value_t = 200_000_000)]
    budget: u64,
    /// Write the witness assignment as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeCmd {
    /// Defaults to SEATPLAN_PORT, then 8080.
    #[arg(long)]
    port: Option<u16>,
    #[arg(long)]
    cors_origin: Option<String>,
    /// Per-solve wall-clock cap in seconds.
    #[arg(long, default_value_t = 30)]
    solve_cap: u64,
}

fn load_file(spec: &str) -> Result<InstanceFile, CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let c = Classroom::from_str(name).map_err(|e| CliError::Invalid(e.to_string()))?;
        return Ok(classroom_file(c));
    }
    let text = fs::read_to_string(spec).map_err(|e| CliError::Io(format!("cannot read {spec}: {e}")))?;
    Ok(InstanceFile::from_json(&text)?)
}

fn load(spec: &str, dmin: Option<usize>) -> Result<Instance, CliError> {
    let mut file = load_file(spec)?;
    if let Some(d) = dmin {
        file.d_min = d;
    }
    Instance::from_file(&file).map_err(|r| CliError::Invalid(format!("invalid instance {spec}: {r}")))
}

fn parse_lock(s: &str) -> Result<(usize, Seat), CliError> {
    let bad = || CliError::Invalid(format!("bad lock {s:?}, expected ID=ROW,POS"));
    let (id, seat) = s.split_once('=').ok_or_else(bad)?;
    let (row, pos) = seat.split_once(',').ok_or_else(bad)?;
    let n = |t: &str| t.trim().parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(bad);
    Ok((n(id)? - 1, Seat::new(n(row)? - 1, n(pos)? - 1)))
}

/// One line per row, student ids by position; `.` marks an empty desk.
fn chart(inst: &Instance, r: &SolveResult) -> String {
    let layout = inst.layout();
    let occupants = r.assignment.occupants(layout);
    let width = inst.num_students().to_string().len().max(1);
    let mut out = String::new();
    for row in 0..layout.num_rows() {
        let _ = write!(out, "row {:>2} |", row + 1);
        for pos in 0..layout.row_len(row) {
            let s = occupants[layout.column(Seat::new(row, pos))];
            if inst.is_filler(s) {
                let _ = write!(out, " {:>width$}", ".");
            } else {
                let _ = write!(out, " {:>width$}", s + 1);
            }
        }
        out.push('\n');
    }
    out
}

fn run_solve(cmd: &SolveCmd) -> Result<(), CliError> {
    let inst = load(&cmd.instance, cmd.dmin)?;
    let mut params = cmd.solver.params()?;
    params.trace = cmd.iter_trace.is_some() || cmd.refine_trace.is_some();
    let pins = cmd.locks.iter().map(|s| parse_lock(s)).collect::<Result<Vec<_>, _>>()?;
    let locks = Locks::new(&inst, &pins).map_err(|e| CliError::Invalid(format!("lock: {e}")))?;

    if let Some(path) = &cmd.dump_weights {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let m = build_weight_matrix(&inst, &mut rng).map_err(|e| CliError::Invalid(e.to_string()))?;
        write_file(path, &m.to_csv())?;
    }

    let r = solve_locked(&inst, &params, &locks);
    println!(
        "f = {}, f_p = {}, feasible = {}, active edges = {}, iterations = {}",
        r.f, r.f_p, r.feasible, r.active_edges, r.iterations
    );
    let v = r.violations;
    println!("violations: front {}, back {}, same-row {}, min-distance {}", v.alpha, v.beta, v.gamma, v.delta);
    print!("{}", chart(&inst, &r));
    eprintln!("solved in {:.3} s", r.elapsed.as_secs_f64());

    if let Some(path) = &cmd.out {
        write_file(path, &serde_json::to_string_pretty(&r).expect("result serializes"))?;
    }
    if let (Some(path), Some(trace)) = (&cmd.iter_trace, &r.trace) {
        let mut s = String::from("iteration,f_p,best_f_p\n");
        for t in trace {
            let _ = writeln!(s, "{},{},{}", t.iteration, t.f_p, t.best_f_p);
        }
        write_file(path, &s)?;
    }
    if let (Some(path), Some(steps)) = (&cmd.refine_trace, &r.refine_trace) {
        let mut s = String::from("phase,student,from_row,from_pos,to_row,to_pos,f_p,active_edges\n");
        for st in steps {
            let phase = serde_json::to_value(st.phase).expect("phase serializes");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                phase.as_str().unwrap_or_default(),
                st.student + 1,
                st.from.row + 1,
                st.from.pos + 1,
                st.to.row + 1,
                st.to.pos + 1,
                st.fp,
                st.active
            );
        }
        write_file(path, &s)?;
    }
    Ok(())
}

fn run_generate(cmd: &GenerateCmd) -> Result<(), CliError> {
    if cmd.family {
        let (kept, excluded) =
            generate_family(&family_configs(cmd.seed)).map_err(|e| CliError::Invalid(e.to_string()))?;
        bench::write_family(&cmd.out_dir, &kept, &excluded)?;
        println!(
            "kept {} instances, excluded {}; written to {}",
            kept.len(),
            excluded.len(),
            cmd.out_dir.display()
        );
        return Ok(());
    }
    if cmd.replicate == 0 {
        return Err(CliError::Invalid("replicates are numbered from 1".into()));
    }
    let cfg = GenConfig {
        n: cmd.n,
        conflict_student_pct: cmd.student_pct,
        conflict_edge_pct: cmd.edge_pct,
        seed: cmd.seed,
        ..GenConfig::default()
    };
    let file = generate_one(&cfg, cmd.replicate - 1).map_err(|e| CliError::Invalid(e.to_string()))?;
    match &cmd.out {
        Some(path) => write_file(path, &file.to_json()),
        None => {
            println!("{}", file.to_json());
            Ok(())
        }
    }
}

fn bench_inputs(cmd: &BenchCmd) -> Result<Vec<BenchInstance>, CliError> {
    let mut out = Vec::new();
    for spec in &cmd.instances {
        let id = spec.strip_prefix("builtin:").unwrap_or(spec).to_string();
        out.push(BenchInstance::new(id, load(spec, None)?));
    }
    if let Some(seed) = cmd.family_seed {
        let (kept, _) = generate_family(&family_configs(seed)).map_err(|e| CliError::Invalid(e.to_string()))?;
        for g in kept.into_iter().filter(|g| cmd.max_id.is_none_or(|m| g.id <= m)) {
            let inst = Instance::from_file(&g.file).map_err(|r| CliError::Invalid(r.to_string()))?;
            out.push(BenchInstance::new(g.id.to_string(), inst));
        }
    }
    if out.is_empty() {
        return Err(CliError::Invalid("no instances given".into()));
    }
    if let Some(path) = &cmd.reference {
        let table = bench::load_reference(path)?;
        for bi in &mut out {
            bi.reference_bks = bi.id.parse().ok().and_then(|id: usize| table.get(&id).copied());
        }
    }
    Ok(out)
}

fn batch(cmd: &BenchCmd) -> Result<Vec<bench::BenchRow>, CliError> {
    let inputs = bench_inputs(cmd)?;
    let params = cmd.solver.params()?;
    match bench::threads_from_env() {
        Some(t) => Ok(bench::run_batch_with_threads(&inputs, &params, cmd.runs, cmd.base_seed, t)?),
        None => Ok(bench::run_batch(&inputs, &params, cmd.runs, cmd.base_seed)),
    }
}

fn run_bench(cmd: &BenchCmd) -> Result<(), CliError> {
    let rows = batch(cmd)?;
    bench::export_csv(&rows, &cmd.summary, &cmd.detail)?;
    let md = bench::render_markdown(&rows);
    if let Some(path) = &cmd.markdown {
        write_file(path, &md)?;
    }
    print!("{md}");
    Ok(())
}

fn run_compare(cmd: &BenchCmd) -> Result<(), CliError> {
    let rows = batch(cmd)?;
    let cmp = bench::InitialVsIls::from_rows(&rows);
    let md = bench::render_comparison(&cmp);
    if let Some(path) = &cmd.markdown {
        write_file(path, &md)?;
    }
    let mut w = csv::Writer::from_path(&cmd.detail).map_err(|e| CliError::Io(e.to_string()))?;
    for r in &cmp.runs {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    print!("{md}");
    Ok(())
}

fn run_export_lp(cmd: &ExportLpCmd) -> Result<(), CliError> {
    let inst = load(&cmd.instance, cmd.dmin)?;
    let text = lp::export_lp(&inst);
    eprintln!("{} x variables, {} w variables", lp::x_count(&inst), lp::w_count(&inst));
    match &cmd.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_oracle(cmd: &OracleCmd) -> Result<(), CliError> {
    let inst = load(&cmd.instance, cmd.dmin)?;
    let r = brute_force(&inst, cmd.budget);
    match r.status {
        OracleStatus::Optimal => println!("optimal f = {}", r.best_f.unwrap_or_default()),
        OracleStatus::Infeasible => println!(
            "infeasible; best f_p = {}",
            r.best_penalized.map_or("-".into(), |v| v.to_string())
        ),
        OracleStatus::BudgetExceeded => println!(
            "budget exceeded after {} nodes; best f_p so far = {}",
            r.nodes,
            r.best_penalized.map_or("-".into(), |v| v.to_string())
        ),
    }
    eprintln!("{} nodes", r.nodes);
    if let (Some(path), Some(w)) = (&cmd.out, &r.witness) {
        let file = seatplan_core::io::AssignmentFile::from_assignment(&inst, w);
        write_file(path, &file.to_json())?;
    }
    Ok(())
}

fn run_serve(cmd: &ServeCmd) -> Result<(), CliError> {
    let port = cmd.port.unwrap_or_else(seatplan_service::port_from_env);
    let config = seatplan_service::ServiceConfig {
        solve_cap: Duration::from_secs(cmd.solve_cap.max(1)),
        cors_origin: cmd.cors_origin.clone(),
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", port))
            .await
            .map_err(|e| CliError::Io(format!("cannot bind port {port}: {e}")))?;
        eprintln!("listening on port {port}");
        seatplan_service::serve(listener, config)
            .await
            .map_err(|e| CliError::Io(e.to_string()))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(c) => run_solve(c),
        Command::Generate(c) => run_generate(c),
        Command::Bench(c) => run_bench(c),
        Command::CompareInitial(c) => run_compare(c),
        Command::ExportLp(c) => run_export_lp(c),
        Command::Oracle(c) => run_oracle(c),
        Command::Serve(c) => run_serve(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
