//! Export of the linearized integer program in CPLEX-LP format, plus a
//! reader and constraint evaluator for the subset that is written.
//!
//! Variables (all indices one-based):
//! - `x_i_l_k` = 1 when student `i` sits in row `l` at position `k`;
//! - `w_i_j_l_k_z` = 1 when conflict partners `i` (row `l`, position `k`)
//!   and `j` (row `l+1`, position `z`) sit in consecutive rows. Both
//!   orientations of every conflict edge are present.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::io::{write_text, IoError};
use crate::model::{Instance, Requirement, SeatMap};

/// Number of `x` variables: one per student (fillers included) and desk.
pub fn x_count(inst: &Instance) -> usize {
    inst.num_slots() * inst.layout().num_seats()
}

/// Number of `w` variables: `2·|E|·Σ_λ n_λ·n_{λ+1}`.
pub fn w_count(inst: &Instance) -> usize {
    let rows = inst.layout().rows();
    let pairs: usize = rows.windows(2).map(|w| w[0] * w[1]).sum();
    2 * inst.graph().num_edges() * pairs
}

fn x(i: usize, l: usize, k: usize) -> String {
    format!("x_{}_{}_{}", i + 1, l + 1, k + 1)
}

fn w(i: usize, j: usize, l: usize, k: usize, z: usize) -> String {
    format!("w_{}_{}_{}_{}_{}", i + 1, j + 1, l + 1, k + 1, z + 1)
}

/// `+ 3 name`, `- name`, `+ 0 name`.
fn term(coef: i64, name: &str) -> String {
    match coef {
        1 => format!("+ {name}"),
        -1 => format!("- {name}"),
        c if c < 0 => format!("- {} {name}", -c),
        c => format!("+ {c} {name}"),
    }
}

fn push_row(out: &mut String, name: &str, terms: &[String], op: &str, rhs: i64) {
    push_expr(out, name, terms);
    let _ = writeln!(out, " {op} {rhs}");
}

fn push_expr(out: &mut String, name: &str, terms: &[String]) {
    let _ = write!(out, " {name}:");
    for (k, t) in terms.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n   ");
        }
        out.push(' ');
        out.push_str(t);
    }
}

/// The model as LP text.
pub fn export_lp(inst: &Instance) -> String {
    let layout = inst.layout();
    let rows = layout.rows();
    let slots = inst.num_slots();
    let psi = inst.psi();
    let d = inst.d_min() as i64;
    let d_same = inst.d_min_same_row() as i64;
    let oriented: Vec<(usize, usize)> = inst
        .graph()
        .edges()
        .iter()
        .flat_map(|&(i, j)| [(i, j), (j, i)])
        .collect();
    let cross = |f: &mut dyn FnMut(usize, usize, usize, usize, usize)| {
        for &(a, b) in &oriented {
            for l in 0..rows.len().saturating_sub(1) {
                for k in 0..rows[l] {
                    for z in 0..rows[l + 1] {
                        f(a, b, l, k, z);
                    }
                }
            }
        }
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ seat assignment: {} students, {} rows, {} conflicts, d_min {}, d_min' {}, psi {}",
        slots,
        rows.len(),
        inst.graph().num_edges(),
        d,
        d_same,
        psi
    );
    out.push_str("Maximize\n");
    let mut obj = Vec::new();
    // |z − k| is a constant for each (k, z), so both cases z > k and z < k
    // reduce to a single coefficient
    cross(&mut |a, b, l, k, z| obj.push(term(k.abs_diff(z) as i64 - psi, &w(a, b, l, k, z))));
    if obj.is_empty() {
        obj.push(term(0, &x(0, 0, 0)));
    }
    push_expr(&mut out, "obj", &obj);
    out.push('\n');

    out.push_str("Subject To\n");
    for i in 0..slots {
        let t: Vec<String> = layout.seats().map(|s| term(1, &x(i, s.row, s.pos))).collect();
        push_row(&mut out, &format!("assign_{}", i + 1), &t, "=", 1);
    }
    for s in layout.seats() {
        let t: Vec<String> = (0..slots).map(|i| term(1, &x(i, s.row, s.pos))).collect();
        push_row(&mut out, &format!("seat_{}_{}", s.row + 1, s.pos + 1), &t, "=", 1);
    }
    // z − k ≥ (x_ik + x_jz − 1)·d'  ⇔  d'·x_ik + d'·x_jz ≤ z − k + d'
    for &(a, b) in &oriented {
        for (l, &len) in rows.iter().enumerate() {
            for k in 0..len {
                for z in k + 1..len {
                    let t = [term(d_same, &x(a, l, k)), term(d_same, &x(b, l, z))];
                    let name = format!("row_{}_{}_{}_{}_{}", a + 1, b + 1, l + 1, k + 1, z + 1);
                    push_row(&mut out, &name, &t, "<=", (z - k) as i64 + d_same);
                }
            }
        }
    }
    let mut links = String::new();
    cross(&mut |a, b, l, k, z| {
        let wn = w(a, b, l, k, z);
        let tag = format!("{}_{}_{}_{}_{}", a + 1, b + 1, l + 1, k + 1, z + 1);
        let (xa, xb) = (x(a, l, k), x(b, l + 1, z));
        push_row(&mut links, &format!("wa_{tag}"), &[term(1, &wn), term(-1, &xa)], "<=", 0);
        push_row(&mut links, &format!("wb_{tag}"), &[term(1, &wn), term(-1, &xb)], "<=", 0);
        push_row(&mut links, &format!("wc_{tag}"), &[term(1, &wn), term(-1, &xa), term(-1, &xb)], ">=", -1);
        let dist = k.abs_diff(z) as i64;
        push_row(&mut links, &format!("dlo_{tag}"), &[term(dist - d, &wn)], ">=", 0);
        let max_d = (rows[l].max(rows[l + 1]) - 1) as i64;
        push_row(&mut links, &format!("dhi_{tag}"), &[term(dist - max_d, &wn)], "<=", 0);
    });
    out.push_str(&links);
    for i in 0..slots {
        let seats: Vec<String> = match inst.requirement(i) {
            Requirement::Front => layout.seats().filter(|&s| layout.is_front(s)).collect::<Vec<_>>(),
            Requirement::Back => layout.seats().filter(|&s| layout.is_back(s)).collect(),
            Requirement::None => continue,
        }
        .into_iter()
        .map(|s| term(1, &x(i, s.row, s.pos)))
        .collect();
        let tag = if inst.requirement(i) == Requirement::Front { "front" } else { "back" };
        push_row(&mut out, &format!("{tag}_{}", i + 1), &seats, "=", 1);
    }

    out.push_str("Binary\n");
    let mut line = 0;
    let mut bin = |out: &mut String, name: String| {
        out.push(' ');
        out.push_str(&name);
        line += 1;
        if line % 10 == 0 {
            out.push('\n');
        }
    };
    for i in 0..slots {
        for s in layout.seats() {
            bin(&mut out, x(i, s.row, s.pos));
        }
    }
    let mut ws = Vec::new();
    cross(&mut |a, b, l, k, z| ws.push(w(a, b, l, k, z)));
    for name in ws {
        bin(&mut out, name);
    }
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

pub fn write_lp(inst: &Instance, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_text(path.as_ref(), &export_lp(inst))
}

/// Values of every variable under a complete assignment.
pub fn assignment_values(inst: &Instance, map: &(impl SeatMap + ?Sized)) -> HashMap<String, f64> {
    let layout = inst.layout();
    let rows = layout.rows();
    let mut vals = HashMap::new();
    for i in 0..inst.num_slots() {
        for s in layout.seats() {
            vals.insert(x(i, s.row, s.pos), f64::from(map.seat(i) == Some(s)));
        }
    }
    for &(i, j) in inst.graph().edges() {
        for (a, b) in [(i, j), (j, i)] {
            for l in 0..rows.len().saturating_sub(1) {
                for k in 0..rows[l] {
                    for z in 0..rows[l + 1] {
                        let on = map.seat(a) == Some(crate::model::Seat::new(l, k))
                            && map.seat(b) == Some(crate::model::Seat::new(l + 1, z));
                        vals.insert(w(a, b, l, k, z), f64::from(on));
                    }
                }
            }
        }
    }
    vals
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing objective section")]
    NoObjective,
    #[error("unknown variable {0}")]
    UnknownVariable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearExpr {
    pub terms: Vec<(f64, String)>,
}

impl LinearExpr {
    pub fn eval(&self, vals: &HashMap<String, f64>) -> Result<f64, LpError> {
        self.terms.iter().try_fold(0.0, |acc, (c, v)| {
            vals.get(v)
                .map(|x| acc + c * x)
                .ok_or_else(|| LpError::UnknownVariable(v.clone()))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinearExpr,
    pub rel: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn holds(&self, vals: &HashMap<String, f64>) -> Result<bool, LpError> {
        let lhs = self.expr.eval(vals)?;
        const EPS: f64 = 1e-9;
        Ok(match self.rel {
            Relation::Le => lhs <= self.rhs + EPS,
            Relation::Ge => lhs >= self.rhs - EPS,
            Relation::Eq => (lhs - self.rhs).abs() <= EPS,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub sense: Sense,
    pub objective: LinearExpr,
    pub constraints: Vec<Constraint>,
    pub binaries: Vec<String>,
}

impl LpModel {
    /// Names of the constraints violated by `vals`.
    pub fn violated(&self, vals: &HashMap<String, f64>) -> Result<Vec<&str>, LpError> {
        let mut out = Vec::new();
        for c in &self.constraints {
            if !c.holds(vals)? {
                out.push(c.name.as_str());
            }
        }
        Ok(out)
    }
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Binary,
    Bounds,
    End,
}

/// Reads the subset of CPLEX-LP written by [`export_lp`]: one objective,
/// `Subject To` rows (possibly spanning lines), optional `Bounds` (ignored)
/// and `Binary`/`Binaries`/`General` name lists. `\` starts a comment.
pub fn parse_lp(text: &str) -> Result<LpModel, LpError> {
    let mut sense = None;
    let mut objective: Option<LinearExpr> = None;
    let mut constraints = Vec::new();
    let mut binaries = Vec::new();
    let mut section = Section::Preamble;
    let mut pending = String::new();
    let mut pending_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let keyword = line.to_ascii_lowercase();
        let next = match keyword.as_str() {
            "maximize" | "maximise" | "max" => {
                sense = Some(Sense::Maximize);
                Some(Section::Objective)
            }
            "minimize" | "minimise" | "min" => {
                sense = Some(Sense::Minimize);
                Some(Section::Objective)
            }
            "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binary" | "binaries" | "bin" | "general" | "generals" => Some(Section::Binary),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(next) = next {
            flush(&mut section, &mut pending, pending_line, &mut objective, &mut constraints)?;
            section = next;
            continue;
        }
        match section {
            Section::Preamble | Section::End => {
                return Err(LpError::Syntax {
                    line: lineno,
                    msg: "text outside any section".into(),
                })
            }
            Section::Bounds => {}
            Section::Binary => binaries.extend(line.split_whitespace().map(str::to_string)),
            Section::Objective | Section::Constraints => {
                // a new named row starts when the line has a label and the
                // pending row is already complete
                if section == Section::Constraints && !pending.is_empty() && has_relation(&pending) {
                    flush(&mut section, &mut pending, pending_line, &mut objective, &mut constraints)?;
                }
                if pending.is_empty() {
                    pending_line = lineno;
                }
                pending.push(' ');
                pending.push_str(line);
            }
        }
    }
    flush(&mut section, &mut pending, pending_line, &mut objective, &mut constraints)?;
    Ok(LpModel {
        sense: sense.ok_or(LpError::NoObjective)?,
        objective: objective.ok_or(LpError::NoObjective)?,
        constraints,
        binaries,
    })
}

fn has_relation(s: &str) -> bool {
    s.contains('<') || s.contains('>') || s.contains('=')
}

fn flush(
    section: &mut Section,
    pending: &mut String,
    line: usize,
    objective: &mut Option<LinearExpr>,
    constraints: &mut Vec<Constraint>,
) -> Result<(), LpError> {
    if pending.trim().is_empty() {
        pending.clear();
        return Ok(());
    }
    let text = std::mem::take(pending);
    let err = |msg: &str| LpError::Syntax {
        line,
        msg: msg.to_string(),
    };
    let (name, body) = match text.split_once(':') {
        Some((n, b)) => (n.trim().to_string(), b.to_string()),
        None => (String::new(), text.clone()),
    };
    match section {
        Section::Objective => {
            if objective.is_some() {
                return Err(err("second objective"));
            }
            *objective = Some(parse_expr(&body).map_err(|m| err(&m))?);
        }
        Section::Constraints => {
            let (pos, rel, len) = find_relation(&body).ok_or_else(|| err("constraint without relation"))?;
            let expr = parse_expr(&body[..pos]).map_err(|m| err(&m))?;
            let rhs_text = body[pos + len..].trim();
            let rhs: f64 = rhs_text.parse().map_err(|_| err("bad right-hand side"))?;
            if !rhs.is_finite() {
                return Err(err("bad right-hand side"));
            }
            let name = if name.is_empty() {
                format!("r{}", constraints.len() + 1)
            } else {
                name
            };
            constraints.push(Constraint { name, expr, rel, rhs });
        }
        _ => {}
    }
    Ok(())
}

fn find_relation(s: &str) -> Option<(usize, Relation, usize)> {
    for (op, rel) in [("<=", Relation::Le), (">=", Relation::Ge), ("=<", Relation::Le), ("=>", Relation::Ge)] {
        if let Some(p) = s.find(op) {
            return Some((p, rel, 2));
        }
    }
    for (op, rel) in [("<", Relation::Le), (">", Relation::Ge), ("=", Relation::Eq)] {
        if let Some(p) = s.find(op) {
            return Some((p, rel, 1));
        }
    }
    None
}

fn parse_expr(s: &str) -> Result<LinearExpr, String> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for tok in s.split_whitespace() {
        match tok {
            "+" => {}
            "-" => sign = -sign,
            _ => {
                if let Ok(c) = tok.parse::<f64>() {
                    if coef.is_some() || !c.is_finite() {
                        return Err(format!("unexpected number {tok}"));
                    }
                    coef = Some(c);
                } else if tok.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
                    terms.push((sign * coef.unwrap_or(1.0), tok.to_string()));
                    sign = 1.0;
                    coef = None;
                } else {
                    return Err(format!("unexpected token {tok}"));
                }
            }
        }
    }
    if coef.is_some() {
        return Err("dangling coefficient".into());
    }
    Ok(LinearExpr { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval;
    use crate::fixtures;
    use crate::model::{Assignment, Seat};

    #[test]
    fn tiny_counts() {
        let inst = fixtures::tiny();
        assert_eq!(x_count(&inst), 64);
        assert_eq!(w_count(&inst), 32);
        let m = parse_lp(&export_lp(&inst)).unwrap();
        assert_eq!(m.binaries.iter().filter(|b| b.starts_with("x_")).count(), 64);
        assert_eq!(m.binaries.iter().filter(|b| b.starts_with("w_")).count(), 32);
        assert_eq!(m.sense, Sense::Maximize);
    }

    #[test]
    fn no_conflicts_no_w() {
        let inst = fixtures::conflict_free(vec![4, 5]);
        assert_eq!(w_count(&inst), 0);
        let m = parse_lp(&export_lp(&inst)).unwrap();
        assert!(m.binaries.iter().all(|b| b.starts_with("x_")));
        assert!(m.violated(&assignment_values(&inst, &Assignment::identity(inst.layout()))).unwrap().is_empty());
    }

    #[test]
    fn objective_matches_evaluator() {
        let inst = fixtures::k4();
        let m = parse_lp(&export_lp(&inst)).unwrap();
        for cols in [[0, 1, 2, 3, 4, 5, 6, 7], [0, 4, 2, 7, 1, 3, 5, 6], [7, 6, 5, 4, 3, 2, 1, 0]] {
            let a = Assignment::from_columns(inst.layout(), &cols).unwrap();
            let vals = assignment_values(&inst, &a);
            let obj = m.objective.eval(&vals).unwrap();
            assert_eq!(obj, eval::objective(&inst, &a) as f64);
        }
    }

    #[test]
    fn feasibility_agrees_on_tiny() {
        let inst = fixtures::tiny();
        let m = parse_lp(&export_lp(&inst)).unwrap();
        let mut st = crate::state::Seating::from_assignment(&inst, &Assignment::identity(inst.layout()));
        // identity: 1 and 2 adjacent in row 1 -> infeasible
        assert!(!m.violated(&assignment_values(&inst, &st)).unwrap().is_empty());
        st.relocate(1, Seat::new(0, 2));
        assert!(eval::is_feasible(&inst, &st));
        assert!(m.violated(&assignment_values(&inst, &st)).unwrap().is_empty());
    }

    #[test]
    fn parser_handles_continuations_and_comments() {
        let text = "\\ c\nMaximize\n obj: 2 a - b\n + 3 c\nSubject To\n c1: a + b\n  <= 1\n c2: - a >= -1\n c3: a + c = 1\nBinary\n a b\n c\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert_eq!(m.objective.terms, vec![(2.0, "a".into()), (-1.0, "b".into()), (3.0, "c".into())]);
        assert_eq!(m.constraints.len(), 3);
        assert_eq!(m.constraints[0].rel, Relation::Le);
        assert_eq!(m.constraints[1].expr.terms, vec![(-1.0, "a".into())]);
        assert_eq!(m.binaries, vec!["a", "b", "c"]);
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!(parse_lp("hello").is_err());
        assert!(parse_lp("Maximize\n obj: 2 3 a\nEnd").is_err());
        assert!(parse_lp("Maximize\n obj: a\nSubject To\n c: a\nEnd").is_err());
        assert!(matches!(parse_lp("Subject To\n c: a <= 1\n"), Err(LpError::NoObjective)));
    }
}
