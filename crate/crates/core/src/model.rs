//! Domain types: classroom layout, students, conflict graph, instances and
//! seat assignments.
//!
//! Everything here is zero-based internally. Student ids, row numbers and
//! seat positions are one-based only at the file/HTTP boundary (see
//! [`crate::io`]).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::io::InstanceFile;
use crate::validate::{validate_instance, ValidationReport};

/// A desk, addressed by row (layer) and position within the row.
/// Position 0 is nearest the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Seat {
    pub row: usize,
    pub pos: usize,
}

impl Seat {
    pub const fn new(row: usize, pos: usize) -> Self {
        Self { row, pos }
    }
}

impl fmt::Display for Seat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row + 1, self.pos + 1)
    }
}

/// Rows of desks with a variable number of desks per row.
///
/// Desks are also addressed by a flat *column* index (row-major), which is
/// the column of the constructive weight matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    rows: Vec<usize>,
    first_col: Vec<usize>,
    total: usize,
}

impl Layout {
    pub fn new(rows: Vec<usize>) -> Self {
        let mut first_col = Vec::with_capacity(rows.len());
        let mut total = 0;
        for &len in &rows {
            first_col.push(total);
            total += len;
        }
        Self {
            rows,
            first_col,
            total,
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_seats(&self) -> usize {
        self.total
    }

    pub fn row_len(&self, row: usize) -> usize {
        self.rows[row]
    }

    pub fn max_row_len(&self) -> usize {
        self.rows.iter().copied().max().unwrap_or(0)
    }

    pub fn min_row_len(&self) -> usize {
        self.rows.iter().copied().min().unwrap_or(0)
    }

    pub fn contains(&self, seat: Seat) -> bool {
        seat.row < self.rows.len() && seat.pos < self.rows[seat.row]
    }

    /// Flat zero-based column of a seat.
    #[inline]
    pub fn column(&self, seat: Seat) -> usize {
        debug_assert!(self.contains(seat), "seat {seat} outside layout");
        self.first_col[seat.row] + seat.pos
    }

    /// Zero-based column of the first desk of `row`.
    pub fn first_column(&self, row: usize) -> usize {
        self.first_col[row]
    }

    /// Zero-based column of the last desk of `row`.
    pub fn last_column(&self, row: usize) -> usize {
        self.first_col[row] + self.rows[row] - 1
    }

    /// Inverse of [`Layout::column`].
    pub fn seat_at(&self, col: usize) -> Seat {
        debug_assert!(col < self.total);
        let row = match self.first_col.binary_search(&col) {
            Ok(mut r) => {
                // zero-length rows share a first column with their successor
                while self.rows[r] == 0 {
                    r += 1;
                }
                r
            }
            Err(r) => r - 1,
        };
        Seat::new(row, col - self.first_col[row])
    }

    /// One-based `(row, pos)` to one-based column, as printed in seating
    /// charts: `f_row + (pos - 1)`.
    pub fn seat_column(&self, row: usize, pos: usize) -> Option<usize> {
        if row == 0 || pos == 0 {
            return None;
        }
        let seat = Seat::new(row - 1, pos - 1);
        self.contains(seat).then(|| self.column(seat) + 1)
    }

    /// One-based column to one-based `(row, pos)`.
    pub fn column_seat(&self, col: usize) -> Option<(usize, usize)> {
        if col == 0 || col > self.total {
            return None;
        }
        let s = self.seat_at(col - 1);
        Some((s.row + 1, s.pos + 1))
    }

    /// Positions 0 and 1 of each row.
    pub fn is_front(&self, seat: Seat) -> bool {
        seat.pos < 2
    }

    /// The last two positions of each row.
    pub fn is_back(&self, seat: Seat) -> bool {
        seat.pos + 2 >= self.rows[seat.row]
    }

    pub fn satisfies(&self, req: Requirement, seat: Seat) -> bool {
        match req {
            Requirement::None => true,
            Requirement::Front => self.is_front(seat),
            Requirement::Back => self.is_back(seat),
        }
    }

    /// All seats in column order.
    pub fn seats(&self) -> impl Iterator<Item = Seat> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len).map(move |p| Seat::new(r, p)))
    }

    pub fn row_seats(&self, row: usize) -> impl Iterator<Item = Seat> {
        (0..self.rows[row]).map(move |p| Seat::new(row, p))
    }
}

/// Where a student must sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Requirement {
    Front,
    Back,
    #[default]
    None,
}

impl Requirement {
    /// The `r_i ∈ {-1, 0, 1}` encoding.
    pub fn as_int(self) -> i8 {
        match self {
            Requirement::Front => 1,
            Requirement::Back => -1,
            Requirement::None => 0,
        }
    }

    pub fn from_int(r: i8) -> Option<Self> {
        match r {
            1 => Some(Requirement::Front),
            -1 => Some(Requirement::Back),
            0 => Some(Requirement::None),
            _ => None,
        }
    }

    pub fn is_some(self) -> bool {
        self != Requirement::None
    }
}

/// Undirected simple graph over students.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl ConflictGraph {
    /// Builds the graph from already-validated pairs. Pairs are normalized to
    /// `i < j`, deduplicated and sorted.
    pub fn new(num_vertices: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = pairs
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); num_vertices];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { edges, adj }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }
}

/// A validated problem instance.
///
/// When the roster is smaller than the classroom, conflict-free filler
/// students without requirements are appended so that students and desks
/// are in bijection. Fillers have ids `num_students()..num_seats()`.
#[derive(Debug, Clone)]
pub struct Instance {
    layout: Layout,
    requirements: Vec<Requirement>,
    num_students: usize,
    graph: ConflictGraph,
    d_min: usize,
    d_min_same_row: usize,
    psi: i64,
    phi: i64,
}

impl Instance {
    /// Validates the file form and builds the instance.
    pub fn from_file(file: &InstanceFile) -> Result<Self, ValidationReport> {
        let report = validate_instance(file);
        if !report.is_valid() {
            return Err(report);
        }
        Ok(Self::build_unchecked(file))
    }

    fn build_unchecked(file: &InstanceFile) -> Self {
        let layout = Layout::new(file.rows.clone());
        let n = layout.num_seats();
        let mut requirements = vec![Requirement::None; n];
        for &s in &file.front {
            requirements[s - 1] = Requirement::Front;
        }
        for &s in &file.back {
            requirements[s - 1] = Requirement::Back;
        }
        let graph = ConflictGraph::new(n, file.conflicts.iter().map(|&[a, b]| (a - 1, b - 1)));
        let psi = file.psi.unwrap_or(layout.max_row_len() as i64);
        let d_min = file.d_min;
        let d_min_same_row = file.d_min_same_row.unwrap_or(d_min);
        let phi = penalty_factor(graph.num_edges(), d_min, psi);
        Self {
            layout,
            requirements,
            num_students: file.students,
            graph,
            d_min,
            d_min_same_row,
            psi,
            phi,
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }

    /// Number of real (non-filler) students.
    pub fn num_students(&self) -> usize {
        self.num_students
    }

    /// Students including fillers; equals the number of desks.
    pub fn num_slots(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_filler(&self, student: usize) -> bool {
        student >= self.num_students
    }

    pub fn requirement(&self, student: usize) -> Requirement {
        self.requirements[student]
    }

    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn d_min_same_row(&self) -> usize {
        self.d_min_same_row
    }

    /// Active-edge weight Ψ.
    pub fn psi(&self) -> i64 {
        self.psi
    }

    /// Penalty factor φ of the penalized objective.
    pub fn phi(&self) -> i64 {
        self.phi
    }

    /// Converts back to the canonical file form.
    pub fn to_file(&self) -> InstanceFile {
        let ids = |req: Requirement| {
            (0..self.num_students)
                .filter(|&s| self.requirements[s] == req)
                .map(|s| s + 1)
                .collect()
        };
        InstanceFile {
            rows: self.layout.rows().to_vec(),
            students: self.num_students,
            conflicts: self
                .graph
                .edges()
                .iter()
                .map(|&(a, b)| [a + 1, b + 1])
                .collect(),
            front: ids(Requirement::Front),
            back: ids(Requirement::Back),
            d_min: self.d_min,
            d_min_same_row: Some(self.d_min_same_row),
            psi: Some(self.psi),
        }
    }
}

/// `φ = 2·|E|·|d_min − Ψ|`, floored at 1 so that requirement violations stay
/// penalized on conflict-free instances.
pub fn penalty_factor(num_edges: usize, d_min: usize, psi: i64) -> i64 {
    (2 * num_edges as i64 * (d_min as i64 - psi).abs()).max(1)
}

/// Lookup of a student's seat; implemented by total and partial assignments.
pub trait SeatMap {
    fn seat(&self, student: usize) -> Option<Seat>;
    fn num_students(&self) -> usize;
}

impl SeatMap for [Option<Seat>] {
    fn seat(&self, student: usize) -> Option<Seat> {
        self.get(student).copied().flatten()
    }
    fn num_students(&self) -> usize {
        self.len()
    }
}

impl SeatMap for Vec<Option<Seat>> {
    fn seat(&self, student: usize) -> Option<Seat> {
        self.as_slice().seat(student)
    }
    fn num_students(&self) -> usize {
        self.len()
    }
}

/// Errors building an [`Assignment`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("expected {expected} students, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("student {student} has no seat")]
    Unassigned { student: usize },
    #[error("seat {seat} is outside the layout")]
    OutOfBounds { seat: Seat },
    #[error("students {first} and {second} share seat {seat}")]
    SharedSeat {
        seat: Seat,
        first: usize,
        second: usize,
    },
}

/// A bijection students → desks (fillers included).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    seat_of: Vec<Seat>,
}

impl Assignment {
    /// Checks totality, bounds and injectivity.
    pub fn new(layout: &Layout, seat_of: Vec<Seat>) -> Result<Self, AssignmentError> {
        if seat_of.len() != layout.num_seats() {
            return Err(AssignmentError::WrongLength {
                expected: layout.num_seats(),
                got: seat_of.len(),
            });
        }
        let mut owner = vec![usize::MAX; layout.num_seats()];
        for (s, &seat) in seat_of.iter().enumerate() {
            if !layout.contains(seat) {
                return Err(AssignmentError::OutOfBounds { seat });
            }
            let c = layout.column(seat);
            if owner[c] != usize::MAX {
                return Err(AssignmentError::SharedSeat {
                    seat,
                    first: owner[c],
                    second: s,
                });
            }
            owner[c] = s;
        }
        Ok(Self { seat_of })
    }

    /// From a possibly-partial map; fails on the first unassigned student.
    pub fn from_partial(layout: &Layout, seats: &[Option<Seat>]) -> Result<Self, AssignmentError> {
        let seat_of = seats
            .iter()
            .enumerate()
            .map(|(s, o)| o.ok_or(AssignmentError::Unassigned { student: s }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(layout, seat_of)
    }

    /// Student `i` on column `i`.
    pub fn identity(layout: &Layout) -> Self {
        Self {
            seat_of: layout.seats().collect(),
        }
    }

    /// Students placed on columns in the order given by `perm`
    /// (`perm[student] = column`).
    pub fn from_columns(layout: &Layout, perm: &[usize]) -> Result<Self, AssignmentError> {
        if perm.iter().any(|&c| c >= layout.num_seats()) {
            let bad = perm.iter().find(|&&c| c >= layout.num_seats()).unwrap();
            return Err(AssignmentError::OutOfBounds {
                seat: Seat::new(layout.num_rows(), *bad),
            });
        }
        Self::new(layout, perm.iter().map(|&c| layout.seat_at(c)).collect())
    }

    pub(crate) fn from_vec_unchecked(seat_of: Vec<Seat>) -> Self {
        Self { seat_of }
    }

    pub fn seat_of(&self, student: usize) -> Seat {
        self.seat_of[student]
    }

    pub fn seats(&self) -> &[Seat] {
        &self.seat_of
    }

    pub fn len(&self) -> usize {
        self.seat_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seat_of.is_empty()
    }

    /// `occupant[column] = student`.
    pub fn occupants(&self, layout: &Layout) -> Vec<usize> {
        let mut occ = vec![usize::MAX; layout.num_seats()];
        for (s, &seat) in self.seat_of.iter().enumerate() {
            occ[layout.column(seat)] = s;
        }
        occ
    }

    pub fn into_inner(self) -> Vec<Seat> {
        self.seat_of
    }
}

/// Serialized as one-based `[row, pos]` pairs indexed by student.
impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.seat_of.iter().map(|seat| [seat.row + 1, seat.pos + 1]))
    }
}

impl SeatMap for Assignment {
    fn seat(&self, student: usize) -> Option<Seat> {
        self.seat_of.get(student).copied()
    }
    fn num_students(&self) -> usize {
        self.seat_of.len()
    }
}
