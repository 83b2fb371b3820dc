//! Conflict-aware classroom seat assignment.
//!
//! Students sit in rows of desks; some pairs of students should not sit
//! close together, and some students need a front or back desk. This crate
//! holds the instance model, a constructive heuristic, an iterated local
//! search, an exact branch-and-bound for small instances, an LP export and
//! random instance generators.

pub mod builtin;
pub mod constructor;
pub mod eval;
pub mod fixtures;
pub mod gen;
pub mod ils;
pub mod io;
pub mod locks;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod state;
pub mod validate;

pub use eval::{gap, Score, ViolationCounts};
pub use ils::{solve, solve_locked, SolveParams, SolveResult};
pub use io::{load_instance, parse_instance, InstanceFile, IoError};
pub use locks::Locks;
pub use model::{Assignment, Instance, Layout, Requirement, Seat};
