//! Bounded-horizon planning over multivalued state variables.
//!
//! The pipeline reads PDDL (STRIPS with typing, negative preconditions and
//! equality) or Fast Downward SAS v3 input, grounds it into a [`GroundTask`],
//! encodes a fixed horizon as CNF, and solves it with an in-crate CDCL
//! solver. Clauses learned along the way are lifted to time-relative
//! candidate properties, proven by one-step induction, and fed back into
//! later encodings as invariants.
//!
//! [`GroundTask`]: task::GroundTask

pub mod driver;
pub mod encoder;
pub mod invariant;
pub mod pddl;
pub mod solver;
pub mod task;

pub use driver::{run, ExitStatus, RunConfig, RunOutcome};
pub use encoder::{encode, CnfProgram, EncodeOptions};
pub use solver::{Lit, SolveResult, Solver, SolverConfig};
pub use task::{GroundTask, Plan, Semantics};
