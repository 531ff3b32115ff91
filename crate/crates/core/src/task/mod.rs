//! Lifted and ground task representations, the SAS reader, the grounder, and
//! the brute-force oracles used to cross-check the encoder and the invariant
//! prover.

mod exec;
mod ground;
mod ir;
mod lifted;
mod mutex;
pub mod oracle;
mod plan;
pub mod sas;

pub use exec::{apply, interferes, validate_plan, ApplyError, PlanError};
pub use ground::{ground, ground_with_cap, GroundingError, DEFAULT_ACTION_CAP};
pub use ir::{Fact, GroundAction, GroundTask, State, StateVariable, TaskError};
pub use lifted::{Arg, EqualityConstraint, FluentSchema, GroundAtom, LiftedAction, LiftedLiteral, Parameter, PlanningTask};
pub use mutex::{h2_mutexes, MUTEX_WORK_CAP};
pub use plan::{parse_plan, Plan, PlanParseError};

/// Step semantics shared by the encoder and the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Semantics {
    #[serde(rename = "seq")]
    Sequential,
    #[serde(rename = "par")]
    ForallParallel,
}

impl Semantics {
    pub fn tag(self) -> &'static str {
        match self {
            Semantics::Sequential => "seq",
            Semantics::ForallParallel => "par",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "seq" | "sequential" => Some(Semantics::Sequential),
            "par" | "forall_parallel" => Some(Semantics::ForallParallel),
            _ => None,
        }
    }
}
