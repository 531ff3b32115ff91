//! Learned-clause generalization and invariant proving.
//!
//! Clauses learned while solving one horizon are rewritten over relative time
//! offsets, proven by one-step induction (a base query from the initial state
//! and a step query from an arbitrary state), and injected into later
//! encodings at every time shift that fits.

mod audit;
mod candidate;
mod feedback;
mod pool;
mod prove;
pub mod report;

pub use audit::{audit_properties, soundness_audit, AuditOutcome};
pub use candidate::{generalize, CandidateProperty, NotGeneralizable, Origin, PropLit, RelAtom};
pub use feedback::{feedback_loop, feedback_loop_with_pool, LoopBudget, LoopConfig, LoopOutcome, StopReason};
pub(crate) use feedback::warm_start;
pub use pool::{CandidatePool, MAX_ATTEMPTS};
pub use prove::{prove, prove_with_lemmas, Certificate, ProofConfig, ProofOutcome, UnknownReason, ValidatedInvariant, Witness};
