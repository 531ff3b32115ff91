use super::candidate::CandidateProperty;
use super::pool::CandidatePool;
use crate::task::oracle::{legal_steps, reachable_states, Overflow};
use crate::task::{apply, GroundTask, State};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditOutcome {
    Ok { windows_checked: u64 },
    CounterexampleFound {
        invariant: CandidateProperty,
        states: Vec<State>,
        steps: Vec<Vec<usize>>,
    },
}

/// Checks every proven invariant (including redundant ones) on every window
/// that starts in a reachable state, by explicit enumeration. Steps include
/// the empty step and every legal step of the pool's semantics.
pub fn soundness_audit(pool: &CandidatePool, task: &GroundTask, state_cap: usize) -> Result<AuditOutcome, Overflow> {
    let invariants: Vec<CandidateProperty> = pool.all_proven().into_iter().map(|v| v.property).collect();
    audit_properties(&invariants, task, pool.semantics(), state_cap)
}

pub fn audit_properties(
    invariants: &[CandidateProperty],
    task: &GroundTask,
    semantics: crate::task::Semantics,
    state_cap: usize,
) -> Result<AuditOutcome, Overflow> {
    let depth = invariants.iter().map(|c| c.window_horizon()).max().unwrap_or(0);
    let mut checked = 0u64;
    for start in reachable_states(task, state_cap)? {
        let mut states = vec![start];
        let mut steps = Vec::new();
        if let Some(bad) = walk(invariants, task, semantics, depth, &mut states, &mut steps, &mut checked) {
            return Ok(AuditOutcome::CounterexampleFound {
                invariant: bad.clone(),
                states,
                steps,
            });
        }
    }
    Ok(AuditOutcome::Ok { windows_checked: checked })
}

fn walk<'a>(
    invariants: &'a [CandidateProperty],
    task: &GroundTask,
    semantics: crate::task::Semantics,
    depth: usize,
    states: &mut Vec<State>,
    steps: &mut Vec<Vec<usize>>,
    checked: &mut u64,
) -> Option<&'a CandidateProperty> {
    let len = steps.len();
    for c in invariants.iter().filter(|c| c.window_horizon() == len) {
        *checked += 1;
        if c.evaluate(states, steps, 0) == Some(false) {
            return Some(c);
        }
    }
    if len == depth {
        return None;
    }
    let here = states.last().expect("nonempty").clone();
    let mut choices = vec![Vec::new()];
    choices.extend(legal_steps(task, &here, semantics));
    for step in choices {
        let next = apply(task, &here, &step).expect("legal step");
        states.push(next);
        steps.push(step);
        if let Some(bad) = walk(invariants, task, semantics, depth, states, steps, checked) {
            return Some(bad);
        }
        states.pop();
        steps.pop();
    }
    None
}
