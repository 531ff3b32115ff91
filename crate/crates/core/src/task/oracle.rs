//! Explicit-state oracles. They only use [`apply`] and [`interferes`], never
//! the encoder.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::exec::{apply, interferes};
use super::ir::{GroundTask, State};
use super::Semantics;

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("state space exceeds {cap} states")]
pub struct Overflow {
    pub cap: usize,
}

/// Breadth-first closure of the initial state under single actions, in
/// discovery order.
pub fn reachable_states(task: &GroundTask, cap: usize) -> Result<Vec<State>, Overflow> {
    let mut seen: HashMap<State, ()> = HashMap::new();
    let mut order = vec![task.init.clone()];
    seen.insert(task.init.clone(), ());
    let mut head = 0;
    while head < order.len() {
        let state = order[head].clone();
        head += 1;
        for a in 0..task.actions.len() {
            if let Ok(next) = apply(task, &state, &[a]) {
                if !seen.contains_key(&next) {
                    if order.len() >= cap {
                        return Err(Overflow { cap });
                    }
                    seen.insert(next.clone(), ());
                    order.push(next);
                }
            }
        }
    }
    Ok(order)
}

/// Nonempty steps executable in `state` under `semantics`. Parallel steps are
/// all pairwise non-interfering sets of applicable actions, ids ascending.
pub fn legal_steps(task: &GroundTask, state: &[usize], semantics: Semantics) -> Vec<Vec<usize>> {
    let applicable: Vec<usize> = (0..task.actions.len())
        .filter(|&a| task.applicable(state, a))
        .collect();
    match semantics {
        Semantics::Sequential => applicable.into_iter().map(|a| vec![a]).collect(),
        Semantics::ForallParallel => {
            let mut out = Vec::new();
            let mut current = Vec::new();
            extend_steps(task, &applicable, 0, &mut current, &mut out);
            out
        }
    }
}

fn extend_steps(
    task: &GroundTask,
    candidates: &[usize],
    from: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for i in from..candidates.len() {
        let a = candidates[i];
        if current.iter().all(|&b| !interferes(task, a, b)) {
            current.push(a);
            out.push(current.clone());
            extend_steps(task, candidates, i + 1, current, out);
            current.pop();
        }
    }
}

/// Shortest makespan by breadth-first search; `None` when the goal is
/// unreachable.
pub fn optimal_makespan(
    task: &GroundTask,
    semantics: Semantics,
    cap: usize,
) -> Result<Option<usize>, Overflow> {
    let mut dist: HashMap<State, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(task.init.clone(), 0);
    queue.push_back(task.init.clone());
    while let Some(state) = queue.pop_front() {
        let d = dist[&state];
        if task.goal_satisfied(&state) {
            return Ok(Some(d));
        }
        for step in legal_steps(task, &state, semantics) {
            let next = apply(task, &state, &step).expect("legal step");
            if !dist.contains_key(&next) {
                if dist.len() >= cap {
                    return Err(Overflow { cap });
                }
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}
