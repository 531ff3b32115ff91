//! Transition semantics and the plan validator. Nothing here is shared with
//! the encoder, so the validator stays an independent check on it.

use thiserror::Error;

use super::ir::{GroundTask, State};
use super::plan::Plan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("action {action} is not applicable")]
    NotApplicable { action: usize },
    #[error("actions {first} and {second} interfere")]
    Interference { first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct PlanError {
    pub step: usize,
    pub reason: String,
}

/// Two actions interfere when one assigns a variable that the other requires
/// or assigns with a different value.
pub fn interferes(task: &GroundTask, a: usize, b: usize) -> bool {
    let (a, b) = (&task.actions[a], &task.actions[b]);
    let clash = |x: &super::GroundAction, y: &super::GroundAction| {
        x.eff.iter().any(|e| {
            y.pre
                .iter()
                .chain(&y.eff)
                .any(|f| f.var == e.var && f.value != e.value)
        })
    };
    clash(a, b) || clash(b, a)
}

/// Applies a step of pairwise non-interfering actions.
pub fn apply(task: &GroundTask, state: &[usize], step: &[usize]) -> Result<State, ApplyError> {
    for &a in step {
        if !task.applicable(state, a) {
            return Err(ApplyError::NotApplicable { action: a });
        }
    }
    for (i, &a) in step.iter().enumerate() {
        for &b in &step[i + 1..] {
            if a == b || interferes(task, a, b) {
                return Err(ApplyError::Interference { first: a, second: b });
            }
        }
    }
    let mut next = state.to_vec();
    for &a in step {
        for f in &task.actions[a].eff {
            next[f.var] = f.value;
        }
    }
    Ok(next)
}

pub fn validate_plan(task: &GroundTask, plan: &Plan) -> Result<(), PlanError> {
    let mut state = task.init.clone();
    for (i, step) in plan.steps.iter().enumerate() {
        if let Some(&bad) = step.iter().find(|&&a| a >= task.actions.len()) {
            return Err(PlanError {
                step: i,
                reason: format!("unknown action id {bad}"),
            });
        }
        state = apply(task, &state, step).map_err(|e| PlanError {
            step: i,
            reason: match e {
                ApplyError::NotApplicable { action } => {
                    format!("{} is not applicable", task.actions[action].name)
                }
                ApplyError::Interference { first, second } => format!(
                    "{} interferes with {}",
                    task.actions[first].name, task.actions[second].name
                ),
            },
        })?;
    }
    if !task.goal_satisfied(&state) {
        return Err(PlanError {
            step: plan.steps.len(),
            reason: "goal not satisfied".into(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::{Fact, GroundAction, StateVariable};
    use proptest::prelude::*;

    fn one_var(actions: Vec<(Vec<Fact>, Vec<Fact>)>, goal: Vec<Fact>) -> GroundTask {
        GroundTask {
            name: "t".into(),
            variables: vec![StateVariable {
                id: 0,
                name: "v".into(),
                values: vec!["0".into(), "1".into(), "2".into()],
            }],
            actions: actions
                .into_iter()
                .enumerate()
                .map(|(id, (pre, eff))| GroundAction {
                    id,
                    name: format!("(a{id})"),
                    pre,
                    eff,
                })
                .collect(),
            init: vec![0],
            goal,
            mutex_groups: vec![],
        }
    }

    #[test]
    fn apply_single() {
        let t = one_var(vec![(vec![Fact::new(0, 0)], vec![Fact::new(0, 1)])], vec![]);
        assert_eq!(apply(&t, &[0], &[0]).unwrap(), vec![1]);
        assert_eq!(apply(&t, &[1], &[0]), Err(ApplyError::NotApplicable { action: 0 }));
    }

    #[test]
    fn empty_step_is_identity() {
        let t = one_var(vec![], vec![]);
        assert_eq!(apply(&t, &[2], &[]).unwrap(), vec![2]);
    }

    #[test]
    fn conflicting_assignments_interfere() {
        let t = one_var(
            vec![(vec![], vec![Fact::new(0, 1)]), (vec![], vec![Fact::new(0, 2)])],
            vec![],
        );
        assert_eq!(
            apply(&t, &[0], &[0, 1]),
            Err(ApplyError::Interference { first: 0, second: 1 })
        );
    }

    #[test]
    fn identical_assignments_do_not_interfere() {
        let t = one_var(
            vec![(vec![], vec![Fact::new(0, 1)]), (vec![], vec![Fact::new(0, 1)])],
            vec![],
        );
        assert_eq!(apply(&t, &[0], &[0, 1]).unwrap(), vec![1]);
    }

    #[test]
    fn empty_plan() {
        let t = one_var(vec![], vec![Fact::new(0, 0)]);
        assert!(validate_plan(&t, &Plan::default()).is_ok());
        let t = one_var(vec![], vec![Fact::new(0, 1)]);
        let err = validate_plan(&t, &Plan::default()).unwrap_err();
        assert_eq!(err.step, 0);
    }

    #[test]
    fn failing_step_is_reported() {
        let t = one_var(
            vec![(vec![Fact::new(0, 0)], vec![Fact::new(0, 1)])],
            vec![Fact::new(0, 1)],
        );
        assert!(validate_plan(&t, &Plan::new(vec![vec![0]])).is_ok());
        assert_eq!(validate_plan(&t, &Plan::new(vec![vec![0], vec![0]])).unwrap_err().step, 1);
    }

    proptest! {
        #[test]
        fn apply_preserves_totality(state in prop::collection::vec(0usize..2, 4), picks in prop::collection::vec(0usize..8, 0..3)) {
            let variables = (0..4).map(|i| StateVariable::boolean(i, format!("v{i}"))).collect();
            let actions = (0..8).map(|id| GroundAction {
                id,
                name: format!("(a{id})"),
                pre: vec![Fact::new(id % 4, (id / 4) % 2)],
                eff: vec![Fact::new((id + 1) % 4, id % 2)],
            }).collect();
            let t = GroundTask { name: "p".into(), variables, actions, init: vec![0; 4], goal: vec![], mutex_groups: vec![] };
            if let Ok(next) = apply(&t, &state, &picks) {
                prop_assert_eq!(next.len(), 4);
                prop_assert!(next.iter().all(|&v| v < 2));
            }
        }
    }
}
