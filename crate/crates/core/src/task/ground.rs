use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use super::ir::{Fact, GroundAction, GroundTask, StateVariable};
use super::mutex::h2_mutexes;
use super::lifted::{Arg, GroundAtom, LiftedAction, PlanningTask};

pub const DEFAULT_ACTION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundingError {
    #[error("grounding produced more than {cap} actions")]
    GroundingExplosion { cap: usize },
}

/// One instantiated schema before variables are fixed.
#[derive(Debug, Clone)]
struct Instance {
    name: String,
    pre: Vec<(GroundAtom, bool)>,
    eff: Vec<(GroundAtom, bool)>,
}

pub fn ground(task: &PlanningTask) -> Result<GroundTask, GroundingError> {
    ground_with_cap(task, DEFAULT_ACTION_CAP)
}

/// Instantiates every schema over type-respecting bindings, filters by
/// equality and static atoms, prunes with delete-free reachability, and
/// turns the surviving changeable atoms into Boolean variables.
pub fn ground_with_cap(task: &PlanningTask, cap: usize) -> Result<GroundTask, GroundingError> {
    let mut is_static = vec![true; task.fluents.len()];
    for a in &task.actions {
        for l in &a.effect {
            is_static[l.fluent] = false;
        }
    }
    let init: HashSet<GroundAtom> = task.init.iter().cloned().collect();

    let mut instances = Vec::new();
    for action in &task.actions {
        instantiate(task, action, &is_static, &init, cap, &mut instances)?;
    }

    // Delete-free reachability. Negative preconditions are optimistic.
    let mut reached: BTreeSet<GroundAtom> = task
        .init
        .iter()
        .filter(|a| !is_static[a.fluent])
        .cloned()
        .collect();
    let mut alive = vec![false; instances.len()];
    loop {
        let mut changed = false;
        for (i, inst) in instances.iter().enumerate() {
            if alive[i] {
                continue;
            }
            if inst.pre.iter().all(|(a, pos)| !pos || reached.contains(a)) {
                alive[i] = true;
                changed = true;
                for (a, pos) in &inst.eff {
                    if *pos {
                        reached.insert(a.clone());
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut instances: Vec<Instance> = instances
        .into_iter()
        .zip(alive)
        .filter_map(|(inst, ok)| ok.then_some(inst))
        .collect();

    // Atoms that never change are compiled away; removing literals can empty
    // an effect, which can in turn freeze more atoms.
    let mut forced: BTreeSet<GroundAtom> = BTreeSet::new();
    let variables = loop {
        let mut vars: BTreeSet<GroundAtom> = instances
            .iter()
            .flat_map(|i| i.eff.iter().map(|(a, _)| a))
            .filter(|a| reached.contains(*a))
            .cloned()
            .collect();
        for (atom, value) in &task.goal {
            if !vars.contains(atom) && constant_value(atom, &init, &vars) != *value {
                forced.insert(atom.clone());
            }
        }
        vars.extend(forced.iter().cloned());

        let before = instances.len();
        instances.retain_mut(|inst| {
            let pre_ok = inst
                .pre
                .iter()
                .all(|(a, pos)| vars.contains(a) || constant_value(a, &init, &vars) == *pos);
            inst.pre.retain(|(a, _)| vars.contains(a));
            inst.eff.retain(|(a, _)| vars.contains(a));
            pre_ok && !inst.eff.is_empty()
        });
        if instances.len() == before {
            break vars;
        }
    };

    let index: BTreeMap<&GroundAtom, usize> = variables.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let to_facts = |lits: &[(GroundAtom, bool)]| -> Vec<Fact> {
        let mut facts: Vec<Fact> = lits
            .iter()
            .map(|(a, pos)| Fact::new(index[a], usize::from(*pos)))
            .collect();
        facts.sort();
        facts
    };

    let variables_out = variables
        .iter()
        .enumerate()
        .map(|(i, a)| StateVariable::boolean(i, task.atom_name(a)))
        .collect();
    let actions = instances
        .iter()
        .enumerate()
        .map(|(id, inst)| GroundAction {
            id,
            name: inst.name.clone(),
            pre: to_facts(&inst.pre),
            eff: to_facts(&inst.eff),
        })
        .collect();
    let init_state = variables.iter().map(|a| usize::from(init.contains(a))).collect();
    let mut goal: Vec<Fact> = task
        .goal
        .iter()
        .filter(|(a, _)| index.contains_key(a))
        .map(|(a, pos)| Fact::new(index[a], usize::from(*pos)))
        .collect();
    goal.sort();
    goal.dedup();

    let mut out = GroundTask {
        name: task.problem_name.clone(),
        variables: variables_out,
        actions,
        init: init_state,
        goal,
        mutex_groups: Vec::new(),
    };
    if let Some(pairs) = h2_mutexes(&out) {
        out.mutex_groups = pairs.into_iter().map(|p| p.to_vec()).collect();
    }
    Ok(out)
}

/// Value of an atom that is not a variable: its initial truth value.
fn constant_value(atom: &GroundAtom, init: &HashSet<GroundAtom>, vars: &BTreeSet<GroundAtom>) -> bool {
    debug_assert!(!vars.contains(atom));
    init.contains(atom)
}

fn resolve(arg: Arg, binding: &[usize]) -> usize {
    match arg {
        Arg::Param(p) => binding[p],
        Arg::Object(o) => o,
    }
}

fn max_param(args: &[Arg]) -> Option<usize> {
    args.iter()
        .filter_map(|a| match a {
            Arg::Param(p) => Some(*p),
            Arg::Object(_) => None,
        })
        .max()
}

enum Check<'a> {
    Static(usize, &'a [Arg], bool),
    Equality(Arg, Arg, bool),
}

fn instantiate(
    task: &PlanningTask,
    action: &LiftedAction,
    is_static: &[bool],
    init: &HashSet<GroundAtom>,
    cap: usize,
    out: &mut Vec<Instance>,
) -> Result<(), GroundingError> {
    // checks[k] runs once parameter k is bound; index 0 of `ground_checks`
    // holds checks without parameters.
    let n = action.params.len();
    let mut checks: Vec<Vec<Check>> = (0..=n).map(|_| Vec::new()).collect();
    let slot = |args: &[Arg]| max_param(args).map_or(0, |p| p + 1);
    for l in &action.precondition {
        if is_static[l.fluent] {
            checks[slot(&l.args)].push(Check::Static(l.fluent, &l.args, l.positive));
        }
    }
    for e in &action.equalities {
        checks[slot(&[e.lhs, e.rhs])].push(Check::Equality(e.lhs, e.rhs, e.equal));
    }

    let passes = |c: &Check, binding: &[usize]| -> bool {
        match c {
            Check::Static(f, args, pos) => {
                let atom = GroundAtom {
                    fluent: *f,
                    args: args.iter().map(|&a| resolve(a, binding)).collect(),
                };
                init.contains(&atom) == *pos
            }
            Check::Equality(l, r, eq) => (resolve(*l, binding) == resolve(*r, binding)) == *eq,
        }
    };
    if !checks[0].iter().all(|c| passes(c, &[])) {
        return Ok(());
    }

    let mut binding = vec![0usize; n];
    let mut cursor = vec![0usize; n];
    let mut depth = 0usize;
    if n == 0 {
        push_instance(task, action, is_static, &binding, out, cap)?;
        return Ok(());
    }
    loop {
        let members = &action.params[depth].members;
        if cursor[depth] >= members.len() {
            if depth == 0 {
                return Ok(());
            }
            cursor[depth] = 0;
            depth -= 1;
            cursor[depth] += 1;
            continue;
        }
        binding[depth] = members[cursor[depth]];
        if !checks[depth + 1].iter().all(|c| passes(c, &binding)) {
            cursor[depth] += 1;
            continue;
        }
        if depth + 1 == n {
            push_instance(task, action, is_static, &binding, out, cap)?;
            cursor[depth] += 1;
        } else {
            depth += 1;
        }
    }
}

fn push_instance(
    task: &PlanningTask,
    action: &LiftedAction,
    is_static: &[bool],
    binding: &[usize],
    out: &mut Vec<Instance>,
    cap: usize,
) -> Result<(), GroundingError> {
    let ground_lit = |fluent: usize, args: &[Arg], pos: bool| {
        (
            GroundAtom {
                fluent,
                args: args.iter().map(|&a| resolve(a, binding)).collect(),
            },
            pos,
        )
    };
    let mut pre: Vec<(GroundAtom, bool)> = action
        .precondition
        .iter()
        .filter(|l| !is_static[l.fluent])
        .map(|l| ground_lit(l.fluent, &l.args, l.positive))
        .collect();
    let mut eff: Vec<(GroundAtom, bool)> = action
        .effect
        .iter()
        .map(|l| ground_lit(l.fluent, &l.args, l.positive))
        .collect();
    pre.sort();
    pre.dedup();
    eff.sort();
    eff.dedup();
    let contradictory = |lits: &[(GroundAtom, bool)]| lits.windows(2).any(|w| w[0].0 == w[1].0);
    // Instances that require or assign both truth values of one atom are dropped.
    if contradictory(&pre) || contradictory(&eff) {
        return Ok(());
    }
    if out.len() >= cap {
        return Err(GroundingError::GroundingExplosion { cap });
    }
    let mut name = format!("({}", action.name);
    for &o in binding {
        name.push(' ');
        name.push_str(&task.objects[o]);
    }
    name.push(')');
    out.push(Instance { name, pre, eff });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{domain_from_str, normalize, problem_from_str};

    fn task(domain: &str, problem: &str) -> PlanningTask {
        let d = domain_from_str(domain).unwrap();
        let p = problem_from_str(problem, &d).unwrap();
        normalize(&d, &p).unwrap()
    }

    fn count_prefix(g: &GroundTask, prefix: &str) -> usize {
        g.actions.iter().filter(|a| a.name.starts_with(prefix)).count()
    }

    #[test]
    fn blocksworld_three_blocks() {
        let t = task(
            include_str!("../../corpus/blocksworld-domain.pddl"),
            include_str!("../../corpus/blocksworld-3.pddl"),
        );
        let g = ground(&t).unwrap();
        g.validate().unwrap();
        assert_eq!(g.actions.len(), 18);
        assert_eq!(count_prefix(&g, "(pick-up "), 3);
        assert_eq!(count_prefix(&g, "(put-down "), 3);
        assert_eq!(count_prefix(&g, "(stack "), 6);
        assert_eq!(count_prefix(&g, "(unstack "), 6);
    }

    #[test]
    fn equality_keeps_only_diagonal() {
        let t = task(
            "(define (domain d) (:requirements :equality) (:predicates (p ?x ?y))
               (:action a :parameters (?x ?y) :precondition (= ?x ?y) :effect (p ?x ?y)))",
            "(define (problem q) (:domain d) (:objects o1 o2) (:init) (:goal (and)))",
        );
        let g = ground(&t).unwrap();
        let names: Vec<&str> = g.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["(a o1 o1)", "(a o2 o2)"]);
    }

    #[test]
    fn statically_false_precondition_drops_schema() {
        let t = task(
            "(define (domain d) (:predicates (never) (p))
               (:action a :precondition (never) :effect (p)))",
            "(define (problem q) (:domain d) (:init) (:goal (and)))",
        );
        let g = ground(&t).unwrap();
        assert!(g.actions.is_empty());
    }

    #[test]
    fn unreachable_precondition_is_pruned() {
        // q is only added by an action that needs r, and nothing adds r.
        let t = task(
            "(define (domain d) (:predicates (p) (q) (r))
               (:action a :precondition (r) :effect (q))
               (:action b :precondition (q) :effect (p))
               (:action c :precondition (p) :effect (r)))",
            "(define (problem q) (:domain d) (:init) (:goal (and)))",
        );
        let g = ground(&t).unwrap();
        assert!(g.actions.is_empty());
        assert!(g.variables.is_empty());
    }

    #[test]
    fn unsatisfiable_goal_keeps_a_variable() {
        let t = task(
            "(define (domain d) (:predicates (p) (q)) (:action a :precondition (p) :effect (not (p))))",
            "(define (problem q) (:domain d) (:init (p)) (:goal (q)))",
        );
        let g = ground(&t).unwrap();
        g.validate().unwrap();
        let q = g.variable_by_name("(q)").unwrap();
        assert_eq!(g.init[q], 0);
        assert_eq!(g.goal, vec![Fact::new(q, 1)]);
    }

    #[test]
    fn cap_is_enforced() {
        let t = task(
            include_str!("../../corpus/blocksworld-domain.pddl"),
            include_str!("../../corpus/blocksworld-3.pddl"),
        );
        assert_eq!(
            ground_with_cap(&t, 10),
            Err(GroundingError::GroundingExplosion { cap: 10 })
        );
    }

    #[test]
    fn grounding_is_deterministic() {
        let t = task(
            include_str!("../../corpus/gripper-domain.pddl"),
            include_str!("../../corpus/gripper-4.pddl"),
        );
        assert_eq!(ground(&t).unwrap(), ground(&t).unwrap());
    }

    #[test]
    fn gripper_two_balls() {
        let t = task(
            include_str!("../../corpus/gripper-domain.pddl"),
            include_str!("../../corpus/gripper-2.pddl"),
        );
        let g = ground(&t).unwrap();
        g.validate().unwrap();
        // 2 moves, 8 picks, 8 drops; static room/ball/gripper atoms vanish.
        assert_eq!(g.actions.len(), 18);
        assert!(g.variable_by_name("(room rooma)").is_none());
    }
}
