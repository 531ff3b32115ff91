//! Bounded-horizon CNF encoding of a ground task.
//!
//! Atoms are `holds(var=value, t)` for `0 ≤ t ≤ n` and `occurs(action, t)` for
//! `0 ≤ t < n`. Transitions use explanatory frame axioms; parallel steps
//! follow ∀-step semantics with pairwise exclusion of interfering actions.

mod atoms;
mod dimacs;

pub use atoms::{AtomTable, TimedAtom};
pub use dimacs::{atom_map, to_dimacs};

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::invariant::ValidatedInvariant;
use crate::solver::{Lit, Solver, SolverConfig};
use crate::task::{Fact, GroundTask, Plan, Semantics, State};

/// Sorted, duplicate-free, non-tautological literals.
pub type Clause = Vec<Lit>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub semantics: Semantics,
    /// Require at least one action per step.
    pub no_idle: bool,
    pub initial_state: bool,
    pub goal: bool,
}

impl EncodeOptions {
    pub fn planning(semantics: Semantics) -> Self {
        EncodeOptions {
            semantics,
            no_idle: true,
            initial_state: true,
            goal: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfProgram {
    pub horizon: usize,
    pub options: EncodeOptions,
    pub atoms: AtomTable,
    /// Goal facts asserted at the horizon; empty when the goal is off.
    pub goal: Vec<Fact>,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invariant of degree {degree} does not fit horizon {horizon}")]
pub struct DegreeExceedsHorizon {
    pub index: usize,
    pub degree: usize,
    pub horizon: usize,
}

/// Normalizes a clause; `None` for tautologies.
pub fn normalize_clause(mut lits: Vec<Lit>) -> Option<Clause> {
    lits.sort();
    lits.dedup();
    if lits.windows(2).any(|w| w[0] == !w[1]) {
        return None;
    }
    Some(lits)
}

impl CnfProgram {
    pub fn semantics(&self) -> Semantics {
        self.options.semantics
    }

    pub fn num_vars(&self) -> usize {
        self.atoms.len()
    }

    fn push(&mut self, lits: Vec<Lit>) {
        if let Some(c) = normalize_clause(lits) {
            self.clauses.push(c);
        }
    }

    /// Literal view of a clause.
    pub fn describe(&self, clause: &[Lit]) -> Vec<(TimedAtom, bool)> {
        clause
            .iter()
            .map(|l| (self.atoms.atom(l.var()), l.is_positive()))
            .collect()
    }

    pub fn solver(&self, config: SolverConfig) -> Solver {
        let mut s = Solver::new(self.num_vars(), config);
        for c in &self.clauses {
            s.add_clause(c);
        }
        s
    }
}

/// Encodes `task` over `horizon` steps with initial state, goal and
/// no-idling enabled.
pub fn encode(task: &GroundTask, horizon: usize, semantics: Semantics) -> CnfProgram {
    encode_with(task, horizon, EncodeOptions::planning(semantics))
}

pub fn encode_with(task: &GroundTask, horizon: usize, options: EncodeOptions) -> CnfProgram {
    let atoms = AtomTable::new(task, horizon);
    let mut p = CnfProgram {
        horizon,
        options,
        atoms,
        goal: if options.goal { task.goal.clone() } else { Vec::new() },
        clauses: Vec::new(),
    };
    let n = horizon;
    let h = |p: &CnfProgram, f: Fact, t: usize| Lit::pos(p.atoms.holds(f, t));
    let o = |p: &CnfProgram, a: usize, t: usize| Lit::pos(p.atoms.occurs(a, t));

    if options.initial_state {
        for (var, &value) in task.init.iter().enumerate() {
            let l = h(&p, Fact::new(var, value), 0);
            p.push(vec![l]);
        }
    }
    if options.goal {
        for &g in &task.goal {
            let l = h(&p, g, n);
            p.push(vec![l]);
        }
    }

    for t in 0..=n {
        for v in &task.variables {
            let lits: Vec<Lit> = (0..v.domain_size()).map(|x| h(&p, Fact::new(v.id, x), t)).collect();
            p.push(lits.clone());
            for i in 0..lits.len() {
                for j in i + 1..lits.len() {
                    p.push(vec![!lits[i], !lits[j]]);
                }
            }
        }
        for group in &task.mutex_groups {
            for i in 0..group.len() {
                for j in i + 1..group.len() {
                    if group[i] != group[j] {
                        let (a, b) = (h(&p, group[i], t), h(&p, group[j], t));
                        p.push(vec![!a, !b]);
                    }
                }
            }
        }
    }

    // Achievers per fact, for the frame axioms.
    let mut achievers: Vec<Vec<Vec<usize>>> = task
        .variables
        .iter()
        .map(|v| vec![Vec::new(); v.domain_size()])
        .collect();
    for a in &task.actions {
        for f in &a.eff {
            achievers[f.var][f.value].push(a.id);
        }
    }
    let exclusions = exclusion_pairs(task, options.semantics);

    for t in 0..n {
        for a in &task.actions {
            let occ = o(&p, a.id, t);
            for &f in &a.pre {
                let l = h(&p, f, t);
                p.push(vec![!occ, l]);
            }
            for &f in &a.eff {
                let l = h(&p, f, t + 1);
                p.push(vec![!occ, l]);
            }
        }
        for v in &task.variables {
            for (x, ach) in achievers[v.id].iter().enumerate() {
                let f = Fact::new(v.id, x);
                let mut clause = vec![!h(&p, f, t + 1), h(&p, f, t)];
                clause.extend(ach.iter().map(|&a| o(&p, a, t)));
                p.push(clause);
            }
        }
        for &(a, b) in &exclusions {
            let (la, lb) = (o(&p, a, t), o(&p, b, t));
            p.push(vec![!la, !lb]);
        }
        if options.no_idle {
            let lits = (0..task.actions.len()).map(|a| o(&p, a, t)).collect();
            p.push(lits);
        }
    }
    p
}

/// Pairs of actions that may not share a step. Sequential semantics excludes
/// every pair; ∀-step semantics excludes pairs where one action assigns a
/// variable the other requires or assigns with a different value.
fn exclusion_pairs(task: &GroundTask, semantics: Semantics) -> Vec<(usize, usize)> {
    let n = task.actions.len();
    match semantics {
        Semantics::Sequential => (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect(),
        Semantics::ForallParallel => {
            // mentions[var] = (action, value, is_effect)
            let mut mentions: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); task.variables.len()];
            for a in &task.actions {
                for f in &a.pre {
                    mentions[f.var].push((a.id, f.value, false));
                }
                for f in &a.eff {
                    mentions[f.var].push((a.id, f.value, true));
                }
            }
            let mut pairs = BTreeSet::new();
            for list in &mentions {
                for &(a, x, a_eff) in list {
                    if !a_eff {
                        continue;
                    }
                    for &(b, y, _) in list {
                        if a != b && x != y {
                            pairs.insert((a.min(b), a.max(b)));
                        }
                    }
                }
            }
            pairs.into_iter().collect()
        }
    }
}

/// Appends every time-shifted instance of each invariant that fits the
/// horizon, skipping clauses already present. Invariants wider than the
/// horizon are reported and skipped.
pub fn add_invariant_constraints(
    mut program: CnfProgram,
    invariants: &[ValidatedInvariant],
) -> (CnfProgram, Vec<DegreeExceedsHorizon>) {
    let mut existing: HashSet<Clause> = program.clauses.iter().cloned().collect();
    let mut skipped = Vec::new();
    let n = program.horizon;
    for (index, inv) in invariants.iter().enumerate() {
        let degree = inv.property.degree();
        if degree > n + 1 {
            skipped.push(DegreeExceedsHorizon {
                index,
                degree,
                horizon: n,
            });
            continue;
        }
        for base in 0..=(n + 1 - degree) {
            if let Some(c) = inv.property.instantiate(base, &program.atoms).and_then(normalize_clause) {
                if existing.insert(c.clone()) {
                    program.clauses.push(c);
                }
            }
        }
    }
    (program, skipped)
}

/// Reads the plan off a model: step `t` holds the actions occurring at `t`.
pub fn decode_plan(program: &CnfProgram, model: &[bool]) -> Plan {
    let steps = (0..program.horizon)
        .map(|t| {
            (0..program.atoms.num_actions())
                .filter(|&a| model[program.atoms.occurs(a, t) as usize])
                .collect()
        })
        .collect();
    Plan::new(steps)
}

/// State sequence of a model, one total assignment per time point. Variables
/// with no true value (impossible in a model) map to 0.
pub fn decode_states(program: &CnfProgram, model: &[bool]) -> Vec<State> {
    (0..=program.horizon)
        .map(|t| {
            (0..program.atoms.num_variables())
                .map(|v| {
                    (0..program.atoms.domain_size(v))
                        .find(|&x| model[program.atoms.holds(Fact::new(v, x), t) as usize])
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolveResult;
    use crate::task::{validate_plan, GroundAction, StateVariable};

    pub(crate) fn flip_task() -> GroundTask {
        GroundTask {
            name: "flip".into(),
            variables: vec![StateVariable::boolean(0, "(v)".into())],
            actions: vec![GroundAction {
                id: 0,
                name: "(flip)".into(),
                pre: vec![Fact::new(0, 0)],
                eff: vec![Fact::new(0, 1)],
            }],
            init: vec![0],
            goal: vec![Fact::new(0, 1)],
            mutex_groups: vec![],
        }
    }

    fn solve(p: &CnfProgram) -> SolveResult {
        p.solver(SolverConfig::default()).solve(&[])
    }

    #[test]
    fn zero_horizon_with_goal_in_init() {
        let mut t = flip_task();
        t.goal = vec![Fact::new(0, 0)];
        let p = encode(&t, 0, Semantics::Sequential);
        let SolveResult::Sat(model) = solve(&p) else {
            panic!("expected SAT")
        };
        assert_eq!(decode_plan(&p, &model), Plan::default());
    }

    #[test]
    fn flip_needs_one_step() {
        let t = flip_task();
        assert!(solve(&encode(&t, 0, Semantics::Sequential)).is_unsat());
        let p = encode(&t, 1, Semantics::Sequential);
        let SolveResult::Sat(model) = solve(&p) else {
            panic!("expected SAT")
        };
        let plan = decode_plan(&p, &model);
        assert_eq!(plan, Plan::new(vec![vec![0]]));
        validate_plan(&t, &plan).unwrap();
        assert_eq!(decode_states(&p, &model), vec![vec![0], vec![1]]);
    }

    #[test]
    fn no_idle_without_actions_is_unsat() {
        let mut t = flip_task();
        t.actions.clear();
        t.goal = vec![Fact::new(0, 0)];
        assert!(solve(&encode(&t, 1, Semantics::Sequential)).is_unsat());
        let relaxed = EncodeOptions {
            no_idle: false,
            ..EncodeOptions::planning(Semantics::Sequential)
        };
        assert!(solve(&encode_with(&t, 1, relaxed)).is_sat());
    }

    #[test]
    fn clauses_are_normalized() {
        let p = encode(&flip_task(), 2, Semantics::ForallParallel);
        for c in &p.clauses {
            assert!(normalize_clause(c.clone()).as_ref() == Some(c));
            assert!(c.iter().all(|l| (l.var() as usize) < p.num_vars()));
        }
    }

    #[test]
    fn parallel_exclusions_follow_interference() {
        // a: v0 0->1; b: needs v0=0, sets v1; c: sets v2 only.
        let t = GroundTask {
            name: "x".into(),
            variables: (0..3).map(|i| StateVariable::boolean(i, format!("v{i}"))).collect(),
            actions: vec![
                GroundAction { id: 0, name: "(a)".into(), pre: vec![Fact::new(0, 0)], eff: vec![Fact::new(0, 1)] },
                GroundAction { id: 1, name: "(b)".into(), pre: vec![Fact::new(0, 0)], eff: vec![Fact::new(1, 1)] },
                GroundAction { id: 2, name: "(c)".into(), pre: vec![], eff: vec![Fact::new(2, 1)] },
            ],
            init: vec![0, 0, 0],
            goal: vec![],
            mutex_groups: vec![],
        };
        assert_eq!(exclusion_pairs(&t, Semantics::ForallParallel), vec![(0, 1)]);
        assert_eq!(exclusion_pairs(&t, Semantics::Sequential).len(), 3);
        for a in 0..3 {
            for b in a + 1..3 {
                let excluded = exclusion_pairs(&t, Semantics::ForallParallel).contains(&(a, b));
                assert_eq!(excluded, crate::task::interferes(&t, a, b));
            }
        }
    }
}
