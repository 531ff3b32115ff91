use sha2::{Digest, Sha256};

use super::candidate::CandidateProperty;
use crate::encoder::{decode_plan, decode_states, encode_with, normalize_clause, CnfProgram, EncodeOptions};
use crate::solver::{Lit, SolveResult, SolverConfig};
use crate::task::{GroundTask, Semantics, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofConfig {
    pub semantics: Semantics,
    pub seed: u64,
    /// Conflicts allowed per query.
    pub conflict_budget: Option<u64>,
}

impl ProofConfig {
    pub fn new(semantics: Semantics) -> Self {
        ProofConfig {
            semantics,
            seed: 0,
            conflict_budget: Some(20_000),
        }
    }
}

/// Enough to rebuild and re-check both proof queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub semantics: Semantics,
    pub base_horizon: usize,
    pub step_horizon: usize,
    /// SHA-256 of the step query (clauses and assumptions), hex.
    pub step_fingerprint: String,
    pub seed: u64,
    /// Previously proven invariants assumed inside the step query.
    pub lemmas: Vec<CandidateProperty>,
}

/// Execution from the initial state on which the candidate fails at base 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub states: Vec<State>,
    pub steps: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownReason {
    /// The step query has a model, so the candidate is not inductive.
    NotInductive,
    BaseTimeout,
    StepTimeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofOutcome {
    Proven(Certificate),
    Refuted(Witness),
    Unknown(UnknownReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedInvariant {
    pub property: CandidateProperty,
    pub certificate: Certificate,
}

fn options(semantics: Semantics, initial_state: bool) -> EncodeOptions {
    EncodeOptions {
        semantics,
        no_idle: false,
        initial_state,
        goal: false,
    }
}

fn solver_config(config: &ProofConfig) -> SolverConfig {
    SolverConfig {
        seed: config.seed,
        conflict_budget: config.conflict_budget,
        ..SolverConfig::default()
    }
}

fn negated(clause: &[Lit]) -> Vec<Lit> {
    clause.iter().map(|&l| !l).collect()
}

fn base_query(c: &CandidateProperty, task: &GroundTask, semantics: Semantics) -> (CnfProgram, Vec<Lit>) {
    let program = encode_with(task, c.window_horizon(), options(semantics, true));
    let at0 = c.instantiate(0, &program.atoms).expect("window fits its own horizon");
    (program, negated(&at0))
}

fn step_query(
    c: &CandidateProperty,
    task: &GroundTask,
    semantics: Semantics,
    lemmas: &[CandidateProperty],
) -> (CnfProgram, Vec<Lit>) {
    let mut program = encode_with(task, c.window_horizon() + 1, options(semantics, false));
    let n = program.horizon;
    for lemma in lemmas {
        let d = lemma.degree();
        if d > n + 1 {
            continue;
        }
        for base in 0..=n + 1 - d {
            if let Some(cl) = lemma.instantiate(base, &program.atoms).and_then(normalize_clause) {
                program.clauses.push(cl);
            }
        }
    }
    let at0 = c.instantiate(0, &program.atoms).expect("window fits");
    let at1 = c.instantiate(1, &program.atoms).expect("window fits");
    if let Some(cl) = normalize_clause(at0) {
        program.clauses.push(cl);
    }
    (program, negated(&at1))
}

fn fingerprint(program: &CnfProgram, assumptions: &[Lit]) -> String {
    let mut h = Sha256::new();
    h.update((program.num_vars() as u64).to_le_bytes());
    for c in &program.clauses {
        for l in c {
            h.update(l.to_dimacs().to_le_bytes());
        }
        h.update(0i64.to_le_bytes());
    }
    for l in assumptions {
        h.update(l.to_dimacs().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Proves `candidate` by induction over its window: the base query shows it
/// holds at offset 0 of every execution from the initial state, the step
/// query shows that holding at one base implies holding at the next.
pub fn prove(candidate: &CandidateProperty, task: &GroundTask, config: &ProofConfig) -> ProofOutcome {
    prove_with_lemmas(candidate, task, config, &[])
}

/// Like [`prove`], with proven invariants assumed in the step query.
pub fn prove_with_lemmas(
    candidate: &CandidateProperty,
    task: &GroundTask,
    config: &ProofConfig,
    lemmas: &[CandidateProperty],
) -> ProofOutcome {
    let (base, assumptions) = base_query(candidate, task, config.semantics);
    match base.solver(solver_config(config)).solve(&assumptions) {
        SolveResult::Sat(model) => {
            return ProofOutcome::Refuted(Witness {
                states: decode_states(&base, &model),
                steps: decode_plan(&base, &model).steps,
            })
        }
        SolveResult::Timeout => return ProofOutcome::Unknown(UnknownReason::BaseTimeout),
        SolveResult::Unsat(_) => {}
    }
    let (step, assumptions) = step_query(candidate, task, config.semantics, lemmas);
    match step.solver(solver_config(config)).solve(&assumptions) {
        SolveResult::Sat(_) => ProofOutcome::Unknown(UnknownReason::NotInductive),
        SolveResult::Timeout => ProofOutcome::Unknown(UnknownReason::StepTimeout),
        SolveResult::Unsat(_) => ProofOutcome::Proven(Certificate {
            semantics: config.semantics,
            base_horizon: base.horizon,
            step_horizon: step.horizon,
            step_fingerprint: fingerprint(&step, &assumptions),
            seed: config.seed,
            lemmas: lemmas.to_vec(),
        }),
    }
}

impl Certificate {
    /// Rebuilds both queries without a conflict budget and checks that they
    /// are unsatisfiable and that the step query is unchanged.
    pub fn replay(&self, property: &CandidateProperty, task: &GroundTask) -> bool {
        let config = SolverConfig {
            seed: self.seed,
            ..SolverConfig::default()
        };
        let (base, a) = base_query(property, task, self.semantics);
        if base.horizon != self.base_horizon || !base.solver(config.clone()).solve(&a).is_unsat() {
            return false;
        }
        let (step, a) = step_query(property, task, self.semantics, &self.lemmas);
        step.horizon == self.step_horizon
            && fingerprint(&step, &a) == self.step_fingerprint
            && step.solver(config).solve(&a).is_unsat()
    }
}

impl Witness {
    /// Replays the witness with the executor.
    pub fn is_execution(&self, task: &GroundTask) -> bool {
        self.states.first() == Some(&task.init)
            && self.states.len() == self.steps.len() + 1
            && self
                .steps
                .iter()
                .enumerate()
                .all(|(i, step)| crate::task::apply(task, &self.states[i], step).as_ref() == Ok(&self.states[i + 1]))
    }
}
