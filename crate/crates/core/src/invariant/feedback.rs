use std::time::{Duration, Instant};

use log::{debug, info};
use rayon::prelude::*;

use super::candidate::{generalize, CandidateProperty, Origin};
use super::pool::CandidatePool;
use super::prove::{prove_with_lemmas, ProofConfig, ProofOutcome};
use crate::driver::stats::{HorizonRecord, Verdict};
use crate::encoder::{add_invariant_constraints, decode_plan, encode_with, CnfProgram, EncodeOptions};
use crate::solver::{SolveResult, SolverConfig};
use crate::task::{GroundTask, Plan, Semantics};

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig {
    pub semantics: Semantics,
    pub horizon_start: usize,
    pub horizon_step: usize,
    pub horizon_max: usize,
    pub no_idle: bool,
    /// Generalize and prove learned clauses; off means plain horizon search.
    pub invariants: bool,
    pub seed: u64,
    pub export_max_size: usize,
    pub export_max_lbd: u32,
    pub max_degree: usize,
    /// Conflicts allowed per proof query.
    pub proof_conflict_budget: Option<u64>,
    /// Record wall time per horizon.
    pub timing: bool,
}

impl LoopConfig {
    pub fn new(semantics: Semantics, horizon_max: usize) -> Self {
        LoopConfig {
            semantics,
            horizon_start: 0,
            horizon_step: 1,
            horizon_max,
            no_idle: true,
            invariants: true,
            seed: 0,
            export_max_size: 8,
            export_max_lbd: 4,
            max_degree: 3,
            proof_conflict_budget: Some(20_000),
            timing: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoopBudget {
    pub time: Option<Duration>,
    /// Conflicts across all horizon solves.
    pub conflicts: Option<u64>,
    /// Candidates admitted to the pool over the whole run.
    pub max_candidates: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    PlanFound,
    HorizonExhausted,
    ConflictBudget,
    TimeBudget,
}

#[derive(Debug, Clone)]
pub struct LoopOutcome {
    pub pool: CandidatePool,
    pub plan: Option<Plan>,
    pub records: Vec<HorizonRecord>,
    pub stop: StopReason,
    /// Last program handed to the solver.
    pub last_program: Option<CnfProgram>,
}

#[derive(Debug, Default, Clone, Copy)]
struct RoundCounts {
    proven: u64,
    refuted: u64,
    unknown: u64,
}

/// Proves every ready candidate in parallel against the current lemma set,
/// then records outcomes in canonical order.
fn prove_round(pool: &mut CandidatePool, task: &GroundTask, config: &ProofConfig) -> RoundCounts {
    let ready = pool.ready();
    if ready.is_empty() {
        return RoundCounts::default();
    }
    let lemmas: Vec<CandidateProperty> = pool.proven().into_iter().map(|v| v.property).collect();
    let outcomes: Vec<ProofOutcome> = ready
        .par_iter()
        .map(|c| prove_with_lemmas(c, task, config, &lemmas))
        .collect();
    let mut counts = RoundCounts::default();
    for (c, outcome) in ready.iter().zip(outcomes) {
        match &outcome {
            ProofOutcome::Proven(_) => counts.proven += 1,
            ProofOutcome::Refuted(_) => counts.refuted += 1,
            ProofOutcome::Unknown(_) => counts.unknown += 1,
        }
        pool.record(c, outcome);
    }
    debug!(
        "proof round: {} proven, {} refuted, {} unknown",
        counts.proven, counts.refuted, counts.unknown
    );
    counts
}

/// Re-proves loaded invariants until no candidate is ready; returns how many
/// were proven.
pub(crate) fn warm_start(
    pool: &mut CandidatePool,
    task: &GroundTask,
    config: &ProofConfig,
    properties: Vec<CandidateProperty>,
) -> usize {
    for p in properties {
        pool.offer(p);
    }
    let mut total = 0;
    loop {
        let c = prove_round(pool, task, config);
        total += c.proven as usize;
        if c.proven + c.refuted + c.unknown == 0 {
            return total;
        }
    }
}

/// Horizon search with the invariant feedback loop. Each UNSAT horizon feeds
/// its short learned clauses through generalization and proof; proven
/// invariants are injected into every later encoding.
pub fn feedback_loop(task: &GroundTask, budget: &LoopBudget, config: &LoopConfig) -> LoopOutcome {
    let pool = CandidatePool::new(config.semantics);
    feedback_loop_with_pool(task, budget, config, pool)
}

pub fn feedback_loop_with_pool(
    task: &GroundTask,
    budget: &LoopBudget,
    config: &LoopConfig,
    mut pool: CandidatePool,
) -> LoopOutcome {
    let started = Instant::now();
    let proof_config = ProofConfig {
        semantics: config.semantics,
        seed: config.seed,
        conflict_budget: config.proof_conflict_budget,
    };
    let options = EncodeOptions {
        no_idle: config.no_idle,
        ..EncodeOptions::planning(config.semantics)
    };
    let mut records = Vec::new();
    let mut conflicts_used = 0u64;
    let mut admitted = 0usize;
    let mut last_program = None;
    let mut horizon = config.horizon_start;
    let mut solve_id = 0u64;

    let stop = loop {
        if horizon > config.horizon_max {
            break StopReason::HorizonExhausted;
        }
        if budget.time.is_some_and(|t| started.elapsed() >= t) {
            break StopReason::TimeBudget;
        }
        let round_start = Instant::now();
        let (program, skipped) = add_invariant_constraints(encode_with(task, horizon, options), &pool.proven());
        if !skipped.is_empty() {
            debug!("horizon {horizon}: {} invariants too wide", skipped.len());
        }
        let remaining = budget.conflicts.map(|b| b.saturating_sub(conflicts_used));
        let mut solver = program.solver(SolverConfig {
            seed: config.seed,
            conflict_budget: remaining,
            ..SolverConfig::default()
        });
        let result = solver.solve(&[]);
        solve_id += 1;
        let stats = solver.stats();
        conflicts_used += stats.conflicts;
        let mut record = HorizonRecord {
            horizon,
            verdict: match result {
                SolveResult::Sat(_) => Verdict::Sat,
                SolveResult::Unsat(_) => Verdict::Unsat,
                SolveResult::Timeout => Verdict::Timeout,
            },
            conflicts: stats.conflicts,
            decisions: stats.decisions,
            learned_exported: 0,
            candidates_proven: 0,
            candidates_refuted: 0,
            candidates_unknown: 0,
            wall_time_ms: None,
        };
        info!("horizon {horizon}: {:?} after {} conflicts", record.verdict, stats.conflicts);

        if let SolveResult::Sat(model) = &result {
            let plan = decode_plan(&program, model);
            if config.timing {
                record.wall_time_ms = Some(round_start.elapsed().as_millis() as u64);
            }
            records.push(record);
            return LoopOutcome {
                pool,
                plan: Some(plan),
                records,
                stop: StopReason::PlanFound,
                last_program: Some(program),
            };
        }

        if config.invariants {
            let learned = solver.export_learned(config.export_max_size, config.export_max_lbd);
            record.learned_exported = learned.len() as u64;
            let origin = Origin {
                instance: task.name.clone(),
                solve_id,
            };
            for clause in &learned {
                if budget.max_candidates.is_some_and(|m| admitted >= m) {
                    break;
                }
                if let Ok(c) = generalize(&clause.literals, &program, origin.clone()) {
                    if c.degree() <= config.max_degree && pool.offer(c) {
                        admitted += 1;
                    }
                }
            }
            let counts = prove_round(&mut pool, task, &proof_config);
            record.candidates_proven = counts.proven;
            record.candidates_refuted = counts.refuted;
            record.candidates_unknown = counts.unknown;
        }
        if config.timing {
            record.wall_time_ms = Some(round_start.elapsed().as_millis() as u64);
        }
        let timed_out = record.verdict == Verdict::Timeout;
        records.push(record);
        last_program = Some(program);
        if timed_out {
            break StopReason::ConflictBudget;
        }
        horizon += config.horizon_step;
    };
    LoopOutcome {
        pool,
        plan: None,
        records,
        stop,
        last_program,
    }
}
