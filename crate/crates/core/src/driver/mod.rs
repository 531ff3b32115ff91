//! End-to-end runs: load input, search horizons, validate, write artifacts.

pub mod stats;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::{info, warn};
use thiserror::Error;

pub use stats::{print_stats, HorizonRecord, RunStats, Totals, Verdict};

use crate::encoder::{atom_map, to_dimacs};
use crate::invariant::report::{parse_report, write_report, ReportError};
use crate::invariant::{
    feedback_loop_with_pool, soundness_audit, warm_start, AuditOutcome, CandidatePool, LoopBudget, LoopConfig,
    ProofConfig,
};
use crate::pddl::{domain_from_str, normalize, problem_from_str};
use crate::task::sas::{parse_sas, SasError};
use crate::task::{ground, validate_plan, GroundTask, GroundingError, Plan, PlanError, Semantics};

/// States explored by the post-run audit before it is skipped.
pub const AUDIT_STATE_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: Option<PathBuf>,
    pub problem: Option<PathBuf>,
    pub sas: Option<PathBuf>,
    pub semantics: Semantics,
    pub horizon_start: usize,
    pub horizon_step: usize,
    pub horizon_max: usize,
    pub no_idle: bool,
    pub invariants: bool,
    pub invariants_in: Option<PathBuf>,
    pub invariants_out: Option<PathBuf>,
    pub plan_out: Option<PathBuf>,
    pub stats_out: Option<PathBuf>,
    pub emit_cnf: Option<PathBuf>,
    pub seed: u64,
    pub conflict_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Include wall times in the stats.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            domain: None,
            problem: None,
            sas: None,
            semantics: Semantics::Sequential,
            horizon_start: 0,
            horizon_step: 1,
            horizon_max: 50,
            no_idle: true,
            invariants: true,
            invariants_in: None,
            invariants_out: None,
            plan_out: None,
            stats_out: None,
            emit_cnf: None,
            seed: 0,
            conflict_budget: None,
            time_budget: None,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Pddl { domain: PathBuf, problem: PathBuf },
    Sas(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("no input: pass --domain and --problem, or --sas")]
    NoInput,
    #[error("--sas cannot be combined with --domain/--problem")]
    ConflictingInputs,
    #[error("--domain and --problem must be given together")]
    IncompletePddl,
    #[error("horizon step must be at least 1")]
    ZeroStep,
    #[error("horizon max {max} is below horizon start {start}")]
    MaxBelowStart { start: usize, max: usize },
}

impl RunConfig {
    pub fn input(&self) -> Result<Input, ConfigError> {
        if self.horizon_step == 0 {
            return Err(ConfigError::ZeroStep);
        }
        if self.horizon_max < self.horizon_start {
            return Err(ConfigError::MaxBelowStart {
                start: self.horizon_start,
                max: self.horizon_max,
            });
        }
        match (&self.domain, &self.problem, &self.sas) {
            (None, None, Some(s)) => Ok(Input::Sas(s.clone())),
            (Some(d), Some(p), None) => Ok(Input::Pddl {
                domain: d.clone(),
                problem: p.clone(),
            }),
            (None, None, None) => Err(ConfigError::NoInput),
            (_, _, Some(_)) => Err(ConfigError::ConflictingInputs),
            _ => Err(ConfigError::IncompletePddl),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Already rendered as `file:line:column: message`.
    #[error("{0}")]
    Pddl(String),
    #[error("{path}: {source}")]
    Sas {
        path: String,
        #[source]
        source: SasError,
    },
    #[error(transparent)]
    Grounding(#[from] GroundingError),
    #[error("{path}: {source}")]
    Invariants {
        path: String,
        #[source]
        source: ReportError,
    },
    #[error("plan failed validation: {0}")]
    PlanValidation(#[from] PlanError),
    #[error("invariant audit found a violated invariant: {0}")]
    Audit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    PlanFound,
    NoPlan,
    InputError,
    InternalError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::PlanFound => 0,
            ExitStatus::NoPlan => 10,
            ExitStatus::InputError => 20,
            ExitStatus::InternalError => 30,
        }
    }
}

impl RunError {
    pub fn status(&self) -> ExitStatus {
        match self {
            RunError::PlanValidation(_) | RunError::Audit(_) => ExitStatus::InternalError,
            _ => ExitStatus::InputError,
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub task: Option<GroundTask>,
    pub plan: Option<Plan>,
    pub stats: RunStats,
    pub plan_text: Option<String>,
    pub stats_text: String,
    pub invariants_text: Option<String>,
    pub error: Option<RunError>,
}

impl RunOutcome {
    fn failed(error: RunError) -> Self {
        let stats = RunStats::default();
        RunOutcome {
            status: error.status(),
            task: None,
            plan: None,
            stats_text: print_stats(&stats),
            stats,
            plan_text: None,
            invariants_text: None,
            error: Some(error),
        }
    }
}

fn read(path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads and grounds the configured input.
pub fn load_task(input: &Input) -> Result<GroundTask, RunError> {
    match input {
        Input::Pddl { domain, problem } => {
            let dsrc = read(domain)?;
            let psrc = read(problem)?;
            let dname = domain.display().to_string();
            let pname = problem.display().to_string();
            let d = domain_from_str(&dsrc).map_err(|e| RunError::Pddl(e.with_file(&dname)))?;
            let p = problem_from_str(&psrc, &d).map_err(|e| RunError::Pddl(e.with_file(&pname)))?;
            let lifted = normalize(&d, &p).map_err(|e| RunError::Pddl(e.with_file(&pname)))?;
            Ok(ground(&lifted)?)
        }
        Input::Sas(path) => {
            let src = read(path)?;
            parse_sas(&src).map_err(|source| RunError::Sas {
                path: path.display().to_string(),
                source,
            })
        }
    }
}

/// Runs the planner. Artifacts are written only for the paths configured;
/// their contents are also returned.
pub fn run(config: &RunConfig) -> RunOutcome {
    match run_inner(config) {
        Ok(outcome) => outcome,
        Err(e) => RunOutcome::failed(e),
    }
}

fn run_inner(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let input = config.input()?;
    let task = load_task(&input)?;
    info!(
        "task {}: {} variables, {} actions",
        task.name,
        task.variables.len(),
        task.actions.len()
    );

    let proof_config = ProofConfig {
        semantics: config.semantics,
        seed: config.seed,
        ..ProofConfig::new(config.semantics)
    };
    let mut pool = CandidatePool::new(config.semantics);
    if let Some(path) = &config.invariants_in {
        let report = parse_report(&read(path)?, &task).map_err(|source| RunError::Invariants {
            path: path.display().to_string(),
            source,
        })?;
        if report.semantics.is_some_and(|s| s != config.semantics) {
            warn!("invariants in {} were proven under other semantics", path.display());
        }
        for e in &report.unresolved {
            warn!("{}: skipped: {e}", path.display());
        }
        let n = report.properties.len();
        let proven = warm_start(&mut pool, &task, &proof_config, report.properties);
        info!("warm start: {proven} of {n} loaded invariants re-proven");
    }

    let loop_config = LoopConfig {
        horizon_start: config.horizon_start,
        horizon_step: config.horizon_step,
        no_idle: config.no_idle,
        invariants: config.invariants,
        seed: config.seed,
        timing: config.timing,
        ..LoopConfig::new(config.semantics, config.horizon_max)
    };
    let budget = LoopBudget {
        time: config.time_budget,
        conflicts: config.conflict_budget,
        max_candidates: Some(5_000),
    };
    let out = feedback_loop_with_pool(&task, &budget, &loop_config, pool);
    info!("search stopped: {:?}", out.stop);

    if let Some(plan) = &out.plan {
        validate_plan(&task, plan)?;
    }
    if out.pool.num_proven() > 0 {
        match soundness_audit(&out.pool, &task, AUDIT_STATE_CAP) {
            Ok(AuditOutcome::Ok { windows_checked }) => info!("audit: {windows_checked} windows ok"),
            Ok(AuditOutcome::CounterexampleFound { invariant, .. }) => {
                return Err(RunError::Audit(crate::invariant::report::format_property(&invariant, &task)))
            }
            Err(e) => info!("audit skipped: {e}"),
        }
    }

    let stats = RunStats::from_records(
        out.records,
        out.pool.num_proven(),
        out.plan.as_ref().map(Plan::makespan),
    );
    let stats_text = print_stats(&stats);
    let plan_text = out.plan.as_ref().map(|p| p.display(&task).to_string());
    let invariants_text = (config.invariants || config.invariants_in.is_some()).then(|| write_report(&out.pool, &task));

    if let (Some(path), Some(text)) = (&config.plan_out, &plan_text) {
        write(path, text)?;
    }
    if let Some(path) = &config.stats_out {
        write(path, &stats_text)?;
    }
    if let (Some(path), Some(text)) = (&config.invariants_out, &invariants_text) {
        write(path, text)?;
    }
    if let (Some(path), Some(program)) = (&config.emit_cnf, &out.last_program) {
        write(path, &to_dimacs(program))?;
        let mut map_path = path.clone().into_os_string();
        map_path.push(".map");
        write(Path::new(&map_path), &atom_map(program))?;
    }

    Ok(RunOutcome {
        status: if out.plan.is_some() {
            ExitStatus::PlanFound
        } else {
            ExitStatus::NoPlan
        },
        task: Some(task),
        plan: out.plan,
        stats,
        plan_text,
        stats_text,
        invariants_text,
        error: None,
    })
}
