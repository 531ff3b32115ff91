use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use log::error;
use planforge::{run, RunConfig, Semantics};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Seq,
    Par,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Bounded-horizon planner for PDDL and SAS tasks.
///
/// Exit status: 0 plan found and validated, 10 no plan within the horizon
/// or budget, 20 input error, 30 internal validation failure.
#[derive(Debug, Parser)]
#[command(name = "planforge", version)]
struct Args {
    /// PDDL domain file.
    #[arg(long, requires = "problem")]
    domain: Option<PathBuf>,
    /// PDDL problem file.
    #[arg(long, requires = "domain")]
    problem: Option<PathBuf>,
    /// Fast Downward SAS file.
    #[arg(long, conflicts_with_all = ["domain", "problem"])]
    sas: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "seq")]
    semantics: SemanticsArg,
    #[arg(long, default_value_t = 0)]
    horizon_start: usize,
    #[arg(long, default_value_t = 1)]
    horizon_step: usize,
    #[arg(long, default_value_t = 50)]
    horizon_max: usize,
    /// Allow steps without actions.
    #[arg(long)]
    no_idle_off: bool,
    #[arg(long, value_enum, default_value = "on")]
    invariants: Switch,
    /// Invariant report to re-prove and use from the start.
    #[arg(long, value_name = "FILE")]
    invariants_in: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    invariants_out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    plan_out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    stats_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Conflicts allowed across all horizon solves.
    #[arg(long, value_name = "N")]
    conflict_budget: Option<u64>,
    /// Wall-clock budget, checked between horizons.
    #[arg(long, value_name = "SECS")]
    time_budget: Option<f64>,
    /// Write the last encoded CNF (DIMACS) and its atom map to FILE and FILE.map.
    #[arg(long, value_name = "FILE")]
    emit_cnf: Option<PathBuf>,
    /// Record wall times in the stats (makes them nondeterministic).
    #[arg(long)]
    stats_timing: bool,
}

impl Args {
    fn into_config(self) -> RunConfig {
        RunConfig {
            domain: self.domain,
            problem: self.problem,
            sas: self.sas,
            semantics: match self.semantics {
                SemanticsArg::Seq => Semantics::Sequential,
                SemanticsArg::Par => Semantics::ForallParallel,
            },
            horizon_start: self.horizon_start,
            horizon_step: self.horizon_step,
            horizon_max: self.horizon_max,
            no_idle: !self.no_idle_off,
            invariants: matches!(self.invariants, Switch::On),
            invariants_in: self.invariants_in,
            invariants_out: self.invariants_out,
            plan_out: self.plan_out,
            stats_out: self.stats_out,
            emit_cnf: self.emit_cnf,
            seed: self.seed,
            conflict_budget: self.conflict_budget,
            time_budget: self.time_budget.filter(|s| s.is_finite() && *s >= 0.0).map(Duration::from_secs_f64),
            timing: self.stats_timing,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PLANFORGE_LOG", "error")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(20);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let outcome = run(&args.into_config());
    if let Some(e) = &outcome.error {
        error!("{e}");
        eprintln!("error: {e}");
    }
    if let Some(text) = &outcome.plan_text {
        print!("{text}");
    }
    ExitCode::from(outcome.status.code() as u8)
}
