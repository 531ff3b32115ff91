//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use planforge::encoder::{add_invariant_constraints, decode_plan, encode_with, EncodeOptions};
use planforge::invariant::*;
use planforge::pddl::{domain_from_str, problem_from_str};
use planforge::solver::{solve_clauses, LearnedClause};
use planforge::task::oracle::{optimal_makespan, reachable_states, DEFAULT_STATE_CAP};
use planforge::task::{validate_plan, Fact};
use planforge::{run, ExitStatus, Lit, RunConfig, Semantics, SolveResult, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEMANTICS: [Semantics; 2] = [Semantics::Sequential, Semantics::ForallParallel];

/// Reachable-state count of blocksworld-3 from the BFS oracle. Matches the
/// closed form: 13 arm-empty towers of 3 blocks plus 3 * 3 held-block states.
const BW3_STATES: usize = 22;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn parser_corpus() -> Outcome {
    let t = Instant::now();
    let bw = domain_from_str(&read("blocksworld-domain.pddl")).map_err(|e| e.to_string())?;
    problem_from_str(&read("blocksworld-3.pddl"), &bw).map_err(|e| e.to_string())?;
    let gr = domain_from_str(&read("gripper-domain.pddl")).map_err(|e| e.to_string())?;
    for p in ["gripper-2.pddl", "gripper-4.pddl"] {
        problem_from_str(&read(p), &gr).map_err(|e| e.to_string())?;
    }
    within(t.elapsed(), Duration::from_secs(1))?;
    check(bw.actions.len() == 4, format!("{} action schemas", bw.actions.len()))?;
    check(bw.predicates.len() == 5, format!("{} predicates", bw.predicates.len()))?;
    Ok(format!("4 schemas, 5 predicates in {:?}", t.elapsed()))
}

fn grounding_pin() -> Outcome {
    let t = Instant::now();
    let task = pddl_task("blocksworld-domain.pddl", "blocksworld-3.pddl");
    let states = reachable_states(&task, DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(5))?;
    check(task.actions.len() == 18, format!("{} ground actions", task.actions.len()))?;
    check(states.len() == BW3_STATES, format!("{} reachable states", states.len()))?;
    Ok(format!("18 actions, {BW3_STATES} states in {:?}", t.elapsed()))
}

/// Clause as (positive mask, negative mask) over at most 32 variables.
fn masks(c: &[Lit]) -> (u32, u32) {
    c.iter().fold((0, 0), |(p, n), l| {
        let bit = 1u32 << l.var();
        if l.is_positive() {
            (p | bit, n)
        } else {
            (p, n | bit)
        }
    })
}

fn satisfied(m: (u32, u32), a: u32) -> bool {
    (a & m.0) | (!a & m.1) != 0
}

fn solver_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut sat, mut learned_checked) = (0, 0usize);
    for i in 0..1000u64 {
        let n = rng.random_range(3..=20usize);
        let m = ((n as f64) * 4.26).round() as usize;
        let cls: Vec<Vec<Lit>> = (0..m)
            .map(|_| {
                (0..3)
                    .map(|_| Lit::new(rng.random_range(0..n) as u32, rng.random_bool(0.5)))
                    .collect()
            })
            .collect();
        let cm: Vec<(u32, u32)> = cls.iter().map(|c| masks(c)).collect();
        let models: Vec<u32> = (0..1u32 << n).filter(|&a| cm.iter().all(|&c| satisfied(c, a))).collect();
        let (r, solver) = solve_clauses(n, &cls, &[], SolverConfig { seed: i, ..SolverConfig::default() });
        match r {
            SolveResult::Sat(model) => {
                check(!models.is_empty(), format!("instance {i}: SAT but enumeration finds no model"))?;
                let a = model.iter().enumerate().fold(0u32, |a, (v, &b)| a | (u32::from(b) << v));
                check(cm.iter().all(|&c| satisfied(c, a)), format!("instance {i}: model violates a clause"))?;
                sat += 1;
            }
            SolveResult::Unsat(_) => check(models.is_empty(), format!("instance {i}: UNSAT but satisfiable"))?,
            SolveResult::Timeout => return Err(format!("instance {i}: timeout")),
        }
        for LearnedClause { literals, .. } in solver.export_learned(usize::MAX, u32::MAX) {
            let lm = masks(&literals);
            check(models.iter().all(|&a| satisfied(lm, a)), format!("instance {i}: learned clause not entailed"))?;
            learned_checked += 1;
        }
    }
    within(t.elapsed(), Duration::from_secs(60))?;
    Ok(format!("1000/1000 verdicts match ({sat} SAT), {learned_checked} learned clauses entailed, {:?}", t.elapsed()))
}

fn planning_soundness() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for (name, task) in small_tasks() {
        for sem in SEMANTICS {
            let opt = optimal_makespan(&task, sem, DEFAULT_STATE_CAP)
                .map_err(|e| e.to_string())?
                .ok_or(format!("{name}: oracle says unsolvable"))?;
            let options = EncodeOptions { no_idle: false, ..EncodeOptions::planning(sem) };
            let mut first = None;
            for h in 0..=opt {
                let p = encode_with(&task, h, options);
                if let SolveResult::Sat(m) = p.solver(SolverConfig::default()).solve(&[]) {
                    let plan = decode_plan(&p, &m);
                    validate_plan(&task, &plan).map_err(|e| format!("{name} {sem:?} h={h}: {e}"))?;
                    first = Some(h);
                    break;
                }
            }
            check(first == Some(opt), format!("{name} {sem:?}: first SAT {first:?}, oracle {opt}"))?;
            checked += 1;
        }
    }
    within(t.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{checked} task/semantics pairs at oracle makespan, {:?}", t.elapsed()))
}

fn full_loop(task: &planforge::GroundTask, sem: Semantics) -> LoopOutcome {
    feedback_loop(task, &LoopBudget::default(), &LoopConfig::new(sem, 30))
}

fn invariant_soundness() -> Outcome {
    let mut proven = 0;
    for (name, task) in small_tasks() {
        for sem in SEMANTICS {
            let out = full_loop(&task, sem);
            proven += out.pool.all_proven().len();
            match soundness_audit(&out.pool, &task, DEFAULT_STATE_CAP).map_err(|e| e.to_string())? {
                AuditOutcome::Ok { .. } => {}
                AuditOutcome::CounterexampleFound { invariant, .. } => {
                    return Err(format!("{name} {sem:?}: violated {invariant}"))
                }
            }
        }
    }
    Ok(format!("{proven} proven invariants, no violated window"))
}

fn plan_preservation() -> Outcome {
    let mut horizons = 0;
    for (name, task) in small_tasks() {
        for sem in SEMANTICS {
            let out = full_loop(&task, sem);
            let invs = out.pool.proven();
            let opt = optimal_makespan(&task, sem, DEFAULT_STATE_CAP).map_err(|e| e.to_string())?.unwrap();
            let options = EncodeOptions { no_idle: false, ..EncodeOptions::planning(sem) };
            let mut first_with = None;
            for h in 0..=opt + 2 {
                let plain = encode_with(&task, h, options);
                let (with, _) = add_invariant_constraints(plain.clone(), &invs);
                let a = plain.solver(SolverConfig::default()).solve(&[]).is_sat();
                let b = with.solver(SolverConfig::default()).solve(&[]).is_sat();
                check(a == b, format!("{name} {sem:?} h={h}: verdict {a} without, {b} with"))?;
                if b && first_with.is_none() {
                    first_with = Some(h);
                }
                horizons += 1;
            }
            check(first_with == Some(opt), format!("{name} {sem:?}: makespan {first_with:?} with invariants, oracle {opt}"))?;
        }
    }
    Ok(format!("{horizons} horizons agree, optima unchanged"))
}

fn planted_fault() -> Outcome {
    let task = pddl_task("gripper-domain.pddl", "gripper-2.pddl");
    let mut pool = CandidatePool::new(Semantics::Sequential);
    let init = Fact::new(0, task.init[0]);
    let bogus = CandidateProperty::new(
        vec![PropLit { offset: 0, atom: RelAtom::Holds(init), positive: false }],
        Origin::default(),
    )
    .map_err(|e| e.to_string())?;
    pool.insert_proven(ValidatedInvariant {
        property: bogus.clone(),
        certificate: Certificate {
            semantics: Semantics::Sequential,
            base_horizon: 0,
            step_horizon: 1,
            step_fingerprint: String::new(),
            seed: 0,
            lemmas: vec![],
        },
    });
    match soundness_audit(&pool, &task, DEFAULT_STATE_CAP).map_err(|e| e.to_string())? {
        AuditOutcome::CounterexampleFound { invariant, states, .. } if invariant == bogus && states[0] == task.init => {
            Ok("false invariant caught at the initial state".into())
        }
        other => Err(format!("audit returned {other:?}")),
    }
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("planforge-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn determinism() -> Outcome {
    let dir = scratch_dir();
    let mut files = Vec::new();
    for sem in SEMANTICS {
        for round in 0..2 {
            let out = |f: &str| Some(dir.join(format!("{}-{round}.{f}", sem.tag())));
            let config = RunConfig {
                domain: Some(corpus("gripper-domain.pddl").into()),
                problem: Some(corpus("gripper-4.pddl").into()),
                semantics: sem,
                seed: 7,
                plan_out: out("plan"),
                stats_out: out("json"),
                invariants_out: out("inv"),
                ..RunConfig::default()
            };
            let r = run(&config);
            check(r.status == ExitStatus::PlanFound, format!("{sem:?}: status {:?} {:?}", r.status, r.error))?;
        }
        for ext in ["plan", "json", "inv"] {
            let a = fs::read(dir.join(format!("{}-0.{ext}", sem.tag()))).map_err(|e| e.to_string())?;
            let b = fs::read(dir.join(format!("{}-1.{ext}", sem.tag()))).map_err(|e| e.to_string())?;
            check(a == b, format!("{sem:?}: {ext} files differ"))?;
            files.push(ext);
        }
    }
    let _ = fs::remove_dir_all(&dir);
    Ok(format!("{} artifact pairs byte-identical", files.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("parser corpus", parser_corpus),
        ("grounding pin", grounding_pin),
        ("solver oracle equivalence", solver_oracle),
        ("planning soundness and completeness", planning_soundness),
        ("invariant soundness", invariant_soundness),
        ("plan preservation", plan_preservation),
        ("planted-fault detection", planted_fault),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
