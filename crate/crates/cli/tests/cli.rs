use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use planforge::task::{parse_plan, validate_plan};

const BIN: &str = env!("CARGO_BIN_EXE_planforge");

fn corpus(name: &str) -> String {
    format!("{}/../core/corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("planforge-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn planforge(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gripper2_task() -> planforge::GroundTask {
    let d = planforge::pddl::domain_from_str(&fs::read_to_string(corpus("gripper-domain.pddl")).unwrap()).unwrap();
    let p = planforge::pddl::problem_from_str(&fs::read_to_string(corpus("gripper-2.pddl")).unwrap(), &d).unwrap();
    planforge::task::ground(&planforge::pddl::normalize(&d, &p).unwrap()).unwrap()
}

#[test]
fn plan_file_round_trips_through_validator() {
    let dir = scratch("plan");
    let plan = dir.join("plan.txt");
    let stats = dir.join("stats.json");
    let out = planforge(&[
        "--domain", &corpus("gripper-domain.pddl"),
        "--problem", &corpus("gripper-2.pddl"),
        "--plan-out", path(&plan),
        "--stats-out", path(&stats),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let task = gripper2_task();
    let text = fs::read_to_string(&plan).unwrap();
    let parsed = parse_plan(&text, &task).unwrap();
    validate_plan(&task, &parsed).unwrap();
    // Sequential optimum with no-idling on, pinned by the BFS oracle.
    assert_eq!(parsed.makespan(), 5);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    let horizons = v["horizons"].as_array().unwrap();
    assert_eq!(horizons.last().unwrap()["verdict"], "sat");
    assert_eq!(horizons.last().unwrap()["horizon"], 5);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn goal_in_init_gives_empty_plan() {
    let dir = scratch("empty");
    let sas = dir.join("t.sas");
    let text = fs::read_to_string(corpus("flip.sas")).unwrap();
    // Make the goal value the initial value.
    let text = text.replace("begin_goal\n1\n0 0\nend_goal", "begin_goal\n1\n0 1\nend_goal");
    fs::write(&sas, text).unwrap();
    let plan = dir.join("plan");
    let out = planforge(&["--sas", path(&sas), "--plan-out", path(&plan)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&plan).unwrap(), "; cost = 0\n");
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn unreachable_goal_exhausts_horizons() {
    let dir = scratch("unsolvable");
    let sas = dir.join("t.sas");
    let text = fs::read_to_string(corpus("flip.sas")).unwrap();
    // Drop the only operator.
    let start = text.find("end_goal\n").unwrap() + "end_goal\n".len();
    let text = format!("{}0\n0\n", &text[..start]);
    fs::write(&sas, text).unwrap();
    let stats = dir.join("stats.json");
    let out = planforge(&["--sas", path(&sas), "--horizon-max", "5", "--stats-out", path(&stats)]);
    assert_eq!(out.status.code(), Some(10), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    let horizons = v["horizons"].as_array().unwrap();
    assert_eq!(horizons.len(), 6);
    assert!(horizons.iter().all(|h| h["verdict"] == "unsat"));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn input_errors_exit_20_with_location() {
    let dir = scratch("bad");
    let domain = dir.join("d.pddl");
    fs::write(&domain, "(define (domain d)\n  (:requirements :strips :conditional-effects))").unwrap();
    let out = planforge(&["--domain", path(&domain), "--problem", &corpus("gripper-2.pddl")]);
    assert_eq!(out.status.code(), Some(20));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("d.pddl:2:26"), "{err}");
    assert!(err.contains(":conditional-effects"), "{err}");

    let out = planforge(&["--sas", &corpus("flip.sas"), "--domain", path(&domain)]);
    assert_eq!(out.status.code(), Some(20));
    let out = planforge(&["--sas", &corpus("flip.sas"), "--horizon-step", "0"]);
    assert_eq!(out.status.code(), Some(20));
    let out = planforge(&[]);
    assert_eq!(out.status.code(), Some(20));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn emit_cnf_writes_dimacs_and_map() {
    let dir = scratch("cnf");
    let cnf = dir.join("f.cnf");
    let out = planforge(&["--sas", &corpus("flip.sas"), "--emit-cnf", path(&cnf), "--semantics", "par"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&cnf).unwrap();
    assert!(text.lines().any(|l| l.starts_with("p cnf ")));
    let map = fs::read_to_string(dir.join("f.cnf.map")).unwrap();
    assert!(map.lines().any(|l| l.contains("occurs")));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn invariants_warm_start_and_determinism() {
    let dir = scratch("inv");
    let domain = corpus("gripper-domain.pddl");
    let problem = corpus("gripper-4.pddl");
    let run = |tag: &str, extra: &[&str]| {
        let plan = dir.join(format!("{tag}.plan"));
        let stats = dir.join(format!("{tag}.json"));
        let inv = dir.join(format!("{tag}.inv"));
        let mut args = vec![
            "--domain", &domain, "--problem", &problem, "--seed", "3",
            "--plan-out", path(&plan), "--stats-out", path(&stats), "--invariants-out", path(&inv),
        ];
        args.extend_from_slice(extra);
        let out = planforge(&args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (fs::read(plan).unwrap(), fs::read(stats).unwrap(), fs::read_to_string(inv).unwrap())
    };
    let a = run("a", &[]);
    let b = run("b", &[]);
    assert_eq!(a, b);
    assert!(a.2.starts_with("# planforge invariants v1\n"));
    assert!(a.2.lines().any(|l| l.starts_with("degree=")));
    let inv_path = dir.join("a.inv");
    let warm = run("c", &["--invariants-in", path(&inv_path)]);
    let task_plan = String::from_utf8(warm.0).unwrap();
    assert!(task_plan.ends_with("; cost = 11\n"), "{task_plan}");
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn invariants_off_still_plans() {
    let out = planforge(&[
        "--domain", &corpus("blocksworld-domain.pddl"),
        "--problem", &corpus("blocksworld-3.pddl"),
        "--invariants", "off", "--semantics", "par", "--no-idle-off",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("; cost = 6"));
}
