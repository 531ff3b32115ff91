#![allow(dead_code)]

use std::fs;

use planforge::pddl::{domain_from_str, normalize, problem_from_str};
use planforge::task::sas::parse_sas;
use planforge::task::{ground, GroundTask};

pub fn corpus(name: &str) -> String {
    format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn read(name: &str) -> String {
    fs::read_to_string(corpus(name)).unwrap()
}

pub fn pddl_task(domain: &str, problem: &str) -> GroundTask {
    let d = domain_from_str(&read(domain)).unwrap();
    let p = problem_from_str(&read(problem), &d).unwrap();
    ground(&normalize(&d, &p).unwrap()).unwrap()
}

pub fn sas_task(name: &str) -> GroundTask {
    parse_sas(&read(name)).unwrap()
}

/// Every corpus task small enough for the explicit-state oracles.
pub fn small_tasks() -> Vec<(&'static str, GroundTask)> {
    vec![
        ("blocksworld-3", pddl_task("blocksworld-domain.pddl", "blocksworld-3.pddl")),
        ("gripper-2", pddl_task("gripper-domain.pddl", "gripper-2.pddl")),
        ("gripper-2.sas", sas_task("gripper-2.sas")),
        ("gripper-4", pddl_task("gripper-domain.pddl", "gripper-4.pddl")),
        ("flip.sas", sas_task("flip.sas")),
    ]
}
