use std::collections::HashMap;

use super::ast::*;
use super::{PddlError, Pos};
use crate::task::{
    Arg, EqualityConstraint, FluentSchema, GroundAtom, LiftedAction, LiftedLiteral, Parameter,
    PlanningTask,
};

fn missing(what: &str, name: &str) -> PddlError {
    PddlError::Type {
        pos: Pos::default(),
        message: format!("unknown {what} '{name}'"),
    }
}

/// Lowers checked ASTs into the lifted task IR. Typing becomes per-parameter
/// membership sets; equality atoms become binding constraints.
pub fn normalize(domain: &DomainAst, problem: &ProblemAst) -> Result<PlanningTask, PddlError> {
    let mut objects = Vec::new();
    let mut object_types = Vec::new();
    let mut object_index = HashMap::new();
    for o in domain.constants.iter().chain(&problem.objects) {
        if object_index.contains_key(&o.name) {
            continue;
        }
        object_index.insert(o.name.clone(), objects.len());
        objects.push(o.name.clone());
        object_types.push(o.ty.clone());
    }
    let fluents: Vec<FluentSchema> = domain
        .predicates
        .iter()
        .map(|p| FluentSchema {
            name: p.name.clone(),
            arity: p.params.len(),
        })
        .collect();
    let fluent_index: HashMap<&str, usize> = fluents
        .iter()
        .enumerate()
        .map(|(i, f)| (f.name.as_str(), i))
        .collect();

    let members_of = |ty: &str| -> Vec<usize> {
        (0..objects.len())
            .filter(|&i| domain.is_subtype(&object_types[i], ty))
            .collect()
    };

    let mut actions = Vec::new();
    for a in &domain.actions {
        let params: Vec<Parameter> = a
            .parameters
            .iter()
            .map(|p| Parameter {
                name: p.name.clone(),
                type_name: p.ty.clone(),
                members: members_of(&p.ty),
            })
            .collect();
        let arg = |t: &Term| -> Result<Arg, PddlError> {
            match t {
                Term::Variable(v) => a
                    .parameters
                    .iter()
                    .position(|p| p.name == *v)
                    .map(Arg::Param)
                    .ok_or_else(|| missing("variable", v)),
                Term::Constant(c) => object_index
                    .get(c)
                    .copied()
                    .map(Arg::Object)
                    .ok_or_else(|| missing("object", c)),
            }
        };
        let lift = |l: &Literal| -> Result<LiftedLiteral, PddlError> {
            Ok(LiftedLiteral {
                fluent: *fluent_index
                    .get(l.atom.predicate.as_str())
                    .ok_or_else(|| missing("predicate", &l.atom.predicate))?,
                args: l.atom.args.iter().map(&arg).collect::<Result<_, _>>()?,
                positive: l.positive,
            })
        };
        let mut precondition = Vec::new();
        let mut equalities = Vec::new();
        for l in &a.precondition {
            if l.atom.is_equality() {
                equalities.push(EqualityConstraint {
                    lhs: arg(&l.atom.args[0])?,
                    rhs: arg(&l.atom.args[1])?,
                    equal: l.positive,
                });
            } else {
                precondition.push(lift(l)?);
            }
        }
        let effect = a.effect.iter().map(lift).collect::<Result<_, _>>()?;
        actions.push(LiftedAction {
            name: a.name.clone(),
            params,
            precondition,
            effect,
            equalities,
        });
    }

    let ground_atom = |a: &Atom| -> Result<GroundAtom, PddlError> {
        Ok(GroundAtom {
            fluent: *fluent_index
                .get(a.predicate.as_str())
                .ok_or_else(|| missing("predicate", &a.predicate))?,
            args: a
                .args
                .iter()
                .map(|t| {
                    object_index
                        .get(t.name())
                        .copied()
                        .ok_or_else(|| missing("object", t.name()))
                })
                .collect::<Result<_, _>>()?,
        })
    };
    let init = problem.init.iter().map(ground_atom).collect::<Result<_, _>>()?;
    let goal = problem
        .goal
        .iter()
        .map(|l| Ok((ground_atom(&l.atom)?, l.positive)))
        .collect::<Result<_, PddlError>>()?;

    Ok(PlanningTask {
        domain_name: domain.name.clone(),
        problem_name: problem.name.clone(),
        objects,
        fluents,
        actions,
        init,
        goal,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{domain_from_str, problem_from_str};
    use super::*;

    #[test]
    fn minimal_task() {
        let d = domain_from_str(
            "(define (domain d) (:predicates (p)) (:action a :precondition (p) :effect (not (p))))",
        )
        .unwrap();
        let p = problem_from_str("(define (problem q) (:domain d) (:init (p)) (:goal (not (p))))", &d)
            .unwrap();
        let t = normalize(&d, &p).unwrap();
        assert_eq!(t.fluents.len(), 1);
        assert_eq!(t.actions.len(), 1);
        assert_eq!(t.goal, vec![(GroundAtom { fluent: 0, args: vec![] }, false)]);
    }

    #[test]
    fn typing_becomes_membership_constraint() {
        let d = domain_from_str(
            "(define (domain d) (:requirements :typing) (:types ball room)
               (:predicates (at ?b - ball ?r - room))
               (:action kick :parameters (?b - ball ?r - room) :precondition (at ?b ?r) :effect (not (at ?b ?r))))",
        )
        .unwrap();
        let p = problem_from_str(
            "(define (problem q) (:domain d) (:objects r1 - room b1 b2 - ball) (:init (at b1 r1)) (:goal (and)))",
            &d,
        )
        .unwrap();
        let t = normalize(&d, &p).unwrap();
        let b = &t.actions[0].params[0];
        assert_eq!(b.type_name, "ball");
        let names: Vec<&str> = b.members.iter().map(|&i| t.objects[i].as_str()).collect();
        assert_eq!(names, ["b1", "b2"]);
    }

    #[test]
    fn equality_atoms_become_constraints() {
        let d = domain_from_str(
            "(define (domain d) (:requirements :equality) (:predicates (p ?x ?y))
               (:action a :parameters (?x ?y) :precondition (and (= ?x ?y)) :effect (p ?x ?y)))",
        )
        .unwrap();
        let p = problem_from_str("(define (problem q) (:domain d) (:objects o1 o2) (:init) (:goal (and)))", &d)
            .unwrap();
        let t = normalize(&d, &p).unwrap();
        assert!(t.actions[0].precondition.is_empty());
        assert_eq!(
            t.actions[0].equalities,
            vec![EqualityConstraint { lhs: Arg::Param(0), rhs: Arg::Param(1), equal: true }]
        );
    }
}
