use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_char(')')
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

fn typed(f: &mut Formatter<'_>, names: &[TypedName]) -> fmt::Result {
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        write!(f, "{} - {}", n.name, n.ty)?;
    }
    Ok(())
}

fn conjunction(f: &mut Formatter<'_>, lits: &[Literal]) -> fmt::Result {
    f.write_str("(and")?;
    for l in lits {
        write!(f, " {l}")?;
    }
    f.write_char(')')
}

impl Display for DomainAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            f.write_str("  (:requirements")?;
            for r in &self.requirements {
                write!(f, " {}", r.flag())?;
            }
            writeln!(f, ")")?;
        }
        if !self.types.is_empty() {
            f.write_str("  (:types")?;
            for (t, p) in &self.types {
                write!(f, " {t} - {p}")?;
            }
            writeln!(f, ")")?;
        }
        if !self.constants.is_empty() {
            f.write_str("  (:constants ")?;
            typed(f, &self.constants)?;
            writeln!(f, ")")?;
        }
        f.write_str("  (:predicates")?;
        for p in &self.predicates {
            write!(f, " ({}", p.name)?;
            if !p.params.is_empty() {
                f.write_char(' ')?;
                typed(f, &p.params)?;
            }
            f.write_char(')')?;
        }
        writeln!(f, ")")?;
        for a in &self.actions {
            write!(f, "  (:action {}\n    :parameters (", a.name)?;
            typed(f, &a.parameters)?;
            f.write_str(")\n    :precondition ")?;
            conjunction(f, &a.precondition)?;
            f.write_str("\n    :effect ")?;
            conjunction(f, &a.effect)?;
            writeln!(f, ")")?;
        }
        f.write_str(")\n")
    }
}

impl Display for ProblemAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain_name)?;
        f.write_str("  (:objects ")?;
        typed(f, &self.objects)?;
        f.write_str(")\n  (:init")?;
        for a in &self.init {
            write!(f, " {a}")?;
        }
        f.write_str(")\n  (:goal ")?;
        conjunction(f, &self.goal)?;
        f.write_str("))\n")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{domain_from_str, problem_from_str};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn corpus_round_trip() {
        for (dom, probs) in [
            (
                include_str!("../../corpus/blocksworld-domain.pddl"),
                vec![include_str!("../../corpus/blocksworld-3.pddl")],
            ),
            (
                include_str!("../../corpus/gripper-domain.pddl"),
                vec![
                    include_str!("../../corpus/gripper-2.pddl"),
                    include_str!("../../corpus/gripper-4.pddl"),
                ],
            ),
        ] {
            let d = domain_from_str(dom).unwrap();
            let d2 = domain_from_str(&d.to_string()).unwrap();
            assert_eq!(d, d2);
            for p in probs {
                let p = problem_from_str(p, &d).unwrap();
                assert_eq!(problem_from_str(&p.to_string(), &d).unwrap(), p);
            }
        }
    }

    #[test]
    fn uppercased_corpus_parses_identically() {
        let dom = include_str!("../../corpus/blocksworld-domain.pddl");
        let prob = include_str!("../../corpus/blocksworld-3.pddl");
        let d = domain_from_str(dom).unwrap();
        let du = domain_from_str(&dom.to_uppercase()).unwrap();
        assert_eq!(d, du);
        assert_eq!(
            problem_from_str(prob, &d).unwrap(),
            problem_from_str(&prob.to_uppercase(), &du).unwrap()
        );
    }

    fn small_domain() -> impl Strategy<Value = DomainAst> {
        let preds = prop::collection::vec(0usize..3, 1..4);
        (preds, prop::collection::vec((0usize..3, any::<u64>()), 1..4), any::<bool>()).prop_map(
            |(arities, actions, typed_dom)| {
                let ty = if typed_dom { "thing" } else { "object" };
                let predicates: Vec<PredicateDecl> = arities
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| PredicateDecl {
                        name: format!("p{i}"),
                        params: (0..n)
                            .map(|k| TypedName {
                                name: format!("?a{k}"),
                                ty: ty.into(),
                            })
                            .collect(),
                    })
                    .collect();
                let actions = actions
                    .into_iter()
                    .enumerate()
                    .map(|(i, (nparams, bits))| {
                        let parameters: Vec<TypedName> = (0..nparams)
                            .map(|k| TypedName {
                                name: format!("?x{k}"),
                                ty: ty.into(),
                            })
                            .collect();
                        let mut bits = bits;
                        let mut next = |m: u64| {
                            let r = bits % m;
                            bits /= m;
                            r as usize
                        };
                        let mk = |positive: bool, next: &mut dyn FnMut(u64) -> usize| {
                            let p = next(predicates.len() as u64);
                            let args = (0..predicates[p].params.len())
                                .map(|_| {
                                    if nparams == 0 {
                                        Term::Constant("c".into())
                                    } else {
                                        Term::Variable(format!("?x{}", next(nparams as u64)))
                                    }
                                })
                                .collect();
                            Literal {
                                atom: Atom {
                                    predicate: format!("p{p}"),
                                    args,
                                },
                                positive,
                            }
                        };
                        let pre = vec![mk(true, &mut next), mk(next(2) == 0, &mut next)];
                        let eff = vec![mk(true, &mut next)];
                        let mut precondition = Vec::new();
                        for l in pre {
                            if !precondition.contains(&l) {
                                precondition.push(l);
                            }
                        }
                        ActionSchema {
                            name: format!("act{i}"),
                            parameters,
                            precondition,
                            effect: eff,
                        }
                    })
                    .collect();
                DomainAst {
                    name: "gen".into(),
                    requirements: if typed_dom {
                        vec![Requirement::Strips, Requirement::Typing]
                    } else {
                        vec![Requirement::Strips]
                    },
                    types: if typed_dom {
                        vec![("thing".into(), "object".into())]
                    } else {
                        vec![]
                    },
                    constants: vec![TypedName {
                        name: "c".into(),
                        ty: ty.into(),
                    }],
                    predicates,
                    actions,
                }
            },
        )
    }

    proptest! {
        #[test]
        fn generated_domains_round_trip(d in small_domain()) {
            let text = d.to_string();
            let parsed = domain_from_str(&text).unwrap();
            prop_assert_eq!(parsed, d);
        }
    }
}
