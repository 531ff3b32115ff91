//! Text format for proven invariants.
//!
//! ```text
//! # planforge invariants v1
//! # semantics: seq
//! # origin: instance="gripper-2" solve=3
//! degree=1 : not holds("(at-robby rooma)"="true")@0, not holds("(at-robby roomb)"="true")@0
//! ```
//!
//! Names are JSON string literals. An `# origin:` line applies to the next
//! invariant line only.

use thiserror::Error;

use super::candidate::{CandidateProperty, Origin, PropLit, RelAtom};
use super::pool::CandidatePool;
use crate::task::{Fact, GroundTask, Semantics};

pub const HEADER: &str = "# planforge invariants v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown {kind} {name:?}")]
    UnknownName { line: usize, kind: &'static str, name: String },
    #[error("line {line}: declared degree {declared} but literals span {actual}")]
    DegreeMismatch { line: usize, declared: usize, actual: usize },
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

pub fn format_property(c: &CandidateProperty, task: &GroundTask) -> String {
    let lits: Vec<String> = c
        .literals()
        .iter()
        .map(|l| {
            let neg = if l.positive { "" } else { "not " };
            match l.atom {
                RelAtom::Holds(f) => {
                    let v = &task.variables[f.var];
                    format!("{neg}holds({}={})@{}", quote(&v.name), quote(&v.values[f.value]), l.offset)
                }
                RelAtom::Occurs(a) => format!("{neg}occurs({})@{}", quote(&task.actions[a].name), l.offset),
            }
        })
        .collect();
    format!("degree={} : {}", c.degree(), lits.join(", "))
}

/// Writes the active proven invariants of `pool`.
pub fn write_report(pool: &CandidatePool, task: &GroundTask) -> String {
    let mut out = format!("{HEADER}\n# semantics: {}\n", pool.semantics().tag());
    for inv in pool.proven() {
        let o = &inv.property.origin;
        out.push_str(&format!("# origin: instance={} solve={}\n", quote(&o.instance), o.solve_id));
        out.push_str(&format_property(&inv.property, task));
        out.push('\n');
    }
    out
}

/// Parsed report. Invariants must still be re-proven before use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub semantics: Option<Semantics>,
    pub properties: Vec<CandidateProperty>,
    /// Lines naming variables, values or actions absent from the task, as
    /// happens when loading a report from another instance.
    pub unresolved: Vec<ReportError>,
}

struct Cursor<'a> {
    s: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> ReportError {
        ReportError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        self.s = self.s.trim_start();
    }

    fn eat(&mut self, prefix: &str) -> bool {
        self.skip_ws();
        match self.s.strip_prefix(prefix) {
            Some(rest) => {
                self.s = rest;
                true
            }
            None => false,
        }
    }

    fn expect(&mut self, prefix: &str) -> Result<(), ReportError> {
        if self.eat(prefix) {
            Ok(())
        } else {
            Err(self.err(format!("expected {prefix:?}")))
        }
    }

    fn number(&mut self) -> Result<usize, ReportError> {
        self.skip_ws();
        let end = self.s.find(|c: char| !c.is_ascii_digit()).unwrap_or(self.s.len());
        let n = self.s[..end].parse().map_err(|_| self.err("expected a number"))?;
        self.s = &self.s[end..];
        Ok(n)
    }

    fn string(&mut self) -> Result<String, ReportError> {
        self.skip_ws();
        let mut de = serde_json::Deserializer::from_str(self.s).into_iter::<String>();
        let value = de
            .next()
            .and_then(|r| r.ok())
            .ok_or_else(|| self.err("expected a quoted string"))?;
        self.s = &self.s[de.byte_offset()..];
        Ok(value)
    }
}

fn parse_origin(rest: &str, line: usize) -> Result<Origin, ReportError> {
    let mut c = Cursor { s: rest, line };
    c.expect("instance=")?;
    let instance = c.string()?;
    c.expect("solve=")?;
    let solve_id = c.number()? as u64;
    Ok(Origin { instance, solve_id })
}

fn parse_property(text: &str, line: usize, origin: Origin, task: &GroundTask) -> Result<CandidateProperty, ReportError> {
    let mut c = Cursor { s: text, line };
    c.expect("degree=")?;
    let declared = c.number()?;
    c.expect(":")?;
    let mut lits = Vec::new();
    loop {
        let positive = !c.eat("not ");
        let atom = if c.eat("holds(") {
            let var_name = c.string()?;
            c.expect("=")?;
            let value_name = c.string()?;
            let var = task.variable_by_name(&var_name).ok_or_else(|| ReportError::UnknownName {
                line,
                kind: "variable",
                name: var_name.clone(),
            })?;
            let value = task.variables[var]
                .values
                .iter()
                .position(|v| *v == value_name)
                .ok_or(ReportError::UnknownName {
                    line,
                    kind: "value",
                    name: value_name,
                })?;
            RelAtom::Holds(Fact::new(var, value))
        } else if c.eat("occurs(") {
            let name = c.string()?;
            let a = task
                .action_by_name(&name)
                .ok_or(ReportError::UnknownName { line, kind: "action", name })?;
            RelAtom::Occurs(a)
        } else {
            return Err(c.err("expected holds(...) or occurs(...)"));
        };
        c.expect(")")?;
        c.expect("@")?;
        let offset = c.number()?;
        lits.push(PropLit { offset, atom, positive });
        if !c.eat(",") {
            break;
        }
    }
    c.skip_ws();
    if !c.s.is_empty() {
        return Err(c.err("trailing input"));
    }
    let prop = CandidateProperty::new(lits, origin).map_err(|e| c.err(e.to_string()))?;
    if prop.degree() != declared {
        return Err(ReportError::DegreeMismatch {
            line,
            declared,
            actual: prop.degree(),
        });
    }
    Ok(prop)
}

/// Parses a report, resolving names against `task`. Lines with unknown names
/// are collected in [`Report::unresolved`]; other errors abort.
pub fn parse_report(text: &str, task: &GroundTask) -> Result<Report, ReportError> {
    let mut report = Report {
        semantics: None,
        properties: Vec::new(),
        unresolved: Vec::new(),
    };
    let mut origin = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(comment) = l.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(tag) = comment.strip_prefix("semantics:") {
                report.semantics = Some(Semantics::from_tag(tag.trim()).ok_or_else(|| ReportError::Syntax {
                    line,
                    message: format!("unknown semantics {:?}", tag.trim()),
                })?);
            } else if let Some(rest) = comment.strip_prefix("origin:") {
                origin = Some(parse_origin(rest, line)?);
            }
            continue;
        }
        match parse_property(l, line, origin.take().unwrap_or_default(), task) {
            Ok(prop) => report.properties.push(prop),
            Err(e @ ReportError::UnknownName { .. }) => report.unresolved.push(e),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::{GroundAction, StateVariable};

    fn task() -> GroundTask {
        GroundTask {
            name: "t".into(),
            variables: vec![StateVariable::boolean(0, "(at \"x\")".into()), StateVariable::boolean(1, "(b)".into())],
            actions: vec![GroundAction { id: 0, name: "(go x)".into(), pre: vec![], eff: vec![Fact::new(0, 1)] }],
            init: vec![0, 0],
            goal: vec![],
            mutex_groups: vec![],
        }
    }

    #[test]
    fn property_round_trip() {
        let t = task();
        let c = CandidateProperty::new(
            vec![
                PropLit { offset: 0, atom: RelAtom::Holds(Fact::new(0, 1)), positive: false },
                PropLit { offset: 1, atom: RelAtom::Occurs(0), positive: true },
                PropLit { offset: 2, atom: RelAtom::Holds(Fact::new(1, 0)), positive: true },
            ],
            Origin { instance: "t".into(), solve_id: 4 },
        )
        .unwrap();
        let line = format_property(&c, &t);
        assert_eq!(
            line,
            r#"degree=3 : not holds("(at \"x\")"="true")@0, occurs("(go x)")@1, holds("(b)"="false")@2"#
        );
        let text = format!("{HEADER}\n# semantics: par\n# origin: instance=\"t\" solve=4\n{line}\n");
        let r = parse_report(&text, &t).unwrap();
        assert_eq!(r.semantics, Some(Semantics::ForallParallel));
        assert_eq!(r.properties, vec![c.clone()]);
        assert_eq!(r.properties[0].origin, c.origin);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let t = task();
        let r = parse_report("\ndegree=1 : holds(\"(zz)\"=\"true\")@0", &t).unwrap();
        assert!(r.properties.is_empty());
        assert!(matches!(r.unresolved[..], [ReportError::UnknownName { line: 2, kind: "variable", .. }]));
        assert!(matches!(
            parse_report("degree=2 : holds(\"(b)\"=\"true\")@0", &t),
            Err(ReportError::DegreeMismatch { line: 1, declared: 2, actual: 1 })
        ));
        assert!(matches!(parse_report("degree=1 holds", &t), Err(ReportError::Syntax { line: 1, .. })));
    }
}
