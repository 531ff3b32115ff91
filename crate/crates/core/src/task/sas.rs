//! Reader and writer for the Fast Downward SAS translator output, version 3.

use std::fmt::Write;

use thiserror::Error;

use super::ir::{Fact, GroundAction, GroundTask, StateVariable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SasError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unsupported SAS feature: {feature}")]
    Unsupported { line: usize, feature: String },
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    next: usize,
}

impl<'a> Lines<'a> {
    fn line_no(&self) -> usize {
        self.next.min(self.lines.len()).max(1)
    }

    fn err(&self, message: impl Into<String>) -> SasError {
        SasError::Parse {
            line: self.line_no(),
            message: message.into(),
        }
    }

    fn raw(&mut self) -> Result<&'a str, SasError> {
        let l = self
            .lines
            .get(self.next)
            .copied()
            .ok_or_else(|| self.err("unexpected end of file"))?;
        self.next += 1;
        Ok(l.trim())
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SasError> {
        let l = self.raw()?;
        if l == "begin_rule" {
            return Err(SasError::Unsupported {
                line: self.next,
                feature: "axioms".into(),
            });
        }
        if l != kw {
            return Err(self.err(format!("expected '{kw}', found '{l}'")));
        }
        Ok(())
    }

    fn ints(&mut self) -> Result<Vec<i64>, SasError> {
        let l = self.raw()?;
        l.split_whitespace()
            .map(|w| w.parse::<i64>().map_err(|_| self.err(format!("expected integers, found '{l}'"))))
            .collect()
    }

    fn int(&mut self) -> Result<i64, SasError> {
        match self.ints()?.as_slice() {
            [x] => Ok(*x),
            _ => Err(self.err("expected a single integer")),
        }
    }

    fn count(&mut self) -> Result<usize, SasError> {
        let x = self.int()?;
        usize::try_from(x).map_err(|_| self.err(format!("negative count {x}")))
    }

    fn fact(&mut self, vars: &[StateVariable]) -> Result<Fact, SasError> {
        match self.ints()?.as_slice() {
            [v, x] => self.check_fact(vars, *v, *x),
            _ => Err(self.err("expected 'var value'")),
        }
    }

    fn check_fact(&self, vars: &[StateVariable], v: i64, x: i64) -> Result<Fact, SasError> {
        let ok = v >= 0 && (v as usize) < vars.len() && x >= 0 && (x as usize) < vars[v as usize].domain_size();
        if !ok {
            return Err(self.err(format!("fact {v} {x} out of range")));
        }
        Ok(Fact::new(v as usize, x as usize))
    }
}

/// Parses SAS text. Prevail conditions are merged into preconditions and
/// operators without effects are dropped.
pub fn parse_sas(source: &str) -> Result<GroundTask, SasError> {
    let mut r = Lines {
        lines: source.lines().collect(),
        next: 0,
    };
    r.keyword("begin_version")?;
    let version = r.int()?;
    if version != 3 {
        return Err(SasError::Unsupported {
            line: r.next,
            feature: format!("version {version}"),
        });
    }
    r.keyword("end_version")?;
    r.keyword("begin_metric")?;
    let metric = r.int()?;
    if metric != 0 && metric != 1 {
        return Err(r.err("metric must be 0 or 1"));
    }
    r.keyword("end_metric")?;

    let nvars = r.count()?;
    let mut variables = Vec::with_capacity(nvars);
    for id in 0..nvars {
        r.keyword("begin_variable")?;
        let name = r.raw()?.to_string();
        let layer = r.int()?;
        if layer != -1 {
            return Err(SasError::Unsupported {
                line: r.next,
                feature: "derived variables".into(),
            });
        }
        let range = r.count()?;
        if range < 2 {
            return Err(r.err("variable range must be at least 2"));
        }
        let values = (0..range)
            .map(|_| r.raw().map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        r.keyword("end_variable")?;
        variables.push(StateVariable { id, name, values });
    }

    let nmutex = r.count()?;
    let mut mutex_groups = Vec::with_capacity(nmutex);
    for _ in 0..nmutex {
        r.keyword("begin_mutex_group")?;
        let n = r.count()?;
        let group = (0..n).map(|_| r.fact(&variables)).collect::<Result<Vec<_>, _>>()?;
        r.keyword("end_mutex_group")?;
        mutex_groups.push(group);
    }

    r.keyword("begin_state")?;
    let mut init = Vec::with_capacity(nvars);
    for v in 0..nvars {
        let x = r.int()?;
        init.push(r.check_fact(&variables, v as i64, x)?.value);
    }
    r.keyword("end_state")?;

    r.keyword("begin_goal")?;
    let ngoal = r.count()?;
    let mut goal = (0..ngoal).map(|_| r.fact(&variables)).collect::<Result<Vec<_>, _>>()?;
    goal.sort();
    r.keyword("end_goal")?;

    let nops = r.count()?;
    let mut actions = Vec::with_capacity(nops);
    for _ in 0..nops {
        r.keyword("begin_operator")?;
        let name = format!("({})", r.raw()?);
        let mut pre: Vec<Fact> = Vec::new();
        let nprevail = r.count()?;
        for _ in 0..nprevail {
            pre.push(r.fact(&variables)?);
        }
        let neff = r.count()?;
        let mut eff: Vec<Fact> = Vec::new();
        for _ in 0..neff {
            let nums = r.ints()?;
            let ncond = *nums.first().ok_or_else(|| r.err("empty effect line"))?;
            if ncond != 0 {
                return Err(SasError::Unsupported {
                    line: r.next,
                    feature: "conditional effects".into(),
                });
            }
            let [_, v, p, q] = nums.as_slice() else {
                return Err(r.err("expected '0 var pre post'"));
            };
            if *p != -1 {
                pre.push(r.check_fact(&variables, *v, *p)?);
            }
            eff.push(r.check_fact(&variables, *v, *q)?);
        }
        let cost = r.int()?;
        if metric == 1 && cost != 1 {
            return Err(SasError::Unsupported {
                line: r.next,
                feature: format!("action cost {cost}"),
            });
        }
        r.keyword("end_operator")?;
        pre.sort();
        pre.dedup();
        eff.sort();
        eff.dedup();
        if pre.windows(2).any(|w| w[0].var == w[1].var) || eff.windows(2).any(|w| w[0].var == w[1].var) {
            return Err(r.err(format!("operator {name} mentions a variable twice")));
        }
        if eff.is_empty() {
            continue;
        }
        actions.push(GroundAction {
            id: actions.len(),
            name,
            pre,
            eff,
        });
    }

    let naxioms = r.count()?;
    if naxioms > 0 {
        return Err(SasError::Unsupported {
            line: r.next + 1,
            feature: "axioms".into(),
        });
    }
    while let Ok(l) = r.raw() {
        if !l.is_empty() {
            return Err(r.err(format!("trailing content '{l}'")));
        }
    }

    let task = GroundTask {
        name: "sas".into(),
        variables,
        actions,
        init,
        goal,
        mutex_groups,
    };
    task.validate().map_err(|e| SasError::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(task)
}

/// Writes a task in the same format; used for round-trip tests and export.
pub fn write_sas(task: &GroundTask) -> String {
    let mut s = String::new();
    s.push_str("begin_version\n3\nend_version\nbegin_metric\n0\nend_metric\n");
    let _ = writeln!(s, "{}", task.variables.len());
    for v in &task.variables {
        let _ = writeln!(s, "begin_variable\n{}\n-1\n{}", v.name, v.values.len());
        for x in &v.values {
            let _ = writeln!(s, "{x}");
        }
        s.push_str("end_variable\n");
    }
    let _ = writeln!(s, "{}", task.mutex_groups.len());
    for g in &task.mutex_groups {
        let _ = writeln!(s, "begin_mutex_group\n{}", g.len());
        for f in g {
            let _ = writeln!(s, "{} {}", f.var, f.value);
        }
        s.push_str("end_mutex_group\n");
    }
    s.push_str("begin_state\n");
    for x in &task.init {
        let _ = writeln!(s, "{x}");
    }
    let _ = writeln!(s, "end_state\nbegin_goal\n{}", task.goal.len());
    for f in &task.goal {
        let _ = writeln!(s, "{} {}", f.var, f.value);
    }
    let _ = writeln!(s, "end_goal\n{}", task.actions.len());
    for a in &task.actions {
        let name = a
            .name
            .strip_prefix('(')
            .and_then(|n| n.strip_suffix(')'))
            .unwrap_or(&a.name);
        let prevail: Vec<_> = a.pre.iter().filter(|f| a.eff_value(f.var).is_none()).collect();
        let _ = writeln!(s, "begin_operator\n{name}\n{}", prevail.len());
        for f in prevail {
            let _ = writeln!(s, "{} {}", f.var, f.value);
        }
        let _ = writeln!(s, "{}", a.eff.len());
        for f in &a.eff {
            let pre = a.pre_value(f.var).map_or(-1, |x| x as i64);
            let _ = writeln!(s, "0 {} {} {}", f.var, pre, f.value);
        }
        s.push_str("1\nend_operator\n");
    }
    s.push_str("0\n");
    s
}
