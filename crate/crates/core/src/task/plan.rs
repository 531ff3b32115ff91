use std::fmt::{self, Display};

use thiserror::Error;

use super::ir::GroundTask;

/// Steps of action ids. Sequential plans have singleton steps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan {
    pub steps: Vec<Vec<usize>>,
}

impl Plan {
    pub fn new(steps: Vec<Vec<usize>>) -> Self {
        Plan { steps }
    }

    pub fn makespan(&self) -> usize {
        self.steps.len()
    }

    pub fn cost(&self) -> usize {
        self.steps.iter().map(Vec::len).sum()
    }

    /// Drops empty steps.
    pub fn compact(mut self) -> Self {
        self.steps.retain(|s| !s.is_empty());
        self
    }

    /// IPC-style text: one step per line, actions separated by spaces, and a
    /// final `; cost = N` line.
    pub fn display<'a>(&'a self, task: &'a GroundTask) -> impl Display + 'a {
        PlanText { plan: self, task }
    }
}

struct PlanText<'a> {
    plan: &'a Plan,
    task: &'a GroundTask,
}

impl Display for PlanText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.plan.steps {
            let names: Vec<&str> = step
                .iter()
                .map(|&a| self.task.actions[a].name.as_str())
                .collect();
            writeln!(f, "{}", names.join(" "))?;
        }
        writeln!(f, "; cost = {}", self.plan.cost())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanParseError {
    #[error("line {line}: unknown action '{name}'")]
    UnknownAction { line: usize, name: String },
    #[error("line {line}: malformed step")]
    Malformed { line: usize },
}

/// Reads the text written by [`Plan::display`]. Comment lines start with `;`
/// and blank lines are skipped.
pub fn parse_plan(text: &str, task: &GroundTask) -> Result<Plan, PlanParseError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let mut step = Vec::new();
        let mut rest = line;
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(PlanParseError::Malformed { line: i + 1 });
            }
            let end = rest
                .find(')')
                .ok_or(PlanParseError::Malformed { line: i + 1 })?;
            let words: Vec<String> = rest[1..end]
                .split_whitespace()
                .map(str::to_lowercase)
                .collect();
            let name = format!("({})", words.join(" "));
            let id = task
                .action_by_name(&name)
                .ok_or_else(|| PlanParseError::UnknownAction {
                    line: i + 1,
                    name: name.clone(),
                })?;
            step.push(id);
            rest = rest[end + 1..].trim_start();
        }
        steps.push(step);
    }
    Ok(Plan { steps })
}
