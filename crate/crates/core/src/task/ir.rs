use std::collections::HashSet;

use thiserror::Error;

/// `var = value` assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub var: usize,
    pub value: usize,
}

impl Fact {
    pub fn new(var: usize, value: usize) -> Self {
        Fact { var, value }
    }
}

/// Total assignment, one value index per variable.
pub type State = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVariable {
    pub id: usize,
    pub name: String,
    pub values: Vec<String>,
}

impl StateVariable {
    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn boolean(id: usize, name: String) -> Self {
        StateVariable {
            id,
            name,
            values: vec!["false".into(), "true".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub id: usize,
    /// Printable as `(op arg1 ... argk)`.
    pub name: String,
    /// Sorted by variable, at most one entry per variable.
    pub pre: Vec<Fact>,
    /// Sorted by variable, at most one entry per variable, nonempty.
    pub eff: Vec<Fact>,
}

impl GroundAction {
    pub fn pre_value(&self, var: usize) -> Option<usize> {
        self.pre.iter().find(|f| f.var == var).map(|f| f.value)
    }

    pub fn eff_value(&self, var: usize) -> Option<usize> {
        self.eff.iter().find(|f| f.var == var).map(|f| f.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTask {
    /// Instance name, used for provenance.
    pub name: String,
    pub variables: Vec<StateVariable>,
    pub actions: Vec<GroundAction>,
    pub init: State,
    pub goal: Vec<Fact>,
    pub mutex_groups: Vec<Vec<Fact>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("variable {0} has fewer than two values")]
    SmallDomain(usize),
    #[error("initial state assigns {found} variables, expected {expected}")]
    InitLength { expected: usize, found: usize },
    #[error("{context}: fact {var}={value} is out of range")]
    OutOfRange {
        context: String,
        var: usize,
        value: usize,
    },
    #[error("{context}: variable {var} mentioned twice")]
    DuplicateVariable { context: String, var: usize },
    #[error("action '{0}' has an empty effect")]
    EmptyEffect(String),
    #[error("ids are not dense at {0}")]
    NonDenseIds(String),
}

impl GroundTask {
    pub fn num_facts(&self) -> usize {
        self.variables.iter().map(|v| v.domain_size()).sum()
    }

    pub fn fact_name(&self, fact: Fact) -> String {
        let v = &self.variables[fact.var];
        format!("{}={}", v.name, v.values[fact.value])
    }

    pub fn holds(state: &[usize], fact: Fact) -> bool {
        state[fact.var] == fact.value
    }

    pub fn goal_satisfied(&self, state: &[usize]) -> bool {
        self.goal.iter().all(|&f| Self::holds(state, f))
    }

    pub fn applicable(&self, state: &[usize], action: usize) -> bool {
        self.actions[action]
            .pre
            .iter()
            .all(|&f| Self::holds(state, f))
    }

    pub fn action_by_name(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn variable_by_name(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Checks the structural invariants: dense ids, ranges, totality of the
    /// initial state, one mention per variable in each partial assignment.
    pub fn validate(&self) -> Result<(), TaskError> {
        for (i, v) in self.variables.iter().enumerate() {
            if v.id != i {
                return Err(TaskError::NonDenseIds(format!("variable {i}")));
            }
            if v.domain_size() < 2 {
                return Err(TaskError::SmallDomain(i));
            }
        }
        if self.init.len() != self.variables.len() {
            return Err(TaskError::InitLength {
                expected: self.variables.len(),
                found: self.init.len(),
            });
        }
        let check = |context: &str, facts: &[Fact], unique: bool| -> Result<(), TaskError> {
            let mut seen = HashSet::new();
            for f in facts {
                if f.var >= self.variables.len() || f.value >= self.variables[f.var].domain_size() {
                    return Err(TaskError::OutOfRange {
                        context: context.to_string(),
                        var: f.var,
                        value: f.value,
                    });
                }
                if unique && !seen.insert(f.var) {
                    return Err(TaskError::DuplicateVariable {
                        context: context.to_string(),
                        var: f.var,
                    });
                }
            }
            Ok(())
        };
        let init_facts: Vec<Fact> = self
            .init
            .iter()
            .enumerate()
            .map(|(var, &value)| Fact { var, value })
            .collect();
        check("initial state", &init_facts, true)?;
        check("goal", &self.goal, true)?;
        for (i, a) in self.actions.iter().enumerate() {
            if a.id != i {
                return Err(TaskError::NonDenseIds(format!("action {i}")));
            }
            check(&a.name, &a.pre, true)?;
            check(&a.name, &a.eff, true)?;
            if a.eff.is_empty() {
                return Err(TaskError::EmptyEffect(a.name.clone()));
            }
        }
        for g in &self.mutex_groups {
            check("mutex group", g, false)?;
        }
        Ok(())
    }
}
