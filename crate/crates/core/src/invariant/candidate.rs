use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::{AtomTable, CnfProgram, TimedAtom};
use crate::solver::Lit;
use crate::task::{Fact, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelAtom {
    Holds(Fact),
    Occurs(usize),
}

/// Literal at a time offset relative to the start of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropLit {
    pub offset: usize,
    pub atom: RelAtom,
    pub positive: bool,
}

impl PropLit {
    fn shifted(self, by: usize) -> PropLit {
        PropLit {
            offset: self.offset + by,
            ..self
        }
    }
}

/// Where a candidate came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Origin {
    pub instance: String,
    pub solve_id: u64,
}

/// Time-invariant clause: for every base `b` it fits, the disjunction of its
/// literals shifted by `b` holds on every execution from the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateProperty {
    literals: Vec<PropLit>,
    pub origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NotGeneralizable {
    #[error("clause is empty")]
    Empty,
    #[error("clause mentions the initial state")]
    InitialState,
    #[error("clause mentions a goal variable at the horizon")]
    Goal,
    #[error("clause is a tautology")]
    Tautology,
}

impl CandidateProperty {
    /// Sorts, deduplicates and shifts the literals so the earliest offset is 0.
    pub fn new(mut literals: Vec<PropLit>, origin: Origin) -> Result<Self, NotGeneralizable> {
        let Some(min) = literals.iter().map(|l| l.offset).min() else {
            return Err(NotGeneralizable::Empty);
        };
        for l in &mut literals {
            l.offset -= min;
        }
        literals.sort();
        literals.dedup();
        if literals
            .windows(2)
            .any(|w| w[0].offset == w[1].offset && w[0].atom == w[1].atom)
        {
            return Err(NotGeneralizable::Tautology);
        }
        Ok(CandidateProperty { literals, origin })
    }

    pub fn literals(&self) -> &[PropLit] {
        &self.literals
    }

    /// Canonical identity, independent of origin.
    pub fn key(&self) -> &[PropLit] {
        &self.literals
    }

    /// Number of time points spanned.
    pub fn degree(&self) -> usize {
        self.literals.iter().map(|l| l.offset).max().unwrap_or(0) + 1
    }

    /// Smallest horizon whose atom table contains every literal at base 0.
    pub fn window_horizon(&self) -> usize {
        self.literals
            .iter()
            .map(|l| match l.atom {
                RelAtom::Holds(_) => l.offset,
                RelAtom::Occurs(_) => l.offset + 1,
            })
            .max()
            .unwrap_or(0)
    }

    /// Clause instance at `base`, or `None` if some literal lies outside the
    /// table.
    pub fn instantiate(&self, base: usize, table: &AtomTable) -> Option<Vec<Lit>> {
        self.literals
            .iter()
            .map(|l| {
                let time = base + l.offset;
                let atom = match l.atom {
                    RelAtom::Holds(fact) => TimedAtom::Holds { fact, time },
                    RelAtom::Occurs(action) => TimedAtom::Occurs { action, time },
                };
                table.index(atom).map(|v| Lit::new(v, l.positive))
            })
            .collect()
    }

    /// Truth value on a trajectory at `base`; `None` if the window does not fit.
    pub fn evaluate(&self, states: &[State], steps: &[Vec<usize>], base: usize) -> Option<bool> {
        let mut any = false;
        for l in &self.literals {
            let t = base + l.offset;
            let value = match l.atom {
                RelAtom::Holds(f) => states.get(t)?[f.var] == f.value,
                RelAtom::Occurs(a) => steps.get(t)?.contains(&a),
            };
            any |= value == l.positive;
        }
        Some(any)
    }

    /// True when some shift of `self` is contained in `other`, so that `self`
    /// holding everywhere implies `other` holding everywhere.
    pub fn subsumes(&self, other: &CandidateProperty) -> bool {
        let (d, e) = (self.degree(), other.degree());
        if d > e || self.literals.len() > other.literals.len() {
            return false;
        }
        (0..=e - d).any(|s| {
            self.literals
                .iter()
                .all(|l| other.literals.binary_search(&l.shifted(s)).is_ok())
        })
    }
}

impl fmt::Display for CandidateProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .literals
            .iter()
            .map(|l| {
                let neg = if l.positive { "" } else { "not " };
                match l.atom {
                    RelAtom::Holds(fact) => format!("{neg}holds({}={})@{}", fact.var, fact.value, l.offset),
                    RelAtom::Occurs(a) => format!("{neg}occurs({a})@{}", l.offset),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// Rewrites a learned clause of `program` over offsets relative to its
/// earliest time point. Clauses tied to the initial state or the goal are
/// rejected since they rarely hold at other times.
pub fn generalize(clause: &[Lit], program: &CnfProgram, origin: Origin) -> Result<CandidateProperty, NotGeneralizable> {
    let mut lits = Vec::with_capacity(clause.len());
    for &l in clause {
        let (atom, offset) = match program.atoms.atom(l.var()) {
            TimedAtom::Holds { fact, time } => {
                if time == 0 && program.options.initial_state {
                    return Err(NotGeneralizable::InitialState);
                }
                if time == program.horizon && program.goal.iter().any(|g| g.var == fact.var) {
                    return Err(NotGeneralizable::Goal);
                }
                (RelAtom::Holds(fact), time)
            }
            TimedAtom::Occurs { action, time } => (RelAtom::Occurs(action), time),
        };
        lits.push(PropLit {
            offset,
            atom,
            positive: l.is_positive(),
        });
    }
    CandidateProperty::new(lits, origin)
}
