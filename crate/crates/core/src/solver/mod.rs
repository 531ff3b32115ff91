//! Conflict-driven clause-learning SAT solver: two watched literals, first-UIP
//! learning with recursive minimization, VSIDS, Luby restarts, and LBD-based
//! clause database reduction. Supports solving under assumptions, export of
//! learned clauses, and DRAT proof logging.

mod cdcl;
mod heap;

pub use cdcl::Solver;

use std::fmt;
use std::ops::Not;

/// Literal over a dense variable index: `var << 1 | negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Self {
        Lit(var << 1 | u32::from(!positive))
    }

    pub fn pos(var: u32) -> Self {
        Lit::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Lit::new(var, false)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }

    /// DIMACS integer: 1-based variable, sign for polarity.
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var()) + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Self {
        assert!(x != 0, "0 is not a DIMACS literal");
        Lit::new((x.unsigned_abs() - 1) as u32, x > 0)
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// Truth value per variable.
    Sat(Vec<bool>),
    /// Subset of the assumptions that is already unsatisfiable with the
    /// clauses; empty when the clauses alone are.
    Unsat(Vec<Lit>),
    /// Conflict budget exhausted.
    Timeout,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Conflicts allowed per `solve` call; `None` means unbounded.
    pub conflict_budget: Option<u64>,
    pub var_decay: f64,
    pub clause_decay: f64,
    pub random_var_freq: f64,
    pub restart_unit: u64,
    pub reduce_base: u64,
    pub reduce_step: u64,
    pub proof_log: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            conflict_budget: None,
            var_decay: 0.95,
            clause_decay: 0.999,
            random_var_freq: 0.005,
            restart_unit: 100,
            reduce_base: 2000,
            reduce_step: 300,
            proof_log: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LearnedClause {
    pub literals: Vec<Lit>,
    /// Distinct decision levels at learning time.
    pub lbd: u32,
}

impl LearnedClause {
    pub fn size(&self) -> usize {
        self.literals.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

/// Builds a solver over `num_vars` variables and `clauses` and solves once.
pub fn solve_clauses(
    num_vars: usize,
    clauses: &[Vec<Lit>],
    assumptions: &[Lit],
    config: SolverConfig,
) -> (SolveResult, Solver) {
    let mut s = Solver::new(num_vars, config);
    for c in clauses {
        s.add_clause(c);
    }
    let r = s.solve(assumptions);
    (r, s)
}

/// True when `clauses` entail `clause`, i.e. `clauses ∧ ¬clause` is unsatisfiable.
pub fn entails(num_vars: usize, clauses: &[Vec<Lit>], clause: &[Lit]) -> bool {
    let negated: Vec<Lit> = clause.iter().map(|&l| !l).collect();
    let (r, _) = solve_clauses(num_vars, clauses, &negated, SolverConfig::default());
    r.is_unsat()
}
