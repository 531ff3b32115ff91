/// Argument of a lifted atom: an action parameter or a fixed object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arg {
    Param(usize),
    Object(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluentSchema {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub fluent: usize,
    pub args: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedLiteral {
    pub fluent: usize,
    pub args: Vec<Arg>,
    pub positive: bool,
}

/// Typed parameter; `members` is the static membership constraint
/// `?p ∈ objects-of-type(type_name)`, sorted by object index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameter {
    pub name: String,
    pub type_name: String,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityConstraint {
    pub lhs: Arg,
    pub rhs: Arg,
    /// false for `(not (= a b))`.
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedAction {
    pub name: String,
    pub params: Vec<Parameter>,
    pub precondition: Vec<LiftedLiteral>,
    pub effect: Vec<LiftedLiteral>,
    pub equalities: Vec<EqualityConstraint>,
}

/// Lifted task: every predicate is a Boolean fluent schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningTask {
    pub domain_name: String,
    pub problem_name: String,
    /// Domain constants first, then problem objects. Names are the PDDL names.
    pub objects: Vec<String>,
    pub fluents: Vec<FluentSchema>,
    pub actions: Vec<LiftedAction>,
    pub init: Vec<GroundAtom>,
    /// (atom, required truth value)
    pub goal: Vec<(GroundAtom, bool)>,
}

impl PlanningTask {
    pub fn atom_name(&self, atom: &GroundAtom) -> String {
        let mut s = format!("({}", self.fluents[atom.fluent].name);
        for &a in &atom.args {
            s.push(' ');
            s.push_str(&self.objects[a]);
        }
        s.push(')');
        s
    }
}
