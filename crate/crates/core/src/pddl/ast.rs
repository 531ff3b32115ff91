#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Requirement {
    Strips,
    Typing,
    NegativePreconditions,
    Equality,
}

impl Requirement {
    pub fn from_flag(flag: &str) -> Option<Self> {
        match flag {
            ":strips" => Some(Requirement::Strips),
            ":typing" => Some(Requirement::Typing),
            ":negative-preconditions" => Some(Requirement::NegativePreconditions),
            ":equality" => Some(Requirement::Equality),
            _ => None,
        }
    }

    pub fn flag(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::NegativePreconditions => ":negative-preconditions",
            Requirement::Equality => ":equality",
        }
    }
}

/// A name with its declared type; untyped names carry `object`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Includes the leading `?`.
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Variable(s) | Term::Constant(s) => s,
        }
    }
}

/// `predicate` is `=` for equality atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn is_equality(&self) -> bool {
        self.predicate == "="
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub parameters: Vec<TypedName>,
    pub precondition: Vec<Literal>,
    pub effect: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainAst {
    pub name: String,
    pub requirements: Vec<Requirement>,
    /// (type, parent) pairs in declaration order; `object` is implicit.
    pub types: Vec<(String, String)>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl DomainAst {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn parent_of(&self, ty: &str) -> Option<&str> {
        self.types
            .iter()
            .find(|(t, _)| t == ty)
            .map(|(_, p)| p.as_str())
    }

    pub fn has_type(&self, ty: &str) -> bool {
        ty == "object" || self.types.iter().any(|(t, _)| t == ty)
    }

    /// True when `sub` equals `sup` or inherits from it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sup == "object" {
            return true;
        }
        let mut cur = sub;
        // Parent chains are acyclic once parsed; the bound guards hand-built ASTs.
        for _ in 0..=self.types.len() {
            if cur == sup {
                return true;
            }
            match self.parent_of(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemAst {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedName>,
    /// Ground positive atoms, duplicates removed, declaration order kept.
    pub init: Vec<Atom>,
    pub goal: Vec<Literal>,
}
