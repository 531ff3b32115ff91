use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::lexer::{Token, TokenKind};
use super::{PddlError, Pos};

#[derive(Debug, Clone)]
enum SExpr {
    List(Vec<SExpr>, Pos),
    Leaf(Token),
}

impl SExpr {
    fn pos(&self) -> Pos {
        match self {
            SExpr::List(_, p) => *p,
            SExpr::Leaf(t) => Pos {
                line: t.line,
                column: t.column,
            },
        }
    }

    fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Leaf(_) => None,
        }
    }

    fn leaf(&self) -> Option<&Token> {
        match self {
            SExpr::Leaf(t) => Some(t),
            SExpr::List(..) => None,
        }
    }

    fn is_word(&self, w: &str) -> bool {
        self.leaf().is_some_and(|t| t.text == w)
    }
}

fn parse_err(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Parse {
        pos,
        message: message.into(),
    }
}

fn type_err(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Type {
        pos,
        message: message.into(),
    }
}

fn build_tree(tokens: &[Token]) -> Result<SExpr, PddlError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut root: Option<SExpr> = None;
    for tok in tokens {
        let pos = Pos {
            line: tok.line,
            column: tok.column,
        };
        if root.is_some() {
            return Err(parse_err(pos, format!("unexpected '{}' after end of definition", tok.text)));
        }
        match tok.kind {
            TokenKind::LParen => stack.push((Vec::new(), pos)),
            TokenKind::RParen => {
                let (items, start) = stack
                    .pop()
                    .ok_or_else(|| parse_err(pos, "unbalanced ')'"))?;
                let list = SExpr::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => root = Some(list),
                }
            }
            _ => match stack.last_mut() {
                Some((parent, _)) => parent.push(SExpr::Leaf(tok.clone())),
                None => return Err(parse_err(pos, format!("expected '(' but found '{}'", tok.text))),
            },
        }
    }
    if let Some((_, start)) = stack.pop() {
        return Err(parse_err(start, "unterminated '('"));
    }
    root.ok_or_else(|| parse_err(Pos { line: 1, column: 1 }, "empty input"))
}

fn expect_symbol(e: &SExpr, what: &str) -> Result<String, PddlError> {
    match e.leaf() {
        Some(t) if t.kind == TokenKind::Symbol && t.text != "=" => Ok(t.text.clone()),
        Some(t) => Err(parse_err(e.pos(), format!("expected {what}, found '{}'", t.text))),
        None => Err(parse_err(e.pos(), format!("expected {what}, found a list"))),
    }
}

/// Splits `(define (KIND name) sections...)`.
fn split_define<'a>(root: &'a SExpr, kind: &str) -> Result<(String, &'a [SExpr]), PddlError> {
    let items = root
        .as_list()
        .ok_or_else(|| parse_err(root.pos(), "expected '(define ...)'"))?;
    if items.first().map(|e| e.is_word("define")) != Some(true) {
        return Err(parse_err(root.pos(), "expected 'define'"));
    }
    let header = items
        .get(1)
        .and_then(|h| h.as_list())
        .ok_or_else(|| parse_err(root.pos(), format!("expected '({kind} <name>)'")))?;
    if header.len() != 2 || !header[0].is_word(kind) {
        let pos = items[1].pos();
        return Err(parse_err(pos, format!("expected '({kind} <name>)'")));
    }
    let name = expect_symbol(&header[1], &format!("{kind} name"))?;
    Ok((name, &items[2..]))
}

fn section_keyword(section: &SExpr) -> Result<(&Token, &[SExpr]), PddlError> {
    let items = section
        .as_list()
        .ok_or_else(|| parse_err(section.pos(), "expected a section"))?;
    match items.first().and_then(|e| e.leaf()) {
        Some(t) if t.kind == TokenKind::Keyword => Ok((t, &items[1..])),
        _ => Err(parse_err(section.pos(), "expected a section keyword")),
    }
}

fn requirements(items: &[SExpr], out: &mut Vec<Requirement>) -> Result<(), PddlError> {
    for e in items {
        let tok = e
            .leaf()
            .filter(|t| t.kind == TokenKind::Keyword)
            .ok_or_else(|| parse_err(e.pos(), "expected a requirement flag"))?;
        match Requirement::from_flag(&tok.text) {
            Some(r) => {
                if !out.contains(&r) {
                    out.push(r);
                }
            }
            None => {
                return Err(PddlError::UnsupportedRequirement {
                    pos: e.pos(),
                    flag: tok.text.clone(),
                })
            }
        }
    }
    Ok(())
}

/// Parses `a b - t c ?d` style lists. Names must all be variables or all symbols.
fn typed_list(items: &[SExpr], variables: bool) -> Result<Vec<(TypedName, Pos)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let e = &items[i];
        if e.is_word("-") {
            let ty_expr = items
                .get(i + 1)
                .ok_or_else(|| parse_err(e.pos(), "expected a type after '-'"))?;
            if ty_expr.as_list().is_some_and(|l| l.first().is_some_and(|h| h.is_word("either"))) {
                return Err(parse_err(ty_expr.pos(), "'either' types are not supported"));
            }
            let ty = expect_symbol(ty_expr, "type name")?;
            if pending.is_empty() {
                return Err(parse_err(e.pos(), "type annotation without names"));
            }
            out.extend(pending.drain(..).map(|(name, pos)| {
                (
                    TypedName {
                        name,
                        ty: ty.clone(),
                    },
                    pos,
                )
            }));
            i += 2;
            continue;
        }
        let tok = e
            .leaf()
            .ok_or_else(|| parse_err(e.pos(), "unexpected list in typed list"))?;
        let ok = if variables {
            tok.kind == TokenKind::Variable
        } else {
            tok.kind == TokenKind::Symbol && tok.text != "="
        };
        if !ok {
            let what = if variables { "a variable" } else { "a name" };
            return Err(parse_err(e.pos(), format!("expected {what}, found '{}'", tok.text)));
        }
        pending.push((tok.text.clone(), e.pos()));
        i += 1;
    }
    out.extend(pending.into_iter().map(|(name, pos)| {
        (
            TypedName {
                name,
                ty: "object".into(),
            },
            pos,
        )
    }));
    Ok(out)
}

fn unsupported_construct(e: &SExpr) -> Option<PddlError> {
    let head = e.as_list()?.first()?.leaf()?;
    let flag = match head.text.as_str() {
        "or" | "imply" => ":disjunctive-preconditions",
        "forall" => ":universal-preconditions",
        "exists" => ":existential-preconditions",
        "when" => ":conditional-effects",
        "increase" | "decrease" | "assign" | "scale-up" | "scale-down" | "<" | ">" | "<=" | ">=" => {
            ":numeric-fluents"
        }
        _ => return None,
    };
    Some(PddlError::UnsupportedRequirement {
        pos: e.pos(),
        flag: flag.into(),
    })
}

fn atom(e: &SExpr) -> Result<Atom, PddlError> {
    let items = e
        .as_list()
        .ok_or_else(|| parse_err(e.pos(), "expected an atom"))?;
    let head = items
        .first()
        .and_then(|h| h.leaf())
        .filter(|t| t.kind == TokenKind::Symbol)
        .ok_or_else(|| parse_err(e.pos(), "expected a predicate name"))?;
    let mut args = Vec::new();
    for a in &items[1..] {
        let t = a
            .leaf()
            .ok_or_else(|| parse_err(a.pos(), "nested term; function terms are not supported"))?;
        args.push(match t.kind {
            TokenKind::Variable => Term::Variable(t.text.clone()),
            TokenKind::Symbol if t.text != "=" => Term::Constant(t.text.clone()),
            _ => return Err(parse_err(a.pos(), format!("unexpected '{}' in atom", t.text))),
        });
    }
    Ok(Atom {
        predicate: head.text.clone(),
        args,
    })
}

/// Flattens a conjunction of possibly negated atoms, tracking positions.
fn conjunction(e: &SExpr, out: &mut Vec<(Literal, Pos)>) -> Result<(), PddlError> {
    if let Some(err) = unsupported_construct(e) {
        return Err(err);
    }
    let items = e
        .as_list()
        .ok_or_else(|| parse_err(e.pos(), "expected a formula"))?;
    match items.first() {
        None => Ok(()),
        Some(h) if h.is_word("and") => {
            for sub in &items[1..] {
                conjunction(sub, out)?;
            }
            Ok(())
        }
        Some(h) if h.is_word("not") => {
            if items.len() != 2 {
                return Err(parse_err(e.pos(), "'not' takes exactly one argument"));
            }
            if let Some(err) = unsupported_construct(&items[1]) {
                return Err(err);
            }
            if items[1].as_list().and_then(|l| l.first()).is_some_and(|h| h.is_word("and") || h.is_word("not")) {
                return Err(PddlError::UnsupportedRequirement {
                    pos: items[1].pos(),
                    flag: ":disjunctive-preconditions".into(),
                });
            }
            out.push((
                Literal {
                    atom: atom(&items[1])?,
                    positive: false,
                },
                e.pos(),
            ));
            Ok(())
        }
        Some(_) => {
            out.push((
                Literal {
                    atom: atom(e)?,
                    positive: true,
                },
                e.pos(),
            ));
            Ok(())
        }
    }
}

struct DomainChecker<'a> {
    domain: &'a DomainAst,
}

impl DomainChecker<'_> {
    fn constant_type(&self, name: &str) -> Option<&str> {
        self.domain
            .constants
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.ty.as_str())
    }

    /// Checks predicate existence, arity, and argument types. `lookup` resolves
    /// a term to its declared type.
    fn check_atom(
        &self,
        atom: &Atom,
        pos: Pos,
        lookup: &dyn Fn(&Term) -> Option<String>,
    ) -> Result<(), PddlError> {
        let mut arg_types = Vec::with_capacity(atom.args.len());
        for t in &atom.args {
            match lookup(t) {
                Some(ty) => arg_types.push(ty),
                None => {
                    let what = match t {
                        Term::Variable(_) => "undeclared variable",
                        Term::Constant(_) => "undeclared object",
                    };
                    return Err(type_err(pos, format!("{what} '{}'", t.name())));
                }
            }
        }
        if atom.is_equality() {
            if atom.args.len() != 2 {
                return Err(parse_err(pos, "'=' takes exactly two arguments"));
            }
            return Ok(());
        }
        let decl = self
            .domain
            .predicate(&atom.predicate)
            .ok_or_else(|| parse_err(pos, format!("undeclared predicate '{}'", atom.predicate)))?;
        if decl.params.len() != atom.args.len() {
            return Err(parse_err(
                pos,
                format!(
                    "predicate '{}' expects {} arguments, found {}",
                    atom.predicate,
                    decl.params.len(),
                    atom.args.len()
                ),
            ));
        }
        for ((term, ty), param) in atom.args.iter().zip(&arg_types).zip(&decl.params) {
            if !self.domain.is_subtype(ty, &param.ty) {
                return Err(type_err(
                    pos,
                    format!(
                        "'{}' has type '{}' but '{}' expects '{}'",
                        term.name(),
                        ty,
                        atom.predicate,
                        param.ty
                    ),
                ));
            }
        }
        Ok(())
    }
}

fn check_unique(names: &[(String, Pos)], what: &str) -> Result<(), PddlError> {
    let mut seen = HashSet::new();
    for (n, pos) in names {
        if !seen.insert(n.as_str()) {
            return Err(parse_err(*pos, format!("duplicate {what} '{n}'")));
        }
    }
    Ok(())
}

/// Parses a domain definition. The supported fragment is STRIPS with typing,
/// negative preconditions and equality.
pub fn parse_domain(tokens: &[Token]) -> Result<DomainAst, PddlError> {
    let root = build_tree(tokens)?;
    let (name, sections) = split_define(&root, "domain")?;
    let mut domain = DomainAst {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    let mut pending_actions = Vec::new();
    let mut predicate_pos = Vec::new();
    let mut constant_pos = Vec::new();
    let mut type_pos: HashMap<String, Pos> = HashMap::new();

    for section in sections {
        let (kw, body) = section_keyword(section)?;
        match kw.text.as_str() {
            ":requirements" => requirements(body, &mut domain.requirements)?,
            ":types" => {
                for (tn, pos) in typed_list(body, false)? {
                    if tn.name == "object" {
                        continue;
                    }
                    if domain.types.iter().any(|(t, _)| *t == tn.name) {
                        return Err(parse_err(pos, format!("duplicate type '{}'", tn.name)));
                    }
                    type_pos.insert(tn.name.clone(), pos);
                    domain.types.push((tn.name, tn.ty));
                }
            }
            ":constants" => {
                for (tn, pos) in typed_list(body, false)? {
                    constant_pos.push((tn.name.clone(), pos));
                    domain.constants.push(tn);
                }
            }
            ":predicates" => {
                for p in body {
                    let items = p
                        .as_list()
                        .ok_or_else(|| parse_err(p.pos(), "expected a predicate declaration"))?;
                    let head = items
                        .first()
                        .ok_or_else(|| parse_err(p.pos(), "empty predicate declaration"))?;
                    let pname = expect_symbol(head, "predicate name")?;
                    let params = typed_list(&items[1..], true)?;
                    check_unique(
                        &params.iter().map(|(t, p)| (t.name.clone(), *p)).collect::<Vec<_>>(),
                        "parameter",
                    )?;
                    predicate_pos.push((pname.clone(), p.pos()));
                    domain.predicates.push(PredicateDecl {
                        name: pname,
                        params: params.into_iter().map(|(t, _)| t).collect(),
                    });
                }
            }
            ":action" => pending_actions.push((section, body)),
            ":functions" => {
                return Err(PddlError::UnsupportedRequirement {
                    pos: kw_pos(kw),
                    flag: ":numeric-fluents".into(),
                })
            }
            ":derived" => {
                return Err(PddlError::UnsupportedRequirement {
                    pos: kw_pos(kw),
                    flag: ":derived-predicates".into(),
                })
            }
            ":durative-action" => {
                return Err(PddlError::UnsupportedRequirement {
                    pos: kw_pos(kw),
                    flag: ":durative-actions".into(),
                })
            }
            other => return Err(parse_err(kw_pos(kw), format!("unknown domain section '{other}'"))),
        }
    }

    // Undeclared parents become direct subtypes of object.
    let mut i = 0;
    while i < domain.types.len() {
        let parent = domain.types[i].1.clone();
        if !domain.has_type(&parent) {
            domain.types.push((parent, "object".into()));
        }
        i += 1;
    }
    for (t, _) in &domain.types {
        let mut cur = t.as_str();
        let mut steps = 0;
        while cur != "object" {
            cur = domain.parent_of(cur).unwrap_or("object");
            steps += 1;
            if steps > domain.types.len() {
                let pos = type_pos.get(t).copied().unwrap_or_default();
                return Err(type_err(pos, format!("cyclic type hierarchy at '{t}'")));
            }
        }
    }

    check_unique(&predicate_pos, "predicate")?;
    check_unique(&constant_pos, "constant")?;
    for (c, (_, pos)) in domain.constants.iter().zip(&constant_pos) {
        if !domain.has_type(&c.ty) {
            return Err(type_err(*pos, format!("unknown type '{}'", c.ty)));
        }
    }
    for (p, (_, pos)) in domain.predicates.iter().zip(&predicate_pos) {
        if p.name == "=" {
            return Err(parse_err(*pos, "'=' cannot be declared as a predicate"));
        }
        for param in &p.params {
            if !domain.has_type(&param.ty) {
                return Err(type_err(*pos, format!("unknown type '{}'", param.ty)));
            }
        }
    }

    let mut action_pos = Vec::new();
    for (section, body) in pending_actions {
        let action = parse_action(&domain, body, section.pos())?;
        action_pos.push((action.name.clone(), section.pos()));
        domain.actions.push(action);
    }
    check_unique(&action_pos, "action")?;
    Ok(domain)
}

fn kw_pos(t: &Token) -> Pos {
    Pos {
        line: t.line,
        column: t.column,
    }
}

fn parse_action(domain: &DomainAst, body: &[SExpr], pos: Pos) -> Result<ActionSchema, PddlError> {
    let name = expect_symbol(
        body.first()
            .ok_or_else(|| parse_err(pos, "expected an action name"))?,
        "action name",
    )?;
    let mut parameters = Vec::new();
    let mut pre = Vec::new();
    let mut eff = Vec::new();
    let mut seen = HashSet::new();
    let mut i = 1;
    while i < body.len() {
        let key = body[i]
            .leaf()
            .filter(|t| t.kind == TokenKind::Keyword)
            .ok_or_else(|| parse_err(body[i].pos(), "expected ':parameters', ':precondition' or ':effect'"))?;
        let value = body
            .get(i + 1)
            .ok_or_else(|| parse_err(body[i].pos(), format!("missing value for '{}'", key.text)))?;
        if !seen.insert(key.text.clone()) {
            return Err(parse_err(body[i].pos(), format!("duplicate '{}'", key.text)));
        }
        match key.text.as_str() {
            ":parameters" => {
                let items = value
                    .as_list()
                    .ok_or_else(|| parse_err(value.pos(), "expected a parameter list"))?;
                let params = typed_list(items, true)?;
                check_unique(
                    &params.iter().map(|(t, p)| (t.name.clone(), *p)).collect::<Vec<_>>(),
                    "parameter",
                )?;
                for (p, ppos) in &params {
                    if !domain.has_type(&p.ty) {
                        return Err(type_err(*ppos, format!("unknown type '{}'", p.ty)));
                    }
                }
                parameters = params.into_iter().map(|(t, _)| t).collect();
            }
            ":precondition" => conjunction(value, &mut pre)?,
            ":effect" => conjunction(value, &mut eff)?,
            other => return Err(parse_err(body[i].pos(), format!("unknown action key '{other}'"))),
        }
        i += 2;
    }

    let checker = DomainChecker { domain };
    let params = &parameters;
    let lookup = |t: &Term| -> Option<String> {
        match t {
            Term::Variable(v) => params.iter().find(|p| p.name == *v).map(|p| p.ty.clone()),
            Term::Constant(c) => checker.constant_type(c).map(str::to_owned),
        }
    };
    for (lit, lpos) in &pre {
        checker.check_atom(&lit.atom, *lpos, &lookup)?;
    }
    for (lit, lpos) in &eff {
        if lit.atom.is_equality() {
            return Err(parse_err(*lpos, "equality is not allowed in effects"));
        }
        checker.check_atom(&lit.atom, *lpos, &lookup)?;
    }
    for (lit, lpos) in &eff {
        if lit.positive
            && eff
                .iter()
                .any(|(other, _)| !other.positive && other.atom == lit.atom)
        {
            return Err(parse_err(
                *lpos,
                format!("effect both adds and deletes '{}'", lit.atom.predicate),
            ));
        }
    }
    Ok(ActionSchema {
        name,
        parameters,
        precondition: dedup(pre),
        effect: dedup(eff),
    })
}

fn dedup(lits: Vec<(Literal, Pos)>) -> Vec<Literal> {
    let mut out: Vec<Literal> = Vec::with_capacity(lits.len());
    for (l, _) in lits {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

/// Parses a problem definition and checks it against `domain`.
pub fn parse_problem(tokens: &[Token], domain: &DomainAst) -> Result<ProblemAst, PddlError> {
    let root = build_tree(tokens)?;
    let (name, sections) = split_define(&root, "problem")?;
    let mut domain_name = None;
    let mut objects: Vec<(TypedName, Pos)> = Vec::new();
    let mut init: Vec<(Atom, Pos)> = Vec::new();
    let mut goal: Option<Vec<(Literal, Pos)>> = None;
    let mut reqs = Vec::new();

    for section in sections {
        let (kw, body) = section_keyword(section)?;
        match kw.text.as_str() {
            ":domain" => {
                let d = body
                    .first()
                    .filter(|_| body.len() == 1)
                    .ok_or_else(|| parse_err(section.pos(), "expected '(:domain <name>)'"))?;
                let found = expect_symbol(d, "domain name")?;
                if found != domain.name {
                    return Err(PddlError::DomainMismatch {
                        pos: d.pos(),
                        expected: domain.name.clone(),
                        found,
                    });
                }
                domain_name = Some(found);
            }
            ":requirements" => requirements(body, &mut reqs)?,
            ":objects" => objects.extend(typed_list(body, false)?),
            ":init" => {
                for e in body {
                    if e.as_list().and_then(|l| l.first()).is_some_and(|h| h.is_word("not")) {
                        return Err(parse_err(e.pos(), "negated atoms are not allowed in :init"));
                    }
                    if let Some(err) = unsupported_construct(e) {
                        return Err(err);
                    }
                    let a = atom(e)?;
                    if a.is_equality() {
                        return Err(parse_err(e.pos(), "equality atoms are not allowed in :init"));
                    }
                    init.push((a, e.pos()));
                }
            }
            ":goal" => {
                if body.len() != 1 {
                    return Err(parse_err(section.pos(), "expected a single goal formula"));
                }
                let mut lits = Vec::new();
                conjunction(&body[0], &mut lits)?;
                goal = Some(lits);
            }
            ":metric" => {
                return Err(PddlError::UnsupportedRequirement {
                    pos: kw_pos(kw),
                    flag: ":action-costs".into(),
                })
            }
            other => return Err(parse_err(kw_pos(kw), format!("unknown problem section '{other}'"))),
        }
    }

    let domain_name = domain_name.ok_or_else(|| parse_err(root.pos(), "missing ':domain'"))?;
    let goal = goal.ok_or_else(|| parse_err(root.pos(), "missing ':goal'"))?;

    check_unique(
        &objects.iter().map(|(t, p)| (t.name.clone(), *p)).collect::<Vec<_>>(),
        "object",
    )?;
    for (o, pos) in &objects {
        if !domain.has_type(&o.ty) {
            return Err(type_err(*pos, format!("unknown type '{}' for object '{}'", o.ty, o.name)));
        }
    }

    let checker = DomainChecker { domain };
    let lookup = |t: &Term| -> Option<String> {
        match t {
            Term::Variable(_) => None,
            Term::Constant(c) => objects
                .iter()
                .find(|(o, _)| o.name == *c)
                .map(|(o, _)| o.ty.clone())
                .or_else(|| checker.constant_type(c).map(str::to_owned)),
        }
    };
    let mut init_atoms: Vec<Atom> = Vec::new();
    for (a, pos) in init {
        checker.check_atom(&a, pos, &lookup)?;
        if !init_atoms.contains(&a) {
            init_atoms.push(a);
        }
    }
    for (l, pos) in &goal {
        if l.atom.is_equality() {
            return Err(parse_err(*pos, "equality atoms are not supported in goals"));
        }
        checker.check_atom(&l.atom, *pos, &lookup)?;
    }

    Ok(ProblemAst {
        name,
        domain_name,
        objects: objects.into_iter().map(|(o, _)| o).collect(),
        init: init_atoms,
        goal: dedup(goal),
    })
}
