//! Parsers for PDDL domain and problem files.
//!
//! The accepted subset is `:strips` with simple `:typing`: positive
//! preconditions, unconditional add/delete effects, and conjunctive positive
//! goals. Anything beyond that (quantifiers, conditional effects, negative
//! preconditions, fluents, ...) is rejected with `UnsupportedFeature`.

use super::ast::{
    AtomTemplate, DomainDef, GroundAtom, OperatorSchema, PredicateDef, ProblemDef, Requirement,
    Term, TypedName, OBJECT_TYPE,
};
use super::error::ParseError;
use super::sexpr::{parse_one, Pos, SExpr};

const REJECTED_CONNECTIVES: &[&str] = &[
    "not", "or", "forall", "exists", "when", "imply", "=", "increase", "decrease", "assign",
];

pub fn parse_domain(text: &str) -> Result<DomainDef, ParseError> {
    let top = parse_one(text)?;
    let items = top.expect_list()?;
    expect_keyword(items, "define", top.pos())?;

    let head = items
        .get(1)
        .ok_or_else(|| syntax(top.pos(), "missing (domain NAME)"))?
        .expect_list()?;
    if head.first().and_then(|e| e.as_atom()).map(|(t, _)| t) != Some("domain") {
        return Err(syntax(items[1].pos(), "expected (domain NAME)"));
    }
    let name = head
        .get(1)
        .ok_or_else(|| syntax(items[1].pos(), "missing domain name"))?
        .expect_atom()?
        .0
        .to_string();

    let mut dom = DomainDef {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        operators: Vec::new(),
    };

    for section in &items[2..] {
        let body = section.expect_list()?;
        let (tag, tag_pos) = body
            .first()
            .ok_or_else(|| syntax(section.pos(), "empty section"))?
            .expect_atom()?;
        match tag {
            ":requirements" => {
                for req in &body[1..] {
                    let (r, rpos) = req.expect_atom()?;
                    match r {
                        ":strips" => dom.requirements.push(Requirement::Strips),
                        ":typing" => dom.requirements.push(Requirement::Typing),
                        other => {
                            return Err(ParseError::UnsupportedFeature {
                                pos: rpos,
                                feature: other.to_string(),
                            })
                        }
                    }
                }
            }
            ":types" => dom.types = parse_typed_list(&body[1..])?,
            ":constants" => dom.constants = parse_typed_list(&body[1..])?,
            ":predicates" => {
                for pred in &body[1..] {
                    let plist = pred.expect_list()?;
                    let (pname, _) = plist
                        .first()
                        .ok_or_else(|| syntax(pred.pos(), "empty predicate"))?
                        .expect_atom()?;
                    let params = parse_typed_list(&plist[1..])?;
                    dom.predicates.push(PredicateDef { name: pname.to_string(), params });
                }
            }
            ":action" => dom.operators.push(parse_action(&dom, body, tag_pos)?),
            ":functions" | ":durative-action" | ":derived" | ":constraints" => {
                return Err(ParseError::UnsupportedFeature {
                    pos: tag_pos,
                    feature: tag.to_string(),
                })
            }
            other => return Err(syntax(tag_pos, format!("unknown section `{other}`"))),
        }
    }

    validate_domain(&dom)?;
    Ok(dom)
}

fn parse_action(dom: &DomainDef, body: &[SExpr], pos: Pos) -> Result<OperatorSchema, ParseError> {
    let (name, _) = body
        .get(1)
        .ok_or_else(|| syntax(pos, "missing action name"))?
        .expect_atom()?;
    let mut params = Vec::new();
    let mut precond = Vec::new();
    let mut add = Vec::new();
    let mut del = Vec::new();

    let mut i = 2;
    while i < body.len() {
        let (key, key_pos) = body[i].expect_atom()?;
        let value = body
            .get(i + 1)
            .ok_or_else(|| syntax(key_pos, format!("missing value after `{key}`")))?;
        match key {
            ":parameters" => {
                params = parse_typed_list(value.expect_list()?)?;
                for p in &params {
                    if !p.name.starts_with('?') {
                        return Err(syntax(value.pos(), format!("parameter `{}` must start with `?`", p.name)));
                    }
                }
            }
            ":precondition" => {
                for atom in flatten_conjunction(value)? {
                    precond.push(parse_atom_template(atom, false)?.0);
                }
            }
            ":effect" => {
                for lit in flatten_conjunction(value)? {
                    let (atom, negated) = parse_atom_template(lit, true)?;
                    if negated {
                        del.push(atom);
                    } else {
                        add.push(atom);
                    }
                }
            }
            other => return Err(syntax(key_pos, format!("unknown action key `{other}`"))),
        }
        i += 2;
    }

    let _ = dom;
    Ok(OperatorSchema { name: name.to_string(), params, precond, add, del })
}

/// Accepts a bare atom, `(and ...)`, or `()`; rejects other connectives.
fn flatten_conjunction(expr: &SExpr) -> Result<Vec<&SExpr>, ParseError> {
    let items = expr.expect_list()?;
    match items.first() {
        None => Ok(Vec::new()),
        Some(head) => {
            let (tag, _) = head.expect_atom()?;
            if tag == "and" {
                items[1..].iter().map(|e| check_not_connective(e)).collect()
            } else {
                check_not_connective(expr).map(|e| vec![e])
            }
        }
    }
}

fn check_not_connective(expr: &SExpr) -> Result<&SExpr, ParseError> {
    let items = expr.expect_list()?;
    if let Some((tag, pos)) = items.first().and_then(|e| e.as_atom()) {
        if tag == "and" {
            return Err(syntax(pos, "nested `and` is not supported"));
        }
    }
    Ok(expr)
}

/// Parses `(pred t...)` or, when `allow_negation` holds, `(not (pred t...))`.
fn parse_atom_template(expr: &SExpr, allow_negation: bool) -> Result<(AtomTemplate, bool), ParseError> {
    let items = expr.expect_list()?;
    let (head, head_pos) = items
        .first()
        .ok_or_else(|| syntax(expr.pos(), "empty atom"))?
        .expect_atom()?;

    if head == "not" {
        if !allow_negation {
            return Err(ParseError::UnsupportedFeature {
                pos: head_pos,
                feature: "negative precondition".to_string(),
            });
        }
        let inner = items
            .get(1)
            .ok_or_else(|| syntax(head_pos, "missing atom under `not`"))?;
        if items.len() > 2 {
            return Err(syntax(head_pos, "`not` takes exactly one atom"));
        }
        let (atom, nested) = parse_atom_template(inner, false)?;
        debug_assert!(!nested);
        return Ok((atom, true));
    }
    if REJECTED_CONNECTIVES.contains(&head) {
        return Err(ParseError::UnsupportedFeature { pos: head_pos, feature: head.to_string() });
    }

    let mut args = Vec::new();
    for arg in &items[1..] {
        let (text, _) = arg.expect_atom()?;
        if let Some(stripped) = text.strip_prefix('?') {
            if stripped.is_empty() {
                return Err(syntax(arg.pos(), "empty variable name"));
            }
            args.push(Term::Var(text.to_string()));
        } else {
            args.push(Term::Const(text.to_string()));
        }
    }
    Ok((AtomTemplate { pred: head.to_string(), args }, false))
}

/// Parses `name... - type name... - type ...`; untyped names get `object`.
fn parse_typed_list(items: &[SExpr]) -> Result<Vec<TypedName>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let (text, pos) = items[i].expect_atom()?;
        if text == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| syntax(pos, "missing type after `-`"))?;
            let (ty_name, _) = ty.expect_atom()?;
            if pending.is_empty() {
                return Err(syntax(pos, "type given without names"));
            }
            for name in pending.drain(..) {
                out.push(TypedName::new(name, ty_name));
            }
            i += 2;
        } else {
            pending.push(text.to_string());
            i += 1;
        }
    }
    for name in pending {
        out.push(TypedName::untyped(name));
    }
    Ok(out)
}

fn validate_domain(dom: &DomainDef) -> Result<(), ParseError> {
    let zero = Pos::default();
    for ty in &dom.types {
        if ty.ty != OBJECT_TYPE && !dom.types.iter().any(|t| t.name == ty.ty) {
            return Err(ParseError::UndeclaredSymbol { pos: zero, symbol: ty.ty.clone() });
        }
    }
    for c in &dom.constants {
        if !dom.type_declared(&c.ty) {
            return Err(ParseError::UndeclaredSymbol { pos: zero, symbol: c.ty.clone() });
        }
    }
    for p in &dom.predicates {
        for param in &p.params {
            if !dom.type_declared(&param.ty) {
                return Err(ParseError::UndeclaredSymbol { pos: zero, symbol: param.ty.clone() });
            }
        }
    }
    for op in &dom.operators {
        for (i, p) in op.params.iter().enumerate() {
            if op.params[..i].iter().any(|q| q.name == p.name) {
                return Err(ParseError::DuplicateParameter { pos: zero, name: p.name.clone() });
            }
            if !dom.type_declared(&p.ty) {
                return Err(ParseError::UndeclaredSymbol { pos: zero, symbol: p.ty.clone() });
            }
        }
        for atom in op.precond.iter().chain(&op.add).chain(&op.del) {
            let pred = dom.predicate(&atom.pred).ok_or_else(|| ParseError::UndeclaredSymbol {
                pos: zero,
                symbol: atom.pred.clone(),
            })?;
            if pred.arity() != atom.args.len() {
                return Err(ParseError::ArityMismatch {
                    pos: zero,
                    predicate: atom.pred.clone(),
                    expected: pred.arity(),
                    got: atom.args.len(),
                });
            }
            for term in &atom.args {
                match term {
                    Term::Var(v) => {
                        if !op.params.iter().any(|p| p.name == *v) {
                            return Err(ParseError::UndeclaredSymbol { pos: zero, symbol: v.clone() });
                        }
                    }
                    Term::Const(c) => {
                        if !dom.constants.iter().any(|k| k.name == *c) {
                            return Err(ParseError::UndeclaredSymbol { pos: zero, symbol: c.clone() });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn parse_problem(text: &str, dom: &DomainDef) -> Result<ProblemDef, ParseError> {
    let top = parse_one(text)?;
    let items = top.expect_list()?;
    expect_keyword(items, "define", top.pos())?;

    let head = items
        .get(1)
        .ok_or_else(|| syntax(top.pos(), "missing (problem NAME)"))?
        .expect_list()?;
    if head.first().and_then(|e| e.as_atom()).map(|(t, _)| t) != Some("problem") {
        return Err(syntax(items[1].pos(), "expected (problem NAME)"));
    }
    let name = head
        .get(1)
        .ok_or_else(|| syntax(items[1].pos(), "missing problem name"))?
        .expect_atom()?
        .0
        .to_string();

    let mut prob = ProblemDef {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };

    for section in &items[2..] {
        let body = section.expect_list()?;
        let (tag, tag_pos) = body
            .first()
            .ok_or_else(|| syntax(section.pos(), "empty section"))?
            .expect_atom()?;
        match tag {
            ":domain" => {
                let (dname, dpos) = body
                    .get(1)
                    .ok_or_else(|| syntax(tag_pos, "missing domain name"))?
                    .expect_atom()?;
                if dname != dom.name {
                    return Err(ParseError::DomainMismatch {
                        pos: dpos,
                        declared: dname.to_string(),
                        actual: dom.name.clone(),
                    });
                }
                prob.domain = dname.to_string();
            }
            ":objects" => prob.objects = parse_typed_list(&body[1..])?,
            ":init" => {
                for atom in &body[1..] {
                    prob.init.push(parse_ground_atom(atom, dom, &prob)?);
                }
            }
            ":goal" => {
                let goal_expr = body
                    .get(1)
                    .ok_or_else(|| syntax(tag_pos, "missing goal body"))?;
                for atom in flatten_conjunction(goal_expr)? {
                    prob.goal.push(parse_ground_atom(atom, dom, &prob)?);
                }
            }
            ":metric" | ":constraints" => {
                return Err(ParseError::UnsupportedFeature {
                    pos: tag_pos,
                    feature: tag.to_string(),
                })
            }
            other => return Err(syntax(tag_pos, format!("unknown section `{other}`"))),
        }
    }

    for obj in &prob.objects {
        if !dom.type_declared(&obj.ty) {
            return Err(ParseError::UndeclaredSymbol { pos: Pos::default(), symbol: obj.ty.clone() });
        }
    }
    Ok(prob)
}

fn parse_ground_atom(expr: &SExpr, dom: &DomainDef, prob: &ProblemDef) -> Result<GroundAtom, ParseError> {
    let items = expr.expect_list()?;
    let (pname, pos) = items
        .first()
        .ok_or_else(|| syntax(expr.pos(), "empty atom"))?
        .expect_atom()?;
    if REJECTED_CONNECTIVES.contains(&pname) {
        return Err(ParseError::UnsupportedFeature { pos, feature: pname.to_string() });
    }
    let pred = dom.predicate(pname).ok_or_else(|| ParseError::UndeclaredSymbol {
        pos,
        symbol: pname.to_string(),
    })?;
    if pred.arity() != items.len() - 1 {
        return Err(ParseError::ArityMismatch {
            pos,
            predicate: pname.to_string(),
            expected: pred.arity(),
            got: items.len() - 1,
        });
    }
    let mut args = Vec::new();
    for (arg, param) in items[1..].iter().zip(&pred.params) {
        let (text, apos) = arg.expect_atom()?;
        let declared = prob
            .objects
            .iter()
            .chain(&dom.constants)
            .find(|o| o.name == text)
            .ok_or_else(|| ParseError::UndeclaredSymbol { pos: apos, symbol: text.to_string() })?;
        if !dom.is_subtype(&declared.ty, &param.ty) {
            return Err(ParseError::TypeMismatch {
                pos: apos,
                object: text.to_string(),
                actual: declared.ty.clone(),
                expected: param.ty.clone(),
            });
        }
        args.push(text.to_string());
    }
    Ok(GroundAtom::new(pname, args))
}

fn expect_keyword(items: &[SExpr], kw: &str, pos: Pos) -> Result<(), ParseError> {
    match items.first().and_then(|e| e.as_atom()) {
        Some((t, _)) if t == kw => Ok(()),
        _ => Err(syntax(pos, format!("expected `{kw}`"))),
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}
