//! Lifted domain/problem structures for the supported PDDL subset
//! (`:strips` plus simple `:typing`).

use std::fmt;

pub const OBJECT_TYPE: &str = "object";

/// A name paired with its declared type (`object` when untyped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

impl TypedName {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        TypedName { name: name.into(), ty: ty.into() }
    }

    pub fn untyped(name: impl Into<String>) -> Self {
        Self::new(name, OBJECT_TYPE)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    pub params: Vec<TypedName>,
}

impl PredicateDef {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// An argument slot in an operator body: a schema variable or a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// A predicate applied to terms, as written in an operator body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTemplate {
    pub pred: String,
    pub args: Vec<Term>,
}

impl fmt::Display for AtomTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A fully instantiated predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(pred: impl Into<String>, args: Vec<String>) -> Self {
        GroundAtom { pred: pred.into(), args }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A lifted operator: positive preconditions plus add/delete effects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precond: Vec<AtomTemplate>,
    pub add: Vec<AtomTemplate>,
    pub del: Vec<AtomTemplate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    Strips,
    Typing,
}

impl Requirement {
    pub fn as_str(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDef {
    pub name: String,
    pub requirements: Vec<Requirement>,
    /// Declared types, each with its parent type (`object` by default).
    pub types: Vec<TypedName>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDef>,
    pub operators: Vec<OperatorSchema>,
}

impl DomainDef {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDef> {
        self.predicates.iter().find(|p| p.name == name)
    }

    /// Whether `ty` equals `ancestor` or derives from it through the type
    /// hierarchy. Every declared type descends from `object`.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ty == ancestor || ancestor == OBJECT_TYPE {
            return true;
        }
        let mut cur = ty;
        // Hierarchies are shallow; cap the walk to guard against parent cycles.
        for _ in 0..=self.types.len() {
            match self.types.iter().find(|t| t.name == cur) {
                Some(t) if t.ty == ancestor => return true,
                Some(t) => cur = &t.ty,
                None => return false,
            }
        }
        false
    }

    pub fn type_declared(&self, ty: &str) -> bool {
        ty == OBJECT_TYPE || self.types.iter().any(|t| t.name == ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemDef {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundAtom>,
}

fn write_typed_list(f: &mut fmt::Formatter<'_>, list: &[TypedName]) -> fmt::Result {
    // Group consecutive names sharing a type: `a b - t c - u`.
    let mut i = 0;
    let mut first = true;
    while i < list.len() {
        let ty = &list[i].ty;
        let mut j = i;
        while j < list.len() && list[j].ty == *ty {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", list[j].name)?;
            first = false;
            j += 1;
        }
        if ty != OBJECT_TYPE {
            write!(f, " - {ty}")?;
        }
        i = j;
    }
    Ok(())
}

impl fmt::Display for DomainDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            write!(f, "  (:requirements")?;
            for r in &self.requirements {
                write!(f, " {}", r.as_str())?;
            }
            writeln!(f, ")")?;
        }
        if !self.types.is_empty() {
            write!(f, "  (:types ")?;
            write_typed_list(f, &self.types)?;
            writeln!(f, ")")?;
        }
        if !self.constants.is_empty() {
            write!(f, "  (:constants ")?;
            write_typed_list(f, &self.constants)?;
            writeln!(f, ")")?;
        }
        write!(f, "  (:predicates")?;
        for p in &self.predicates {
            write!(f, " ({}", p.name)?;
            if !p.params.is_empty() {
                write!(f, " ")?;
                write_typed_list(f, &p.params)?;
            }
            write!(f, ")")?;
        }
        writeln!(f, ")")?;
        for op in &self.operators {
            writeln!(f, "  (:action {}", op.name)?;
            write!(f, "    :parameters (")?;
            write_typed_list(f, &op.params)?;
            writeln!(f, ")")?;
            write!(f, "    :precondition (and")?;
            for a in &op.precond {
                write!(f, " {a}")?;
            }
            writeln!(f, ")")?;
            write!(f, "    :effect (and")?;
            for a in &op.add {
                write!(f, " {a}")?;
            }
            for a in &op.del {
                write!(f, " (not {a})")?;
            }
            writeln!(f, "))")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for ProblemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain)?;
        if !self.objects.is_empty() {
            write!(f, "  (:objects ")?;
            write_typed_list(f, &self.objects)?;
            writeln!(f, ")")?;
        }
        write!(f, "  (:init")?;
        for a in &self.init {
            write!(f, " {a}")?;
        }
        writeln!(f, ")")?;
        write!(f, "  (:goal (and")?;
        for a in &self.goal {
            write!(f, " {a}")?;
        }
        write!(f, ")))")
    }
}
