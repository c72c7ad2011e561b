//! Abstract syntax of cons-free programs and the static well-formedness checks.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// The four built-in operations. None of them allocates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseOp {
    Not,
    Null,
    Head,
    Tail,
}

impl BaseOp {
    pub const ALL: [BaseOp; 4] = [BaseOp::Not, BaseOp::Null, BaseOp::Head, BaseOp::Tail];

    pub fn keyword(self) -> &'static str {
        match self {
            BaseOp::Not => "not",
            BaseOp::Null => "null",
            BaseOp::Head => "head",
            BaseOp::Tail => "tail",
        }
    }
}

impl fmt::Display for BaseOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    True,
    False,
    Nil,
    Var(String),
    Base(BaseOp, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    /// Binary nondeterministic choice. Only admitted in NCF programs.
    Choose(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn base(op: BaseOp, arg: Expr) -> Expr {
        Expr::Base(op, Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(arg: Expr) -> Expr {
        Expr::base(BaseOp::Not, arg)
    }

    pub fn null(arg: Expr) -> Expr {
        Expr::base(BaseOp::Null, arg)
    }

    pub fn head(arg: Expr) -> Expr {
        Expr::base(BaseOp::Head, arg)
    }

    pub fn tail(arg: Expr) -> Expr {
        Expr::base(BaseOp::Tail, arg)
    }

    pub fn ite(cond: Expr, then_branch: Expr, else_branch: Expr) -> Expr {
        Expr::If(Box::new(cond), Box::new(then_branch), Box::new(else_branch))
    }

    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Call(name.into(), args)
    }

    pub fn choose(left: Expr, right: Expr) -> Expr {
        Expr::Choose(Box::new(left), Box::new(right))
    }

    /// Boolean conjunction, expressed with a conditional.
    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::ite(a, b, Expr::False)
    }

    /// Boolean disjunction, expressed with a conditional.
    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::ite(a, Expr::True, b)
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::True | Expr::False | Expr::Nil | Expr::Var(_) => 1,
            Expr::Base(_, e) => 1 + e.size(),
            Expr::If(c, t, e) => 1 + c.size() + t.size() + e.size(),
            Expr::Call(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
            Expr::Choose(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn contains_choose(&self) -> bool {
        match self {
            Expr::True | Expr::False | Expr::Nil | Expr::Var(_) => false,
            Expr::Base(_, e) => e.contains_choose(),
            Expr::If(c, t, e) => c.contains_choose() || t.contains_choose() || e.contains_choose(),
            Expr::Call(_, args) => args.iter().any(Expr::contains_choose),
            Expr::Choose(..) => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Definition {
    pub name: String,
    pub params: Vec<String>,
    pub body: Expr,
}

impl Definition {
    pub fn new(name: impl Into<String>, params: &[&str], body: Expr) -> Definition {
        Definition {
            name: name.into(),
            params: params.iter().map(|p| p.to_string()).collect(),
            body,
        }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// Which language fragment a program is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dialect {
    /// Deterministic CF: `choose` is rejected.
    #[default]
    Deterministic,
    /// NCF: `choose` is admitted.
    Nondeterministic,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("program has no definitions")]
    Empty,
    #[error("function `{0}` is defined more than once")]
    DuplicateDef(String),
    #[error("parameter `{param}` appears twice in definition of `{def}`")]
    DuplicateParam { def: String, param: String },
    #[error("variable `{var}` is not a parameter of `{def}`")]
    UnboundVar { def: String, var: String },
    #[error("`{def}` calls undefined function `{callee}`")]
    UnknownFunction { def: String, callee: String },
    #[error("`{def}` calls `{callee}` with {given} arguments, expected {expected}")]
    ArityMismatch {
        def: String,
        callee: String,
        expected: usize,
        given: usize,
    },
    #[error("entry function `{name}` must take exactly one parameter, found {arity}")]
    EntryArity { name: String, arity: usize },
    #[error("`choose` in `{0}` is only allowed in nondeterministic programs")]
    ChooseNotAllowed(String),
    #[error("`{0}` is a reserved word")]
    ReservedName(String),
    #[error("parameter `{param}` of `{def}` has the name of a zero-argument function")]
    AmbiguousName { def: String, param: String },
}

pub const KEYWORDS: [&str; 10] = [
    "if", "then", "else", "True", "False", "not", "null", "head", "tail", "choose",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// A sequence of mutually recursive definitions; the first is the entry point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    definitions: Vec<Definition>,
}

impl Program {
    /// Builds a program and checks every well-formedness rule.
    pub fn new(definitions: Vec<Definition>, dialect: Dialect) -> Result<Program, ValidationError> {
        let p = Program { definitions };
        p.validate(dialect)?;
        Ok(p)
    }

    pub fn definitions(&self) -> &[Definition] {
        &self.definitions
    }

    pub fn entry(&self) -> &Definition {
        &self.definitions[0]
    }

    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.definitions.iter().find(|d| d.name == name)
    }

    pub fn is_deterministic(&self) -> bool {
        !self.definitions.iter().any(|d| d.body.contains_choose())
    }

    /// Total number of expression nodes over all bodies.
    pub fn size(&self) -> usize {
        self.definitions.iter().map(|d| d.body.size()).sum()
    }

    pub fn max_arity(&self) -> usize {
        self.definitions
            .iter()
            .map(Definition::arity)
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self, dialect: Dialect) -> Result<(), ValidationError> {
        let entry = self.definitions.first().ok_or(ValidationError::Empty)?;
        let mut arities: HashMap<&str, usize> = HashMap::new();
        for def in &self.definitions {
            if is_keyword(&def.name) {
                return Err(ValidationError::ReservedName(def.name.clone()));
            }
            if arities.insert(&def.name, def.arity()).is_some() {
                return Err(ValidationError::DuplicateDef(def.name.clone()));
            }
        }
        if entry.arity() != 1 {
            return Err(ValidationError::EntryArity {
                name: entry.name.clone(),
                arity: entry.arity(),
            });
        }
        for def in &self.definitions {
            let mut seen = HashSet::new();
            for p in &def.params {
                if is_keyword(p) {
                    return Err(ValidationError::ReservedName(p.clone()));
                }
                if arities.get(p.as_str()) == Some(&0) {
                    return Err(ValidationError::AmbiguousName {
                        def: def.name.clone(),
                        param: p.clone(),
                    });
                }
                if !seen.insert(p.as_str()) {
                    return Err(ValidationError::DuplicateParam {
                        def: def.name.clone(),
                        param: p.clone(),
                    });
                }
            }
            check_expr(def, &def.body, &arities, dialect)?;
        }
        Ok(())
    }
}

fn check_expr(
    def: &Definition,
    e: &Expr,
    arities: &HashMap<&str, usize>,
    dialect: Dialect,
) -> Result<(), ValidationError> {
    match e {
        Expr::True | Expr::False | Expr::Nil => Ok(()),
        Expr::Var(v) => {
            if def.params.iter().any(|p| p == v) {
                Ok(())
            } else {
                Err(ValidationError::UnboundVar {
                    def: def.name.clone(),
                    var: v.clone(),
                })
            }
        }
        Expr::Base(_, a) => check_expr(def, a, arities, dialect),
        Expr::If(c, t, f) => {
            check_expr(def, c, arities, dialect)?;
            check_expr(def, t, arities, dialect)?;
            check_expr(def, f, arities, dialect)
        }
        Expr::Call(callee, args) => {
            let expected =
                *arities
                    .get(callee.as_str())
                    .ok_or_else(|| ValidationError::UnknownFunction {
                        def: def.name.clone(),
                        callee: callee.clone(),
                    })?;
            if expected != args.len() {
                return Err(ValidationError::ArityMismatch {
                    def: def.name.clone(),
                    callee: callee.clone(),
                    expected,
                    given: args.len(),
                });
            }
            args.iter()
                .try_for_each(|a| check_expr(def, a, arities, dialect))
        }
        Expr::Choose(l, r) => {
            if dialect == Dialect::Deterministic {
                return Err(ValidationError::ChooseNotAllowed(def.name.clone()));
            }
            check_expr(def, l, arities, dialect)?;
            check_expr(def, r, arities, dialect)
        }
    }
}
