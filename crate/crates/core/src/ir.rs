//! Index-resolved form of a program used by the evaluators.

use std::collections::HashMap;

use crate::syntax::{BaseOp, Expr, Program};
use crate::value::{BitString, Value};

#[derive(Debug)]
pub(crate) struct Node {
    /// Preorder number, unique across the whole program.
    pub id: u32,
    pub kind: Kind,
}

#[derive(Debug)]
pub(crate) enum Kind {
    True,
    False,
    Nil,
    Var(usize),
    Base(BaseOp, Box<Node>),
    If(Box<Node>, Box<Node>, Box<Node>),
    Call(usize, Vec<Node>),
    Choose(Box<Node>, Box<Node>),
}

#[derive(Debug)]
pub(crate) struct Func {
    pub name: String,
    pub arity: usize,
    pub body: Node,
    /// Peak number of intermediate values held while evaluating the body.
    pub temps: usize,
}

#[derive(Debug)]
pub(crate) struct Lowered {
    pub funcs: Vec<Func>,
}

impl Lowered {
    pub fn new(p: &Program) -> Lowered {
        let index: HashMap<&str, usize> = p
            .definitions()
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name.as_str(), i))
            .collect();
        let mut locations = Vec::new();
        let mut funcs = Vec::new();
        for (fi, def) in p.definitions().iter().enumerate() {
            let mut path = Vec::new();
            let body = lower(
                &def.body,
                &def.params,
                &index,
                fi,
                &mut path,
                &mut locations,
            );
            let temps = peak_temps(&body);
            funcs.push(Func {
                name: def.name.clone(),
                arity: def.arity(),
                body,
                temps,
            });
        }
        Lowered { funcs }
    }
}

fn lower(
    e: &Expr,
    params: &[String],
    index: &HashMap<&str, usize>,
    func: usize,
    path: &mut Vec<u8>,
    locs: &mut Vec<(usize, Vec<u8>)>,
) -> Node {
    let id = locs.len() as u32;
    locs.push((func, path.clone()));
    let mut child = |i: u8, e: &Expr, locs: &mut Vec<(usize, Vec<u8>)>| {
        path.push(i);
        let n = lower(e, params, index, func, path, locs);
        path.pop();
        n
    };
    let kind = match e {
        Expr::True => Kind::True,
        Expr::False => Kind::False,
        Expr::Nil => Kind::Nil,
        Expr::Var(v) => Kind::Var(
            params
                .iter()
                .position(|p| p == v)
                .expect("validated program"),
        ),
        Expr::Base(op, a) => Kind::Base(*op, Box::new(child(0, a, locs))),
        Expr::If(c, t, f) => {
            let c = child(0, c, locs);
            let t = child(1, t, locs);
            let f = child(2, f, locs);
            Kind::If(Box::new(c), Box::new(t), Box::new(f))
        }
        Expr::Call(name, args) => {
            let target = index[name.as_str()];
            let args = args
                .iter()
                .enumerate()
                .map(|(i, a)| child(i as u8, a, locs))
                .collect();
            Kind::Call(target, args)
        }
        Expr::Choose(l, r) => {
            let l = child(0, l, locs);
            let r = child(1, r, locs);
            Kind::Choose(Box::new(l), Box::new(r))
        }
    };
    Node { id, kind }
}

/// Peak live temporaries for a left-to-right evaluation of `n`, counting the
/// node's own result. Argument values accumulate until the call consumes them.
fn peak_temps(n: &Node) -> usize {
    match &n.kind {
        Kind::True | Kind::False | Kind::Nil | Kind::Var(_) => 1,
        Kind::Base(_, a) => peak_temps(a),
        Kind::If(c, t, f) => peak_temps(c).max(peak_temps(t)).max(peak_temps(f)),
        Kind::Choose(l, r) => peak_temps(l).max(peak_temps(r)),
        Kind::Call(_, args) => args
            .iter()
            .enumerate()
            .map(|(i, a)| i + peak_temps(a))
            .max()
            .unwrap_or(0)
            .max(1),
    }
}

/// Why a judgment has no applicable rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum StuckReason {
    BaseOnWrongKind(BaseOp),
    EmptyList(BaseOp),
    NonBoolTest,
}

impl std::fmt::Display for StuckReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StuckReason::BaseOnWrongKind(BaseOp::Not) => write!(f, "`not` applied to a list"),
            StuckReason::BaseOnWrongKind(op) => write!(f, "`{op}` applied to a boolean"),
            StuckReason::EmptyList(op) => write!(f, "`{op}` applied to []"),
            StuckReason::NonBoolTest => write!(f, "`if` test is not a boolean"),
        }
    }
}

pub(crate) fn apply_base(op: BaseOp, v: Value, input: &BitString) -> Result<Value, StuckReason> {
    let n = input.len() as u32;
    match (op, v) {
        (BaseOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
        (BaseOp::Null, Value::Suffix(k)) => Ok(Value::Bool(k >= n)),
        (BaseOp::Head, Value::Suffix(k)) if k < n => Ok(Value::Bool(input.bits()[k as usize])),
        (BaseOp::Tail, Value::Suffix(k)) if k < n => Ok(Value::Suffix(k + 1)),
        (BaseOp::Head | BaseOp::Tail, Value::Suffix(_)) => Err(StuckReason::EmptyList(op)),
        _ => Err(StuckReason::BaseOnWrongKind(op)),
    }
}
