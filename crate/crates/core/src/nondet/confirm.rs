//! Replay of the small-stack confirmation of a computation tree.
//!
//! An oracle run supplies the tree. Confirmation then checks every node
//! against the rule it claims to instantiate. At each node the premises
//! other than the largest are confirmed by a nested call, smallest first, and
//! the largest is continued in place. Each nested call therefore starts on a
//! subtree at most half the size of the current one, so the confirmation
//! stack stays logarithmic in the tree size.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::eval::{deep, eval_tree, Budget, CompNode, EvalError, Rule};
use crate::ir::{apply_base, Kind, Lowered, Node};
use crate::syntax::Program;
use crate::value::{BitString, Value};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfirmStats {
    pub result: Value,
    /// Peak depth of the confirmation stack.
    pub max_confirm_frames: u64,
    pub tree_size: u64,
    /// `max_confirm_frames <= ⌈log₂(tree_size + 1)⌉ + 1`.
    pub bound_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfirmError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("confirmation contradicts the oracle tree: {reason}")]
    OracleMismatch { reason: String },
}

/// `⌈log₂(m)⌉` for `m >= 1`.
pub fn ceil_log2(m: u64) -> u64 {
    if m <= 1 {
        0
    } else {
        64 - (m - 1).leading_zeros() as u64
    }
}

struct Confirmer<'a> {
    prog: &'a Lowered,
    input: &'a BitString,
    nodes: HashMap<u32, &'a Node>,
    max_frames: u64,
}

fn index_nodes<'a>(n: &'a Node, out: &mut HashMap<u32, &'a Node>) {
    out.insert(n.id, n);
    match &n.kind {
        Kind::True | Kind::False | Kind::Nil | Kind::Var(_) => {}
        Kind::Base(_, a) => index_nodes(a, out),
        Kind::If(c, t, f) => {
            index_nodes(c, out);
            index_nodes(t, out);
            index_nodes(f, out);
        }
        Kind::Call(_, args) => args.iter().for_each(|a| index_nodes(a, out)),
        Kind::Choose(l, r) => {
            index_nodes(l, out);
            index_nodes(r, out);
        }
    }
}

fn mismatch(reason: impl Into<String>) -> ConfirmError {
    ConfirmError::OracleMismatch {
        reason: reason.into(),
    }
}

impl<'a> Confirmer<'a> {
    fn expect_premise(&self, c: &CompNode, id: u32, env: &[Value]) -> Result<(), ConfirmError> {
        if c.expr_id != Some(id) || c.env != env {
            return Err(mismatch(format!(
                "premise for expression {id} has the wrong shape"
            )));
        }
        Ok(())
    }

    /// Checks one inference step: the premises are judgments about the right
    /// subexpressions and the conclusion follows from their values.
    fn check(&self, cur: &CompNode) -> Result<(), ConfirmError> {
        let kids = &cur.children;
        let Some(id) = cur.expr_id else {
            let body = &self.prog.funcs[0].body;
            let entry = [Value::Suffix(0)];
            if cur.rule != Rule::Program || kids.len() != 1 || cur.env != entry {
                return Err(mismatch("malformed root"));
            }
            self.expect_premise(&kids[0], body.id, &entry)?;
            return if kids[0].value == cur.value {
                Ok(())
            } else {
                Err(mismatch("root value"))
            };
        };
        let node = self
            .nodes
            .get(&id)
            .ok_or_else(|| mismatch(format!("unknown expression {id}")))?;
        let env = &cur.env;
        let ok = match (&node.kind, cur.rule) {
            (Kind::True, Rule::True) => kids.is_empty() && cur.value == Value::TRUE,
            (Kind::False, Rule::False) => kids.is_empty() && cur.value == Value::FALSE,
            (Kind::Nil, Rule::Nil) => {
                kids.is_empty() && cur.value == Value::Suffix(self.input.len() as u32)
            }
            (Kind::Var(i), Rule::Var) => kids.is_empty() && env.get(*i) == Some(&cur.value),
            (Kind::Base(op, a), Rule::Base(rop)) if *op == rop => {
                kids.len() == 1 && {
                    self.expect_premise(&kids[0], a.id, env)?;
                    apply_base(*op, kids[0].value, self.input) == Ok(cur.value)
                }
            }
            (Kind::If(c, t, f), Rule::IfTrue | Rule::IfFalse) => {
                let (want, branch) = if cur.rule == Rule::IfTrue {
                    (true, t)
                } else {
                    (false, f)
                };
                kids.len() == 2 && {
                    self.expect_premise(&kids[0], c.id, env)?;
                    self.expect_premise(&kids[1], branch.id, env)?;
                    kids[0].value == Value::Bool(want) && kids[1].value == cur.value
                }
            }
            (Kind::Call(target, args), Rule::Call) => {
                kids.len() == args.len() + 1 && {
                    for (a, k) in args.iter().zip(kids) {
                        self.expect_premise(k, a.id, env)?;
                    }
                    let vals: Vec<Value> = kids[..args.len()].iter().map(|k| k.value).collect();
                    let body = kids.last().unwrap();
                    self.expect_premise(body, self.prog.funcs[*target].body.id, &vals)?;
                    body.value == cur.value
                }
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(mismatch(format!(
                "rule {:?} does not derive {:?} at expression {id}",
                cur.rule, cur.value
            )))
        }
    }

    fn confirm(&mut self, root: &CompNode, depth: u64) -> Result<(), ConfirmError> {
        deep(|| {
            self.max_frames = self.max_frames.max(depth);
            let mut cur = root;
            loop {
                self.check(cur)?;
                let Some(largest) = (0..cur.children.len()).max_by_key(|&i| cur.children[i].size)
                else {
                    return Ok(());
                };
                let mut rest: Vec<&CompNode> = cur
                    .children
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != largest)
                    .map(|(_, c)| c)
                    .collect();
                rest.sort_by_key(|c| c.size);
                for c in rest {
                    self.confirm(c, depth + 1)?;
                }
                cur = &cur.children[largest];
            }
        })
    }
}

/// Confirms the run of `p` on `x` with the default budget for the oracle.
pub fn confirm_log2(p: &Program, x: &BitString) -> Result<ConfirmStats, ConfirmError> {
    confirm_log2_with(p, x, Budget::default())
}

pub fn confirm_log2_with(
    p: &Program,
    x: &BitString,
    budget: Budget,
) -> Result<ConfirmStats, ConfirmError> {
    let (tree, _) = eval_tree(p, x, budget)?;
    let prog = Lowered::new(p);
    let mut nodes = HashMap::new();
    for f in &prog.funcs {
        index_nodes(&f.body, &mut nodes);
    }
    let mut c = Confirmer {
        prog: &prog,
        input: x,
        nodes,
        max_frames: 0,
    };
    c.confirm(&tree, 1)?;
    Ok(ConfirmStats {
        result: tree.value,
        max_confirm_frames: c.max_frames,
        tree_size: tree.size,
        bound_ok: c.max_frames <= ceil_log2(tree.size + 1) + 1,
    })
}

/// Confirms a given tree, for tests that tamper with the oracle.
#[cfg(test)]
fn confirm_tree(p: &Program, x: &BitString, tree: &CompNode) -> Result<u64, ConfirmError> {
    let prog = Lowered::new(p);
    let mut nodes = HashMap::new();
    for f in &prog.funcs {
        index_nodes(&f.body, &mut nodes);
    }
    let mut c = Confirmer {
        prog: &prog,
        input: x,
        nodes,
        max_frames: 0,
    };
    c.confirm(tree, 1)?;
    Ok(c.max_frames)
}
