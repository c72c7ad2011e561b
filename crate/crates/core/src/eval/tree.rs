//! Big-step evaluation that builds the computation tree bottom-up and left-to-right.

use serde::Serialize;

use super::{
    deep, public_config, require_deterministic, Budget, Clock, Engine, EvalError, History,
    RunOptions, RunStats, SuffixAudit,
};
use crate::ir::{apply_base, Kind, Lowered, Node, StuckReason};
use crate::syntax::{BaseOp, Expr, Program};
use crate::value::{BitString, Config, Value};

/// The inference rule a tree node instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    Var,
    True,
    False,
    Nil,
    Base(#[serde(skip)] BaseOp),
    IfTrue,
    IfFalse,
    Call,
    Choose,
    Program,
}

/// One judgment `p, env ⊢ e → value` together with its premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompNode {
    pub rule: Rule,
    /// Definition whose body contains the expression (the entry for the root).
    pub function: usize,
    /// Expression id (preorder over the whole program); `None` at the root.
    pub expr_id: Option<u32>,
    pub env: Vec<Value>,
    pub value: Value,
    pub children: Vec<CompNode>,
    /// Number of nodes in this subtree.
    pub size: u64,
}

impl CompNode {
    /// The expression this judgment is about, `None` for the root.
    pub fn expr<'p>(&self, p: &'p Program) -> Option<&'p Expr> {
        let id = self.expr_id?;
        expr_at(p, id)
    }

    pub fn depth(&self) -> u64 {
        1 + self.children.iter().map(CompNode::depth).max().unwrap_or(0)
    }

    /// Preorder walk.
    pub fn walk(&self, f: &mut impl FnMut(&CompNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }
}

/// Finds the expression with preorder id `id`.
pub(crate) fn expr_at(p: &Program, id: u32) -> Option<&Expr> {
    let mut next = 0u32;
    for def in p.definitions() {
        if let Some(e) = find_preorder(&def.body, id, &mut next) {
            return Some(e);
        }
    }
    None
}

fn find_preorder<'e>(e: &'e Expr, id: u32, next: &mut u32) -> Option<&'e Expr> {
    if *next == id {
        return Some(e);
    }
    *next += 1;
    let kids: Vec<&Expr> = match e {
        Expr::True | Expr::False | Expr::Nil | Expr::Var(_) => vec![],
        Expr::Base(_, a) => vec![a],
        Expr::If(c, t, f) => vec![c, t, f],
        Expr::Call(_, args) => args.iter().collect(),
        Expr::Choose(l, r) => vec![l, r],
    };
    kids.into_iter().find_map(|k| find_preorder(k, id, next))
}

pub(crate) struct TreeEval<'a> {
    pub prog: &'a Lowered,
    pub input: &'a BitString,
    pub clock: Clock,
    pub audit: SuffixAudit,
    pub history: History,
    pub build: bool,
    frames: u64,
    pub max_frames: u64,
    pub max_depth: u64,
}

type Out = (Value, Option<CompNode>);

impl<'a> TreeEval<'a> {
    pub fn new(
        prog: &'a Lowered,
        input: &'a BitString,
        opts: RunOptions,
        build: bool,
    ) -> TreeEval<'a> {
        TreeEval {
            prog,
            input,
            clock: Clock::new(opts.budget),
            audit: SuffixAudit::new(opts.check_suffixes, input),
            history: History::default(),
            build,
            frames: 0,
            max_frames: 0,
            max_depth: 0,
        }
    }

    pub fn run(&mut self) -> Result<Out, EvalError> {
        self.clock.tick()?;
        let env = [Value::Suffix(0)];
        let (v, body) = self.enter(0, &env, 2)?;
        self.max_depth = self.max_depth.max(1);
        let node = body.map(|b| CompNode {
            rule: Rule::Program,
            function: 0,
            expr_id: None,
            env: env.to_vec(),
            value: v,
            size: 1 + b.size,
            children: vec![b],
        });
        Ok((v, node))
    }

    fn enter(&mut self, func: usize, env: &[Value], depth: u64) -> Result<Out, EvalError> {
        self.history.record(func, env);
        self.audit.check_all(env)?;
        self.frames += 1;
        self.max_frames = self.max_frames.max(self.frames);
        let r = self.eval(func, &self.prog.funcs[func].body, env, depth);
        self.frames -= 1;
        r
    }

    fn stuck(&self, func: usize, reason: StuckReason) -> EvalError {
        EvalError::stuck(&self.prog.funcs[func].name, reason)
    }

    fn eval(
        &mut self,
        func: usize,
        node: &'a Node,
        env: &[Value],
        depth: u64,
    ) -> Result<Out, EvalError> {
        deep(|| self.eval_inner(func, node, env, depth))
    }

    fn eval_inner(
        &mut self,
        func: usize,
        node: &'a Node,
        env: &[Value],
        depth: u64,
    ) -> Result<Out, EvalError> {
        self.clock.tick()?;
        self.max_depth = self.max_depth.max(depth);
        let (rule, value, children) = match &node.kind {
            Kind::True => (Rule::True, Value::TRUE, vec![]),
            Kind::False => (Rule::False, Value::FALSE, vec![]),
            Kind::Nil => (Rule::Nil, Value::Suffix(self.input.len() as u32), vec![]),
            Kind::Var(i) => (Rule::Var, env[*i], vec![]),
            Kind::Base(op, a) => {
                let (v, c) = self.eval(func, a, env, depth + 1)?;
                let r = apply_base(*op, v, self.input).map_err(|e| self.stuck(func, e))?;
                (Rule::Base(*op), r, c.into_iter().collect())
            }
            Kind::If(c, t, f) => {
                let (cv, cn) = self.eval(func, c, env, depth + 1)?;
                let (rule, branch) = match cv {
                    Value::Bool(true) => (Rule::IfTrue, t),
                    Value::Bool(false) => (Rule::IfFalse, f),
                    _ => return Err(self.stuck(func, StuckReason::NonBoolTest)),
                };
                let (v, bn) = self.eval(func, branch, env, depth + 1)?;
                (rule, v, cn.into_iter().chain(bn).collect())
            }
            Kind::Call(target, args) => {
                let mut vals = Vec::with_capacity(args.len());
                let mut kids = Vec::new();
                for a in args {
                    let (v, n) = self.eval(func, a, env, depth + 1)?;
                    vals.push(v);
                    kids.extend(n);
                }
                let (v, body) = self.enter(*target, &vals, depth + 1)?;
                kids.extend(body);
                (Rule::Call, v, kids)
            }
            Kind::Choose(..) => return Err(EvalError::Nondeterministic),
        };
        self.audit.check(value)?;
        let built = self.build.then(|| CompNode {
            rule,
            function: func,
            expr_id: Some(node.id),
            env: env.to_vec(),
            value,
            size: 1 + children.iter().map(|c| c.size).sum::<u64>(),
            children,
        });
        Ok((value, built))
    }

    pub fn stats(&self, result: Value) -> RunStats {
        RunStats {
            engine: Engine::Tree,
            result,
            time_steps: self.clock.steps,
            tree_depth: Some(self.max_depth),
            call_history_length: self.history.length,
            distinct_configs: self.history.seen.len() as u64,
            max_frames: self.max_frames,
            max_space_bits: None,
            cache_entries: None,
            cache_hits: None,
            suffix_checks: self.audit.checks,
        }
    }
}

/// Builds the computation tree of `p` on `x`.
pub fn eval_tree(
    p: &Program,
    x: &BitString,
    budget: Budget,
) -> Result<(CompNode, RunStats), EvalError> {
    require_deterministic(p)?;
    let prog = Lowered::new(p);
    let opts = RunOptions {
        budget,
        ..RunOptions::default()
    };
    let mut ev = TreeEval::new(&prog, x, opts, true);
    let (v, node) = ev.run()?;
    Ok((node.expect("tree requested"), ev.stats(v)))
}

/// Same evaluation order and counters as [`eval_tree`], without materializing the tree.
pub fn measure_tree(p: &Program, x: &BitString, opts: RunOptions) -> Result<RunStats, EvalError> {
    require_deterministic(p)?;
    let prog = Lowered::new(p);
    let mut ev = TreeEval::new(&prog, x, opts, false);
    let (v, _) = ev.run()?;
    Ok(ev.stats(v))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapReport {
    pub overlap: bool,
    pub first_repeated: Option<Config>,
    pub call_history_length: u64,
    pub distinct_configs: u64,
}

/// Runs `p` on `x` and reports whether any configuration is entered twice.
pub fn detect_call_overlap(
    p: &Program,
    x: &BitString,
    budget: Budget,
) -> Result<OverlapReport, EvalError> {
    require_deterministic(p)?;
    let prog = Lowered::new(p);
    let opts = RunOptions {
        budget,
        ..RunOptions::default()
    };
    let mut ev = TreeEval::new(&prog, x, opts, false);
    ev.run()?;
    Ok(OverlapReport {
        overlap: ev.history.first_repeat.is_some(),
        first_repeated: ev
            .history
            .first_repeat
            .as_ref()
            .map(|k| public_config(&prog, k)),
        call_history_length: ev.history.length,
        distinct_configs: ev.history.seen.len() as u64,
    })
}
