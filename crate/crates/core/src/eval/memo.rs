//! Evaluation with a cache of `(function, arguments, result)` triples.
//!
//! Every call first looks its configuration up in the cache; on a miss the
//! body is evaluated once and the result stored. Since at most
//! `(3+n)^arity` configurations exist per function, the run takes
//! polynomially many steps. A configuration re-entered while it is still
//! being evaluated can never finish, so that is reported as divergence.

use std::collections::{HashMap, HashSet};

use super::{
    deep, per_function_bound, require_deterministic, ConfigKey, Engine, EvalError, RunOptions,
    RunStats, SuffixAudit,
};
use crate::ir::{apply_base, Kind, Lowered, Node, StuckReason};
use crate::syntax::Program;
use crate::value::{BitString, Value};

struct MemoEval<'a> {
    prog: &'a Lowered,
    input: &'a BitString,
    cache: HashMap<ConfigKey, Value>,
    active: HashSet<ConfigKey>,
    per_function: Vec<u64>,
    limits: Vec<u64>,
    audit: SuffixAudit,
    steps: u64,
    calls: u64,
    hits: u64,
    depth: u64,
    max_depth: u64,
    frames: u64,
    max_frames: u64,
}

impl<'a> MemoEval<'a> {
    fn stuck(&self, func: usize, reason: StuckReason) -> EvalError {
        EvalError::stuck(&self.prog.funcs[func].name, reason)
    }

    fn call(&mut self, target: usize, args: Vec<Value>) -> Result<Value, EvalError> {
        self.calls += 1;
        self.audit.check_all(&args)?;
        let key: ConfigKey = (target, args.into_boxed_slice());
        if let Some(&v) = self.cache.get(&key) {
            self.hits += 1;
            return Ok(v);
        }
        let name = &self.prog.funcs[target].name;
        if !self.active.insert(key.clone()) {
            return Err(EvalError::ReachBoundExceeded {
                function: name.clone(),
                reason: "configuration re-entered while being evaluated".into(),
            });
        }
        self.per_function[target] += 1;
        if self.per_function[target] > self.limits[target] {
            return Err(EvalError::ReachBoundExceeded {
                function: name.clone(),
                reason: format!("more than {} distinct configurations", self.limits[target]),
            });
        }
        self.frames += 1;
        self.max_frames = self.max_frames.max(self.frames);
        let v = self.eval(target, &self.prog.funcs[target].body, &key.1)?;
        self.frames -= 1;
        self.active.remove(&key);
        self.cache.insert(key, v);
        Ok(v)
    }

    fn eval(&mut self, func: usize, node: &'a Node, env: &[Value]) -> Result<Value, EvalError> {
        deep(|| {
            self.steps += 1;
            self.depth += 1;
            self.max_depth = self.max_depth.max(self.depth);
            let v = match &node.kind {
                Kind::True => Value::TRUE,
                Kind::False => Value::FALSE,
                Kind::Nil => Value::Suffix(self.input.len() as u32),
                Kind::Var(i) => env[*i],
                Kind::Base(op, a) => {
                    let v = self.eval(func, a, env)?;
                    apply_base(*op, v, self.input).map_err(|e| self.stuck(func, e))?
                }
                Kind::If(c, t, f) => match self.eval(func, c, env)? {
                    Value::Bool(true) => self.eval(func, t, env)?,
                    Value::Bool(false) => self.eval(func, f, env)?,
                    _ => return Err(self.stuck(func, StuckReason::NonBoolTest)),
                },
                Kind::Call(target, args) => {
                    let mut vals = Vec::with_capacity(args.len());
                    for a in args {
                        vals.push(self.eval(func, a, env)?);
                    }
                    self.call(*target, vals)?
                }
                Kind::Choose(..) => return Err(EvalError::Nondeterministic),
            };
            self.audit.check(v)?;
            self.depth -= 1;
            Ok(v)
        })
    }
}

/// Memoized evaluation. Terminates on every program: nontermination surfaces
/// as [`EvalError::ReachBoundExceeded`].
pub fn eval_memo(p: &Program, x: &BitString) -> Result<RunStats, EvalError> {
    eval_memo_opts(p, x, RunOptions::default())
}

pub(crate) fn eval_memo_opts(
    p: &Program,
    x: &BitString,
    opts: RunOptions,
) -> Result<RunStats, EvalError> {
    require_deterministic(p)?;
    let prog = Lowered::new(p);
    let limits = prog
        .funcs
        .iter()
        .map(|f| per_function_bound(f.arity, x.len()))
        .collect();
    let mut ev = MemoEval {
        prog: &prog,
        input: x,
        cache: HashMap::new(),
        active: HashSet::new(),
        per_function: vec![0; prog.funcs.len()],
        limits,
        audit: SuffixAudit::new(opts.check_suffixes, x),
        steps: 1,
        calls: 0,
        hits: 0,
        depth: 1,
        max_depth: 1,
        frames: 0,
        max_frames: 0,
    };
    let result = ev.call(0, vec![Value::Suffix(0)])?;
    let distinct = ev.per_function.iter().sum();
    Ok(RunStats {
        engine: Engine::Memo,
        result,
        time_steps: ev.steps,
        tree_depth: Some(ev.max_depth),
        call_history_length: ev.calls,
        distinct_configs: distinct,
        max_frames: ev.max_frames,
        max_space_bits: None,
        cache_entries: Some(ev.cache.len() as u64),
        cache_hits: Some(ev.hits),
        suffix_checks: ev.audit.checks,
    })
}
