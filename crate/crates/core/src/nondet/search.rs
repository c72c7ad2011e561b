//! Exhaustive backtracking over `choose` points.

use crate::eval::{deep, Budget, Clock, EvalError};
use crate::ir::{apply_base, Kind, Lowered, Node};
use crate::syntax::Program;
use crate::value::{BitString, Value};

/// Continuation result: `true` once an accepting run has been found.
type Res = Result<bool, EvalError>;

struct Search<'a> {
    prog: &'a Lowered,
    input: &'a BitString,
    clock: Clock,
}

impl<'a> Search<'a> {
    /// Feeds every value `node` can evaluate to into `k`, depth first, left
    /// choice before right. Paths that get stuck produce no value.
    fn eval(
        &mut self,
        node: &'a Node,
        env: &[Value],
        k: &mut dyn FnMut(&mut Self, Value) -> Res,
    ) -> Res {
        deep(|| {
            self.clock.tick()?;
            match &node.kind {
                Kind::True => k(self, Value::TRUE),
                Kind::False => k(self, Value::FALSE),
                Kind::Nil => k(self, Value::Suffix(self.input.len() as u32)),
                Kind::Var(i) => k(self, env[*i]),
                Kind::Base(op, a) => {
                    self.eval(a, env, &mut |s, v| match apply_base(*op, v, s.input) {
                        Ok(r) => k(s, r),
                        Err(_) => Ok(false),
                    })
                }
                Kind::If(c, t, f) => self.eval(c, env, &mut |s, v| match v {
                    Value::Bool(true) => s.eval(t, env, k),
                    Value::Bool(false) => s.eval(f, env, k),
                    Value::Suffix(_) => Ok(false),
                }),
                Kind::Choose(l, r) => {
                    if self.eval(l, env, k)? {
                        return Ok(true);
                    }
                    self.eval(r, env, k)
                }
                Kind::Call(target, args) => {
                    let body = &self.prog.funcs[*target].body;
                    self.eval_args(args, Vec::with_capacity(args.len()), env, &mut |s, vals| {
                        s.eval(body, &vals, k)
                    })
                }
            }
        })
    }

    fn eval_args(
        &mut self,
        args: &'a [Node],
        done: Vec<Value>,
        env: &[Value],
        k: &mut dyn FnMut(&mut Self, Vec<Value>) -> Res,
    ) -> Res {
        match args.get(done.len()) {
            None => k(self, done),
            Some(next) => self.eval(next, env, &mut |s, v| {
                let mut more = done.clone();
                more.push(v);
                s.eval_args(args, more, env, k)
            }),
        }
    }
}

/// Decides acceptance by trying every resolution of the `choose` points.
///
/// Returns `Timeout` if the budget runs out before an accepting run is found.
pub fn ncf_decide_search(p: &Program, x: &BitString, budget: Budget) -> Result<bool, EvalError> {
    let prog = Lowered::new(p);
    let mut s = Search {
        prog: &prog,
        input: x,
        clock: Clock::new(budget),
    };
    s.clock.tick()?;
    let env = [Value::Suffix(0)];
    s.eval(&prog.funcs[0].body, &env, &mut |_, v| Ok(v == Value::TRUE))
}

/// Like [`ncf_decide_search`], also returning the number of steps explored.
pub fn ncf_search_steps(
    p: &Program,
    x: &BitString,
    budget: Budget,
) -> Result<(bool, u64), EvalError> {
    let prog = Lowered::new(p);
    let mut s = Search {
        prog: &prog,
        input: x,
        clock: Clock::new(budget),
    };
    s.clock.tick()?;
    let env = [Value::Suffix(0)];
    let accepted = s.eval(&prog.funcs[0].body, &env, &mut |_, v| Ok(v == Value::TRUE))?;
    Ok((accepted, s.clock.steps))
}
