//! Abstract machine with an explicit stack of activation records.
//!
//! A frame holds the callee's arguments plus its statically sized temporary
//! area; its cost is `(arity + temps) * ⌈log₂(n+3)⌉` bits. With tail-call
//! optimization a call that leaves nothing to do in the caller overwrites the
//! caller's frame instead of pushing a new one.

use super::{
    public_config, require_deterministic, value_bits, Budget, Clock, Engine, EvalError, History,
    RunOptions, RunStats, SuffixAudit,
};
use crate::ir::{apply_base, Kind, Lowered, Node, StuckReason};
use crate::syntax::{BaseOp, Program};
use crate::value::{BitString, Config, Value};

struct Frame {
    func: usize,
    args: Vec<Value>,
    cost: u64,
}

enum Cont<'a> {
    Base(BaseOp),
    Test(&'a Node, &'a Node),
    Args {
        target: usize,
        args: &'a [Node],
        done: Vec<Value>,
    },
    /// Boundary of the topmost frame; `root` marks the entry activation.
    Return {
        root: bool,
    },
}

enum Control<'a> {
    Eval(&'a Node),
    Ret(Value),
}

struct Machine<'a> {
    prog: &'a Lowered,
    input: &'a BitString,
    tco: bool,
    bits: u64,
    clock: Clock,
    audit: SuffixAudit,
    history: History,
    frames: Vec<Frame>,
    conts: Vec<Cont<'a>>,
    space: u64,
    max_space: u64,
    max_frames: u64,
}

impl<'a> Machine<'a> {
    fn frame_cost(&self, func: usize) -> u64 {
        let f = &self.prog.funcs[func];
        (f.arity + f.temps) as u64 * self.bits
    }

    fn stuck(&self, reason: StuckReason) -> EvalError {
        let func = self.frames.last().map(|f| f.func).unwrap_or(0);
        EvalError::stuck(&self.prog.funcs[func].name, reason)
    }

    fn push_frame(&mut self, func: usize, args: Vec<Value>, root: bool) {
        let cost = self.frame_cost(func);
        self.space += cost;
        self.frames.push(Frame { func, args, cost });
        self.conts.push(Cont::Return { root });
        self.max_frames = self.max_frames.max(self.frames.len() as u64);
        self.max_space = self.max_space.max(self.space);
    }

    fn pop_frame(&mut self) {
        let f = self.frames.pop().expect("frame underflow");
        self.space -= f.cost;
    }

    fn call(&mut self, target: usize, args: Vec<Value>) -> Result<Control<'a>, EvalError> {
        self.history.record(target, &args);
        self.audit.check_all(&args)?;
        let mut root = false;
        if self.tco {
            if let Some(&Cont::Return { root: r }) = self.conts.last() {
                self.conts.pop();
                self.pop_frame();
                root = r;
            }
        }
        self.push_frame(target, args, root);
        Ok(Control::Eval(&self.prog.funcs[target].body))
    }

    fn run(&mut self) -> Result<Value, EvalError> {
        // The root "program running" node.
        self.clock.tick()?;
        self.history.record(0, &[Value::Suffix(0)]);
        self.audit.check(Value::Suffix(0))?;
        self.push_frame(0, vec![Value::Suffix(0)], true);
        let mut ctl = Control::Eval(&self.prog.funcs[0].body);
        loop {
            ctl = match ctl {
                Control::Eval(node) => {
                    self.clock.tick()?;
                    match &node.kind {
                        Kind::True => Control::Ret(Value::TRUE),
                        Kind::False => Control::Ret(Value::FALSE),
                        Kind::Nil => Control::Ret(Value::Suffix(self.input.len() as u32)),
                        Kind::Var(i) => Control::Ret(self.frames.last().unwrap().args[*i]),
                        Kind::Base(op, a) => {
                            self.conts.push(Cont::Base(*op));
                            Control::Eval(a)
                        }
                        Kind::If(c, t, f) => {
                            self.conts.push(Cont::Test(t, f));
                            Control::Eval(c)
                        }
                        Kind::Call(target, args) => match args.first() {
                            None => self.call(*target, Vec::new())?,
                            Some(first) => {
                                self.conts.push(Cont::Args {
                                    target: *target,
                                    args,
                                    done: Vec::with_capacity(args.len()),
                                });
                                Control::Eval(first)
                            }
                        },
                        Kind::Choose(..) => return Err(EvalError::Nondeterministic),
                    }
                }
                Control::Ret(v) => {
                    self.audit.check(v)?;
                    match self.conts.pop().expect("continuation underflow") {
                        Cont::Base(op) => {
                            Control::Ret(apply_base(op, v, self.input).map_err(|e| self.stuck(e))?)
                        }
                        Cont::Test(t, f) => match v {
                            Value::Bool(true) => Control::Eval(t),
                            Value::Bool(false) => Control::Eval(f),
                            _ => return Err(self.stuck(StuckReason::NonBoolTest)),
                        },
                        Cont::Args {
                            target,
                            args,
                            mut done,
                        } => {
                            done.push(v);
                            if done.len() == args.len() {
                                self.call(target, done)?
                            } else {
                                let next = &args[done.len()];
                                self.conts.push(Cont::Args { target, args, done });
                                Control::Eval(next)
                            }
                        }
                        Cont::Return { root } => {
                            self.pop_frame();
                            if root {
                                return Ok(v);
                            }
                            Control::Ret(v)
                        }
                    }
                }
            };
        }
    }
}

fn run_machine(
    p: &Program,
    x: &BitString,
    opts: RunOptions,
    tco: bool,
    trace: bool,
) -> Result<(RunStats, Option<Vec<Config>>), EvalError> {
    require_deterministic(p)?;
    let prog = Lowered::new(p);
    let mut m = Machine {
        prog: &prog,
        input: x,
        tco,
        bits: value_bits(x.len()),
        clock: Clock::new(opts.budget),
        audit: SuffixAudit::new(opts.check_suffixes, x),
        history: History {
            trace: trace.then(Vec::new),
            ..History::default()
        },
        frames: Vec::new(),
        conts: Vec::new(),
        space: 0,
        max_space: 0,
        max_frames: 0,
    };
    let result = m.run()?;
    let stats = RunStats {
        engine: if tco { Engine::StackTco } else { Engine::Stack },
        result,
        time_steps: m.clock.steps,
        tree_depth: None,
        call_history_length: m.history.length,
        distinct_configs: m.history.seen.len() as u64,
        max_frames: m.max_frames,
        max_space_bits: Some(m.max_space),
        cache_entries: None,
        cache_hits: None,
        suffix_checks: m.audit.checks,
    };
    let history = m
        .history
        .trace
        .take()
        .map(|t| t.iter().map(|k| public_config(&prog, k)).collect());
    Ok((stats, history))
}

pub fn eval_stack(
    p: &Program,
    x: &BitString,
    budget: Budget,
    tco: bool,
) -> Result<RunStats, EvalError> {
    let opts = RunOptions {
        budget,
        ..RunOptions::default()
    };
    run_machine(p, x, opts, tco, false).map(|(s, _)| s)
}

pub(crate) fn eval_stack_opts(
    p: &Program,
    x: &BitString,
    opts: RunOptions,
    tco: bool,
) -> Result<RunStats, EvalError> {
    run_machine(p, x, opts, tco, false).map(|(s, _)| s)
}

/// Like [`eval_stack`], also returning the call history in call order.
pub fn eval_stack_with_history(
    p: &Program,
    x: &BitString,
    budget: Budget,
    tco: bool,
) -> Result<(RunStats, Vec<Config>), EvalError> {
    let opts = RunOptions {
        budget,
        ..RunOptions::default()
    };
    run_machine(p, x, opts, tco, true).map(|(s, h)| (s, h.unwrap_or_default()))
}
