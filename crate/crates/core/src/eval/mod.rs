//! Deterministic evaluation engines.
//!
//! All engines count time the same way: one step per inference-rule instance
//! in the computation tree, including axioms and the root "program running"
//! node. They differ in what else they keep track of.

mod memo;
mod stack;
mod tree;

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ir::{Lowered, StuckReason};
use crate::syntax::Program;
use crate::value::{BitString, Config, Value};

pub use memo::eval_memo;
pub(crate) use memo::eval_memo_opts;
pub(crate) use stack::eval_stack_opts;
pub use stack::{eval_stack, eval_stack_with_history};
pub use tree::{detect_call_overlap, eval_tree, measure_tree, CompNode, OverlapReport, Rule};

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

/// Step limit for a run. Exceeding `max_steps` raises [`EvalError::Timeout`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
}

impl Budget {
    pub fn new(max_steps: u64) -> Budget {
        Budget { max_steps }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_MAX_STEPS)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("step budget of {max_steps} exhausted")]
    Timeout { max_steps: u64 },
    #[error("stuck in `{function}`: {reason}")]
    Stuck { function: String, reason: String },
    #[error("reach bound exceeded in `{function}`: {reason}")]
    ReachBoundExceeded { function: String, reason: String },
    #[error("value {value:?} is outside the range of variation")]
    SuffixViolation { value: Value },
    #[error("this engine requires a program without `choose`")]
    Nondeterministic,
}

impl EvalError {
    /// Timeout and reach-bound errors both mean "did not terminate (in time)".
    pub fn is_divergence(&self) -> bool {
        matches!(
            self,
            EvalError::Timeout { .. } | EvalError::ReachBoundExceeded { .. }
        )
    }

    pub(crate) fn stuck(function: &str, reason: StuckReason) -> EvalError {
        EvalError::Stuck {
            function: function.to_string(),
            reason: reason.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Tree,
    Stack,
    StackTco,
    Memo,
    NcfSearch,
    NcfSaturate,
    Confirm,
}

impl Engine {
    pub const ALL: [Engine; 7] = [
        Engine::Tree,
        Engine::Stack,
        Engine::StackTco,
        Engine::Memo,
        Engine::NcfSearch,
        Engine::NcfSaturate,
        Engine::Confirm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Tree => "tree",
            Engine::Stack => "stack",
            Engine::StackTco => "stack-tco",
            Engine::Memo => "memo",
            Engine::NcfSearch => "ncf-search",
            Engine::NcfSaturate => "ncf-saturate",
            Engine::Confirm => "confirm",
        }
    }

    pub fn from_name(s: &str) -> Option<Engine> {
        Engine::ALL.into_iter().find(|e| e.name() == s)
    }

    /// Whether the engine accepts programs containing `choose`.
    pub fn is_nondeterministic(self) -> bool {
        matches!(self, Engine::NcfSearch | Engine::NcfSaturate)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Knobs shared by the engines.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub budget: Budget,
    /// Check every produced value and binding against the range of variation.
    pub check_suffixes: bool,
}

/// Counters collected by one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub engine: Engine,
    pub result: Value,
    /// Number of computation-tree nodes visited, root included.
    pub time_steps: u64,
    pub tree_depth: Option<u64>,
    pub call_history_length: u64,
    pub distinct_configs: u64,
    pub max_frames: u64,
    pub max_space_bits: Option<u64>,
    pub cache_entries: Option<u64>,
    pub cache_hits: Option<u64>,
    /// Number of values checked by the suffix-property audit (0 when disabled).
    pub suffix_checks: u64,
}

impl RunStats {
    pub fn overlap(&self) -> bool {
        self.call_history_length > self.distinct_configs
    }
}

/// `Σ_f (3+n)^arity(f)`: the number of configurations a run can possibly reach.
/// Saturates at `u64::MAX`.
pub fn reach_bound(p: &Program, n: usize) -> u64 {
    p.definitions()
        .iter()
        .map(|d| per_function_bound(d.arity(), n))
        .fold(0u64, u64::saturating_add)
}

pub(crate) fn per_function_bound(arity: usize, n: usize) -> u64 {
    let base = 3 + n as u64;
    let mut acc = 1u64;
    for _ in 0..arity {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// `⌈log₂(n+3)⌉`: bits needed for one value.
pub fn value_bits(n: usize) -> u64 {
    let k = n as u64 + 3;
    64 - (k - 1).leading_zeros() as u64
}

pub(crate) type ConfigKey = (usize, Box<[Value]>);

pub(crate) fn public_config(prog: &Lowered, key: &ConfigKey) -> Config {
    Config {
        function: prog.funcs[key.0].name.clone(),
        args: key.1.to_vec(),
    }
}

/// Records the call history: its length, the distinct configurations, and the
/// first configuration seen twice.
#[derive(Default)]
pub(crate) struct History {
    pub length: u64,
    pub seen: HashSet<ConfigKey>,
    pub first_repeat: Option<ConfigKey>,
    pub trace: Option<Vec<ConfigKey>>,
}

impl History {
    pub fn record(&mut self, func: usize, args: &[Value]) {
        self.length += 1;
        let key: ConfigKey = (func, args.into());
        if let Some(trace) = &mut self.trace {
            trace.push(key.clone());
        }
        if !self.seen.insert(key.clone()) && self.first_repeat.is_none() {
            self.first_repeat = Some(key);
        }
    }
}

/// Audits values against the range of variation when enabled.
pub(crate) struct SuffixAudit {
    enabled: bool,
    n: u32,
    pub checks: u64,
}

impl SuffixAudit {
    pub fn new(enabled: bool, input: &BitString) -> SuffixAudit {
        SuffixAudit {
            enabled,
            n: input.len() as u32,
            checks: 0,
        }
    }

    #[inline]
    pub fn check(&mut self, v: Value) -> Result<(), EvalError> {
        if !self.enabled {
            return Ok(());
        }
        self.checks += 1;
        match v {
            Value::Suffix(k) if k > self.n => Err(EvalError::SuffixViolation { value: v }),
            _ => Ok(()),
        }
    }

    pub fn check_all(&mut self, vs: &[Value]) -> Result<(), EvalError> {
        vs.iter().try_for_each(|&v| self.check(v))
    }
}

/// Step counter enforcing a [`Budget`].
pub(crate) struct Clock {
    pub steps: u64,
    max: u64,
}

impl Clock {
    pub fn new(budget: Budget) -> Clock {
        Clock {
            steps: 0,
            max: budget.max_steps,
        }
    }

    #[inline]
    pub fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.max {
            Err(EvalError::Timeout {
                max_steps: self.max,
            })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn require_deterministic(p: &Program) -> Result<(), EvalError> {
    if p.is_deterministic() {
        Ok(())
    } else {
        Err(EvalError::Nondeterministic)
    }
}

/// Grows the native stack on demand so deep object-level recursion does not
/// overflow it.
#[inline]
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(128 * 1024, 8 * 1024 * 1024, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_program;

    #[test]
    fn reach_bound_formula() {
        let single = parse_program("f x = g x x\ng a b = a").unwrap();
        // (3+5)^1 + (3+5)^2
        assert_eq!(reach_bound(&single, 5), 8 + 64);
        let parity = parse_program(
            "entry x = even x\neven z = if (null z) then True else not(even(tail z))",
        )
        .unwrap();
        assert_eq!(reach_bound(&parity, 4), 14);
        let nullary = parse_program("main x = c\nc = True").unwrap();
        assert_eq!(reach_bound(&nullary, 10), 13 + 1);
    }

    #[test]
    fn value_bits_is_ceil_log2() {
        assert_eq!(value_bits(0), 2); // 3 values
        assert_eq!(value_bits(1), 2); // 4 values
        assert_eq!(value_bits(2), 3); // 5 values
        assert_eq!(value_bits(5), 3); // 8 values
        assert_eq!(value_bits(6), 4); // 9 values
        assert_eq!(value_bits(64), 7); // 67 values
    }

    #[test]
    fn engine_names_round_trip() {
        for e in Engine::ALL {
            assert_eq!(Engine::from_name(e.name()), Some(e));
        }
    }

    #[test]
    fn clock_allows_exactly_the_budget() {
        let mut c = Clock::new(Budget::new(3));
        assert!(c.tick().is_ok() && c.tick().is_ok() && c.tick().is_ok());
        assert_eq!(c.tick(), Err(EvalError::Timeout { max_steps: 3 }));
    }
}
