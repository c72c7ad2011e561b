//! One flat record per run, shared by every engine, for CSV/JSON output.

use serde::Serialize;

use crate::eval::{
    eval_memo_opts, eval_stack_opts, measure_tree, reach_bound, Engine, EvalError, RunOptions,
    RunStats,
};
use crate::nondet::{confirm_log2_with, ncf_search_steps, saturate, ConfirmError};
use crate::syntax::Program;
use crate::value::{BitString, Value};

/// Columns, in output order. Engine-specific fields are empty when the
/// engine does not measure them. For `ncf-saturate`, `distinct_configs` is
/// the number of configurations reached and `cache_entries` the number of
/// derived triples.
pub const CSV_COLUMNS: [&str; 19] = [
    "engine",
    "program",
    "input_len",
    "status",
    "result",
    "time_steps",
    "tree_depth",
    "call_history_length",
    "distinct_configs",
    "reach_bound",
    "overlap",
    "max_frames",
    "max_space_bits",
    "cache_entries",
    "cache_hits",
    "suffix_checks",
    "max_confirm_frames",
    "tree_size",
    "bound_ok",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub engine: Engine,
    pub program: String,
    pub input_len: usize,
    /// `ok`, `timeout`, `stuck`, `reach-bound`, `suffix-violation` or `error`.
    pub status: String,
    pub result: Option<String>,
    pub time_steps: Option<u64>,
    pub tree_depth: Option<u64>,
    pub call_history_length: Option<u64>,
    pub distinct_configs: Option<u64>,
    pub reach_bound: u64,
    pub overlap: Option<bool>,
    pub max_frames: Option<u64>,
    pub max_space_bits: Option<u64>,
    pub cache_entries: Option<u64>,
    pub cache_hits: Option<u64>,
    pub suffix_checks: Option<u64>,
    pub max_confirm_frames: Option<u64>,
    pub tree_size: Option<u64>,
    pub bound_ok: Option<bool>,
    #[serde(skip)]
    pub error: Option<String>,
}

impl RunRecord {
    fn new(engine: Engine, program: &str, p: &Program, x: &BitString) -> RunRecord {
        RunRecord {
            engine,
            program: program.to_string(),
            input_len: x.len(),
            status: "ok".into(),
            result: None,
            time_steps: None,
            tree_depth: None,
            call_history_length: None,
            distinct_configs: None,
            reach_bound: reach_bound(p, x.len()),
            overlap: None,
            max_frames: None,
            max_space_bits: None,
            cache_entries: None,
            cache_hits: None,
            suffix_checks: None,
            max_confirm_frames: None,
            tree_size: None,
            bound_ok: None,
            error: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Timeout or stuck: the run produced no value.
    pub fn is_failure(&self) -> bool {
        matches!(self.status.as_str(), "timeout" | "stuck" | "reach-bound")
    }

    fn fail(mut self, e: &EvalError) -> RunRecord {
        self.status = match e {
            EvalError::Timeout { .. } => "timeout",
            EvalError::Stuck { .. } => "stuck",
            EvalError::ReachBoundExceeded { .. } => "reach-bound",
            EvalError::SuffixViolation { .. } => "suffix-violation",
            EvalError::Nondeterministic => "error",
        }
        .into();
        self.error = Some(e.to_string());
        self
    }

    fn with_stats(mut self, s: &RunStats, x: &BitString) -> RunRecord {
        self.result = Some(s.result.render(x));
        self.time_steps = Some(s.time_steps);
        self.tree_depth = s.tree_depth;
        self.call_history_length = Some(s.call_history_length);
        self.distinct_configs = Some(s.distinct_configs);
        self.overlap = Some(s.overlap());
        self.max_frames = Some(s.max_frames);
        self.max_space_bits = s.max_space_bits;
        self.cache_entries = s.cache_entries;
        self.cache_hits = s.cache_hits;
        self.suffix_checks = Some(s.suffix_checks);
        self
    }
}

/// Whether `engine` can run `p`.
pub fn engine_accepts(engine: Engine, p: &Program) -> bool {
    engine.is_nondeterministic() || p.is_deterministic()
}

/// Runs `engine` and folds the outcome, successful or not, into a record.
pub fn run_engine(
    p: &Program,
    program: &str,
    x: &BitString,
    engine: Engine,
    opts: RunOptions,
) -> RunRecord {
    let rec = RunRecord::new(engine, program, p, x);
    let stats = match engine {
        Engine::Tree => measure_tree(p, x, opts),
        Engine::Stack => eval_stack_opts(p, x, opts, false),
        Engine::StackTco => eval_stack_opts(p, x, opts, true),
        Engine::Memo => eval_memo_opts(p, x, opts),
        Engine::NcfSearch => {
            return match ncf_search_steps(p, x, opts.budget) {
                Ok((accepted, steps)) => RunRecord {
                    result: Some(Value::Bool(accepted).render(x)),
                    time_steps: Some(steps),
                    ..rec
                },
                Err(e) => rec.fail(&e),
            }
        }
        Engine::NcfSaturate => {
            let (_, s) = saturate(p, x);
            return RunRecord {
                result: Some(Value::Bool(s.accepted).render(x)),
                time_steps: Some(s.evaluations),
                distinct_configs: Some(s.configs),
                cache_entries: Some(s.triples),
                ..rec
            };
        }
        Engine::Confirm => {
            return match confirm_log2_with(p, x, opts.budget) {
                Ok(c) => RunRecord {
                    result: Some(c.result.render(x)),
                    time_steps: Some(c.tree_size),
                    max_confirm_frames: Some(c.max_confirm_frames),
                    tree_size: Some(c.tree_size),
                    bound_ok: Some(c.bound_ok),
                    ..rec
                },
                Err(ConfirmError::Eval(e)) => rec.fail(&e),
                Err(e @ ConfirmError::OracleMismatch { .. }) => RunRecord {
                    status: "error".into(),
                    error: Some(e.to_string()),
                    ..rec
                },
            }
        }
    };
    match stats {
        Ok(s) => rec.with_stats(&s, x),
        Err(e) => rec.fail(&e),
    }
}
