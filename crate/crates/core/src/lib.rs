//! A laboratory for cons-free first-order programs.
//!
//! Programs have no data constructors: values are booleans and suffixes of
//! the input bit string. The crate provides a parser and pretty-printer, the
//! tail-call classifier, several instrumented evaluators (computation tree,
//! stack machine with optional tail-call optimization, memoization),
//! nondeterministic deciders, a monotone-circuit-value bundle, and a compiler
//! from polynomial-time Turing machines to cons-free programs.

pub mod analysis;
pub mod corpus;
pub mod eval;
pub mod gen;
pub(crate) mod ir;
pub mod mcv;
pub mod nondet;
pub mod parse;
pub mod pretty;
pub mod report;
pub mod syntax;
pub mod tm;
pub mod value;

pub use analysis::{alpha, call_shape_report, is_cftr, AlphaClass, CallShape, CallShapeReport};
pub use eval::{
    detect_call_overlap, eval_memo, eval_stack, eval_tree, reach_bound, Budget, CompNode, Engine,
    EvalError, Rule, RunOptions, RunStats,
};
pub use nondet::{confirm_log2, ncf_decide_saturate, ncf_decide_search, ConfirmStats};
pub use parse::{parse_input, parse_ncf_program, parse_program, ParseError};
pub use pretty::pretty_print;
pub use report::{run_engine, RunRecord};
pub use syntax::{BaseOp, Definition, Dialect, Expr, Program, ValidationError};
pub use value::{BitString, Config, Value};
