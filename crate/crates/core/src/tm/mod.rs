//! One-tape Turing machines, a direct executor, and a compiler from
//! time-bounded machines to cons-free programs.

mod compile;
mod machine;

pub use compile::{compile_tm, counter_walk_program, CounterShape};
pub use machine::{
    run_tm, Action, Move, Symbol, TmError, TotalState, TuringMachine, CONTAINS_11, FIRST_EQ_LAST,
};
