//! Deciders for programs that may contain `choose`, and the confirmation replay.
//!
//! A nondeterministic program accepts an input when at least one resolution of
//! its choices evaluates the entry to `True`.

mod confirm;
mod saturate;
mod search;

pub use confirm::{ceil_log2, confirm_log2, confirm_log2_with, ConfirmError, ConfirmStats};
pub use saturate::{ncf_decide_saturate, saturate, SaturationStats, TripleStore};
pub use search::{ncf_decide_search, ncf_search_steps};
