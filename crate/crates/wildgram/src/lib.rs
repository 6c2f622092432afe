//! Wildcard pattern matching with average-case filtering.
//!
//! A wildcard (written `?` in the textual syntax) matches every alphabet
//! letter and itself. This crate finds all occurrences of a pattern in a
//! text where wildcards may appear on either side, and does so with
//! sublinear expected cost by filtering windows through q-gram indexes
//! instead of checking every alignment.
//!
//! The pieces:
//!
//! - [`core`]: alphabet, symbols, the correspondence relation, the naive
//!   ground-truth matcher, and the shared window verifier.
//! - [`parse`]: the byte-level pattern/text syntax (`?` = wildcard).
//! - [`qgram`]: the two q-gram dictionaries backing the filters: a
//!   wildcard-tolerant membership index and a per-position match table
//!   with constant-time successor queries.
//! - [`search`]: the sliding-window engines (`wt` for wildcards in the
//!   text, `wp` for wildcards in the pattern) and a block engine driven
//!   by a precomputed probe schedule.
//! - [`inspection`]: the block-probing model: candidate intersection
//!   sets, greedy probe scheduling, an exhaustive optimality oracle,
//!   probe-count lower bounds, and set-cover probe schedules.
//! - [`bench`](mod@bench): seeded instance generators, match-probability
//!   trials, and an instrumented trial runner with CSV output.
//!
//! Every search engine reports the exact same occurrence set as the
//! naive matcher; the benchmark harness enforces this on every trial.

pub mod bench;
pub mod core;
pub mod inspection;
pub mod parse;
pub mod qgram;
pub mod search;

pub use crate::core::{
    correspond, matches_at, naive_search, ver, Alphabet, Pattern, SearchReport, Symbol, Text,
};
pub use crate::search::{choose_params, ParamChoice, Problem, SearchParams};

/// Default cap, in table cells, on dense index allocations.
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 30;
