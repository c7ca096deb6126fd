//! The evaluator: compiled terms, values, and builtins.

pub mod compile;
pub mod eval;
pub mod prime;
pub mod value;

pub use compile::{Program, Term};
pub use eval::{match_pattern, Env, Limits, Machine, DEFAULT_MAX_DEPTH};
pub use prime::is_prime;
pub use value::{compare, make_bag, make_set, show, values_equal, PropValue, Value};
