//! Disco: a small functional language for discrete mathematics, with a
//! numeric subtyping lattice, equirecursive types, exact arithmetic, and
//! built-in property testing.

pub mod builtins;
pub mod desugar;
pub mod error;
pub mod infer;
pub mod interp;
pub mod oeis;
pub mod prop;
pub mod repl;
pub mod server;
pub mod syntax;
pub mod types;

pub use error::{DiscoError, Result, Span};
