//! Lexing, parsing, and pretty-printing.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod token;

pub use ast::*;
pub use lexer::tokenize;
pub use parser::{
    expr_to_pattern, parse_expr, parse_module, parse_repl_input, parse_type, resolve_juxtaposition, Command,
    ReplInput,
};
pub use pretty::{pretty_expr, pretty_pattern, pretty_with, PrettyOptions};
