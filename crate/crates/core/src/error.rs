//! Errors shared by every stage of the pipeline.
//!
//! Each error class maps to a fixed documentation slug; the REPL renders
//! the message together with the reference URL built from it.

use std::fmt;

use thiserror::Error;

/// Prefix of every documentation link the REPL prints.
pub const DOC_URL_PREFIX: &str = "https://disco-lang.readthedocs.io/en/latest/reference/";

/// A (line, column) position in source text, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscoError {
    #[error("lexical error at {span}: {message}")]
    Lex { span: Span, message: String },

    #[error("parse error at {span}: {message}")]
    Parse { span: Span, message: String },

    #[error("the definition of {name} has clauses with different numbers of arguments.")]
    ArityMismatch { name: String },

    #[error("there is nothing named {0}.")]
    Unbound(String),

    #[error("the shape of two types does not match.")]
    ShapeMismatch,

    #[error("the type {ty} does not support {operation}.")]
    Qualifier { ty: String, operation: String },

    #[error("the type {sub} is not a subtype of {sup}.")]
    Unsatisfiable { sub: String, sup: String },

    #[error("an infinite type would be required.")]
    InfiniteType,

    #[error("the type synonym {0} is not defined.")]
    UnboundSynonym(String),

    #[error("the type synonym {0} refers to itself without a type constructor in between.")]
    NonContractive(String),

    #[error("division by zero.")]
    DivisionByZero,

    #[error("an ellipsis with a zero step never reaches its end point.")]
    ZeroStride,

    #[error("no case applies (non-exhaustive match).")]
    NonExhaustive,

    #[error("functions cannot be compared.")]
    ComparisonOfFunctions,

    #[error("recursion limit of {0} nested calls exceeded.")]
    RecursionLimit(usize),

    #[error("evaluation took too long (limit {0} ms).")]
    Timeout(u64),

    #[error("values of type {0} cannot be enumerated for testing.")]
    CannotEnumerate(String),

    #[error("cannot decide {0} over an infinite domain.")]
    CannotDecide(String),

    #[error("exponent too large: {0}.")]
    ExponentTooLarge(String),

    #[error("unknown module {0}.")]
    UnknownModule(String),

    #[error("{0}")]
    Network(String),

    #[error("{0}")]
    Io(String),

    #[error("definitions can only be entered in a file; put it in a .disco file and use :load.")]
    ReplDefinition,
}

impl DiscoError {
    pub fn parse(span: Span, message: impl Into<String>) -> Self {
        DiscoError::Parse {
            span,
            message: message.into(),
        }
    }

    pub fn lex(span: Span, message: impl Into<String>) -> Self {
        DiscoError::Lex {
            span,
            message: message.into(),
        }
    }

    /// Documentation slug for this error class.
    pub fn slug(&self) -> &'static str {
        use DiscoError::*;
        match self {
            Lex { .. } | Parse { .. } | ReplDefinition => "parse",
            ArityMismatch { .. } => "arity-mismatch",
            Unbound(_) => "unbound",
            ShapeMismatch => "shape-mismatch",
            Qualifier { .. } => "qualifier-error",
            Unsatisfiable { .. } => "unsatisfiable",
            InfiniteType => "infinite-type",
            UnboundSynonym(_) => "unbound-type",
            NonContractive(_) => "non-contractive",
            DivisionByZero => "division-by-zero",
            ZeroStride => "zero-stride",
            NonExhaustive => "non-exhaustive",
            ComparisonOfFunctions => "comparison-of-functions",
            RecursionLimit(_) | Timeout(_) => "recursion-limit",
            CannotEnumerate(_) => "cannot-enumerate",
            CannotDecide(_) => "cannot-decide",
            ExponentTooLarge(_) => "exponentiation",
            UnknownModule(_) => "import",
            Network(_) => "network",
            Io(_) => "load",
        }
    }

    pub fn doc_url(&self) -> String {
        doc_url(self.slug())
    }

    /// True for errors raised while evaluating (as opposed to loading or checking).
    pub fn is_runtime(&self) -> bool {
        use DiscoError::*;
        matches!(
            self,
            DivisionByZero
                | ZeroStride
                | NonExhaustive
                | ComparisonOfFunctions
                | RecursionLimit(_)
                | Timeout(_)
                | ExponentTooLarge(_)
        )
    }
}

pub fn doc_url(slug: &str) -> String {
    format!("{DOC_URL_PREFIX}{slug}.html")
}

pub type Result<T, E = DiscoError> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attested_urls() {
        assert_eq!(
            DiscoError::ShapeMismatch.doc_url(),
            "https://disco-lang.readthedocs.io/en/latest/reference/shape-mismatch.html"
        );
        assert_eq!(
            DiscoError::Unbound("x".into()).doc_url(),
            "https://disco-lang.readthedocs.io/en/latest/reference/unbound.html"
        );
        assert_eq!(
            DiscoError::DivisionByZero.doc_url(),
            "https://disco-lang.readthedocs.io/en/latest/reference/division-by-zero.html"
        );
    }

    #[test]
    fn unbound_message() {
        assert_eq!(
            DiscoError::Unbound("x".into()).to_string(),
            "there is nothing named x."
        );
    }
}
