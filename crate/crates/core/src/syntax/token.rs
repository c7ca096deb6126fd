use crate::error::Span;

use super::ast::BinOp;

/// Token kinds. Every synonym of an operator, keyword or type name lexes to
/// the same kind; the original spelling survives only in [`Token::text`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Nat,
    Str,
    Char,
    /// `||| text` at the start of a line.
    DocLine,
    /// `!!! expr` at the start of a line.
    TestLine,
    /// `~op~`
    Section(BinOp),

    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    CaseOpen,
    CaseClose,
    Comma,
    Dot,
    DotDot,
    Colon,
    Bar,
    Equals,
    Arrow,
    LArrow,
    Backslash,
    Lambda,

    Plus,
    Minus,
    Monus,
    Star,
    Slash,
    Caret,
    Mod,
    Divides,
    EqEq,
    Neq,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
    Not,
    Implies,
    Union,
    Intersect,
    Cons,

    Let,
    In,
    If,
    When,
    Otherwise,
    Is,
    Forall,
    Exists,
    TypeKw,
    Import,
    True,
    False,
    UnitVal,
    Left,
    Right,

    TyNat,
    TyInt,
    TyFrac,
    TyRat,
    TyBool,
    TyChar,
    TyUnit,
    TyProp,
    TyString,
    TyList,
    TyBag,
    TySet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Identifier name, literal digits, decoded string/char contents, the
    /// text after a `|||`/`!!!` marker, or the source spelling otherwise.
    pub text: String,
    pub span: Span,
}

impl TokenKind {
    /// Binary operator denoted by this token in expression position.
    pub fn binop(self) -> Option<BinOp> {
        use TokenKind::*;
        Some(match self {
            Plus => BinOp::Add,
            Minus => BinOp::Sub,
            Monus => BinOp::Monus,
            Star => BinOp::Mul,
            Slash => BinOp::Div,
            Caret => BinOp::Pow,
            Mod => BinOp::Mod,
            Divides => BinOp::Divides,
            EqEq => BinOp::Eq,
            Neq => BinOp::Neq,
            Lt => BinOp::Lt,
            Gt => BinOp::Gt,
            Le => BinOp::Le,
            Ge => BinOp::Ge,
            And => BinOp::And,
            Or => BinOp::Or,
            Implies | Arrow => BinOp::Implies,
            Union => BinOp::Union,
            Intersect => BinOp::Intersect,
            Backslash => BinOp::Diff,
            Cons => BinOp::Cons,
            _ => return None,
        })
    }
}

pub(crate) fn keyword(word: &str) -> Option<TokenKind> {
    use TokenKind::*;
    Some(match word {
        "let" => Let,
        "in" => In,
        "if" => If,
        "when" => When,
        "otherwise" => Otherwise,
        "is" => Is,
        "forall" => Forall,
        "exists" => Exists,
        "type" => TypeKw,
        "import" => Import,
        "true" | "True" => True,
        "false" | "False" => False,
        "unit" => UnitVal,
        "left" => Left,
        "right" => Right,
        "not" => Not,
        "and" => And,
        "or" => Or,
        "implies" => Implies,
        "mod" => Mod,
        "divides" => Divides,
        "union" => Union,
        "intersect" => Intersect,
        "N" | "Nat" | "Natural" => TyNat,
        "Z" | "Int" | "Integer" => TyInt,
        "F" | "Frac" | "Fractional" => TyFrac,
        "Q" | "Rational" => TyRat,
        "Bool" | "Boolean" => TyBool,
        "Char" => TyChar,
        "Unit" => TyUnit,
        "Prop" => TyProp,
        "String" => TyString,
        "List" => TyList,
        "Bag" => TyBag,
        "Set" => TySet,
        _ => return None,
    })
}

/// Symbolic tokens, longest spellings first.
pub(crate) const SYMBOLS: &[(&str, TokenKind)] = {
    use TokenKind::*;
    &[
        ("==>", Implies),
        ("{?", CaseOpen),
        ("?}", CaseClose),
        ("..", DotDot),
        ("/\\", And),
        ("\\/", Or),
        ("&&", And),
        ("||", Or),
        ("==", EqEq),
        ("/=", Neq),
        ("!=", Neq),
        ("<=", Le),
        (">=", Ge),
        ("->", Arrow),
        ("<-", LArrow),
        ("::", Cons),
        (".-", Monus),
        ("=", Equals),
        ("<", Lt),
        (">", Gt),
        ("+", Plus),
        ("-", Minus),
        ("*", Star),
        ("/", Slash),
        ("^", Caret),
        ("%", Mod),
        ("(", LParen),
        (")", RParen),
        ("[", LBracket),
        ("]", RBracket),
        ("{", LBrace),
        ("}", RBrace),
        (",", Comma),
        (".", Dot),
        (":", Colon),
        ("|", Bar),
        ("\\", Backslash),
        ("∧", And),
        ("∨", Or),
        ("¬", Not),
        ("→", Arrow),
        ("⟹", Implies),
        ("←", LArrow),
        ("×", Star),
        ("·", Star),
        ("≤", Le),
        ("≥", Ge),
        ("≠", Neq),
        ("∪", Union),
        ("∩", Intersect),
        ("∀", Forall),
        ("∃", Exists),
        ("∈", In),
        ("λ", Lambda),
        ("ℕ", TyNat),
        ("ℤ", TyInt),
        ("𝔽", TyFrac),
        ("ℚ", TyRat),
        ("𝔹", TyBool),
    ]
};
