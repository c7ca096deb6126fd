//! Surface syntax trees.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Span;
use crate::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Monus,
    Mul,
    Div,
    Pow,
    Mod,
    Divides,
    Eq,
    Neq,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
    Implies,
    Union,
    Intersect,
    Diff,
    Cons,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    None,
}

impl BinOp {
    pub const ALL: [BinOp; 21] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Monus,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Pow,
        BinOp::Mod,
        BinOp::Divides,
        BinOp::Eq,
        BinOp::Neq,
        BinOp::Lt,
        BinOp::Gt,
        BinOp::Le,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
        BinOp::Implies,
        BinOp::Union,
        BinOp::Intersect,
        BinOp::Diff,
        BinOp::Cons,
    ];

    /// Precedence level; larger binds tighter.
    pub fn precedence(self) -> u8 {
        use BinOp::*;
        match self {
            Implies => 1,
            Or => 2,
            And => 3,
            Eq | Neq | Lt | Gt | Le | Ge | Divides => 5,
            Cons => 6,
            Add | Sub | Monus | Union | Diff => 7,
            Mul | Div | Mod | Intersect => 8,
            Pow => 10,
        }
    }

    pub fn assoc(self) -> Assoc {
        use BinOp::*;
        match self {
            Implies | Or | And | Cons | Pow => Assoc::Right,
            Eq | Neq | Lt | Gt | Le | Ge | Divides => Assoc::None,
            _ => Assoc::Left,
        }
    }

    /// Canonical spelling. Only set operators have distinct Unicode forms.
    pub fn symbol(self, unicode: bool) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Monus => ".-",
            Mul => "*",
            Div => "/",
            Pow => "^",
            Mod => "mod",
            Divides => "divides",
            Eq => "==",
            Neq => "/=",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            And => "/\\",
            Or => "\\/",
            Implies => "==>",
            Union if unicode => "∪",
            Union => "union",
            Intersect if unicode => "∩",
            Intersect => "intersect",
            Diff => "\\",
            Cons => "::",
        }
    }

    pub fn is_comparison(self) -> bool {
        self.assoc() == Assoc::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

/// Unary minus binds tighter than `*` but looser than `^`.
pub const NEG_PRECEDENCE: u8 = 9;
pub const NOT_PRECEDENCE: u8 = 4;
/// Application and juxtaposition.
pub const APP_PRECEDENCE: u8 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollKind {
    List,
    Bag,
    Set,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    Nat(BigUint),
    Char(char),
    Str(String),
    Unit,
    Bool(bool),
    Lambda(String, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    UnOp(UnOp, Box<Expr>),
    /// At least two components; `(a, b, c)` is `(a, (b, c))` at the type level.
    Tuple(Vec<Expr>),
    Inj(Side, Box<Expr>),
    Case(Vec<Branch>),
    Let(Vec<(String, Expr)>, Box<Expr>),
    Comprehension(CollKind, Box<Expr>, Vec<Qual>),
    Ellipsis(CollKind, Box<Expr>, Option<Box<Expr>>, Box<Expr>),
    Container(CollKind, Vec<Expr>),
    AbsOrCard(Box<Expr>),
    Quant(Quantifier, Vec<(String, Type)>, Box<Expr>),
    Section(BinOp),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub body: Expr,
    pub guards: Vec<Guard>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Guard {
    Bool(Expr),
    Pat(Expr, Pattern),
    Otherwise,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Qual {
    Gen(String, Expr),
    Filter(Expr),
    Let(String, Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    Var(String),
    Wild,
    Unit,
    Bool(bool),
    Nat(BigUint),
    Char(char),
    Tuple(Vec<Pattern>),
    Inj(Side, Box<Pattern>),
    List(Vec<Pattern>),
    Cons(Box<Pattern>, Box<Pattern>),
    Arith(ArithPattern),
}

/// A one-variable linear pattern such as `2n+1` or `n/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithPattern {
    pub var: String,
    pub form: ArithForm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArithForm {
    /// `k n`
    Times(BigUint),
    /// `k n + c`
    TimesPlus(BigUint, BigUint),
    /// `k n - c`
    TimesMinus(BigUint, BigUint),
    /// `n + c`
    Plus(BigUint),
    /// `n - c`
    Minus(BigUint),
    /// `n / k`
    Over(BigUint),
}

impl ArithPattern {
    /// The pattern denotes `coefficient * var + constant`.
    pub fn coefficient(&self) -> BigRational {
        use ArithForm::*;
        match &self.form {
            Times(k) | TimesPlus(k, _) | TimesMinus(k, _) => ratio(k),
            Plus(_) | Minus(_) => BigRational::one(),
            Over(k) => ratio(k).recip(),
        }
    }

    pub fn constant(&self) -> BigRational {
        use ArithForm::*;
        match &self.form {
            TimesPlus(_, c) | Plus(c) => ratio(c),
            TimesMinus(_, c) | Minus(c) => -ratio(c),
            Times(_) | Over(_) => BigRational::zero(),
        }
    }

    /// Whether matching can only succeed on whole numbers.
    pub fn is_integral(&self) -> bool {
        !matches!(self.form, ArithForm::Over(_))
    }
}

fn ratio(n: &BigUint) -> BigRational {
    BigRational::from_integer(n.clone().into())
}

impl Pattern {
    pub fn is_irrefutable(&self) -> bool {
        match self {
            Pattern::Var(_) | Pattern::Wild | Pattern::Unit => true,
            Pattern::Tuple(ps) => ps.iter().all(Pattern::is_irrefutable),
            _ => false,
        }
    }

    pub fn bound_vars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Var(x) => out.push(x.clone()),
            Pattern::Arith(a) => out.push(a.var.clone()),
            Pattern::Tuple(ps) | Pattern::List(ps) => ps.iter().for_each(|p| p.bound_vars(out)),
            Pattern::Inj(_, p) => p.bound_vars(out),
            Pattern::Cons(h, t) => {
                h.bound_vars(out);
                t.bound_vars(out);
            }
            Pattern::Wild | Pattern::Unit | Pattern::Bool(_) | Pattern::Nat(_) | Pattern::Char(_) => {}
        }
    }
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn nat(n: u64) -> Expr {
        Expr::Nat(BigUint::from(n))
    }

    pub fn app(f: Expr, x: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(x))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::BinOp(op, Box::new(l), Box::new(r))
    }

    pub fn lambda(x: &str, body: Expr) -> Expr {
        Expr::Lambda(x.to_string(), Box::new(body))
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::UnOp(UnOp::Neg, Box::new(e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefClause {
    pub name: String,
    pub patterns: Vec<Pattern>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    TypeSig(String, Type),
    Def(DefClause),
    TypeSynonym(String, Type),
    Import(String),
    Doc(String, String),
    Test(String, Expr),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SurfaceModule {
    pub decls: Vec<Decl>,
}
