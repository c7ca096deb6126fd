//! Pretty-printing of expressions. Output reparses to the same tree.

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrettyOptions {
    pub unicode: bool,
    /// Print quantifier binders without their types, as test reports do.
    pub elide_binder_types: bool,
}

impl PrettyOptions {
    pub fn new(unicode: bool) -> Self {
        PrettyOptions {
            unicode,
            elide_binder_types: false,
        }
    }
}

pub fn pretty_expr(e: &Expr, unicode: bool) -> String {
    pretty_with(e, PrettyOptions::new(unicode))
}

pub fn pretty_with(e: &Expr, opts: PrettyOptions) -> String {
    let mut out = String::new();
    Printer { opts, out: &mut out }.expr(e, 0);
    out
}

const ATOM: u8 = 12;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Lambda(..) | Expr::Let(..) | Expr::Quant(..) => 0,
        Expr::BinOp(op, ..) => op.precedence(),
        Expr::UnOp(UnOp::Neg, _) => NEG_PRECEDENCE,
        Expr::UnOp(UnOp::Not, _) => NOT_PRECEDENCE,
        Expr::App(..) => APP_PRECEDENCE,
        _ => ATOM,
    }
}

struct Printer<'o> {
    opts: PrettyOptions,
    out: &'o mut String,
}

impl Printer<'_> {
    fn s(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn expr(&mut self, e: &Expr, min: u8) {
        let paren = level(e) < min;
        if paren {
            self.s("(");
        }
        self.node(e);
        if paren {
            self.s(")");
        }
    }

    fn list(&mut self, es: &[Expr]) {
        for (i, e) in es.iter().enumerate() {
            if i > 0 {
                self.s(", ");
            }
            self.expr(e, 0);
        }
    }

    fn node(&mut self, e: &Expr) {
        let uni = self.opts.unicode;
        match e {
            Expr::Var(x) => self.s(x),
            Expr::Nat(n) => self.s(&n.to_string()),
            Expr::Char(c) => {
                let lit = escape_char(*c, '\'');
                self.s(&format!("'{lit}'"));
            }
            Expr::Str(s) => {
                let lit: String = s.chars().map(|c| escape_char(c, '"')).collect();
                self.s(&format!("\"{lit}\""));
            }
            Expr::Unit => self.s("unit"),
            Expr::Bool(b) => self.s(if *b { "true" } else { "false" }),
            Expr::Lambda(x, body) => {
                self.s(if uni { "λ" } else { "\\" });
                self.s(x);
                self.s(". ");
                self.expr(body, 0);
            }
            Expr::App(f, x) => {
                // Literals and operator expressions never denote functions,
                // so the juxtaposition rule cannot misread this.
                self.expr(f, APP_PRECEDENCE);
                match x.as_ref() {
                    Expr::Tuple(_) => self.node(x),
                    _ => {
                        self.s("(");
                        self.expr(x, 0);
                        self.s(")");
                    }
                }
            }
            Expr::BinOp(op, l, r) => {
                let p = op.precedence();
                let (lp, rp) = match op.assoc() {
                    Assoc::Left => (p, p + 1),
                    Assoc::Right => (p + 1, p),
                    Assoc::None => (p + 1, p + 1),
                };
                self.expr(l, lp);
                self.s(" ");
                self.s(op.symbol(uni));
                self.s(" ");
                self.expr(r, rp);
            }
            Expr::UnOp(UnOp::Neg, x) => {
                self.s("-");
                self.expr(x, NEG_PRECEDENCE + 1);
            }
            Expr::UnOp(UnOp::Not, x) => {
                self.s("not ");
                self.expr(x, NOT_PRECEDENCE);
            }
            Expr::Tuple(es) => {
                self.s("(");
                self.list(es);
                self.s(")");
            }
            Expr::Inj(side, x) => {
                self.s(match side {
                    Side::Left => "left",
                    Side::Right => "right",
                });
                match x.as_ref() {
                    Expr::Tuple(_) => self.node(x),
                    _ => {
                        self.s("(");
                        self.expr(x, 0);
                        self.s(")");
                    }
                }
            }
            Expr::Case(branches) => {
                self.s("{? ");
                for (i, b) in branches.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    self.expr(&b.body, 0);
                    for g in &b.guards {
                        match g {
                            Guard::Bool(c) => {
                                self.s(" if ");
                                self.expr(c, 0);
                            }
                            Guard::Pat(s, p) => {
                                self.s(" if ");
                                self.expr(s, 0);
                                self.s(" is ");
                                self.s(&pretty_pattern(p));
                            }
                            Guard::Otherwise => self.s(" otherwise"),
                        }
                    }
                }
                self.s(" ?}");
            }
            Expr::Let(binds, body) => {
                self.s("let ");
                for (i, (x, e)) in binds.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    self.s(x);
                    self.s(" = ");
                    self.expr(e, 0);
                }
                self.s(" in ");
                self.expr(body, 0);
            }
            Expr::Comprehension(kind, head, quals) => {
                let (open, close) = brackets(*kind);
                self.s(open);
                self.expr(head, 0);
                self.s(" | ");
                for (i, q) in quals.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    match q {
                        Qual::Gen(x, src) => {
                            self.s(x);
                            self.s(if uni { " ∈ " } else { " in " });
                            self.expr(src, 0);
                        }
                        Qual::Let(x, e) => {
                            self.s(x);
                            self.s(" = ");
                            self.expr(e, 0);
                        }
                        Qual::Filter(e) => self.expr(e, 0),
                    }
                }
                self.s(close);
            }
            Expr::Ellipsis(kind, first, second, last) => {
                let (open, close) = brackets(*kind);
                self.s(open);
                self.expr(first, 0);
                if let Some(second) = second {
                    self.s(", ");
                    self.expr(second, 0);
                }
                self.s(" .. ");
                self.expr(last, 0);
                self.s(close);
            }
            Expr::Container(CollKind::Bag, es) => {
                self.s("bag([");
                self.list(es);
                self.s("])");
            }
            Expr::Container(kind, es) => {
                let (open, close) = brackets(*kind);
                self.s(open);
                self.list(es);
                self.s(close);
            }
            Expr::AbsOrCard(x) => {
                self.s("|");
                self.expr(x, 0);
                self.s("|");
            }
            Expr::Quant(q, binders, body) => {
                self.s(match (q, uni) {
                    (Quantifier::Forall, true) => "∀",
                    (Quantifier::Forall, false) => "forall ",
                    (Quantifier::Exists, true) => "∃",
                    (Quantifier::Exists, false) => "exists ",
                });
                for (i, (x, ty)) in binders.iter().enumerate() {
                    if i > 0 {
                        self.s(", ");
                    }
                    self.s(x);
                    if !self.opts.elide_binder_types {
                        self.s(":");
                        self.s(&ty.display(uni));
                    }
                }
                self.s(". ");
                self.expr(body, 0);
            }
            Expr::Section(op) => {
                self.s("~");
                self.s(op.symbol(uni));
                self.s("~");
            }
        }
    }
}

fn brackets(kind: CollKind) -> (&'static str, &'static str) {
    match kind {
        CollKind::List => ("[", "]"),
        CollKind::Set | CollKind::Bag => ("{", "}"),
    }
}

pub(crate) fn escape_char(c: char, quote: char) -> String {
    match c {
        '\n' => "\\n".into(),
        '\t' => "\\t".into(),
        '\r' => "\\r".into(),
        '\0' => "\\0".into(),
        '\\' => "\\\\".into(),
        c if c == quote => format!("\\{c}"),
        c => c.to_string(),
    }
}

pub fn pretty_pattern(p: &Pattern) -> String {
    match p {
        Pattern::Var(x) => x.clone(),
        Pattern::Wild => "_".into(),
        Pattern::Unit => "unit".into(),
        Pattern::Bool(b) => b.to_string(),
        Pattern::Nat(n) => n.to_string(),
        Pattern::Char(c) => format!("'{}'", escape_char(*c, '\'')),
        Pattern::Tuple(ps) => format!(
            "({})",
            ps.iter().map(pretty_pattern).collect::<Vec<_>>().join(", ")
        ),
        Pattern::Inj(side, p) => {
            let name = if *side == Side::Left { "left" } else { "right" };
            match p.as_ref() {
                Pattern::Tuple(_) => format!("{name}{}", pretty_pattern(p)),
                _ => format!("{name}({})", pretty_pattern(p)),
            }
        }
        Pattern::List(ps) => format!(
            "[{}]",
            ps.iter().map(pretty_pattern).collect::<Vec<_>>().join(", ")
        ),
        Pattern::Cons(h, t) => {
            let head = match h.as_ref() {
                Pattern::Cons(..) | Pattern::Arith(_) => format!("({})", pretty_pattern(h)),
                _ => pretty_pattern(h),
            };
            let tail = match t.as_ref() {
                Pattern::Arith(_) => format!("({})", pretty_pattern(t)),
                _ => pretty_pattern(t),
            };
            format!("{head} :: {tail}")
        }
        Pattern::Arith(a) => {
            let x = &a.var;
            match &a.form {
                ArithForm::Times(k) => format!("{k}{x}"),
                ArithForm::TimesPlus(k, c) => format!("{k}{x} + {c}"),
                ArithForm::TimesMinus(k, c) => format!("{k}{x} - {c}"),
                ArithForm::Plus(c) => format!("{x} + {c}"),
                ArithForm::Minus(c) => format!("{x} - {c}"),
                ArithForm::Over(k) => format!("{x} / {k}"),
            }
        }
    }
}
