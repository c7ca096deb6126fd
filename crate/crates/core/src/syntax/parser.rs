//! Pratt parser for expressions, plus declarations, types, patterns, and
//! REPL lines.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{DiscoError, Result, Span};
use crate::types::Type;

use super::ast::*;
use super::lexer::tokenize;
use super::token::{Token, TokenKind};

/// One line of REPL input.
#[derive(Debug, Clone, PartialEq)]
pub enum ReplInput {
    Empty,
    Command(Command),
    Expr(Expr),
    Decl(Decl),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Type(Expr),
    /// A name or an operator spelling, e.g. `gcd` or `+`.
    Doc(String),
    Test(Expr),
    Load(Vec<String>),
    Help,
    Names,
    Quit,
}

/// Binding powers derived from a precedence level.
fn binding_power(op: BinOp) -> (u8, u8) {
    let l = op.precedence() * 2;
    match op.assoc() {
        Assoc::Right => (l, l),
        Assoc::Left | Assoc::None => (l, l + 1),
    }
}

const APP_BP: u8 = APP_PRECEDENCE * 2;
const NEG_OPERAND_BP: u8 = NEG_PRECEDENCE * 2;
const NOT_OPERAND_BP: u8 = NOT_PRECEDENCE * 2;

/// Juxtaposition `lhs rhs` is multiplication when the left side is a
/// numeric literal or an operator expression (which can only sit in this
/// position if it was parenthesized); otherwise it is application.
pub fn resolve_juxtaposition(lhs: Expr, rhs: Expr) -> Expr {
    match lhs {
        Expr::Nat(_) | Expr::BinOp(..) | Expr::UnOp(..) => Expr::bin(BinOp::Mul, lhs, rhs),
        _ => Expr::app(lhs, rhs),
    }
}

fn starts_atom(kind: TokenKind) -> bool {
    use TokenKind::*;
    matches!(
        kind,
        Ident
            | Nat
            | Str
            | Char
            | LParen
            | LBracket
            | LBrace
            | CaseOpen
            | True
            | False
            | UnitVal
            | Left
            | Right
            | Section(_)
    )
}

pub(crate) struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    end: Span,
}

impl<'t> Parser<'t> {
    pub(crate) fn new(toks: &'t [Token], end: Span) -> Self {
        Parser { toks, pos: 0, end }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn kind_at(&self, offset: usize) -> Option<TokenKind> {
        self.toks.get(self.pos + offset).map(|t| t.kind)
    }

    fn at(&self, kind: TokenKind) -> bool {
        self.kind() == Some(kind)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn span(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> DiscoError {
        DiscoError::parse(self.span(), message)
    }

    fn unexpected(&self, wanted: &str) -> DiscoError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found '{}'", t.text)),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, kind: TokenKind, wanted: &str) -> Result<&'t Token> {
        if self.at(kind) {
            Ok(self.bump().expect("peeked"))
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self) -> Result<String> {
        Ok(self.expect(TokenKind::Ident, "a name")?.text.clone())
    }

    pub(crate) fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(DiscoError::parse(t.span, format!("unexpected '{}'", t.text))),
        }
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self) -> Result<Expr> {
        self.expr_bp(0)
    }

    fn expr_bp(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        let mut last_comparison: Option<u8> = None;
        while let Some(kind) = self.kind() {
            if let Some(op) = kind.binop() {
                let (lbp, rbp) = binding_power(op);
                if lbp < min_bp {
                    break;
                }
                if op.is_comparison() {
                    if last_comparison == Some(op.precedence()) {
                        return Err(self.error(format!(
                            "'{}' cannot be chained; add parentheses",
                            self.peek().unwrap().text
                        )));
                    }
                    last_comparison = Some(op.precedence());
                } else {
                    last_comparison = None;
                }
                self.bump();
                let rhs = self.expr_bp(rbp)?;
                lhs = Expr::bin(op, lhs, rhs);
            } else if starts_atom(kind) {
                if APP_BP < min_bp {
                    break;
                }
                let rhs = self.atom()?;
                lhs = resolve_juxtaposition(lhs, rhs);
                last_comparison = None;
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        use TokenKind::*;
        match self.kind() {
            Some(Minus) => {
                self.bump();
                let e = self.expr_bp(NEG_OPERAND_BP)?;
                Ok(Expr::negate(e))
            }
            Some(Not) => {
                self.bump();
                let e = self.expr_bp(NOT_OPERAND_BP)?;
                Ok(Expr::UnOp(UnOp::Not, Box::new(e)))
            }
            Some(Backslash) | Some(Lambda) => {
                self.bump();
                let mut names = vec![self.ident()?];
                while self.at(Ident) || self.at(Comma) {
                    self.eat(Comma);
                    names.push(self.ident()?);
                }
                self.expect(Dot, "'.' after lambda parameters")?;
                let body = self.expr()?;
                Ok(names
                    .into_iter()
                    .rev()
                    .fold(body, |b, x| Expr::Lambda(x, Box::new(b))))
            }
            Some(Let) => {
                self.bump();
                let mut binds = Vec::new();
                loop {
                    let name = self.ident()?;
                    self.expect(Equals, "'=' in let binding")?;
                    binds.push((name, self.expr()?));
                    if !self.eat(Comma) {
                        break;
                    }
                }
                self.expect(In, "'in' after let bindings")?;
                let body = self.expr()?;
                Ok(Expr::Let(binds, Box::new(body)))
            }
            Some(Forall) | Some(Exists) => {
                let q = if self.at(Forall) {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                self.bump();
                let binders = self.binders()?;
                let body = self.expr()?;
                Ok(Expr::Quant(q, binders, Box::new(body)))
            }
            _ => self.atom(),
        }
    }

    /// `a:N, b:N.` or `a, b : N.`
    fn binders(&mut self) -> Result<Vec<(String, Type)>> {
        let mut done = Vec::new();
        let mut pending = Vec::new();
        loop {
            pending.push(self.ident()?);
            if self.eat(TokenKind::Colon) {
                let ty = self.ty()?;
                done.extend(pending.drain(..).map(|n| (n, ty.clone())));
            }
            if self.eat(TokenKind::Dot) {
                break;
            }
            self.expect(TokenKind::Comma, "',' or '.' in quantifier binders")?;
        }
        if !pending.is_empty() {
            return Err(self.error(format!("quantified variable {} needs a type", pending[0])));
        }
        Ok(done)
    }

    fn atom(&mut self) -> Result<Expr> {
        use TokenKind::*;
        let Some(tok) = self.peek() else {
            return Err(self.unexpected("an expression"));
        };
        match tok.kind {
            Ident => {
                self.bump();
                Ok(Expr::Var(tok.text.clone()))
            }
            Nat => {
                self.bump();
                let n: BigUint = tok.text.parse().map_err(|_| self.error("bad numeral"))?;
                Ok(Expr::Nat(n))
            }
            Str => {
                self.bump();
                Ok(Expr::Str(tok.text.clone()))
            }
            Char => {
                self.bump();
                Ok(Expr::Char(tok.text.chars().next().unwrap_or('\0')))
            }
            True | False => {
                self.bump();
                Ok(Expr::Bool(tok.kind == True))
            }
            UnitVal => {
                self.bump();
                Ok(Expr::Unit)
            }
            Section(op) => {
                self.bump();
                Ok(Expr::Section(op))
            }
            Left | Right => {
                self.bump();
                let side = if tok.kind == Left { Side::Left } else { Side::Right };
                let payload = self.atom()?;
                Ok(Expr::Inj(side, Box::new(payload)))
            }
            LParen => {
                self.bump();
                if self.eat(RParen) {
                    return Ok(Expr::Unit);
                }
                let mut items = vec![self.expr()?];
                while self.eat(Comma) {
                    items.push(self.expr()?);
                }
                self.expect(RParen, "')'")?;
                Ok(if items.len() == 1 {
                    items.pop().unwrap()
                } else {
                    Expr::Tuple(items)
                })
            }
            LBracket => {
                self.bump();
                self.collection(CollKind::List, RBracket, "']'")
            }
            LBrace => {
                self.bump();
                self.collection(CollKind::Set, RBrace, "'}'")
            }
            CaseOpen => {
                self.bump();
                self.case()
            }
            Bar => {
                self.bump();
                let e = self.expr()?;
                self.expect(Bar, "closing '|'")?;
                Ok(Expr::AbsOrCard(Box::new(e)))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn collection(&mut self, kind: CollKind, close: TokenKind, wanted: &str) -> Result<Expr> {
        use TokenKind::*;
        if self.eat(close) {
            return Ok(Expr::Container(kind, vec![]));
        }
        let first = self.expr()?;
        if self.eat(DotDot) {
            let last = self.expr()?;
            self.expect(close, wanted)?;
            return Ok(Expr::Ellipsis(kind, Box::new(first), None, Box::new(last)));
        }
        if self.eat(Bar) {
            let mut quals = vec![self.qual()?];
            while self.eat(Comma) {
                quals.push(self.qual()?);
            }
            self.expect(close, wanted)?;
            return Ok(Expr::Comprehension(kind, Box::new(first), quals));
        }
        let mut items = vec![first];
        while self.eat(Comma) {
            items.push(self.expr()?);
            if items.len() == 2 && self.eat(DotDot) {
                let last = self.expr()?;
                self.expect(close, wanted)?;
                let second = items.pop().unwrap();
                let first = items.pop().unwrap();
                return Ok(Expr::Ellipsis(
                    kind,
                    Box::new(first),
                    Some(Box::new(second)),
                    Box::new(last),
                ));
            }
        }
        self.expect(close, wanted)?;
        Ok(Expr::Container(kind, items))
    }

    fn qual(&mut self) -> Result<Qual> {
        use TokenKind::*;
        if self.at(Ident) {
            match self.kind_at(1) {
                Some(In) | Some(LArrow) => {
                    let x = self.ident()?;
                    self.bump();
                    return Ok(Qual::Gen(x, self.expr()?));
                }
                Some(Equals) => {
                    let x = self.ident()?;
                    self.bump();
                    return Ok(Qual::Let(x, self.expr()?));
                }
                _ => {}
            }
        }
        Ok(Qual::Filter(self.expr()?))
    }

    fn case(&mut self) -> Result<Expr> {
        use TokenKind::*;
        let mut branches = Vec::new();
        loop {
            let body = self.expr()?;
            let mut guards = Vec::new();
            loop {
                match self.kind() {
                    Some(If) => {
                        self.bump();
                        let e = self.expr()?;
                        if self.eat(Is) {
                            let p = self.pattern()?;
                            guards.push(Guard::Pat(e, p));
                        } else {
                            guards.push(Guard::Bool(e));
                        }
                    }
                    Some(When) => {
                        self.bump();
                        let e = self.expr()?;
                        self.expect(Is, "'is' after 'when' scrutinee")?;
                        let p = self.pattern()?;
                        guards.push(Guard::Pat(e, p));
                    }
                    Some(Otherwise) => {
                        self.bump();
                        guards.push(Guard::Otherwise);
                    }
                    _ => break,
                }
            }
            branches.push(Branch { body, guards });
            if !self.eat(Comma) {
                break;
            }
        }
        self.expect(CaseClose, "'?}' to close the case expression")?;
        Ok(Expr::Case(branches))
    }

    fn pattern(&mut self) -> Result<Pattern> {
        let span = self.span();
        let e = self.expr_bp(12)?;
        expr_to_pattern(&e, span)
    }

    // ---- types ----

    pub(crate) fn ty(&mut self) -> Result<Type> {
        let dom = self.ty_sum()?;
        if self.eat(TokenKind::Arrow) {
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn ty_sum(&mut self) -> Result<Type> {
        let l = self.ty_prod()?;
        if self.eat(TokenKind::Plus) {
            Ok(Type::sum(l, self.ty_sum()?))
        } else {
            Ok(l)
        }
    }

    fn ty_prod(&mut self) -> Result<Type> {
        let l = self.ty_atom()?;
        if self.eat(TokenKind::Star) {
            Ok(Type::prod(l, self.ty_prod()?))
        } else {
            Ok(l)
        }
    }

    fn ty_atom(&mut self) -> Result<Type> {
        use TokenKind::*;
        let Some(tok) = self.bump() else {
            return Err(self.unexpected("a type"));
        };
        Ok(match tok.kind {
            TyNat => Type::nat(),
            TyInt => Type::int(),
            TyFrac => Type::frac(),
            TyRat => Type::rat(),
            TyBool => Type::bool(),
            TyChar => Type::char(),
            TyUnit => Type::unit(),
            TyProp => Type::prop(),
            TyString => Type::string(),
            TyList | TyBag | TySet => {
                self.expect(LParen, "'(' after collection type")?;
                let inner = self.ty()?;
                self.expect(RParen, "')'")?;
                match tok.kind {
                    TyList => Type::list(inner),
                    TyBag => Type::bag(inner),
                    _ => Type::set(inner),
                }
            }
            LParen => {
                let t = self.ty()?;
                self.expect(RParen, "')'")?;
                t
            }
            Ident if tok.text.starts_with(|c: char| c.is_uppercase()) => Type::Syn(tok.text.clone()),
            Ident => Type::Param(tok.text.clone()),
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("a type"));
            }
        })
    }
}

/// Interpret an expression parsed in pattern position.
pub fn expr_to_pattern(e: &Expr, span: Span) -> Result<Pattern> {
    let bad = || DiscoError::parse(span, "unsupported pattern");
    let nat = |e: &Expr| match e {
        Expr::Nat(n) => Some(n.clone()),
        _ => None,
    };
    let var = |e: &Expr| match e {
        Expr::Var(x) if x != "_" => Some(x.clone()),
        _ => None,
    };
    let arith = |var: String, form: ArithForm| Ok(Pattern::Arith(ArithPattern { var, form }));
    // k n or n k, with k nonzero.
    let scaled = |e: &Expr| match e {
        Expr::BinOp(BinOp::Mul, a, b) => match (nat(a), var(b), var(a), nat(b)) {
            (Some(k), Some(x), _, _) | (_, _, Some(x), Some(k)) if !k.is_zero() => Some((x, k)),
            _ => None,
        },
        _ => None,
    };
    match e {
        Expr::Var(x) if x == "_" => Ok(Pattern::Wild),
        Expr::Var(x) => Ok(Pattern::Var(x.clone())),
        Expr::Nat(n) => Ok(Pattern::Nat(n.clone())),
        Expr::Char(c) => Ok(Pattern::Char(*c)),
        Expr::Str(s) => Ok(Pattern::List(s.chars().map(Pattern::Char).collect())),
        Expr::Bool(b) => Ok(Pattern::Bool(*b)),
        Expr::Unit => Ok(Pattern::Unit),
        Expr::Tuple(es) => Ok(Pattern::Tuple(
            es.iter()
                .map(|e| expr_to_pattern(e, span))
                .collect::<Result<_>>()?,
        )),
        Expr::Inj(side, e) => Ok(Pattern::Inj(*side, Box::new(expr_to_pattern(e, span)?))),
        Expr::Container(CollKind::List, es) => Ok(Pattern::List(
            es.iter()
                .map(|e| expr_to_pattern(e, span))
                .collect::<Result<_>>()?,
        )),
        Expr::BinOp(BinOp::Cons, h, t) => Ok(Pattern::Cons(
            Box::new(expr_to_pattern(h, span)?),
            Box::new(expr_to_pattern(t, span)?),
        )),
        Expr::BinOp(BinOp::Mul, ..) => {
            let (x, k) = scaled(e).ok_or_else(bad)?;
            arith(x, ArithForm::Times(k))
        }
        Expr::BinOp(op @ (BinOp::Add | BinOp::Sub), a, b) => {
            let add = *op == BinOp::Add;
            let (lin, c) = match (nat(b), nat(a)) {
                (Some(c), _) => (a.as_ref(), c),
                (None, Some(c)) if add => (b.as_ref(), c),
                _ => return Err(bad()),
            };
            if let Some(x) = var(lin) {
                arith(
                    x,
                    if add {
                        ArithForm::Plus(c)
                    } else {
                        ArithForm::Minus(c)
                    },
                )
            } else if let Some((x, k)) = scaled(lin) {
                arith(
                    x,
                    if add {
                        ArithForm::TimesPlus(k, c)
                    } else {
                        ArithForm::TimesMinus(k, c)
                    },
                )
            } else {
                Err(bad())
            }
        }
        Expr::BinOp(BinOp::Div, a, b) => match (var(a), nat(b)) {
            (Some(x), Some(k)) if !k.is_zero() => arith(x, ArithForm::Over(k)),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

fn end_span(toks: &[Token]) -> Span {
    toks.last()
        .map(|t| Span::new(t.span.line, t.span.column + t.text.chars().count() as u32))
        .unwrap_or_else(|| Span::new(1, 1))
}

/// Parse a complete expression.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks, end_span(&toks));
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parse a complete type.
pub fn parse_type(src: &str) -> Result<Type> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks, end_span(&toks));
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Parse an expression embedded in a `!!!` line; spans are shifted to the
/// position of the marker.
fn parse_embedded(text: &str, at: Span) -> Result<Expr> {
    let shift = |s: Span| Span::new(at.line, at.column + 3 + s.column);
    let mut toks = tokenize(text).map_err(|e| match e {
        DiscoError::Lex { span, message } => DiscoError::Lex {
            span: shift(span),
            message,
        },
        other => other,
    })?;
    for t in &mut toks {
        t.span = shift(t.span);
    }
    let mut p = Parser::new(&toks, end_span(&toks));
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Group tokens into declarations: one starts at every token in column 1.
fn split_decls(toks: &[Token]) -> Vec<&[Token]> {
    let mut chunks = Vec::new();
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        if i > start && t.span.column == 1 {
            chunks.push(&toks[start..i]);
            start = i;
        }
    }
    if start < toks.len() {
        chunks.push(&toks[start..]);
    }
    chunks
}

fn parse_decl(chunk: &[Token]) -> Result<Decl> {
    use TokenKind::*;
    let mut p = Parser::new(chunk, end_span(chunk));
    let decl = match (p.kind(), p.kind_at(1)) {
        (Some(TypeKw), _) => {
            p.bump();
            let name = p.ident()?;
            if !name.starts_with(|c: char| c.is_uppercase()) {
                return Err(DiscoError::parse(
                    chunk[1].span,
                    "type names must start with an uppercase letter",
                ));
            }
            p.expect(Equals, "'=' in type definition")?;
            Decl::TypeSynonym(name, p.ty()?)
        }
        (Some(Import), _) => {
            p.bump();
            Decl::Import(p.ident()?)
        }
        (Some(Ident), Some(Colon)) => {
            let name = p.ident()?;
            p.bump();
            Decl::TypeSig(name, p.ty()?)
        }
        _ => {
            let span = p.span();
            let lhs = p.expr()?;
            p.expect(Equals, "'=' in definition")?;
            let body = p.expr()?;
            let (name, patterns) = clause_head(&lhs, span)?;
            Decl::Def(DefClause {
                name,
                patterns,
                body,
                span,
            })
        }
    };
    p.finish()?;
    Ok(decl)
}

fn clause_head(lhs: &Expr, span: Span) -> Result<(String, Vec<Pattern>)> {
    let mut args = Vec::new();
    let mut cur = lhs;
    while let Expr::App(f, x) = cur {
        args.push(expr_to_pattern(x, span)?);
        cur = f;
    }
    match cur {
        Expr::Var(name) => {
            args.reverse();
            Ok((name.clone(), args))
        }
        _ => Err(DiscoError::parse(
            span,
            "a definition must start with the name being defined",
        )),
    }
}

/// Parse a source file. Checks that every definition has exactly one type
/// signature, and attaches `|||`/`!!!` lines to the declaration that follows.
pub fn parse_module(src: &str) -> Result<SurfaceModule> {
    let toks = tokenize(src)?;
    let mut decls = Vec::new();
    let mut docs: Vec<String> = Vec::new();
    let mut tests: Vec<Expr> = Vec::new();
    let mut sig_spans = std::collections::HashMap::new();
    let mut def_spans = Vec::new();

    for chunk in split_decls(&toks) {
        let first = &chunk[0];
        match first.kind {
            TokenKind::DocLine => {
                docs.push(first.text.clone());
                continue;
            }
            TokenKind::TestLine => {
                tests.push(parse_embedded(&first.text, first.span)?);
                continue;
            }
            _ => {}
        }
        let decl = parse_decl(chunk)?;
        let owner = match &decl {
            Decl::TypeSig(name, _) => {
                if sig_spans.insert(name.clone(), first.span).is_some() {
                    return Err(DiscoError::parse(
                        first.span,
                        format!("duplicate type signature for {name}"),
                    ));
                }
                Some(name.clone())
            }
            Decl::Def(c) => {
                def_spans.push((c.name.clone(), c.span));
                Some(c.name.clone())
            }
            Decl::TypeSynonym(name, _) => Some(name.clone()),
            _ => None,
        };
        if let Some(name) = owner {
            if !docs.is_empty() {
                decls.push(Decl::Doc(name.clone(), docs.join("\n")));
                docs.clear();
            }
            decls.extend(tests.drain(..).map(|t| Decl::Test(name.clone(), t)));
        }
        decls.push(decl);
    }

    for (name, span) in def_spans {
        if !sig_spans.contains_key(&name) {
            return Err(DiscoError::parse(
                span,
                format!("missing type signature for {name}"),
            ));
        }
    }
    Ok(SurfaceModule { decls })
}

/// Parse one REPL line: a `:command`, an expression, or a declaration
/// (which the REPL then rejects or handles).
pub fn parse_repl_input(line: &str) -> Result<ReplInput> {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Ok(ReplInput::Empty);
    }
    if let Some(cmd) = trimmed.strip_prefix(':') {
        let (word, arg) = match cmd.find(char::is_whitespace) {
            Some(i) => (&cmd[..i], cmd[i..].trim()),
            None => (cmd, ""),
        };
        let need_arg = |what: &str| {
            if arg.is_empty() {
                Err(DiscoError::parse(
                    Span::new(1, 1),
                    format!(":{word} needs {what}"),
                ))
            } else {
                Ok(())
            }
        };
        let command = match word {
            "type" | "t" => {
                need_arg("an expression")?;
                Command::Type(parse_expr(arg)?)
            }
            "test" => {
                need_arg("a property")?;
                Command::Test(parse_expr(arg)?)
            }
            "doc" | "d" => {
                need_arg("a name")?;
                let name = arg
                    .strip_prefix('~')
                    .and_then(|s| s.strip_suffix('~'))
                    .unwrap_or(arg);
                Command::Doc(name.to_string())
            }
            "load" | "l" => {
                need_arg("a file name")?;
                Command::Load(arg.split_whitespace().map(str::to_string).collect())
            }
            "help" | "h" | "?" => Command::Help,
            "names" => Command::Names,
            "quit" | "q" => Command::Quit,
            _ => {
                return Err(DiscoError::parse(
                    Span::new(1, 1),
                    format!("unknown command :{word}; try :help"),
                ))
            }
        };
        return Ok(ReplInput::Command(command));
    }
    let toks = tokenize(trimmed)?;
    use TokenKind::*;
    let is_decl = matches!(
        (toks.first().map(|t| t.kind), toks.get(1).map(|t| t.kind)),
        (Some(TypeKw), _) | (Some(Import), _) | (Some(Ident), Some(Colon))
    ) || toks.iter().any(|t| t.kind == Equals)
        && !toks.iter().any(|t| t.kind == Let || t.kind == Bar);
    if is_decl {
        return Ok(ReplInput::Decl(parse_decl(&toks)?));
    }
    let mut p = Parser::new(&toks, end_span(&toks));
    let e = p.expr()?;
    p.finish()?;
    Ok(ReplInput::Expr(e))
}
