//! Lowering of checked core expressions to the evaluator's term language:
//! names are resolved, overloads fixed, and literals turned into values.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;

use super::value::Value;
use crate::builtins::Builtin;
use crate::desugar::CoreModule;
use crate::error::{DiscoError, Result};
use crate::infer::{node_id, AbsKind, Elab};
use crate::syntax::ast::*;
use crate::types::{BaseTy, Type};

pub enum Term {
    Lit(Value),
    Local(Arc<str>),
    Global(usize),
    Prim(Builtin),
    Lam(Arc<str>, Arc<Term>),
    App(Box<Term>, Box<Term>),
    Bin(BinOp, Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Not(Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Inj(Side, Box<Term>),
    Case(Vec<TBranch>),
    Let(Arc<str>, Box<Term>, Box<Term>),
    Comp(CollKind, Box<Term>, Vec<TQual>),
    Ellipsis(CollKind, Box<Term>, Option<Box<Term>>, Box<Term>),
    Container(CollKind, Vec<Term>),
    Abs(Box<Term>),
    Card(Box<Term>),
    Quant(Quantifier, Vec<(String, Type)>, Arc<Term>),
}

pub struct TBranch {
    pub guards: Vec<TGuard>,
    pub body: Term,
}

pub enum TGuard {
    Bool(Term),
    Pat(Term, TPat),
}

pub enum TQual {
    Gen(Arc<str>, Term),
    Filter(Term),
    Let(Arc<str>, Term),
}

pub enum TPat {
    Var(Arc<str>),
    Wild,
    /// Unit, booleans, characters, and numerals: matched by equality.
    Lit(Value),
    Pair(Box<TPat>, Box<TPat>),
    Inj(Side, Box<TPat>),
    List(Vec<TPat>),
    Cons(Box<TPat>, Box<TPat>),
    /// Matches `v` when `(v - constant) / coefficient` lies in `base`.
    Arith {
        var: Arc<str>,
        coefficient: BigRational,
        constant: BigRational,
        base: BaseTy,
    },
}

pub struct GlobalDef {
    pub name: String,
    pub ty: Type,
    pub term: Term,
    pub(crate) cache: Mutex<Option<Value>>,
}

/// Compiled top-level definitions of one loaded module.
#[derive(Default)]
pub struct Program {
    pub names: HashMap<String, usize>,
    pub defs: Vec<GlobalDef>,
    pub imports: Vec<String>,
}

impl Program {
    pub fn build(m: &CoreModule, elab: &Elab) -> Result<Program> {
        let names: HashMap<String, usize> = m
            .defs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name.clone(), i))
            .collect();
        let mut prog = Program {
            names,
            defs: Vec::new(),
            imports: m.imports.clone(),
        };
        for d in &m.defs {
            let term = prog.compile_expr(&d.body, elab)?;
            prog.defs.push(GlobalDef {
                name: d.name.clone(),
                ty: d.sig.clone(),
                term,
                cache: Mutex::new(None),
            });
        }
        Ok(prog)
    }

    pub fn compile_expr(&self, e: &Expr, elab: &Elab) -> Result<Term> {
        Compiler {
            prog: self,
            elab,
            locals: Vec::new(),
        }
        .expr(e)
    }

    pub fn lookup(&self, name: &str) -> Option<&GlobalDef> {
        self.names.get(name).map(|&i| &self.defs[i])
    }
}

struct Compiler<'a> {
    prog: &'a Program,
    elab: &'a Elab,
    locals: Vec<String>,
}

fn name(s: &str) -> Arc<str> {
    Arc::from(s)
}

impl Compiler<'_> {
    fn scoped<T>(&mut self, names: Vec<String>, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let n = self.locals.len();
        self.locals.extend(names);
        let r = f(self);
        self.locals.truncate(n);
        r
    }

    fn var(&self, x: &str) -> Result<Term> {
        if self.locals.iter().any(|l| l == x) {
            Ok(Term::Local(name(x)))
        } else if let Some(&i) = self.prog.names.get(x) {
            Ok(Term::Global(i))
        } else if let Some(b) = Builtin::lookup(x, &self.prog.imports) {
            Ok(Term::Prim(b))
        } else {
            Err(DiscoError::Unbound(x.to_string()))
        }
    }

    fn boxed(&mut self, e: &Expr) -> Result<Box<Term>> {
        Ok(Box::new(self.expr(e)?))
    }

    fn tuple(&mut self, es: &[Expr]) -> Result<Term> {
        match es {
            [e] => self.expr(e),
            [e, rest @ ..] => Ok(Term::Pair(self.boxed(e)?, Box::new(self.tuple(rest)?))),
            [] => Ok(Term::Lit(Value::Unit)),
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<Term> {
        Ok(match e {
            Expr::Var(x) => self.var(x)?,
            Expr::Nat(n) => Term::Lit(Value::int(num_bigint::BigInt::from(n.clone()))),
            Expr::Char(c) => Term::Lit(Value::Char(*c)),
            Expr::Str(s) => Term::Lit(Value::string(s)),
            Expr::Unit => Term::Lit(Value::Unit),
            Expr::Bool(b) => Term::Lit(Value::Bool(*b)),
            Expr::Lambda(x, body) => {
                let b = self.scoped(vec![x.clone()], |c| c.expr(body))?;
                Term::Lam(name(x), Arc::new(b))
            }
            Expr::App(f, x) => Term::App(self.boxed(f)?, self.boxed(x)?),
            Expr::BinOp(op, l, r) => Term::Bin(*op, self.boxed(l)?, self.boxed(r)?),
            Expr::UnOp(UnOp::Neg, x) => Term::Neg(self.boxed(x)?),
            Expr::UnOp(UnOp::Not, x) => Term::Not(self.boxed(x)?),
            Expr::Section(op) => {
                let (x, y) = (name("#x"), name("#y"));
                let body = Term::Bin(
                    *op,
                    Box::new(Term::Local(x.clone())),
                    Box::new(Term::Local(y.clone())),
                );
                Term::Lam(x, Arc::new(Term::Lam(y, Arc::new(body))))
            }
            Expr::Tuple(es) => self.tuple(es)?,
            Expr::Inj(s, x) => Term::Inj(*s, self.boxed(x)?),
            Expr::Case(branches) => Term::Case(
                branches
                    .iter()
                    .map(|b| self.branch(&b.guards, &b.body))
                    .collect::<Result<_>>()?,
            ),
            Expr::Let(binds, body) => self.lets(binds, body)?,
            Expr::Comprehension(k, head, quals) => {
                let (qs, h) = self.quals(quals, head)?;
                Term::Comp(*k, Box::new(h), qs)
            }
            Expr::Ellipsis(k, a, b, c) => Term::Ellipsis(
                *k,
                self.boxed(a)?,
                b.as_ref().map(|b| self.boxed(b)).transpose()?,
                self.boxed(c)?,
            ),
            Expr::Container(k, es) => {
                Term::Container(*k, es.iter().map(|x| self.expr(x)).collect::<Result<_>>()?)
            }
            Expr::AbsOrCard(x) => match self.elab.abs_or_card.get(&node_id(e)) {
                Some(AbsKind::Card) => Term::Card(self.boxed(x)?),
                _ => Term::Abs(self.boxed(x)?),
            },
            Expr::Quant(q, binds, body) => {
                let names = binds.iter().map(|(x, _)| x.clone()).collect();
                let b = self.scoped(names, |c| c.expr(body))?;
                Term::Quant(*q, binds.clone(), Arc::new(b))
            }
        })
    }

    fn lets(&mut self, binds: &[(String, Expr)], body: &Expr) -> Result<Term> {
        match binds.split_first() {
            None => self.expr(body),
            Some(((x, e), rest)) => {
                let v = self.expr(e)?;
                let b = self.scoped(vec![x.clone()], |c| c.lets(rest, body))?;
                Ok(Term::Let(name(x), Box::new(v), Box::new(b)))
            }
        }
    }

    fn branch(&mut self, guards: &[Guard], body: &Expr) -> Result<TBranch> {
        let n = self.locals.len();
        let r = (|| {
            let mut out = Vec::new();
            for g in guards {
                match g {
                    Guard::Otherwise => {}
                    Guard::Bool(e) => out.push(TGuard::Bool(self.expr(e)?)),
                    Guard::Pat(e, p) => {
                        let t = self.expr(e)?;
                        let tp = self.pattern(p)?;
                        let mut vs = Vec::new();
                        p.bound_vars(&mut vs);
                        self.locals.extend(vs);
                        out.push(TGuard::Pat(t, tp));
                    }
                }
            }
            Ok(TBranch {
                guards: out,
                body: self.expr(body)?,
            })
        })();
        self.locals.truncate(n);
        r
    }

    fn quals(&mut self, qs: &[Qual], head: &Expr) -> Result<(Vec<TQual>, Term)> {
        let n = self.locals.len();
        let r = (|| {
            let mut out = Vec::new();
            for q in qs {
                match q {
                    Qual::Gen(x, src) => {
                        out.push(TQual::Gen(name(x), self.expr(src)?));
                        self.locals.push(x.clone());
                    }
                    Qual::Let(x, e) => {
                        out.push(TQual::Let(name(x), self.expr(e)?));
                        self.locals.push(x.clone());
                    }
                    Qual::Filter(e) => out.push(TQual::Filter(self.expr(e)?)),
                }
            }
            Ok((out, self.expr(head)?))
        })();
        self.locals.truncate(n);
        r
    }

    fn pattern(&self, p: &Pattern) -> Result<TPat> {
        Ok(match p {
            Pattern::Var(x) => TPat::Var(name(x)),
            Pattern::Wild => TPat::Wild,
            Pattern::Unit => TPat::Lit(Value::Unit),
            Pattern::Bool(b) => TPat::Lit(Value::Bool(*b)),
            Pattern::Char(c) => TPat::Lit(Value::Char(*c)),
            Pattern::Nat(n) => TPat::Lit(Value::int(num_bigint::BigInt::from(n.clone()))),
            Pattern::Tuple(ps) => self.tuple_pattern(ps)?,
            Pattern::Inj(s, q) => TPat::Inj(*s, Box::new(self.pattern(q)?)),
            Pattern::List(ps) => TPat::List(ps.iter().map(|q| self.pattern(q)).collect::<Result<_>>()?),
            Pattern::Cons(h, t) => TPat::Cons(Box::new(self.pattern(h)?), Box::new(self.pattern(t)?)),
            Pattern::Arith(a) => TPat::Arith {
                var: name(&a.var),
                coefficient: a.coefficient(),
                constant: a.constant(),
                base: self.elab.arith.get(&node_id(p)).copied().unwrap_or(BaseTy::Q),
            },
        })
    }

    fn tuple_pattern(&self, ps: &[Pattern]) -> Result<TPat> {
        match ps {
            [p] => self.pattern(p),
            [p, rest @ ..] => Ok(TPat::Pair(
                Box::new(self.pattern(p)?),
                Box::new(self.tuple_pattern(rest)?),
            )),
            [] => Ok(TPat::Lit(Value::Unit)),
        }
    }
}
