//! Bidirectional constraint generation and the public checking entry points.

pub mod solve;

use std::collections::HashMap;

use crate::builtins::Builtin;
use crate::desugar::CoreModule;
use crate::error::{DiscoError, Result};
use crate::syntax::ast::*;
use crate::types::*;

pub use solve::{solve, AbsKind, Constraint, Family, KindRange, Solution, Supply};

/// Identity of a syntax node, used to key elaboration results. Valid as
/// long as the tree it was taken from is neither moved nor mutated.
pub fn node_id<T>(x: &T) -> usize {
    x as *const T as usize
}

/// What the evaluator needs to know that only the checker decides.
#[derive(Debug, Clone, Default)]
pub struct Elab {
    /// Whether each `|e|` is absolute value or cardinality.
    pub abs_or_card: HashMap<usize, AbsKind>,
    /// Numeric type matched by each arithmetic pattern.
    pub arith: HashMap<usize, BaseTy>,
}

impl Elab {
    pub fn extend(&mut self, other: Elab) {
        self.abs_or_card.extend(other.abs_or_card);
        self.arith.extend(other.arith);
    }
}

/// Everything in scope at top level.
#[derive(Debug, Clone, Default)]
pub struct Globals {
    pub sigs: HashMap<String, Type>,
    pub env: SynEnv,
    pub imports: Vec<String>,
}

impl Globals {
    /// Validate synonyms and signatures of a desugared module.
    pub fn from_module(m: &CoreModule) -> Result<Globals> {
        for i in &m.imports {
            if !crate::builtins::KNOWN_MODULES.contains(&i.as_str()) {
                return Err(DiscoError::UnknownModule(i.clone()));
            }
        }
        let env = SynEnv::from_defs(m.synonyms.iter().cloned())?;
        let mut sigs = HashMap::new();
        for d in &m.defs {
            env.check_type(&d.sig)?;
            sigs.insert(d.name.clone(), d.sig.clone());
        }
        Ok(Globals {
            sigs,
            env,
            imports: m.imports.clone(),
        })
    }
}

/// Type of a builtin at fresh variables, with its constraints.
fn builtin_type(b: Builtin, s: &mut Supply, cs: &mut Vec<Constraint>) -> Type {
    use Constraint::*;
    let mut v = || s.fresh_ty();
    match b {
        Builtin::Abs | Builtin::Floor | Builtin::Ceiling => {
            let (a, r) = (v(), v());
            let fam = match b {
                Builtin::Abs => solve::Family::Abs,
                Builtin::Floor => solve::Family::Floor,
                _ => solve::Family::Ceiling,
            };
            cs.push(Qual(Qualifier::Num, a.clone()));
            cs.push(Family(fam, a.clone(), r.clone()));
            Type::arrow(a, r)
        }
        Builtin::Min | Builtin::Max => {
            let a = v();
            cs.push(Qual(Qualifier::Cmp, a.clone()));
            Type::arrow(Type::prod(a.clone(), a.clone()), a)
        }
        Builtin::Each => {
            let (a, b, c1, c2) = (v(), v(), v(), v());
            cs.push(SameKind(
                vec![(c1.clone(), a.clone()), (c2.clone(), b.clone())],
                KindRange::Any,
            ));
            Type::arrow(Type::prod(Type::arrow(a, b), c1), c2)
        }
        Builtin::Filter => {
            let (a, c) = (v(), v());
            cs.push(SameKind(vec![(c.clone(), a.clone())], KindRange::Any));
            Type::arrow(Type::prod(Type::arrow(a, Type::bool()), c.clone()), c)
        }
        Builtin::Reduce => {
            let (a, b, c) = (v(), v(), v());
            cs.push(SameKind(vec![(c.clone(), a.clone())], KindRange::Any));
            let f = Type::arrow(a, Type::arrow(b.clone(), b.clone()));
            Type::arrow(Type::prod(f, Type::prod(b.clone(), c)), b)
        }
        Builtin::Power => {
            let a = v();
            cs.push(Qual(Qualifier::Cmp, a.clone()));
            Type::arrow(Type::set(a.clone()), Type::set(Type::set(a)))
        }
        Builtin::List | Builtin::Bag | Builtin::Set => {
            let (a, c) = (v(), v());
            cs.push(SameKind(vec![(c.clone(), a.clone())], KindRange::Any));
            let out = match b {
                Builtin::List => Type::list(a.clone()),
                Builtin::Bag => Type::bag(a.clone()),
                _ => Type::set(a.clone()),
            };
            if b != Builtin::List {
                cs.push(Qual(Qualifier::Cmp, a));
            }
            Type::arrow(c, out)
        }
        Builtin::IsPrime => Type::arrow(Type::nat(), Type::bool()),
        Builtin::LookupSequence => {
            Type::arrow(Type::list(Type::nat()), Type::sum(Type::unit(), Type::string()))
        }
        Builtin::ExtendSequence => Type::arrow(Type::list(Type::nat()), Type::list(Type::nat())),
    }
}

fn coll(k: CollKind, t: Type) -> Type {
    match k {
        CollKind::List => Type::list(t),
        CollKind::Bag => Type::bag(t),
        CollKind::Set => Type::set(t),
    }
}

/// `(a, b, c)` has type `a × (b × c)`.
fn tuple_type(mut ts: Vec<Type>) -> Type {
    let last = ts.pop().expect("tuples have components");
    ts.into_iter().rev().fold(last, |acc, t| Type::prod(t, acc))
}

fn subst_params(t: &Type, f: &mut impl FnMut(&str) -> Type) -> Type {
    t.map(&mut |t| match t {
        Type::Param(p) => Some(f(p)),
        _ => None,
    })
}

struct Checker<'g> {
    globals: &'g Globals,
    supply: Supply,
    cs: Vec<Constraint>,
    locals: Vec<(String, Type)>,
    arith: Vec<(usize, Type)>,
}

impl<'g> Checker<'g> {
    fn new(globals: &'g Globals) -> Self {
        Checker {
            globals,
            supply: Supply::new(),
            cs: Vec::new(),
            locals: Vec::new(),
            arith: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Type {
        self.supply.fresh_ty()
    }

    fn sub(&mut self, a: Type, b: Type) {
        self.cs.push(Constraint::Sub(a, b));
    }

    fn qual(&mut self, q: Qualifier, t: &Type) {
        self.cs.push(Constraint::Qual(q, t.clone()));
    }

    fn instantiate(&mut self, sig: &Type) -> Type {
        let mut seen: HashMap<String, Type> = HashMap::new();
        subst_params(sig, &mut |p| {
            seen.entry(p.to_string())
                .or_insert_with(|| self.supply.fresh_ty())
                .clone()
        })
    }

    fn with_locals<T>(
        &mut self,
        binds: Vec<(String, Type)>,
        f: impl FnOnce(&mut Self) -> Result<T>,
    ) -> Result<T> {
        let n = self.locals.len();
        self.locals.extend(binds);
        let r = f(self);
        self.locals.truncate(n);
        r
    }

    fn finish(self) -> Result<(Solution, Vec<(usize, Type)>)> {
        let mut supply = self.supply;
        let sol = solve(&self.globals.env, self.cs, &mut supply)?;
        Ok((sol, self.arith))
    }

    fn check(&mut self, e: &Expr, expected: &Type) -> Result<()> {
        let head = self.globals.env.whnf(expected)?.clone();
        match (e, &head) {
            (Expr::Lambda(x, body), Type::Arrow(d, c)) => {
                self.with_locals(vec![(x.clone(), (**d).clone())], |ch| ch.check(body, c))
            }
            (Expr::Tuple(es), Type::Prod(..)) => self.check_tuple(es, &head),
            (Expr::Case(branches), _) => {
                for b in branches {
                    self.branch(b, expected)?;
                }
                Ok(())
            }
            (Expr::Let(binds, body), _) => self.let_binds(binds, 0, &mut |ch| ch.check(body, expected)),
            _ => {
                let t = self.infer(e)?;
                self.sub(t, expected.clone());
                Ok(())
            }
        }
    }

    /// Components are checked in place: copying them would change the node
    /// identities the elaboration is keyed by.
    fn check_tuple(&mut self, es: &[Expr], expected: &Type) -> Result<()> {
        match (es, self.globals.env.whnf(expected)?.clone()) {
            ([e], _) => self.check(e, expected),
            ([e, rest @ ..], Type::Prod(a, b)) => {
                self.check(e, &a)?;
                self.check_tuple(rest, &b)
            }
            _ => {
                let ts = es.iter().map(|e| self.infer(e)).collect::<Result<Vec<_>>>()?;
                let t = tuple_type(ts);
                self.sub(t, expected.clone());
                Ok(())
            }
        }
    }

    fn let_binds(
        &mut self,
        binds: &[(String, Expr)],
        i: usize,
        k: &mut dyn FnMut(&mut Self) -> Result<()>,
    ) -> Result<()> {
        match binds.get(i) {
            None => k(self),
            Some((x, e)) => {
                let t = self.infer(e)?;
                self.with_locals(vec![(x.clone(), t)], |ch| ch.let_binds(binds, i + 1, k))
            }
        }
    }

    fn branch(&mut self, b: &Branch, expected: &Type) -> Result<()> {
        self.guards(&b.guards, &mut |ch| ch.check(&b.body, expected))
    }

    fn guards(&mut self, gs: &[Guard], k: &mut dyn FnMut(&mut Self) -> Result<()>) -> Result<()> {
        match gs.split_first() {
            None => k(self),
            Some((g, rest)) => match g {
                Guard::Otherwise => self.guards(rest, k),
                Guard::Bool(e) => {
                    self.check(e, &Type::bool())?;
                    self.guards(rest, k)
                }
                Guard::Pat(e, p) => {
                    let t = self.infer(e)?;
                    let mut binds = Vec::new();
                    self.pattern(p, &t, &mut binds)?;
                    self.with_locals(binds, |ch| ch.guards(rest, k))
                }
            },
        }
    }

    fn pattern(&mut self, p: &Pattern, t: &Type, binds: &mut Vec<(String, Type)>) -> Result<()> {
        match p {
            Pattern::Var(x) => binds.push((x.clone(), t.clone())),
            Pattern::Wild => {}
            Pattern::Unit => self.sub(t.clone(), Type::unit()),
            Pattern::Bool(_) => self.sub(t.clone(), Type::bool()),
            Pattern::Char(_) => self.sub(t.clone(), Type::char()),
            Pattern::Nat(_) => {
                self.sub(Type::nat(), t.clone());
                self.qual(Qualifier::Num, t);
            }
            Pattern::Tuple(ps) => self.tuple_pattern(ps, t, binds)?,
            Pattern::Inj(side, q) => {
                let (a, b) = (self.fresh(), self.fresh());
                self.sub(t.clone(), Type::sum(a.clone(), b.clone()));
                self.pattern(q, if *side == Side::Left { &a } else { &b }, binds)?;
            }
            Pattern::List(ps) => {
                let e = self.fresh();
                self.sub(t.clone(), Type::list(e.clone()));
                for q in ps {
                    self.pattern(q, &e, binds)?;
                }
            }
            Pattern::Cons(h, tl) => {
                let e = self.fresh();
                self.sub(t.clone(), Type::list(e.clone()));
                self.pattern(h, &e, binds)?;
                self.pattern(tl, &Type::list(e), binds)?;
            }
            Pattern::Arith(a) => {
                self.qual(Qualifier::Num, t);
                self.arith.push((node_id(p), t.clone()));
                binds.push((a.var.clone(), t.clone()));
            }
        }
        Ok(())
    }

    fn tuple_pattern(&mut self, ps: &[Pattern], t: &Type, binds: &mut Vec<(String, Type)>) -> Result<()> {
        match ps {
            [p] => self.pattern(p, t, binds),
            [p, rest @ ..] => {
                let (a, b) = (self.fresh(), self.fresh());
                self.sub(t.clone(), Type::prod(a.clone(), b.clone()));
                self.pattern(p, &a, binds)?;
                self.tuple_pattern(rest, &b, binds)
            }
            [] => Ok(()),
        }
    }

    fn lookup(&mut self, x: &str) -> Result<Type> {
        if let Some((_, t)) = self.locals.iter().rev().find(|(n, _)| n == x) {
            return Ok(t.clone());
        }
        let g = self.globals;
        if let Some(sig) = g.sigs.get(x) {
            return Ok(self.instantiate(sig));
        }
        if let Some(b) = Builtin::lookup(x, &g.imports) {
            return Ok(builtin_type(b, &mut self.supply, &mut self.cs));
        }
        Err(DiscoError::Unbound(x.to_string()))
    }

    /// Result type of `l op r` given the operand types.
    fn binop(&mut self, op: BinOp, tl: Type, tr: Type) -> Type {
        use BinOp::*;
        let g = self.fresh();
        let both = |ch: &mut Self, g: &Type| {
            ch.sub(tl.clone(), g.clone());
            ch.sub(tr.clone(), g.clone());
        };
        match op {
            Add | Mul | Monus | Sub | Div => {
                both(self, &g);
                let q = match op {
                    Sub => Qualifier::Sub,
                    Div => Qualifier::Div,
                    _ => Qualifier::Num,
                };
                self.qual(q, &g);
                g
            }
            Pow => {
                self.sub(tl.clone(), g.clone());
                self.sub(tr.clone(), Type::nat());
                self.qual(Qualifier::Num, &g);
                g
            }
            Mod | Divides => {
                both(self, &g);
                self.sub(g.clone(), Type::int());
                self.qual(Qualifier::Num, &g);
                if op == Divides {
                    Type::bool()
                } else {
                    g
                }
            }
            Eq | Neq | Lt | Gt | Le | Ge => {
                both(self, &g);
                self.qual(Qualifier::Cmp, &g);
                Type::bool()
            }
            And | Or | Implies => {
                self.sub(tl.clone(), Type::bool());
                self.sub(tr.clone(), Type::bool());
                Type::bool()
            }
            Union | Intersect | Diff => {
                let e = self.fresh();
                both(self, &g);
                self.cs
                    .push(Constraint::SameKind(vec![(g.clone(), e)], KindRange::BagOrSet));
                g
            }
            Cons => {
                self.sub(tl.clone(), g.clone());
                self.sub(tr.clone(), Type::list(g.clone()));
                Type::list(g)
            }
        }
    }

    fn infer(&mut self, e: &Expr) -> Result<Type> {
        Ok(match e {
            Expr::Var(x) => self.lookup(x)?,
            Expr::Nat(_) => Type::nat(),
            Expr::Char(_) => Type::char(),
            Expr::Str(_) => Type::string(),
            Expr::Unit => Type::unit(),
            Expr::Bool(_) => Type::bool(),
            Expr::Lambda(x, body) => {
                let a = self.fresh();
                let tb = self.with_locals(vec![(x.clone(), a.clone())], |ch| ch.infer(body))?;
                Type::arrow(a, tb)
            }
            Expr::App(f, x) => {
                let tf = self.infer(f)?;
                match self.globals.env.whnf(&tf)?.clone() {
                    Type::Arrow(d, c) => {
                        self.check(x, &d)?;
                        *c
                    }
                    _ => {
                        let (a, b) = (self.fresh(), self.fresh());
                        self.sub(tf, Type::arrow(a.clone(), b.clone()));
                        self.check(x, &a)?;
                        b
                    }
                }
            }
            Expr::BinOp(op, l, r) => {
                let tl = self.infer(l)?;
                let tr = self.infer(r)?;
                self.binop(*op, tl, tr)
            }
            Expr::Section(op) => {
                let (a, b) = (self.fresh(), self.fresh());
                let r = self.binop(*op, a.clone(), b.clone());
                Type::arrow(a, Type::arrow(b, r))
            }
            Expr::UnOp(UnOp::Neg, x) => {
                let g = self.fresh();
                self.check(x, &g)?;
                self.qual(Qualifier::Sub, &g);
                g
            }
            Expr::UnOp(UnOp::Not, x) => {
                self.check(x, &Type::bool())?;
                Type::bool()
            }
            Expr::Tuple(es) => {
                let ts = es.iter().map(|e| self.infer(e)).collect::<Result<Vec<_>>>()?;
                tuple_type(ts)
            }
            Expr::Inj(side, x) => {
                let t = self.infer(x)?;
                let other = self.fresh();
                match side {
                    Side::Left => Type::sum(t, other),
                    Side::Right => Type::sum(other, t),
                }
            }
            Expr::Case(_) | Expr::Let(..) => {
                let r = self.fresh();
                self.check(e, &r)?;
                r
            }
            Expr::Comprehension(k, head, quals) => {
                let th = self.quals(quals, head)?;
                if *k != CollKind::List {
                    self.qual(Qualifier::Cmp, &th);
                }
                coll(*k, th)
            }
            Expr::Ellipsis(k, a, b, c) => {
                let g = self.fresh();
                self.check(a, &g)?;
                if let Some(b) = b {
                    self.check(b, &g)?;
                }
                self.check(c, &g)?;
                self.qual(Qualifier::Num, &g);
                self.qual(Qualifier::Cmp, &g);
                coll(*k, g)
            }
            Expr::Container(k, es) => {
                let g = self.fresh();
                for x in es {
                    self.check(x, &g)?;
                }
                if *k != CollKind::List {
                    self.qual(Qualifier::Cmp, &g);
                }
                coll(*k, g)
            }
            Expr::AbsOrCard(x) => {
                let t = self.infer(x)?;
                let r = self.fresh();
                self.cs.push(Constraint::AbsOrCard(node_id(e), t, r.clone()));
                r
            }
            Expr::Quant(_, binds, body) => {
                for (_, t) in binds {
                    self.globals.env.check_type(t)?;
                }
                let tb = self.with_locals(binds.clone(), |ch| ch.infer(body))?;
                let want = if matches!(**body, Expr::Quant(..)) {
                    Type::prop()
                } else {
                    Type::bool()
                };
                self.sub(tb, want);
                Type::prop()
            }
        })
    }

    fn quals(&mut self, qs: &[Qual], head: &Expr) -> Result<Type> {
        match qs.split_first() {
            None => self.infer(head),
            Some((q, rest)) => match q {
                Qual::Gen(x, src) => {
                    let ts = self.infer(src)?;
                    let a = self.fresh();
                    self.cs
                        .push(Constraint::SameKind(vec![(ts, a.clone())], KindRange::Any));
                    self.with_locals(vec![(x.clone(), a)], |ch| ch.quals(rest, head))
                }
                Qual::Let(x, e) => {
                    let t = self.infer(e)?;
                    self.with_locals(vec![(x.clone(), t)], |ch| ch.quals(rest, head))
                }
                Qual::Filter(e) => {
                    self.check(e, &Type::bool())?;
                    self.quals(rest, head)
                }
            },
        }
    }
}

fn elab_of(sol: &Solution, arith: Vec<(usize, Type)>) -> Result<Elab> {
    let mut out = Elab {
        abs_or_card: sol.abs_or_card.clone(),
        arith: HashMap::new(),
    };
    for (id, t) in arith {
        match sol.apply(&t) {
            Type::Base(b) if b.is_numeric() => {
                out.arith.insert(id, b);
            }
            other => {
                return Err(DiscoError::Qualifier {
                    ty: other.display(true),
                    operation: Qualifier::Num.operation().into(),
                })
            }
        }
    }
    Ok(out)
}

/// Check a definition body against its declared signature.
pub fn check_definition(globals: &Globals, sig: &Type, body: &Expr) -> Result<Elab> {
    let mut ch = Checker::new(globals);
    let skolem = subst_params(sig, &mut |p| Type::Skolem(p.to_string()));
    ch.check(body, &skolem)?;
    let (sol, arith) = ch.finish()?;
    elab_of(&sol, arith)
}

/// Infer and solve the type of a closed expression.
pub fn infer_expr(globals: &Globals, e: &Expr) -> Result<(Type, Elab)> {
    let mut ch = Checker::new(globals);
    let t = ch.infer(e)?;
    let (sol, arith) = ch.finish()?;
    Ok((sol.apply(&t), elab_of(&sol, arith)?))
}

/// Check a test: a boolean or a quantified property.
pub fn check_property(globals: &Globals, e: &Expr) -> Result<Elab> {
    let want = if matches!(e, Expr::Quant(..)) {
        Type::prop()
    } else {
        Type::bool()
    };
    let mut ch = Checker::new(globals);
    ch.check(e, &want)?;
    let (sol, arith) = ch.finish()?;
    elab_of(&sol, arith)
}

/// Check every definition and test of a module.
pub fn check_module(m: &CoreModule) -> Result<(Globals, Elab)> {
    let globals = Globals::from_module(m)?;
    let mut elab = Elab::default();
    for d in &m.defs {
        elab.extend(check_definition(&globals, &d.sig, &d.body)?);
    }
    Ok((globals, elab))
}
