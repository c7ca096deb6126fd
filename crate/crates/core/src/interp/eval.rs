//! Call-by-value evaluation of compiled terms.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::compile::{Program, TGuard, TPat, TQual, Term};
use super::prime::is_prime;
use super::value::*;
use crate::builtins::Builtin;
use crate::desugar::expand_ellipsis;
use crate::error::{DiscoError, Result};
use crate::oeis::{self, SequenceFetcher};
use crate::syntax::ast::{BinOp, CollKind, Side};
use crate::types::BaseTy;

/// Lexical environment: a persistent linked list of frames.
#[derive(Clone, Default)]
pub struct Env(Option<Arc<Frame>>);

pub struct Frame {
    name: Arc<str>,
    value: Value,
    next: Env,
}

impl Env {
    pub fn bind(&self, name: Arc<str>, value: Value) -> Env {
        Env(Some(Arc::new(Frame {
            name,
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = self.0.as_deref();
        while let Some(f) = cur {
            if &*f.name == name {
                return Some(&f.value);
            }
            cur = f.next.0.as_deref();
        }
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_depth: usize,
    pub timeout: Option<Duration>,
}

pub const DEFAULT_MAX_DEPTH: usize = 100_000;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: DEFAULT_MAX_DEPTH,
            timeout: None,
        }
    }
}

/// Largest result, in bits, that `^` will compute.
const MAX_POWER_BITS: u64 = 1 << 24;
/// Largest set `power` will expand.
const MAX_POWER_SET: usize = 20;

pub struct Machine<'p> {
    prog: &'p Program,
    fetcher: &'p dyn SequenceFetcher,
    limits: Limits,
    deadline: Option<Instant>,
    depth: usize,
    ticks: u32,
    pub warnings: Vec<String>,
}

fn num(n: BigRational) -> Value {
    Value::Num(n)
}

fn nat_of(v: &Value) -> BigUint {
    v.as_num()
        .to_integer()
        .to_biguint()
        .expect("natural numbers are nonnegative")
}

fn inhabits(n: &BigRational, base: BaseTy) -> bool {
    match base {
        BaseTy::N => n.is_integer() && !n.is_negative(),
        BaseTy::Z => n.is_integer(),
        BaseTy::F => !n.is_negative(),
        _ => true,
    }
}

fn rebuild(kind: CollKind, vs: Vec<Value>) -> Result<Value> {
    match kind {
        CollKind::List => Ok(Value::list(vs)),
        CollKind::Bag => make_bag(vs),
        CollKind::Set => make_set(vs),
    }
}

fn kind_of(v: &Value) -> CollKind {
    match v {
        Value::Bag(_) => CollKind::Bag,
        Value::Set(_) => CollKind::Set,
        _ => CollKind::List,
    }
}

impl<'p> Machine<'p> {
    pub fn new(prog: &'p Program, fetcher: &'p dyn SequenceFetcher, limits: Limits) -> Self {
        Machine {
            prog,
            fetcher,
            limits,
            deadline: limits.timeout.map(|t| Instant::now() + t),
            depth: 0,
            ticks: 0,
            warnings: Vec::new(),
        }
    }

    pub fn program(&self) -> &'p Program {
        self.prog
    }

    fn tick(&mut self) -> Result<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(1024) {
            if let (Some(d), Some(t)) = (self.deadline, self.limits.timeout) {
                if Instant::now() > d {
                    return Err(DiscoError::Timeout(t.as_millis() as u64));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&mut self, t: &Term, env: &Env) -> Result<Value> {
        stacker::maybe_grow(256 * 1024, 8 * 1024 * 1024, || self.eval_inner(t, env))
    }

    pub fn global(&mut self, i: usize) -> Result<Value> {
        let def = &self.prog.defs[i];
        if let Some(v) = def.cache.lock().expect("global cache").as_ref() {
            return Ok(v.clone());
        }
        let v = self.eval(&def.term, &Env::default())?;
        *def.cache.lock().expect("global cache") = Some(v.clone());
        Ok(v)
    }

    pub fn apply(&mut self, f: &Value, x: Value) -> Result<Value> {
        self.depth += 1;
        let r = if self.depth > self.limits.max_depth {
            Err(DiscoError::RecursionLimit(self.limits.max_depth))
        } else {
            match f {
                Value::Closure(c) => {
                    let env = c.env.bind(c.param.clone(), x);
                    self.eval(&c.body, &env)
                }
                Value::Prim(b) => self.builtin(*b, x),
                other => panic!("applied a non-function {other:?}"),
            }
        };
        self.depth -= 1;
        r
    }

    fn eval_inner(&mut self, t: &Term, env: &Env) -> Result<Value> {
        self.tick()?;
        Ok(match t {
            Term::Lit(v) => v.clone(),
            Term::Local(x) => env
                .lookup(x)
                .cloned()
                .unwrap_or_else(|| panic!("unbound local {x}")),
            Term::Global(i) => self.global(*i)?,
            Term::Prim(b) => Value::Prim(*b),
            Term::Lam(x, body) => Value::Closure(Arc::new(Closure {
                param: x.clone(),
                body: body.clone(),
                env: env.clone(),
            })),
            Term::App(f, x) => {
                let fv = self.eval(f, env)?;
                let xv = self.eval(x, env)?;
                self.apply(&fv, xv)?
            }
            Term::Bin(BinOp::And, l, r) => {
                Value::Bool(self.eval(l, env)?.as_bool() && self.eval(r, env)?.as_bool())
            }
            Term::Bin(BinOp::Or, l, r) => {
                Value::Bool(self.eval(l, env)?.as_bool() || self.eval(r, env)?.as_bool())
            }
            Term::Bin(BinOp::Implies, l, r) => {
                Value::Bool(!self.eval(l, env)?.as_bool() || self.eval(r, env)?.as_bool())
            }
            Term::Bin(op, l, r) => {
                let a = self.eval(l, env)?;
                let b = self.eval(r, env)?;
                binop(*op, &a, &b)?
            }
            Term::Neg(x) => num(-self.eval(x, env)?.as_num()),
            Term::Not(x) => Value::Bool(!self.eval(x, env)?.as_bool()),
            Term::Pair(a, b) => Value::pair(self.eval(a, env)?, self.eval(b, env)?),
            Term::Inj(s, x) => Value::Inj(*s, Arc::new(self.eval(x, env)?)),
            Term::Case(branches) => {
                for b in branches {
                    if let Some(env2) = self.guards(&b.guards, env)? {
                        return self.eval(&b.body, &env2);
                    }
                }
                return Err(DiscoError::NonExhaustive);
            }
            Term::Let(x, e, body) => {
                let v = self.eval(e, env)?;
                return self.eval(body, &env.bind(x.clone(), v));
            }
            Term::Comp(kind, head, quals) => {
                let mut out = Vec::new();
                self.comprehension(head, quals, env, &mut out)?;
                rebuild(*kind, out)?
            }
            Term::Ellipsis(kind, a, b, c) => {
                let a = self.eval(a, env)?;
                let b = b.as_ref().map(|b| self.eval(b, env)).transpose()?;
                let c = self.eval(c, env)?;
                let xs = expand_ellipsis(*kind, a.as_num(), b.as_ref().map(Value::as_num), c.as_num())?;
                rebuild(*kind, xs.into_iter().map(Value::Num).collect())?
            }
            Term::Container(kind, es) => {
                let vs = es.iter().map(|e| self.eval(e, env)).collect::<Result<Vec<_>>>()?;
                rebuild(*kind, vs)?
            }
            Term::Abs(x) => num(self.eval(x, env)?.as_num().abs()),
            Term::Card(x) => Value::int(self.eval(x, env)?.size()),
            Term::Quant(q, binds, body) => Value::Prop(Arc::new(PropValue {
                quant: *q,
                binds: binds.clone(),
                body: body.clone(),
                env: env.clone(),
            })),
        })
    }

    fn guards(&mut self, gs: &[TGuard], env: &Env) -> Result<Option<Env>> {
        let mut env = env.clone();
        for g in gs {
            match g {
                TGuard::Bool(e) => {
                    if !self.eval(e, &env)?.as_bool() {
                        return Ok(None);
                    }
                }
                TGuard::Pat(e, p) => {
                    let v = self.eval(e, &env)?;
                    match match_pattern(p, &v, &env)? {
                        Some(e2) => env = e2,
                        None => return Ok(None),
                    }
                }
            }
        }
        Ok(Some(env))
    }

    fn comprehension(&mut self, head: &Term, quals: &[TQual], env: &Env, out: &mut Vec<Value>) -> Result<()> {
        match quals.split_first() {
            None => {
                out.push(self.eval(head, env)?);
                Ok(())
            }
            Some((q, rest)) => match q {
                TQual::Gen(x, src) => {
                    for v in self.eval(src, env)?.elements() {
                        self.comprehension(head, rest, &env.bind(x.clone(), v), out)?;
                    }
                    Ok(())
                }
                TQual::Let(x, e) => {
                    let v = self.eval(e, env)?;
                    self.comprehension(head, rest, &env.bind(x.clone(), v), out)
                }
                TQual::Filter(e) => {
                    if self.eval(e, env)?.as_bool() {
                        self.comprehension(head, rest, env, out)
                    } else {
                        Ok(())
                    }
                }
            },
        }
    }

    fn builtin(&mut self, b: Builtin, x: Value) -> Result<Value> {
        Ok(match b {
            Builtin::Abs => num(x.as_num().abs()),
            Builtin::Floor => num(x.as_num().floor()),
            Builtin::Ceiling => num(x.as_num().ceil()),
            Builtin::Min | Builtin::Max => {
                let (a, c) = x.as_pair();
                let less = compare(a, c)?.is_le();
                if less == (b == Builtin::Min) {
                    a.clone()
                } else {
                    c.clone()
                }
            }
            Builtin::Each => {
                let (f, c) = x.as_pair();
                match c {
                    Value::Bag(xs) => {
                        let mut out = Vec::with_capacity(xs.len());
                        for (v, n) in xs.iter() {
                            out.push((self.apply(f, v.clone())?, *n));
                        }
                        make_bag_counts(out)?
                    }
                    _ => {
                        let mut out = Vec::new();
                        for v in c.elements() {
                            out.push(self.apply(f, v)?);
                        }
                        rebuild(kind_of(c), out)?
                    }
                }
            }
            Builtin::Filter => {
                let (f, c) = x.as_pair();
                let mut out = Vec::new();
                for v in c.elements() {
                    if self.apply(f, v.clone())?.as_bool() {
                        out.push(v);
                    }
                }
                rebuild(kind_of(c), out)?
            }
            Builtin::Reduce => {
                let (f, rest) = x.as_pair();
                let (z, c) = rest.as_pair();
                let mut acc = z.clone();
                for v in c.elements().into_iter().rev() {
                    let g = self.apply(f, v)?;
                    acc = self.apply(&g, acc)?;
                }
                acc
            }
            Builtin::Power => {
                let xs = x.elements();
                if xs.len() > MAX_POWER_SET {
                    return Err(DiscoError::ExponentTooLarge(format!(
                        "power set of a set with {} elements",
                        xs.len()
                    )));
                }
                let mut subsets = Vec::with_capacity(1 << xs.len());
                for mask in 0u32..(1 << xs.len()) {
                    let sub: Vec<Value> = xs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, v)| v.clone())
                        .collect();
                    subsets.push(Value::Set(Arc::new(sub)));
                }
                make_set(subsets)?
            }
            Builtin::List => Value::list(x.elements()),
            Builtin::Bag => match x {
                Value::Bag(_) => x,
                _ => make_bag(x.elements())?,
            },
            Builtin::Set => make_set(x.elements())?,
            Builtin::IsPrime => Value::Bool(is_prime(&nat_of(&x))),
            Builtin::LookupSequence => {
                let prefix: Vec<BigUint> = x.elements().iter().map(nat_of).collect();
                let r = oeis::lookup_sequence(self.fetcher, &prefix);
                self.warnings.extend(r.warning);
                match r.value {
                    Some(url) => Value::Inj(Side::Right, Arc::new(Value::string(&url))),
                    None => Value::Inj(Side::Left, Arc::new(Value::Unit)),
                }
            }
            Builtin::ExtendSequence => {
                let prefix: Vec<BigUint> = x.elements().iter().map(nat_of).collect();
                let r = oeis::extend_sequence(self.fetcher, &prefix);
                self.warnings.extend(r.warning);
                Value::list(r.value.into_iter().map(|n| Value::int(BigInt::from(n))).collect())
            }
        })
    }
}

pub fn match_pattern(p: &TPat, v: &Value, env: &Env) -> Result<Option<Env>> {
    Ok(match (p, v) {
        (TPat::Var(x), _) => Some(env.bind(x.clone(), v.clone())),
        (TPat::Wild, _) => Some(env.clone()),
        (TPat::Lit(l), _) => values_equal(l, v)?.then(|| env.clone()),
        (TPat::Pair(a, b), Value::Pair(pv)) => match match_pattern(a, &pv.0, env)? {
            Some(e) => match_pattern(b, &pv.1, &e)?,
            None => None,
        },
        (TPat::Inj(s, q), Value::Inj(t, x)) if s == t => match_pattern(q, x, env)?,
        (TPat::List(ps), Value::List(xs)) => {
            if ps.len() != xs.len() {
                return Ok(None);
            }
            let mut e = env.clone();
            for (p, x) in ps.iter().zip(xs.iter()) {
                match match_pattern(p, x, &e)? {
                    Some(e2) => e = e2,
                    None => return Ok(None),
                }
            }
            Some(e)
        }
        (TPat::Cons(h, t), Value::List(xs)) => match xs.split_first() {
            None => None,
            Some((x, rest)) => match match_pattern(h, x, env)? {
                Some(e) => match_pattern(t, &Value::list(rest.to_vec()), &e)?,
                None => None,
            },
        },
        (
            TPat::Arith {
                var,
                coefficient,
                constant,
                base,
            },
            Value::Num(n),
        ) => {
            let w = (n - constant) / coefficient;
            inhabits(&w, *base).then(|| env.bind(var.clone(), Value::Num(w)))
        }
        _ => None,
    })
}

fn set_op(op: BinOp, a: &Value, b: &Value) -> Result<Value> {
    match (a, b) {
        (Value::Set(xs), Value::Set(ys)) => {
            let contains = |zs: &[Value], v: &Value| -> Result<bool> {
                let mut err = None;
                let found = zs
                    .binary_search_by(|z| {
                        compare(z, v).unwrap_or_else(|e| {
                            err.get_or_insert(e);
                            std::cmp::Ordering::Equal
                        })
                    })
                    .is_ok();
                err.map_or(Ok(found), Err)
            };
            match op {
                BinOp::Union => make_set(xs.iter().chain(ys.iter()).cloned().collect()),
                _ => {
                    let keep_common = op == BinOp::Intersect;
                    let mut out = Vec::new();
                    for x in xs.iter() {
                        if contains(ys, x)? == keep_common {
                            out.push(x.clone());
                        }
                    }
                    Ok(Value::Set(Arc::new(out)))
                }
            }
        }
        (Value::Bag(xs), Value::Bag(ys)) => {
            let count = |zs: &[(Value, usize)], v: &Value| -> Result<usize> {
                for (z, n) in zs {
                    if values_equal(z, v)? {
                        return Ok(*n);
                    }
                }
                Ok(0)
            };
            let mut out = Vec::new();
            for (x, n) in xs.iter() {
                let m = count(ys, x)?;
                out.push((
                    x.clone(),
                    match op {
                        BinOp::Union => (*n).max(m),
                        BinOp::Intersect => (*n).min(m),
                        _ => n.saturating_sub(m),
                    },
                ));
            }
            if op == BinOp::Union {
                for (y, m) in ys.iter() {
                    if count(xs, y)? == 0 {
                        out.push((y.clone(), *m));
                    }
                }
            }
            make_bag_counts(out)
        }
        _ => panic!("set operation on {a:?} and {b:?}"),
    }
}

fn power(base: &BigRational, exp: &BigRational) -> Result<BigRational> {
    let e = exp.to_integer();
    let one = BigRational::one();
    if e.is_zero() {
        return Ok(one);
    }
    if base.is_zero() {
        return Ok(BigRational::zero());
    }
    if base.abs() == one {
        return Ok(if base.is_negative() && e.bit(0) { -one } else { one });
    }
    let bits = base.numer().bits() + base.denom().bits();
    match e.to_u32() {
        Some(k) if bits.saturating_mul(k as u64) <= MAX_POWER_BITS => Ok(Pow::pow(base, k)),
        _ => Err(DiscoError::ExponentTooLarge(e.to_string())),
    }
}

pub fn binop(op: BinOp, a: &Value, b: &Value) -> Result<Value> {
    use BinOp::*;
    Ok(match op {
        Add => num(a.as_num() + b.as_num()),
        Sub => num(a.as_num() - b.as_num()),
        Mul => num(a.as_num() * b.as_num()),
        Div => {
            if b.as_num().is_zero() {
                return Err(DiscoError::DivisionByZero);
            }
            num(a.as_num() / b.as_num())
        }
        Monus => num(monus(a.as_num(), b.as_num())),
        Pow => num(power(a.as_num(), b.as_num())?),
        Mod => num(floor_mod(a.as_num(), b.as_num())?),
        Divides => Value::Bool(divides(a.as_num(), b.as_num())),
        Eq => Value::Bool(compare(a, b)?.is_eq()),
        Neq => Value::Bool(compare(a, b)?.is_ne()),
        Lt => Value::Bool(compare(a, b)?.is_lt()),
        Gt => Value::Bool(compare(a, b)?.is_gt()),
        Le => Value::Bool(compare(a, b)?.is_le()),
        Ge => Value::Bool(compare(a, b)?.is_ge()),
        And => Value::Bool(a.as_bool() && b.as_bool()),
        Or => Value::Bool(a.as_bool() || b.as_bool()),
        Implies => Value::Bool(!a.as_bool() || b.as_bool()),
        Union | Intersect | Diff => set_op(op, a, b)?,
        Cons => match b {
            Value::List(xs) => {
                let mut v = Vec::with_capacity(xs.len() + 1);
                v.push(a.clone());
                v.extend(xs.iter().cloned());
                Value::list(v)
            }
            other => panic!("cons onto {other:?}"),
        },
    })
}
