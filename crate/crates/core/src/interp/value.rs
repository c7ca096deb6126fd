//! Runtime values, canonical ordering, and type-directed printing.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::compile::Term;
use super::eval::Env;
use crate::builtins::Builtin;
use crate::error::{DiscoError, Result};
use crate::syntax::ast::{Quantifier, Side};
use crate::syntax::pretty::escape_char;
use crate::types::{SynEnv, Type};

#[derive(Clone)]
pub enum Value {
    Num(BigRational),
    Bool(bool),
    Char(char),
    Unit,
    Pair(Arc<(Value, Value)>),
    Inj(Side, Arc<Value>),
    List(Arc<Vec<Value>>),
    /// Strictly increasing elements with multiplicities of at least one.
    Bag(Arc<Vec<(Value, usize)>>),
    /// Strictly increasing elements.
    Set(Arc<Vec<Value>>),
    Closure(Arc<Closure>),
    Prim(Builtin),
    Prop(Arc<PropValue>),
}

pub struct Closure {
    pub param: Arc<str>,
    pub body: Arc<Term>,
    pub env: Env,
}

/// A quantified property, waiting for the tester.
pub struct PropValue {
    pub quant: Quantifier,
    pub binds: Vec<(String, Type)>,
    pub body: Arc<Term>,
    pub env: Env,
}

impl std::fmt::Debug for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&show(self, None, &SynEnv::new(), true))
    }
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Num(BigRational::from_integer(n.into()))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Arc::new((a, b)))
    }

    /// Right-nested pairs for a tuple of at least one component.
    pub fn tuple(mut vs: Vec<Value>) -> Value {
        let last = vs.pop().expect("tuples have components");
        vs.into_iter().rev().fold(last, |acc, v| Value::pair(v, acc))
    }

    pub fn list(vs: Vec<Value>) -> Value {
        Value::List(Arc::new(vs))
    }

    pub fn string(s: &str) -> Value {
        Value::list(s.chars().map(Value::Char).collect())
    }

    pub fn as_num(&self) -> &BigRational {
        match self {
            Value::Num(n) => n,
            other => panic!("expected a number, found {other:?}"),
        }
    }

    pub fn as_bool(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            other => panic!("expected a boolean, found {other:?}"),
        }
    }

    pub fn as_pair(&self) -> (&Value, &Value) {
        match self {
            Value::Pair(p) => (&p.0, &p.1),
            other => panic!("expected a pair, found {other:?}"),
        }
    }

    /// Elements of a collection in canonical order, repeated by multiplicity.
    pub fn elements(&self) -> Vec<Value> {
        match self {
            Value::List(xs) | Value::Set(xs) => xs.to_vec(),
            Value::Bag(xs) => xs
                .iter()
                .flat_map(|(v, n)| std::iter::repeat_n(v.clone(), *n))
                .collect(),
            other => panic!("expected a collection, found {other:?}"),
        }
    }

    /// Number of elements, counting multiplicity.
    pub fn size(&self) -> usize {
        match self {
            Value::List(xs) | Value::Set(xs) => xs.len(),
            Value::Bag(xs) => xs.iter().map(|(_, n)| n).sum(),
            other => panic!("expected a collection, found {other:?}"),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Num(_) => 0,
            Value::Bool(_) => 1,
            Value::Char(_) => 2,
            Value::Unit => 3,
            Value::Pair(_) => 4,
            Value::Inj(..) => 5,
            Value::List(_) => 6,
            Value::Bag(_) => 7,
            Value::Set(_) => 8,
            Value::Closure(_) | Value::Prim(_) | Value::Prop(_) => 9,
        }
    }
}

fn lex<'a, T: 'a>(
    a: impl IntoIterator<Item = &'a T>,
    b: impl IntoIterator<Item = &'a T>,
    cmp: impl Fn(&T, &T) -> Result<Ordering>,
) -> Result<Ordering> {
    let (mut a, mut b) = (a.into_iter(), b.into_iter());
    loop {
        match (a.next(), b.next()) {
            (None, None) => return Ok(Ordering::Equal),
            (None, Some(_)) => return Ok(Ordering::Less),
            (Some(_), None) => return Ok(Ordering::Greater),
            (Some(x), Some(y)) => match cmp(x, y)? {
                Ordering::Equal => {}
                o => return Ok(o),
            },
        }
    }
}

/// Total order used for equality, comparisons, and canonical collections.
pub fn compare(a: &Value, b: &Value) -> Result<Ordering> {
    use Value::*;
    Ok(match (a, b) {
        (Num(x), Num(y)) => x.cmp(y),
        (Bool(x), Bool(y)) => x.cmp(y),
        (Char(x), Char(y)) => x.cmp(y),
        (Unit, Unit) => Ordering::Equal,
        (Pair(p), Pair(q)) => match compare(&p.0, &q.0)? {
            Ordering::Equal => compare(&p.1, &q.1)?,
            o => o,
        },
        (Inj(s, x), Inj(t, y)) => match s.cmp(t) {
            Ordering::Equal => compare(x, y)?,
            o => o,
        },
        (List(xs), List(ys)) | (Set(xs), Set(ys)) => lex(xs.iter(), ys.iter(), compare)?,
        (Bag(xs), Bag(ys)) => lex(xs.iter(), ys.iter(), |(v, n), (w, m)| {
            Ok(match compare(v, w)? {
                Ordering::Equal => n.cmp(m),
                o => o,
            })
        })?,
        (Closure(_) | Prim(_) | Prop(_), _) | (_, Closure(_) | Prim(_) | Prop(_)) => {
            return Err(DiscoError::ComparisonOfFunctions)
        }
        _ => a.rank().cmp(&b.rank()),
    })
}

pub fn values_equal(a: &Value, b: &Value) -> Result<bool> {
    Ok(compare(a, b)? == Ordering::Equal)
}

fn sort_values(vs: &mut [Value]) -> Result<()> {
    let mut err = None;
    vs.sort_by(|a, b| match compare(a, b) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    err.map_or(Ok(()), Err)
}

pub fn make_set(mut vs: Vec<Value>) -> Result<Value> {
    sort_values(&mut vs)?;
    let mut out: Vec<Value> = Vec::with_capacity(vs.len());
    for v in vs {
        match out.last() {
            Some(last) if values_equal(last, &v)? => {}
            _ => out.push(v),
        }
    }
    Ok(Value::Set(Arc::new(out)))
}

pub fn make_bag(vs: Vec<Value>) -> Result<Value> {
    make_bag_counts(vs.into_iter().map(|v| (v, 1)).collect())
}

pub fn make_bag_counts(mut vs: Vec<(Value, usize)>) -> Result<Value> {
    let mut err = None;
    vs.sort_by(|a, b| match compare(&a.0, &b.0) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut out: Vec<(Value, usize)> = Vec::with_capacity(vs.len());
    for (v, n) in vs {
        if n == 0 {
            continue;
        }
        match out.last_mut() {
            Some((last, m)) if values_equal(last, &v)? => *m += n,
            _ => out.push((v, n)),
        }
    }
    Ok(Value::Bag(Arc::new(out)))
}

fn show_num(n: &BigRational) -> String {
    if n.denom().is_one() {
        n.numer().to_string()
    } else {
        format!("{}/{}", n.numer(), n.denom())
    }
}

fn escape_str(s: &str) -> String {
    let body: String = s.chars().map(|c| escape_char(c, '"')).collect();
    format!("\"{body}\"")
}

/// Print a value. The type, when known, decides how lists of characters
/// and empty collections look.
pub fn show(v: &Value, ty: Option<&Type>, env: &SynEnv, unicode: bool) -> String {
    let mut out = String::new();
    Printer { env, unicode }.value(v, ty, &mut out);
    out
}

struct Printer<'a> {
    env: &'a SynEnv,
    unicode: bool,
}

impl Printer<'_> {
    fn resolve<'t>(&'t self, ty: Option<&'t Type>) -> Option<&'t Type> {
        ty.and_then(|t| self.env.whnf(t).ok())
            .filter(|t| !matches!(t, Type::Var(_) | Type::Param(_) | Type::Skolem(_)))
    }

    fn value(&self, v: &Value, ty: Option<&Type>, out: &mut String) {
        let ty = self.resolve(ty);
        let child = |i: usize| -> Option<&Type> {
            ty.and_then(|t| match t {
                Type::Prod(a, b) | Type::Sum(a, b) => Some(if i == 0 { &**a } else { &**b }),
                Type::List(a) | Type::Bag(a) | Type::Set(a) => Some(&**a),
                _ => None,
            })
        };
        match v {
            Value::Num(n) => out.push_str(&show_num(n)),
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::Char(c) => {
                out.push('\'');
                out.push_str(&escape_char(*c, '\''));
                out.push('\'');
            }
            Value::Unit => out.push_str("unit"),
            Value::Pair(_) => {
                out.push('(');
                self.tuple_items(v, ty, out);
                out.push(')');
            }
            Value::Inj(side, x) => {
                out.push_str(if *side == Side::Left { "left(" } else { "right(" });
                let t = child(if *side == Side::Left { 0 } else { 1 });
                if matches!(**x, Value::Pair(_)) {
                    self.tuple_items(x, t, out);
                } else {
                    self.value(x, t, out);
                }
                out.push(')');
            }
            Value::List(xs) => {
                let elem = child(0).and_then(|t| self.resolve(Some(t)));
                let is_string = match elem {
                    Some(t) => *t == Type::char(),
                    None => !xs.is_empty() && xs.iter().all(|x| matches!(x, Value::Char(_))),
                };
                if is_string {
                    let s: String = xs
                        .iter()
                        .map(|x| match x {
                            Value::Char(c) => *c,
                            _ => '?',
                        })
                        .collect();
                    out.push_str(&escape_str(&s));
                } else {
                    self.items("[", "]", xs.iter(), child(0), out);
                }
            }
            Value::Set(xs) => self.items("{", "}", xs.iter(), child(0), out),
            Value::Bag(_) => {
                let (open, close) = if self.unicode {
                    ("⟅", "⟆")
                } else {
                    ("{# ", " #}")
                };
                let els = v.elements();
                if els.is_empty() && !self.unicode {
                    out.push_str("{# #}");
                } else {
                    self.items(open, close, els.iter(), child(0), out);
                }
            }
            Value::Closure(_) | Value::Prim(_) => out.push_str("<function>"),
            Value::Prop(_) => out.push_str("<prop>"),
        }
    }

    fn tuple_items(&self, v: &Value, ty: Option<&Type>, out: &mut String) {
        let (a, b) = v.as_pair();
        let (ta, tb) = match self.resolve(ty) {
            Some(Type::Prod(x, y)) => (Some(&**x), Some(&**y)),
            _ => (None, None),
        };
        self.value(a, ta, out);
        out.push_str(", ");
        if matches!(b, Value::Pair(_)) {
            self.tuple_items(b, tb, out);
        } else {
            self.value(b, tb, out);
        }
    }

    fn items<'v>(
        &self,
        open: &str,
        close: &str,
        xs: impl Iterator<Item = &'v Value>,
        elem: Option<&Type>,
        out: &mut String,
    ) {
        out.push_str(open);
        for (i, x) in xs.enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.value(x, elem, out);
        }
        out.push_str(close);
    }
}

/// Haskell-style modulus: the result takes the sign of the divisor.
pub fn floor_mod(a: &BigRational, b: &BigRational) -> Result<BigRational> {
    if b.is_zero() {
        return Err(DiscoError::DivisionByZero);
    }
    Ok(a - b * (a / b).floor())
}

pub fn divides(a: &BigRational, b: &BigRational) -> bool {
    if a.is_zero() {
        b.is_zero()
    } else {
        (b / a).is_integer()
    }
}

pub fn monus(a: &BigRational, b: &BigRational) -> BigRational {
    let d = a - b;
    if d.is_negative() {
        BigRational::zero()
    } else {
        d
    }
}
