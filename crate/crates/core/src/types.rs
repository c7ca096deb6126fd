//! Type representation, the numeric lattice, qualifiers, and coinductive
//! equality and subtyping over equirecursive synonyms.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{DiscoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseTy {
    N,
    Z,
    F,
    Q,
    Bool,
    Char,
    Unit,
    /// Quantified properties: testable, but not data.
    Prop,
}

/// Unification variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TyVar(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Base(BaseTy),
    Var(TyVar),
    /// A type variable as written in a signature, e.g. the `a` in `a -> a`.
    Param(String),
    /// Rigid variable standing for an arbitrary type while checking a
    /// polymorphic signature.
    Skolem(String),
    Sum(Box<Type>, Box<Type>),
    Prod(Box<Type>, Box<Type>),
    Arrow(Box<Type>, Box<Type>),
    List(Box<Type>),
    Bag(Box<Type>),
    Set(Box<Type>),
    Syn(String),
}

pub const NUMERIC: [BaseTy; 4] = [BaseTy::N, BaseTy::Z, BaseTy::F, BaseTy::Q];

impl BaseTy {
    pub fn is_numeric(self) -> bool {
        matches!(self, BaseTy::N | BaseTy::Z | BaseTy::F | BaseTy::Q)
    }

    pub fn name(self, unicode: bool) -> &'static str {
        use BaseTy::*;
        match (self, unicode) {
            (N, true) => "ℕ",
            (N, false) => "N",
            (Z, true) => "ℤ",
            (Z, false) => "Z",
            (F, true) => "𝔽",
            (F, false) => "F",
            (Q, true) => "ℚ",
            (Q, false) => "Q",
            (Bool, _) => "Bool",
            (Char, _) => "Char",
            (Unit, _) => "Unit",
            (Prop, _) => "Prop",
        }
    }
}

/// Order on the numeric diamond: ℕ ≤ ℤ ≤ ℚ and ℕ ≤ 𝔽 ≤ ℚ.
pub fn lattice_leq(a: BaseTy, b: BaseTy) -> bool {
    debug_assert!(a.is_numeric() && b.is_numeric());
    a == b || a == BaseTy::N || b == BaseTy::Q
}

pub fn lattice_join(a: BaseTy, b: BaseTy) -> BaseTy {
    if lattice_leq(a, b) {
        b
    } else if lattice_leq(b, a) {
        a
    } else {
        BaseTy::Q
    }
}

pub fn lattice_meet(a: BaseTy, b: BaseTy) -> BaseTy {
    if lattice_leq(a, b) {
        a
    } else if lattice_leq(b, a) {
        b
    } else {
        BaseTy::N
    }
}

/// Subtyping on base types: the lattice on numerics, equality elsewhere.
pub fn base_leq(a: BaseTy, b: BaseTy) -> bool {
    if a.is_numeric() && b.is_numeric() {
        lattice_leq(a, b)
    } else {
        a == b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qualifier {
    /// Addition and multiplication.
    Num,
    /// Subtraction.
    Sub,
    /// Division.
    Div,
    /// Decidable equality and ordering.
    Cmp,
}

impl Qualifier {
    pub const ALL: [Qualifier; 4] = [Qualifier::Num, Qualifier::Sub, Qualifier::Div, Qualifier::Cmp];

    pub fn operation(self) -> &'static str {
        match self {
            Qualifier::Num => "addition and multiplication",
            Qualifier::Sub => "subtraction",
            Qualifier::Div => "division",
            Qualifier::Cmp => "comparison",
        }
    }
}

pub fn qual_holds(q: Qualifier, b: BaseTy) -> bool {
    use BaseTy::*;
    match q {
        Qualifier::Num => b.is_numeric(),
        Qualifier::Sub => matches!(b, Z | Q),
        Qualifier::Div => matches!(b, F | Q),
        Qualifier::Cmp => b != Prop,
    }
}

/// Least numeric base above `lower` satisfying every qualifier.
pub fn least_satisfying(lower: BaseTy, quals: &[Qualifier]) -> Option<BaseTy> {
    // N, Z, F, Q is a linear extension of the lattice, and the candidate
    // set is always principal, so the first hit is the least element.
    NUMERIC
        .into_iter()
        .find(|&b| lattice_leq(lower, b) && quals.iter().all(|&q| qual_holds(q, b)))
}

impl Type {
    pub fn nat() -> Type {
        Type::Base(BaseTy::N)
    }
    pub fn int() -> Type {
        Type::Base(BaseTy::Z)
    }
    pub fn frac() -> Type {
        Type::Base(BaseTy::F)
    }
    pub fn rat() -> Type {
        Type::Base(BaseTy::Q)
    }
    pub fn bool() -> Type {
        Type::Base(BaseTy::Bool)
    }
    pub fn char() -> Type {
        Type::Base(BaseTy::Char)
    }
    pub fn unit() -> Type {
        Type::Base(BaseTy::Unit)
    }
    pub fn prop() -> Type {
        Type::Base(BaseTy::Prop)
    }
    pub fn string() -> Type {
        Type::list(Type::char())
    }
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }
    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }
    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Box::new(a), Box::new(b))
    }
    pub fn list(a: Type) -> Type {
        Type::List(Box::new(a))
    }
    pub fn bag(a: Type) -> Type {
        Type::Bag(Box::new(a))
    }
    pub fn set(a: Type) -> Type {
        Type::Set(Box::new(a))
    }
    pub fn syn(name: &str) -> Type {
        Type::Syn(name.to_string())
    }

    pub fn children(&self) -> Vec<&Type> {
        match self {
            Type::Sum(a, b) | Type::Prod(a, b) | Type::Arrow(a, b) => vec![a, b],
            Type::List(a) | Type::Bag(a) | Type::Set(a) => vec![a],
            _ => vec![],
        }
    }

    /// Apply `f` to every node bottom-up.
    pub fn map(&self, f: &mut impl FnMut(&Type) -> Option<Type>) -> Type {
        if let Some(t) = f(self) {
            return t;
        }
        match self {
            Type::Sum(a, b) => Type::sum(a.map(f), b.map(f)),
            Type::Prod(a, b) => Type::prod(a.map(f), b.map(f)),
            Type::Arrow(a, b) => Type::arrow(a.map(f), b.map(f)),
            Type::List(a) => Type::list(a.map(f)),
            Type::Bag(a) => Type::bag(a.map(f)),
            Type::Set(a) => Type::set(a.map(f)),
            other => other.clone(),
        }
    }

    pub fn any(&self, pred: &impl Fn(&Type) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn mentions_var(&self, v: TyVar) -> bool {
        self.any(&|t| *t == Type::Var(v))
    }

    pub fn vars(&self, out: &mut Vec<TyVar>) {
        match self {
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            _ => self.children().into_iter().for_each(|c| c.vars(out)),
        }
    }

    pub fn params(&self, out: &mut Vec<String>) {
        match self {
            Type::Param(p) => {
                if !out.contains(p) {
                    out.push(p.clone())
                }
            }
            _ => self.children().into_iter().for_each(|c| c.params(out)),
        }
    }

    pub fn syn_refs(&self, out: &mut Vec<String>) {
        match self {
            Type::Syn(s) => out.push(s.clone()),
            _ => self.children().into_iter().for_each(|c| c.syn_refs(out)),
        }
    }

    pub fn is_collection(&self) -> bool {
        matches!(self, Type::List(_) | Type::Bag(_) | Type::Set(_))
    }

    /// Render with Unicode type names (ℕ, ×, →) or their ASCII spellings.
    pub fn display(&self, unicode: bool) -> String {
        let mut names = Vec::new();
        let mut out = String::new();
        fmt_type(self, unicode, 0, &mut names, &mut out);
        out
    }
}

/// Letter names for unification variables, in order of first appearance.
fn var_name(v: TyVar, names: &mut Vec<TyVar>) -> String {
    let idx = match names.iter().position(|n| *n == v) {
        Some(i) => i,
        None => {
            names.push(v);
            names.len() - 1
        }
    };
    let letter = (b'a' + (idx % 26) as u8) as char;
    if idx < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", idx / 26)
    }
}

fn type_level(t: &Type) -> u8 {
    match t {
        Type::Arrow(..) => 1,
        Type::Sum(..) => 2,
        Type::Prod(..) => 3,
        _ => 4,
    }
}

fn fmt_type(t: &Type, unicode: bool, min: u8, names: &mut Vec<TyVar>, out: &mut String) {
    let level = type_level(t);
    if level < min {
        out.push('(');
    }
    let (times, arrow) = if unicode { ("×", "→") } else { ("*", "->") };
    match t {
        Type::Base(b) => out.push_str(b.name(unicode)),
        Type::Var(v) => out.push_str(&var_name(*v, names)),
        Type::Param(p) | Type::Skolem(p) | Type::Syn(p) => out.push_str(p),
        Type::Arrow(a, b) => {
            fmt_type(a, unicode, 2, names, out);
            let _ = write!(out, " {arrow} ");
            fmt_type(b, unicode, 1, names, out);
        }
        Type::Sum(a, b) => {
            fmt_type(a, unicode, 3, names, out);
            out.push_str(" + ");
            fmt_type(b, unicode, 2, names, out);
        }
        Type::Prod(a, b) => {
            fmt_type(a, unicode, 4, names, out);
            let _ = write!(out, " {times} ");
            fmt_type(b, unicode, 3, names, out);
        }
        Type::List(a) | Type::Bag(a) | Type::Set(a) => {
            out.push_str(match t {
                Type::List(_) => "List(",
                Type::Bag(_) => "Bag(",
                _ => "Set(",
            });
            fmt_type(a, unicode, 0, names, out);
            out.push(')');
        }
    }
    if level < min {
        out.push(')');
    }
}

/// Type synonym environment. Immutable once a module has loaded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynEnv {
    defs: HashMap<String, Type>,
}

impl SynEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build an environment and check it: every referenced synonym is bound
    /// and every cycle passes through a type constructor.
    pub fn from_defs(defs: impl IntoIterator<Item = (String, Type)>) -> Result<Self> {
        let env = SynEnv {
            defs: defs.into_iter().collect(),
        };
        env.validate()?;
        Ok(env)
    }

    pub fn get(&self, name: &str) -> Option<&Type> {
        self.defs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.defs.keys()
    }

    pub fn unfold(&self, name: &str) -> Result<&Type> {
        self.defs
            .get(name)
            .ok_or_else(|| DiscoError::UnboundSynonym(name.to_string()))
    }

    /// Unfold synonyms at the root until a non-synonym appears.
    pub fn whnf<'a>(&'a self, mut t: &'a Type) -> Result<&'a Type> {
        let mut steps = 0;
        while let Type::Syn(name) = t {
            t = self.unfold(name)?;
            steps += 1;
            if steps > self.defs.len() {
                return Err(DiscoError::NonContractive(name.clone()));
            }
        }
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        for body in self.defs.values() {
            let mut refs = Vec::new();
            body.syn_refs(&mut refs);
            if let Some(missing) = refs.iter().find(|r| !self.defs.contains_key(*r)) {
                return Err(DiscoError::UnboundSynonym(missing.clone()));
            }
        }
        for name in self.defs.keys() {
            let mut seen = HashSet::new();
            let mut cur = name.as_str();
            while let Some(Type::Syn(next)) = self.defs.get(cur) {
                if !seen.insert(cur) || next == name {
                    return Err(DiscoError::NonContractive(name.clone()));
                }
                cur = next;
            }
        }
        Ok(())
    }

    pub fn check_type(&self, t: &Type) -> Result<()> {
        let mut refs = Vec::new();
        t.syn_refs(&mut refs);
        match refs.into_iter().find(|r| !self.defs.contains_key(r)) {
            Some(missing) => Err(DiscoError::UnboundSynonym(missing)),
            None => Ok(()),
        }
    }
}

/// Coinductive relation checker. The assumption set records every pair of
/// types compared with a synonym at the root; revisiting a pair succeeds.
pub struct Coinductive<'a> {
    env: &'a SynEnv,
    assumed: HashSet<(Type, Type)>,
}

impl<'a> Coinductive<'a> {
    pub fn new(env: &'a SynEnv) -> Self {
        Coinductive {
            env,
            assumed: HashSet::new(),
        }
    }

    pub fn assumptions(&self) -> usize {
        self.assumed.len()
    }

    pub fn equal(&mut self, a: &Type, b: &Type) -> Result<bool> {
        self.relate(a, b, false)
    }

    pub fn subtype(&mut self, a: &Type, b: &Type) -> Result<bool> {
        self.relate(a, b, true)
    }

    fn relate(&mut self, a: &Type, b: &Type, sub: bool) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        if matches!(a, Type::Syn(_)) || matches!(b, Type::Syn(_)) {
            if !self.assumed.insert((a.clone(), b.clone())) {
                return Ok(true);
            }
            let a2 = self.env.whnf(a)?.clone();
            let b2 = self.env.whnf(b)?.clone();
            return self.relate(&a2, &b2, sub);
        }
        Ok(match (a, b) {
            (Type::Base(x), Type::Base(y)) => {
                if sub {
                    base_leq(*x, *y)
                } else {
                    x == y
                }
            }
            (Type::Sum(a1, a2), Type::Sum(b1, b2)) | (Type::Prod(a1, a2), Type::Prod(b1, b2)) => {
                self.relate(a1, b1, sub)? && self.relate(a2, b2, sub)?
            }
            (Type::Arrow(d1, c1), Type::Arrow(d2, c2)) => {
                self.relate(d2, d1, sub)? && self.relate(c1, c2, sub)?
            }
            (Type::List(x), Type::List(y)) | (Type::Bag(x), Type::Bag(y)) | (Type::Set(x), Type::Set(y)) => {
                self.relate(x, y, sub)?
            }
            _ => false,
        })
    }
}

/// Equality of closed types up to unfolding of recursive synonyms.
pub fn type_eq(env: &SynEnv, a: &Type, b: &Type) -> Result<bool> {
    Coinductive::new(env).equal(a, b)
}

/// Structural subtyping of closed types, coinductive through synonyms.
pub fn is_subtype(env: &SynEnv, a: &Type, b: &Type) -> Result<bool> {
    Coinductive::new(env).subtype(a, b)
}

/// Every subterm reachable from `t`, unfolding synonyms along the way.
pub fn reachable_subterms(env: &SynEnv, t: &Type) -> Result<HashSet<Type>> {
    let mut seen = HashSet::new();
    let mut stack = vec![t.clone()];
    while let Some(t) = stack.pop() {
        if !seen.insert(t.clone()) {
            continue;
        }
        if let Type::Syn(name) = &t {
            stack.push(env.unfold(name)?.clone());
        }
        stack.extend(t.children().into_iter().cloned());
    }
    Ok(seen)
}
