//! Constraint solving: structural decomposition down to atomic subtyping
//! constraints, then assignment of base types over the numeric lattice.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{DiscoError, Result};
use crate::types::*;

/// Fresh unification variables.
#[derive(Debug, Default)]
pub struct Supply(u32);

impl Supply {
    pub fn new() -> Self {
        Supply(0)
    }

    pub fn fresh(&mut self) -> TyVar {
        self.0 += 1;
        TyVar(self.0)
    }

    pub fn fresh_ty(&mut self) -> Type {
        Type::Var(self.fresh())
    }
}

/// Result-type functions of the overloaded numeric builtins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Abs,
    Floor,
    Ceiling,
}

impl Family {
    pub fn apply(self, b: BaseTy) -> BaseTy {
        use BaseTy::*;
        match (self, b) {
            (Family::Abs, Z) => N,
            (Family::Abs, Q) => F,
            (Family::Floor | Family::Ceiling, Q) => Z,
            (Family::Floor | Family::Ceiling, F) => N,
            (_, other) => other,
        }
    }
}

/// Which collection constructors a [`Constraint::SameKind`] admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindRange {
    /// Any collection; lists when nothing else decides.
    Any,
    /// Bags or sets; sets when nothing else decides.
    BagOrSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsKind {
    Abs,
    Card,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Sub(Type, Type),
    Qual(Qualifier, Type),
    /// `result` is at least `family(arg)` once `arg` is a known base type.
    Family(Family, Type, Type),
    /// Every `(container, elem)` pair is `K(elem)` for one shared `K`.
    SameKind(Vec<(Type, Type)>, KindRange),
    /// `|arg|`: cardinality if `arg` is a collection, else absolute value.
    /// Tagged with the node it came from.
    AbsOrCard(usize, Type, Type),
}

#[derive(Debug, Clone, Default)]
pub struct Solution {
    subst: HashMap<TyVar, Type>,
    /// Qualifiers left on unsolved (polymorphic) variables.
    pub residual: Vec<(Qualifier, TyVar)>,
    pub abs_or_card: HashMap<usize, AbsKind>,
}

impl Solution {
    pub fn apply(&self, t: &Type) -> Type {
        zonk(&self.subst, t)
    }
}

fn zonk(subst: &HashMap<TyVar, Type>, t: &Type) -> Type {
    t.map(&mut |t| match t {
        Type::Var(v) => subst.get(v).map(|s| zonk(subst, s)),
        _ => None,
    })
}

fn show(t: &Type) -> String {
    t.display(true)
}

fn qual_error(ty: &Type, q: Qualifier) -> DiscoError {
    DiscoError::Qualifier {
        ty: show(ty),
        operation: q.operation().to_string(),
    }
}

fn collection_kind(t: &Type) -> Option<fn(Type) -> Type> {
    match t {
        Type::List(_) => Some(Type::list),
        Type::Bag(_) => Some(Type::bag),
        Type::Set(_) => Some(Type::set),
        _ => None,
    }
}

struct Solver<'a> {
    env: &'a SynEnv,
    supply: &'a mut Supply,
    subst: HashMap<TyVar, Type>,
    work: VecDeque<Constraint>,
    atomic: Vec<(Type, Type)>,
    quals: BTreeMap<TyVar, BTreeSet<Qualifier>>,
    deferred: Vec<Constraint>,
    families: Vec<(Family, Type, Type)>,
    assumed: HashSet<(Type, Type)>,
    qual_assumed: HashSet<String>,
    abs_or_card: HashMap<usize, AbsKind>,
}

impl<'a> Solver<'a> {
    fn new(env: &'a SynEnv, supply: &'a mut Supply, cs: Vec<Constraint>) -> Self {
        Solver {
            env,
            supply,
            subst: HashMap::new(),
            work: cs.into(),
            atomic: Vec::new(),
            quals: BTreeMap::new(),
            deferred: Vec::new(),
            families: Vec::new(),
            assumed: HashSet::new(),
            qual_assumed: HashSet::new(),
            abs_or_card: HashMap::new(),
        }
    }

    fn zonk(&self, t: &Type) -> Type {
        zonk(&self.subst, t)
    }

    fn bind(&mut self, v: TyVar, t: Type) {
        debug_assert!(!self.subst.contains_key(&v));
        self.subst.insert(v, t.clone());
        let (touched, kept): (Vec<_>, Vec<_>) = std::mem::take(&mut self.atomic)
            .into_iter()
            .partition(|(a, b)| a.mentions_var(v) || b.mentions_var(v));
        self.atomic = kept;
        self.work
            .extend(touched.into_iter().map(|(a, b)| Constraint::Sub(a, b)));
        if let Some(qs) = self.quals.remove(&v) {
            self.work
                .extend(qs.into_iter().map(|q| Constraint::Qual(q, t.clone())));
        }
    }

    /// Same outer constructor as `t`, with fresh variables as children.
    fn expand(&mut self, t: &Type) -> Type {
        let mut fresh = || Box::new(self.supply.fresh_ty());
        match t {
            Type::Arrow(..) => Type::Arrow(fresh(), fresh()),
            Type::Prod(..) => Type::Prod(fresh(), fresh()),
            Type::Sum(..) => Type::Sum(fresh(), fresh()),
            Type::List(_) => Type::List(fresh()),
            Type::Bag(_) => Type::Bag(fresh()),
            Type::Set(_) => Type::Set(fresh()),
            other => other.clone(),
        }
    }

    fn run(&mut self) -> Result<()> {
        loop {
            while let Some(c) = self.work.pop_front() {
                self.step(c)?;
            }
            if !self.resolve_deferred()? {
                break;
            }
        }
        self.numeric()
    }

    fn step(&mut self, c: Constraint) -> Result<()> {
        match c {
            Constraint::Sub(a, b) => {
                let (a, b) = (self.zonk(&a), self.zonk(&b));
                self.sub(a, b)
            }
            Constraint::Qual(q, t) => {
                let t = self.zonk(&t);
                self.qual(q, t)
            }
            Constraint::Family(f, a, r) => {
                self.families.push((f, a, r));
                Ok(())
            }
            d @ (Constraint::SameKind(..) | Constraint::AbsOrCard(..)) => {
                self.deferred.push(d);
                Ok(())
            }
        }
    }

    fn sub(&mut self, a: Type, b: Type) -> Result<()> {
        use Type::*;
        if a == b {
            return Ok(());
        }
        match (&a, &b) {
            (Var(_), Var(_)) => self.atomic.push((a, b)),
            (Var(_), Base(n)) | (Base(n), Var(_)) if n.is_numeric() => self.atomic.push((a, b)),
            (Var(x), Base(_) | Skolem(_) | Param(_) | Syn(_)) => self.bind(*x, b),
            (Base(_) | Skolem(_) | Param(_) | Syn(_), Var(x)) => self.bind(*x, a),
            (Var(x), t) | (t, Var(x)) => {
                if t.mentions_var(*x) {
                    return Err(DiscoError::InfiniteType);
                }
                let x = *x;
                let e = self.expand(t);
                let var_on_left = matches!(a, Var(_));
                self.bind(x, e.clone());
                let (l, r) = if var_on_left { (e, b) } else { (a, e) };
                self.work.push_back(Constraint::Sub(l, r));
            }
            (Syn(_), _) | (_, Syn(_)) => {
                if self.assumed.insert((a.clone(), b.clone())) {
                    let a2 = self.env.whnf(&a)?.clone();
                    let b2 = self.env.whnf(&b)?.clone();
                    self.work.push_back(Constraint::Sub(a2, b2));
                }
            }
            (Base(x), Base(y)) => {
                if !base_leq(*x, *y) {
                    return Err(if x.is_numeric() && y.is_numeric() {
                        DiscoError::Unsatisfiable {
                            sub: show(&a),
                            sup: show(&b),
                        }
                    } else {
                        DiscoError::ShapeMismatch
                    });
                }
            }
            (Arrow(d1, c1), Arrow(d2, c2)) => {
                self.work
                    .push_back(Constraint::Sub((**d2).clone(), (**d1).clone()));
                self.work
                    .push_back(Constraint::Sub((**c1).clone(), (**c2).clone()));
            }
            (Prod(a1, a2), Prod(b1, b2)) | (Sum(a1, a2), Sum(b1, b2)) => {
                self.work
                    .push_back(Constraint::Sub((**a1).clone(), (**b1).clone()));
                self.work
                    .push_back(Constraint::Sub((**a2).clone(), (**b2).clone()));
            }
            (List(x), List(y)) | (Bag(x), Bag(y)) | (Set(x), Set(y)) => {
                self.work.push_back(Constraint::Sub((**x).clone(), (**y).clone()));
            }
            _ => return Err(DiscoError::ShapeMismatch),
        }
        Ok(())
    }

    fn qual(&mut self, q: Qualifier, t: Type) -> Result<()> {
        use Type::*;
        match &t {
            Var(v) => {
                self.quals.entry(*v).or_default().insert(q);
            }
            Base(b) => {
                if !qual_holds(q, *b) {
                    return Err(qual_error(&t, q));
                }
            }
            Skolem(_) | Param(_) if q == Qualifier::Cmp => {}
            Syn(s) if q == Qualifier::Cmp => {
                if self.qual_assumed.insert(s.clone()) {
                    let body = self.env.unfold(s)?.clone();
                    self.work.push_back(Constraint::Qual(q, body));
                }
            }
            Prod(a, b) | Sum(a, b) if q == Qualifier::Cmp => {
                self.work.push_back(Constraint::Qual(q, (**a).clone()));
                self.work.push_back(Constraint::Qual(q, (**b).clone()));
            }
            List(e) | Bag(e) | Set(e) if q == Qualifier::Cmp => {
                self.work.push_back(Constraint::Qual(q, (**e).clone()));
            }
            _ => return Err(qual_error(&t, q)),
        }
        Ok(())
    }

    fn emit_kind(&mut self, kind: fn(Type) -> Type, pairs: &[(Type, Type)]) {
        let set_like = matches!(kind(Type::unit()), Type::Bag(_) | Type::Set(_));
        for (c, e) in pairs {
            let k = kind(e.clone());
            self.work.push_back(Constraint::Sub(c.clone(), k.clone()));
            self.work.push_back(Constraint::Sub(k, c.clone()));
            if set_like {
                self.work.push_back(Constraint::Qual(Qualifier::Cmp, e.clone()));
            }
        }
    }

    fn head(&self, t: &Type) -> Result<Type> {
        let z = self.zonk(t);
        Ok(self.env.whnf(&z)?.clone())
    }

    /// Resolve deferred constraints whose deciding type is now known; when
    /// none is, apply the default to the oldest one. Returns whether any
    /// progress was made.
    fn resolve_deferred(&mut self) -> Result<bool> {
        let pending = std::mem::take(&mut self.deferred);
        let mut keep = Vec::new();
        let mut progressed = false;
        for d in pending {
            match &d {
                Constraint::SameKind(pairs, range) => {
                    let mut found = None;
                    for (c, _) in pairs {
                        match self.head(c)? {
                            Type::Var(_) => {}
                            h => match collection_kind(&h) {
                                Some(k) => {
                                    found = Some((k, h));
                                    break;
                                }
                                None => return Err(DiscoError::ShapeMismatch),
                            },
                        }
                    }
                    match found {
                        Some((k, h)) => {
                            if *range == KindRange::BagOrSet && matches!(h, Type::List(_)) {
                                return Err(DiscoError::ShapeMismatch);
                            }
                            self.emit_kind(k, pairs);
                            progressed = true;
                        }
                        None => keep.push(d),
                    }
                }
                Constraint::AbsOrCard(id, arg, res) => match self.head(arg)? {
                    Type::Var(_) => keep.push(d),
                    h => {
                        let kind = if h.is_collection() {
                            AbsKind::Card
                        } else {
                            AbsKind::Abs
                        };
                        self.decide_abs(*id, kind, arg.clone(), res.clone());
                        progressed = true;
                    }
                },
                _ => unreachable!("only deferred constraints are queued here"),
            }
        }
        if !progressed && !keep.is_empty() {
            match keep.remove(0) {
                Constraint::SameKind(pairs, range) => {
                    let k = match range {
                        KindRange::Any => Type::list,
                        KindRange::BagOrSet => Type::set,
                    };
                    self.emit_kind(k, &pairs);
                }
                Constraint::AbsOrCard(id, arg, res) => self.decide_abs(id, AbsKind::Abs, arg, res),
                _ => unreachable!(),
            }
            progressed = true;
        }
        self.deferred = keep;
        Ok(progressed)
    }

    fn decide_abs(&mut self, id: usize, kind: AbsKind, arg: Type, res: Type) {
        self.abs_or_card.insert(id, kind);
        match kind {
            AbsKind::Card => self.work.push_back(Constraint::Sub(Type::nat(), res)),
            AbsKind::Abs => {
                self.work.push_back(Constraint::Qual(Qualifier::Num, arg.clone()));
                self.work.push_back(Constraint::Family(Family::Abs, arg, res));
            }
        }
    }

    /// Assign every variable left in atomic constraints.
    fn numeric(&mut self) -> Result<()> {
        let atomic: Vec<(Type, Type)> = std::mem::take(&mut self.atomic)
            .into_iter()
            .map(|(a, b)| (self.zonk(&a), self.zonk(&b)))
            .collect();
        let mut vars: BTreeSet<TyVar> = self.quals.keys().copied().collect();
        let mut edges = Vec::new();
        let mut lowers: HashMap<TyVar, Vec<BaseTy>> = HashMap::new();
        let mut uppers: HashMap<TyVar, Vec<BaseTy>> = HashMap::new();
        for (a, b) in &atomic {
            match (a, b) {
                (Type::Var(x), Type::Var(y)) => {
                    vars.insert(*x);
                    vars.insert(*y);
                    if x != y {
                        edges.push((*x, *y));
                    }
                }
                (Type::Base(n), Type::Var(y)) => {
                    vars.insert(*y);
                    lowers.entry(*y).or_default().push(*n);
                }
                (Type::Var(x), Type::Base(n)) => {
                    vars.insert(*x);
                    uppers.entry(*x).or_default().push(*n);
                }
                (Type::Base(x), Type::Base(y)) if base_leq(*x, *y) => {}
                _ => {
                    return Err(DiscoError::Unsatisfiable {
                        sub: show(a),
                        sup: show(b),
                    })
                }
            }
        }
        let quals = |v: TyVar| -> Vec<Qualifier> {
            self.quals
                .get(&v)
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default()
        };
        let numeric_qual = |v: TyVar| quals(v).iter().any(|q| *q != Qualifier::Cmp);

        // Connected components over variable-variable edges.
        let mut parent: HashMap<TyVar, TyVar> = vars.iter().map(|v| (*v, *v)).collect();
        fn find(parent: &mut HashMap<TyVar, TyVar>, v: TyVar) -> TyVar {
            let p = parent[&v];
            if p == v {
                return v;
            }
            let r = find(parent, p);
            parent.insert(v, r);
            r
        }
        for (x, y) in &edges {
            let (rx, ry) = (find(&mut parent, *x), find(&mut parent, *y));
            if rx != ry {
                let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
                parent.insert(hi, lo);
            }
        }
        let mut numeric_roots = BTreeSet::new();
        for v in &vars {
            if lowers.contains_key(v) || uppers.contains_key(v) || numeric_qual(*v) {
                numeric_roots.insert(find(&mut parent, *v));
            }
        }
        let roots: HashMap<TyVar, TyVar> = vars.iter().map(|v| (*v, find(&mut parent, *v))).collect();

        let mut val: HashMap<TyVar, BaseTy> = HashMap::new();
        let numeric_vars: Vec<TyVar> = vars
            .iter()
            .copied()
            .filter(|v| numeric_roots.contains(&roots[v]))
            .collect();
        loop {
            let before = val.len();
            // Upward: least solution for everything with a lower bound.
            let mut lo: HashMap<TyVar, BaseTy> = HashMap::new();
            for &v in &numeric_vars {
                if val.contains_key(&v) {
                    continue;
                }
                let mut seeds: Vec<BaseTy> = lowers.get(&v).cloned().unwrap_or_default();
                seeds.extend(edges.iter().filter(|e| e.1 == v).filter_map(|e| val.get(&e.0)));
                if !seeds.is_empty() || numeric_qual(v) {
                    let j = seeds.into_iter().fold(BaseTy::N, lattice_join);
                    let b = least_satisfying(j, &quals(v))
                        .ok_or_else(|| qual_error(&Type::Base(j), first_failing(&quals(v), j)))?;
                    lo.insert(v, b);
                }
            }
            let mut changed = true;
            while changed {
                changed = false;
                for &(x, y) in &edges {
                    if val.contains_key(&y) {
                        continue;
                    }
                    let Some(&bx) = lo.get(&x) else { continue };
                    let j = lo.get(&y).map_or(bx, |&by| lattice_join(by, bx));
                    let b = least_satisfying(j, &quals(y))
                        .ok_or_else(|| qual_error(&Type::Base(j), first_failing(&quals(y), j)))?;
                    if lo.get(&y) != Some(&b) {
                        lo.insert(y, b);
                        changed = true;
                    }
                }
            }
            val.extend(lo);
            // Downward: greatest solution for the rest, from upper bounds.
            let mut hi: HashMap<TyVar, BaseTy> = HashMap::new();
            for &v in &numeric_vars {
                if val.contains_key(&v) {
                    continue;
                }
                let mut seeds: Vec<BaseTy> = uppers.get(&v).cloned().unwrap_or_default();
                seeds.extend(edges.iter().filter(|e| e.0 == v).filter_map(|e| val.get(&e.1)));
                if let Some(m) = seeds.into_iter().reduce(lattice_meet) {
                    hi.insert(v, m);
                }
            }
            let mut changed = true;
            while changed {
                changed = false;
                for &(x, y) in &edges {
                    if val.contains_key(&x) {
                        continue;
                    }
                    let Some(&by) = hi.get(&y) else { continue };
                    let m = hi.get(&x).map_or(by, |&bx| lattice_meet(bx, by));
                    if hi.get(&x) != Some(&m) {
                        hi.insert(x, m);
                        changed = true;
                    }
                }
            }
            val.extend(hi);
            if val.len() == before {
                break;
            }
        }
        for &v in &numeric_vars {
            if let std::collections::hash_map::Entry::Vacant(e) = val.entry(v) {
                let b = least_satisfying(BaseTy::N, &quals(v))
                    .ok_or_else(|| qual_error(&Type::nat(), first_failing(&quals(v), BaseTy::N)))?;
                e.insert(b);
            }
        }

        // Verify every atomic constraint under the assignment.
        let base_of = |t: &Type| match t {
            Type::Base(b) => *b,
            Type::Var(v) => val[v],
            _ => unreachable!("atomic constraints relate variables and bases"),
        };
        for (a, b) in &atomic {
            let (x, y) = match (a, b) {
                (Type::Var(v), _) | (_, Type::Var(v)) if !val.contains_key(v) => continue,
                _ => (base_of(a), base_of(b)),
            };
            if !lattice_leq(x, y) {
                if let Type::Var(v) = a {
                    if let Some(q) = quals(*v).into_iter().find(|q| !qual_holds(*q, y)) {
                        return Err(qual_error(&Type::Base(y), q));
                    }
                }
                return Err(DiscoError::Unsatisfiable {
                    sub: show(&Type::Base(x)),
                    sup: show(&Type::Base(y)),
                });
            }
        }

        for (v, b) in &val {
            self.quals.remove(v);
            self.subst.insert(*v, Type::Base(*b));
        }
        // Variables with no numeric information stay polymorphic; each
        // component collapses onto one representative.
        for v in &vars {
            if val.contains_key(v) {
                continue;
            }
            let r = roots[v];
            if r != *v {
                if let Some(qs) = self.quals.remove(v) {
                    self.quals.entry(r).or_default().extend(qs);
                }
                self.subst.insert(*v, Type::Var(r));
            }
        }
        Ok(())
    }
}

fn first_failing(quals: &[Qualifier], b: BaseTy) -> Qualifier {
    quals
        .iter()
        .copied()
        .find(|q| !qual_holds(*q, b))
        .unwrap_or(Qualifier::Num)
}

/// Solve a constraint set. Overloaded numeric builtins are resolved by
/// re-solving with their result bounds once their argument types are known.
pub fn solve(env: &SynEnv, constraints: Vec<Constraint>, supply: &mut Supply) -> Result<Solution> {
    let mut extra: Vec<Constraint> = Vec::new();
    for _ in 0..16 {
        let mut all = constraints.clone();
        all.extend(extra.iter().cloned());
        let mut s = Solver::new(env, supply, all);
        s.run()?;
        let mut changed = false;
        for (f, arg, res) in std::mem::take(&mut s.families) {
            match s.zonk(&arg) {
                Type::Base(b) if b.is_numeric() => {
                    let need = Constraint::Sub(Type::Base(f.apply(b)), res.clone());
                    if !extra.contains(&need) {
                        extra.push(need);
                        changed = true;
                    }
                }
                other => return Err(qual_error(&other, Qualifier::Num)),
            }
        }
        if !changed {
            let residual = s
                .quals
                .iter()
                .flat_map(|(v, qs)| qs.iter().map(move |q| (*q, *v)))
                .collect();
            return Ok(Solution {
                subst: s.subst,
                residual,
                abs_or_card: s.abs_or_card,
            });
        }
    }
    Err(DiscoError::Unsatisfiable {
        sub: "an overloaded builtin".into(),
        sup: "a stable type".into(),
    })
}

/// Solve and report the display type of `ty`: constrained variables get
/// their least satisfying base, unconstrained ones stay variables.
pub fn monomorphize(
    env: &SynEnv,
    constraints: Vec<Constraint>,
    ty: &Type,
    supply: &mut Supply,
) -> Result<Type> {
    Ok(solve(env, constraints, supply)?.apply(ty))
}
