//! Translation of surface declarations into core definitions: every
//! function becomes one lambda whose body is a single case expression.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{DiscoError, Result};
use crate::syntax::ast::*;
use crate::types::Type;

#[derive(Debug, Clone, PartialEq)]
pub struct CoreDef {
    pub name: String,
    pub sig: Type,
    /// Clause-free body.
    pub body: Expr,
}

/// A desugared module, with declarations grouped by kind.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoreModule {
    pub defs: Vec<CoreDef>,
    pub synonyms: Vec<(String, Type)>,
    pub imports: Vec<String>,
    pub docs: HashMap<String, String>,
    /// Attached tests in source order, keyed by the name they belong to.
    /// Kept as written so reports can echo them.
    pub tests: Vec<(String, Expr)>,
}

/// Variable names occurring anywhere in an expression (bound or free).
fn collect_names(e: &Expr, out: &mut BTreeSet<String>) {
    let pat = |p: &Pattern, out: &mut BTreeSet<String>| {
        let mut vs = Vec::new();
        p.bound_vars(&mut vs);
        out.extend(vs);
    };
    match e {
        Expr::Var(x) => {
            out.insert(x.clone());
        }
        Expr::Lambda(x, b) => {
            out.insert(x.clone());
            collect_names(b, out);
        }
        Expr::App(a, b) | Expr::BinOp(_, a, b) => {
            collect_names(a, out);
            collect_names(b, out);
        }
        Expr::UnOp(_, a) | Expr::Inj(_, a) | Expr::AbsOrCard(a) => collect_names(a, out),
        Expr::Tuple(es) | Expr::Container(_, es) => es.iter().for_each(|e| collect_names(e, out)),
        Expr::Case(bs) => {
            for b in bs {
                collect_names(&b.body, out);
                for g in &b.guards {
                    match g {
                        Guard::Bool(e) => collect_names(e, out),
                        Guard::Pat(e, p) => {
                            collect_names(e, out);
                            pat(p, out);
                        }
                        Guard::Otherwise => {}
                    }
                }
            }
        }
        Expr::Let(bs, body) => {
            for (x, e) in bs {
                out.insert(x.clone());
                collect_names(e, out);
            }
            collect_names(body, out);
        }
        Expr::Comprehension(_, head, quals) => {
            collect_names(head, out);
            for q in quals {
                match q {
                    Qual::Gen(x, e) | Qual::Let(x, e) => {
                        out.insert(x.clone());
                        collect_names(e, out);
                    }
                    Qual::Filter(e) => collect_names(e, out),
                }
            }
        }
        Expr::Ellipsis(_, a, b, c) => {
            collect_names(a, out);
            if let Some(b) = b {
                collect_names(b, out);
            }
            collect_names(c, out);
        }
        Expr::Quant(_, bs, body) => {
            out.extend(bs.iter().map(|(x, _)| x.clone()));
            collect_names(body, out);
        }
        Expr::Nat(_) | Expr::Char(_) | Expr::Str(_) | Expr::Unit | Expr::Bool(_) | Expr::Section(_) => {}
    }
}

fn fresh(base: &str, taken: &mut BTreeSet<String>) -> String {
    let mut name = base.to_string();
    let mut i = 1;
    while taken.contains(&name) {
        name = format!("{base}{i}");
        i += 1;
    }
    taken.insert(name.clone());
    name
}

/// `~op~` as a curried function.
pub fn desugar_section(op: BinOp) -> Expr {
    Expr::lambda(
        "x",
        Expr::lambda("y", Expr::bin(op, Expr::var("x"), Expr::var("y"))),
    )
}

/// Desugar inside an expression. Only sections change; everything else is
/// already core. Idempotent.
pub fn desugar_expr(e: &Expr) -> Expr {
    let d = |e: &Expr| Box::new(desugar_expr(e));
    match e {
        Expr::Section(op) => desugar_section(*op),
        Expr::Lambda(x, b) => Expr::Lambda(x.clone(), d(b)),
        Expr::App(a, b) => Expr::App(d(a), d(b)),
        Expr::BinOp(op, a, b) => Expr::BinOp(*op, d(a), d(b)),
        Expr::UnOp(op, a) => Expr::UnOp(*op, d(a)),
        Expr::Inj(s, a) => Expr::Inj(*s, d(a)),
        Expr::AbsOrCard(a) => Expr::AbsOrCard(d(a)),
        Expr::Tuple(es) => Expr::Tuple(es.iter().map(desugar_expr).collect()),
        Expr::Container(k, es) => Expr::Container(*k, es.iter().map(desugar_expr).collect()),
        Expr::Case(bs) => Expr::Case(
            bs.iter()
                .map(|b| Branch {
                    body: desugar_expr(&b.body),
                    guards: b
                        .guards
                        .iter()
                        .map(|g| match g {
                            Guard::Bool(e) => Guard::Bool(desugar_expr(e)),
                            Guard::Pat(e, p) => Guard::Pat(desugar_expr(e), p.clone()),
                            Guard::Otherwise => Guard::Otherwise,
                        })
                        .collect(),
                })
                .collect(),
        ),
        Expr::Let(bs, body) => Expr::Let(
            bs.iter().map(|(x, e)| (x.clone(), desugar_expr(e))).collect(),
            d(body),
        ),
        Expr::Comprehension(k, head, quals) => Expr::Comprehension(
            *k,
            d(head),
            quals
                .iter()
                .map(|q| match q {
                    Qual::Gen(x, e) => Qual::Gen(x.clone(), desugar_expr(e)),
                    Qual::Let(x, e) => Qual::Let(x.clone(), desugar_expr(e)),
                    Qual::Filter(e) => Qual::Filter(desugar_expr(e)),
                })
                .collect(),
        ),
        Expr::Ellipsis(k, a, b, c) => Expr::Ellipsis(*k, d(a), b.as_ref().map(|b| d(b)), d(c)),
        Expr::Quant(q, bs, body) => Expr::Quant(*q, bs.clone(), d(body)),
        Expr::Var(_) | Expr::Nat(_) | Expr::Char(_) | Expr::Str(_) | Expr::Unit | Expr::Bool(_) => e.clone(),
    }
}

/// Merge the clauses of one function into a single lambda over a case
/// expression, one branch per clause in order.
pub fn desugar_definition(name: &str, sig: &Type, clauses: &[DefClause]) -> Result<CoreDef> {
    let arity = clauses.first().map(|c| c.patterns.len()).unwrap_or(0);
    if clauses.iter().any(|c| c.patterns.len() != arity) {
        return Err(DiscoError::ArityMismatch {
            name: name.to_string(),
        });
    }
    let core = |body: Expr| CoreDef {
        name: name.to_string(),
        sig: sig.clone(),
        body,
    };
    match clauses {
        [] => {
            return Err(DiscoError::parse(
                Default::default(),
                format!("{name} has a type signature but no definition"),
            ))
        }
        [only] if arity == 0 => return Ok(core(desugar_expr(&only.body))),
        _ if arity == 0 => {
            return Err(DiscoError::parse(
                clauses[1].span,
                format!("{name} is defined more than once"),
            ))
        }
        [only] if only.patterns.iter().all(|p| matches!(p, Pattern::Var(_))) => {
            let body = only.patterns.iter().rev().fold(desugar_expr(&only.body), |b, p| {
                let Pattern::Var(x) = p else { unreachable!() };
                Expr::Lambda(x.clone(), Box::new(b))
            });
            return Ok(core(body));
        }
        _ => {}
    }

    let mut taken = BTreeSet::new();
    for c in clauses {
        collect_names(&c.body, &mut taken);
        for p in &c.patterns {
            let mut vs = Vec::new();
            p.bound_vars(&mut vs);
            taken.extend(vs);
        }
    }
    taken.insert(name.to_string());
    let params: Vec<String> = if arity == 1 {
        vec![fresh("p", &mut taken)]
    } else {
        (1..=arity).map(|i| fresh(&format!("p{i}"), &mut taken)).collect()
    };

    let branches = clauses
        .iter()
        .map(|c| Branch {
            body: desugar_expr(&c.body),
            guards: params
                .iter()
                .zip(&c.patterns)
                .filter(|(_, p)| **p != Pattern::Wild)
                .map(|(x, p)| Guard::Pat(Expr::Var(x.clone()), p.clone()))
                .collect(),
        })
        .collect();
    let body = params
        .iter()
        .rev()
        .fold(Expr::Case(branches), |b, x| Expr::Lambda(x.clone(), Box::new(b)));
    Ok(core(body))
}

/// Group a parsed module's declarations into core form.
pub fn desugar_module(m: &SurfaceModule) -> Result<CoreModule> {
    let mut out = CoreModule::default();
    let mut order: Vec<String> = Vec::new();
    let mut sigs: HashMap<String, Type> = HashMap::new();
    let mut clauses: HashMap<String, Vec<DefClause>> = HashMap::new();
    for d in &m.decls {
        match d {
            Decl::TypeSig(name, ty) => {
                order.push(name.clone());
                sigs.insert(name.clone(), ty.clone());
            }
            Decl::Def(c) => clauses.entry(c.name.clone()).or_default().push(c.clone()),
            Decl::TypeSynonym(name, ty) => {
                if out.synonyms.iter().any(|(n, _)| n == name) {
                    return Err(DiscoError::parse(
                        Default::default(),
                        format!("type {name} is defined more than once"),
                    ));
                }
                out.synonyms.push((name.clone(), ty.clone()))
            }
            Decl::Import(name) => out.imports.push(name.clone()),
            Decl::Doc(name, text) => {
                out.docs.insert(name.clone(), text.clone());
            }
            Decl::Test(name, e) => out.tests.push((name.clone(), e.clone())),
        }
    }
    for name in order {
        let cs = clauses.remove(&name).unwrap_or_default();
        out.defs.push(desugar_definition(&name, &sigs[&name], &cs)?);
    }
    Ok(out)
}

/// Elements denoted by `[first, second .. last]` (or `[first .. last]`).
pub fn expand_ellipsis(
    kind: CollKind,
    first: &BigRational,
    second: Option<&BigRational>,
    last: &BigRational,
) -> Result<Vec<BigRational>> {
    let step = match second {
        Some(s) => s - first,
        None if last >= first => BigRational::one(),
        None => -BigRational::one(),
    };
    if step.is_zero() {
        return if first == last {
            Ok(vec![first.clone()])
        } else {
            Err(DiscoError::ZeroStride)
        };
    }
    let mut out = Vec::new();
    let mut x = first.clone();
    while (step.is_positive() && &x <= last) || (step.is_negative() && &x >= last) {
        out.push(x.clone());
        x += &step;
    }
    if kind == CollKind::Set {
        out.sort();
        out.dedup();
    }
    Ok(out)
}
