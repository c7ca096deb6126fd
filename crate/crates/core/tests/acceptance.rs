//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and fails if any criterion fails.

use std::collections::HashSet;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use disco::error::{DiscoError, Span, DOC_URL_PREFIX};
use disco::infer::solve::{solve, Constraint, Supply};
use disco::oeis::OfflineFetcher;
use disco::repl::{BlockKind, ReplState};
use disco::types::{
    base_leq, is_subtype, lattice_leq, qual_holds, reachable_subterms, type_eq, BaseTy, Coinductive,
    Qualifier, SynEnv, TyVar, Type, NUMERIC,
};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn programs_dir() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tests/programs").to_string()
}

fn state() -> ReplState {
    ReplState::new(Arc::new(OfflineFetcher))
}

fn load(st: &mut ReplState, files: &[&str]) -> Result<String, String> {
    let paths: Vec<String> = files.iter().map(|f| format!("{}/{f}", programs_dir())).collect();
    let r = st.load_paths(&paths);
    let text: String = r
        .blocks
        .iter()
        .map(|b| b.text.as_str())
        .collect::<Vec<_>>()
        .join("\n");
    if r.ok {
        Ok(text)
    } else {
        Err(format!("load failed: {text}"))
    }
}

fn one(st: &mut ReplState, line: &str) -> Result<String, String> {
    let bs = st.exec(line);
    match bs.as_slice() {
        [b] => Ok(b.text.clone()),
        _ => Err(format!("{line}: expected one block, got {bs:?}")),
    }
}

fn expect_eq(what: &str, got: &str, want: &str) -> Check {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn within(what: &str, start: Instant, limit: Duration) -> Check {
    let took = start.elapsed();
    if took < limit {
        Ok(())
    } else {
        Err(format!("{what} took {took:?}, limit {limit:?}"))
    }
}

fn parse_list(s: &str) -> Vec<String> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Vec::new();
    }
    inner.split(", ").map(str::to_string).collect()
}

// 1
fn numeric_type_transcript() -> Check {
    let start = Instant::now();
    let mut st = state();
    let lines = [
        (":type -3", "-3 : ℤ"),
        (":type |-3|", "abs(-3) : ℕ"),
        (":type 2/3", "2 / 3 : 𝔽"),
        (":type -2/3", "-2 / 3 : ℚ"),
        (":type floor(-2/3)", "floor(-2 / 3) : ℤ"),
        (":type [1,-2,3/5]", "[1, -2, 3 / 5] : List(ℚ)"),
    ];
    for (input, want) in lines {
        expect_eq(input, &one(&mut st, input)?, want)?;
    }
    within("transcript", start, Duration::from_secs(1))
}

// 2
fn subtraction_lambda() -> Check {
    let mut st = state();
    expect_eq(":type", &one(&mut st, ":type \\x. x - 2")?, "λx. x - 2 : ℤ → ℤ")?;
    expect_eq("application", &one(&mut st, "(\\x. x - 2) (5/2)")?, "1/2")
}

// 3
fn gcd_property_reports() -> Check {
    for seed in [0, 1, 7, 42, 12345] {
        let start = Instant::now();
        let mut st = state();
        st.config.seed = seed;
        load(&mut st, &["gcd.disco"])?;
        let weak = one(
            &mut st,
            ":test forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ g divides b",
        )?;
        if !weak.contains("Possibly true")
            || !weak.contains("Checked 100 possibilities without finding a counterexample.")
        {
            return Err(format!("seed {seed}: {weak}"));
        }
        let strong = one(
            &mut st,
            ":test forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ (2g) divides b",
        )?;
        if !strong.contains("Certainly false") || !strong.contains("      a = 0\n      b = 1\n") {
            return Err(format!("seed {seed}: {strong}"));
        }
        within("gcd properties", start, Duration::from_secs(5))?;
    }
    Ok(())
}

// 4
fn gcd_listing_loads() -> Check {
    let mut st = state();
    let report = load(&mut st, &["gcd.disco"])?;
    if !report.contains("  gcd: OK") {
        return Err(report);
    }
    expect_eq(
        ":doc gcd",
        &one(&mut st, ":doc gcd")?,
        "gcd : ℕ × ℕ → ℕ\n\nThe greatest common divisor of two natural numbers.\n",
    )
}

fn f_reference(x: u64) -> String {
    if x.is_multiple_of(2) {
        return "0".into();
    }
    let n = (x - 1) / 2;
    if n > 5 {
        if n.is_multiple_of(2) {
            (n / 2).to_string()
        } else {
            format!("{n}/2")
        }
    } else {
        (3 * n + 7).to_string()
    }
}

// 5
fn example_function() -> Check {
    let mut st = state();
    load(&mut st, &["f.disco"])?;
    for (arg, want) in [(4, "0"), (13, "3"), (5, "13")] {
        expect_eq(&format!("f({arg})"), &one(&mut st, &format!("f({arg})"))?, want)?;
    }
    let got = parse_list(&one(&mut st, "[f(n) | n in [0 .. 200]]")?);
    let want: Vec<String> = (0..=200).map(f_reference).collect();
    if got == want {
        Ok(())
    } else {
        Err(format!("f disagrees with the reference: {got:?}"))
    }
}

// 6
fn zorder_round_trips() -> Check {
    let mut st = state();
    load(&mut st, &["zorder.disco"])?;
    let nibbles = one(
        &mut st,
        "|{ nibble(a, b, c, d) | a in [false, true], b in [false, true], \
         c in [false, true], d in [false, true] }|",
    )?;
    expect_eq("distinct nibbles", &nibbles, "16")?;
    let props = [
        (
            ":test forall p:Bool*Bool*Bool*Bool, q:Bool*Bool*Bool*Bool. \
             zOrder'(zOrder(nibble(p), nibble(q))) == (nibble(p), nibble(q))",
            256,
        ),
        (
            ":test forall p:Bool*Bool*Bool*Bool, q:Bool*Bool*Bool*Bool. \
             let n = nibble(p) + 16 * nibble(q) in zOrder(zOrder'(n)) == n",
            256,
        ),
    ];
    for (line, n) in props {
        let r = one(&mut st, line)?;
        if !r.starts_with("  - Certainly true:") || !r.contains(&format!("Checked all {n} possibilities.")) {
            return Err(r);
        }
    }
    // Independent check of the bit layout.
    let got = parse_list(&one(&mut st, "[zOrder(x, y) | x in [0 .. 15], y in [0 .. 15]]")?);
    let interleave = |x: u32, y: u32| -> u32 {
        (0..4)
            .map(|i| ((x >> i) & 1) << (2 * i) | ((y >> i) & 1) << (2 * i + 1))
            .sum()
    };
    let want: Vec<String> = (0..16)
        .flat_map(|x| (0..16).map(move |y| interleave(x, y).to_string()))
        .collect();
    if got == want {
        Ok(())
    } else {
        Err(format!("zOrder is not bit interleaving: {got:?}"))
    }
}

// 7
fn catalan_trees() -> Check {
    let mut st = state();
    load(&mut st, &["catalan.disco"])?;
    expect_eq(
        ":type",
        &one(&mut st, ":type treesOfSize")?,
        "treesOfSize : ℕ → List(BT)",
    )?;
    let mut c: Vec<u64> = vec![1];
    for n in 0..5 {
        c.push((0..=n).map(|i| c[i] * c[n - i]).sum());
    }
    let want: Vec<String> = c.iter().map(u64::to_string).collect();
    let got = parse_list(&one(&mut st, "catalan1")?);
    if got == want {
        Ok(())
    } else {
        Err(format!("cardinalities {got:?}, Catalan numbers {want:?}"))
    }
}

fn trial_division(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

// 8
fn primality() -> Check {
    let mut st = state();
    let got = parse_list(&one(&mut st, "[n | n in [0 .. 9999], isPrime(n)]")?);
    let want: Vec<String> = (0..10_000)
        .filter(|&n| trial_division(n))
        .map(|n| n.to_string())
        .collect();
    if got != want {
        return Err(format!(
            "isPrime found {} primes, trial division {}",
            got.len(),
            want.len()
        ));
    }
    let start = Instant::now();
    expect_eq("isPrime(10^39 + 3)", &one(&mut st, "isPrime(10^39 + 3)")?, "true")?;
    within("40-digit prime", start, Duration::from_secs(1))?;
    expect_eq(
        "isPrime(10^39 + 1)",
        &one(&mut st, "isPrime(10^39 + 1)")?,
        "false",
    )
}

fn random_atom(rng: &mut ChaCha8Rng, vars: u32) -> Type {
    if rng.random_bool(0.6) {
        Type::Var(TyVar(rng.random_range(1..=vars)))
    } else {
        Type::Base(NUMERIC[rng.random_range(0..4)])
    }
}

fn random_constraints(rng: &mut ChaCha8Rng) -> (u32, Vec<Constraint>) {
    let vars = rng.random_range(1..=3);
    let count = rng.random_range(1..=6);
    let cs = (0..count)
        .map(|_| {
            if rng.random_bool(0.6) {
                Constraint::Sub(random_atom(rng, vars), random_atom(rng, vars))
            } else {
                let q = Qualifier::ALL[rng.random_range(0..4)];
                Constraint::Qual(q, random_atom(rng, vars))
            }
        })
        .collect();
    (vars, cs)
}

fn assign(t: &Type, a: &[BaseTy]) -> Option<BaseTy> {
    match t {
        Type::Base(b) => Some(*b),
        Type::Var(TyVar(v)) => Some(a[*v as usize - 1]),
        _ => None,
    }
}

fn holds(c: &Constraint, a: &[BaseTy]) -> bool {
    match c {
        Constraint::Sub(x, y) => match (assign(x, a), assign(y, a)) {
            (Some(x), Some(y)) => x.is_numeric() && y.is_numeric() && lattice_leq(x, y),
            _ => false,
        },
        Constraint::Qual(q, x) => assign(x, a).is_some_and(|b| qual_holds(*q, b)),
        _ => false,
    }
}

fn assignments(vars: u32) -> Vec<Vec<BaseTy>> {
    (0..4usize.pow(vars))
        .map(|mut i| {
            (0..vars)
                .map(|_| {
                    let b = NUMERIC[i % 4];
                    i /= 4;
                    b
                })
                .collect()
        })
        .collect()
}

fn brute_force(vars: u32, cs: &[Constraint]) -> bool {
    assignments(vars).iter().any(|a| cs.iter().all(|c| holds(c, a)))
}

fn substitute(c: &Constraint, apply: &impl Fn(&Type) -> Type) -> Constraint {
    match c {
        Constraint::Sub(x, y) => Constraint::Sub(apply(x), apply(y)),
        Constraint::Qual(q, x) => Constraint::Qual(*q, apply(x)),
        other => other.clone(),
    }
}

// 9
fn solver_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut sat = 0;
    for case in 0..1000 {
        let (vars, cs) = random_constraints(&mut rng);
        let want = brute_force(vars, &cs);
        let got = solve(&SynEnv::new(), cs.clone(), &mut Supply::new());
        match (&got, want) {
            (Ok(sol), true) => {
                // Whatever the solver fixed must extend to a real solution.
                let fixed: Vec<Constraint> = cs.iter().map(|c| substitute(c, &|t| sol.apply(t))).collect();
                if !brute_force(vars, &fixed) {
                    return Err(format!("case {case}: unsound solution for {cs:?}"));
                }
                sat += 1;
            }
            (Err(_), false) => {}
            _ => {
                return Err(format!(
                    "case {case}: solver {:?}, brute force satisfiable = {want}, constraints {cs:?}",
                    got.map(|_| "ok")
                ))
            }
        }
    }
    if sat == 0 || sat == 1000 {
        return Err(format!("degenerate sample: {sat} satisfiable"));
    }
    Ok(())
}

const SYN_NAMES: [&str; 3] = ["A", "B", "C"];
const LEAF_BASES: [BaseTy; 6] = [
    BaseTy::N,
    BaseTy::Z,
    BaseTy::F,
    BaseTy::Q,
    BaseTy::Bool,
    BaseTy::Unit,
];

fn random_type(rng: &mut ChaCha8Rng, depth: u32, syns: usize) -> Type {
    if depth == 0 || rng.random_bool(0.3) {
        return if rng.random_bool(0.5) {
            Type::syn(SYN_NAMES[rng.random_range(0..syns)])
        } else {
            Type::Base(LEAF_BASES[rng.random_range(0..LEAF_BASES.len())])
        };
    }
    random_constructor(rng, depth, syns)
}

fn random_constructor(rng: &mut ChaCha8Rng, depth: u32, syns: usize) -> Type {
    let child = |rng: &mut ChaCha8Rng| random_type(rng, depth - 1, syns);
    match rng.random_range(0..6) {
        0 => Type::sum(child(rng), child(rng)),
        1 => Type::prod(child(rng), child(rng)),
        2 => Type::arrow(child(rng), child(rng)),
        3 => Type::list(child(rng)),
        4 => Type::set(child(rng)),
        _ => Type::sum(Type::unit(), child(rng)),
    }
}

/// Replace some references to `name` by `body`: the same type, unfolded.
fn unfold_some(rng: &mut ChaCha8Rng, t: &Type, name: &str, body: &Type) -> Type {
    t.map(&mut |t| match t {
        Type::Syn(n) if n == name && rng.random_bool(0.7) => Some(body.clone()),
        _ => None,
    })
}

/// Nudge some base leaves up the numeric lattice.
fn widen_some(rng: &mut ChaCha8Rng, t: &Type) -> Type {
    t.map(&mut |t| match t {
        Type::Base(BaseTy::N) if rng.random_bool(0.5) => Some(Type::int()),
        Type::Base(BaseTy::F) if rng.random_bool(0.5) => Some(Type::rat()),
        Type::Syn(n) if n == "A" => Some(Type::syn("C")),
        _ => None,
    })
}

fn random_env(rng: &mut ChaCha8Rng) -> SynEnv {
    // A is arbitrary; B is A partially unfolded; C is A with some bases widened.
    let a = random_constructor(rng, 2, 1);
    let b = unfold_some(rng, &a, "A", &a);
    let b = b.map(&mut |t| match t {
        Type::Syn(n) if n == "A" && rng.random_bool(0.5) => Some(Type::syn("B")),
        _ => None,
    });
    let c = if rng.random_bool(0.3) {
        random_constructor(rng, 2, 3)
    } else {
        widen_some(rng, &a)
    };
    SynEnv::from_defs([("A".into(), a), ("B".into(), b), ("C".into(), c)])
        .expect("contractive by construction")
}

/// Relation on the depth-bounded unrollings of two types; a cut-off
/// branch relates to anything.
fn unrolled(env: &SynEnv, a: &Type, b: &Type, depth: u32, sub: bool) -> bool {
    if depth == 0 {
        return true;
    }
    let a = env.whnf(a).expect("whnf");
    let b = env.whnf(b).expect("whnf");
    let d = depth - 1;
    match (a, b) {
        (Type::Base(x), Type::Base(y)) => {
            if sub {
                base_leq(*x, *y)
            } else {
                x == y
            }
        }
        (Type::Sum(a1, a2), Type::Sum(b1, b2)) | (Type::Prod(a1, a2), Type::Prod(b1, b2)) => {
            unrolled(env, a1, b1, d, sub) && unrolled(env, a2, b2, d, sub)
        }
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => {
            unrolled(env, b1, a1, d, sub) && unrolled(env, a2, b2, d, sub)
        }
        (Type::List(x), Type::List(y)) | (Type::Set(x), Type::Set(y)) | (Type::Bag(x), Type::Bag(y)) => {
            unrolled(env, x, y, d, sub)
        }
        _ => false,
    }
}

// 10
fn equirecursion_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb7);
    let (mut eq_true, mut sub_true, mut checks, mut reflexive) = (0, 0, 0, 0);
    for case in 0..200 {
        let env = random_env(&mut rng);
        let mut tys: Vec<Type> = SYN_NAMES.iter().map(|n| Type::syn(n)).collect();
        tys.push(Type::list(Type::syn("A")));
        tys.push(Type::list(Type::syn("B")));
        tys.push(Type::arrow(Type::syn("C"), Type::syn("B")));
        tys.push(Type::arrow(Type::syn("A"), Type::syn("A")));
        reflexive += tys.len();
        for a in &tys {
            for b in &tys {
                let eq = type_eq(&env, a, b).map_err(|e| e.to_string())?;
                let sub = is_subtype(&env, a, b).map_err(|e| e.to_string())?;
                let eq_want = unrolled(&env, a, b, 10, false);
                let sub_want = unrolled(&env, a, b, 10, true);
                if eq != eq_want || sub != sub_want {
                    return Err(format!(
                        "case {case}: {a:?} vs {b:?} in {env:?}: eq {eq}/{eq_want}, sub {sub}/{sub_want}"
                    ));
                }
                let bound = reachable_subterms(&env, a).map_err(|e| e.to_string())?.len()
                    * reachable_subterms(&env, b).map_err(|e| e.to_string())?.len();
                let mut co = Coinductive::new(&env);
                co.subtype(a, b).map_err(|e| e.to_string())?;
                if co.assumptions() > bound {
                    return Err(format!(
                        "case {case}: {} assumptions, bound {bound}",
                        co.assumptions()
                    ));
                }
                eq_true += eq as usize;
                sub_true += sub as usize;
                checks += 1;
            }
        }
    }
    if eq_true == checks || sub_true == checks || eq_true <= reflexive {
        return Err(format!(
            "degenerate sample: {eq_true} equal, {sub_true} subtypes of {checks}"
        ));
    }
    Ok(())
}

// 11
fn error_links() -> Check {
    let mut st = state();
    let shape = st.exec("each(3, [1,2,3])");
    expect_eq(
        "shape mismatch",
        shape[0].doc_url.as_deref().unwrap_or(""),
        "https://disco-lang.readthedocs.io/en/latest/reference/shape-mismatch.html",
    )?;
    let unbound = st.exec("x + 3");
    expect_eq(
        "unbound",
        unbound[0].doc_url.as_deref().unwrap_or(""),
        "https://disco-lang.readthedocs.io/en/latest/reference/unbound.html",
    )?;
    for b in shape.iter().chain(&unbound) {
        if b.kind != BlockKind::Error || !b.text.ends_with(b.doc_url.as_deref().unwrap_or("?")) {
            return Err(format!("{b:?}"));
        }
    }

    let s = String::new;
    let all = [
        DiscoError::lex(Span::new(1, 1), "x"),
        DiscoError::parse(Span::new(1, 1), "x"),
        DiscoError::ArityMismatch { name: s() },
        DiscoError::Unbound(s()),
        DiscoError::ShapeMismatch,
        DiscoError::Qualifier {
            ty: s(),
            operation: s(),
        },
        DiscoError::Unsatisfiable { sub: s(), sup: s() },
        DiscoError::InfiniteType,
        DiscoError::UnboundSynonym(s()),
        DiscoError::NonContractive(s()),
        DiscoError::DivisionByZero,
        DiscoError::ZeroStride,
        DiscoError::NonExhaustive,
        DiscoError::ComparisonOfFunctions,
        DiscoError::RecursionLimit(1),
        DiscoError::Timeout(1),
        DiscoError::CannotEnumerate(s()),
        DiscoError::CannotDecide(s()),
        DiscoError::ExponentTooLarge(s()),
        DiscoError::UnknownModule(s()),
        DiscoError::Network(s()),
        DiscoError::Io(s()),
        DiscoError::ReplDefinition,
    ];
    for e in &all {
        let url = e.doc_url();
        let slug = url
            .strip_prefix(DOC_URL_PREFIX)
            .and_then(|r| r.strip_suffix(".html"))
            .ok_or_else(|| format!("{e:?}: {url}"))?;
        let well_formed = !slug.is_empty()
            && slug.chars().all(|c| c.is_ascii_lowercase() || c == '-')
            && !slug.starts_with('-')
            && !slug.ends_with('-');
        if !well_formed {
            return Err(format!("{e:?}: {url}"));
        }
    }
    // Runtime errors reach the user with their links too.
    for (line, slug) in [("1 / 0", "division-by-zero"), ("[1, 1 .. 0]", "zero-stride")] {
        let bs = st.exec(line);
        let got = bs.last().and_then(|b| b.doc_url.clone()).unwrap_or_default();
        expect_eq(line, &got, &format!("{DOC_URL_PREFIX}{slug}.html"))?;
    }
    let distinct: HashSet<&str> = all.iter().map(|e| e.slug()).collect();
    if distinct.len() < 15 {
        return Err(format!("only {} distinct slugs", distinct.len()));
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("numeric :type transcript", numeric_type_transcript),
        ("subtraction lambda and application", subtraction_lambda),
        ("gcd property reports", gcd_property_reports),
        ("gcd listing loads with docs and tests", gcd_listing_loads),
        ("example function agrees with reference", example_function),
        ("zOrder round-trips exhaustively", zorder_round_trips),
        ("treesOfSize matches Catalan numbers", catalan_trees),
        ("isPrime agrees with trial division", primality),
        ("solver agrees with brute force", solver_oracle),
        (
            "equirecursion agrees with bounded unrolling",
            equirecursion_oracle,
        ),
        ("error links", error_links),
    ];
    let mut failed = Vec::new();
    let _ = std::io::stdout().write_all(b"\n");
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let line = match result {
            Ok(()) => format!("PASS {:2} {name} ({:.2?})\n", i + 1, start.elapsed()),
            Err(why) => {
                failed.push(*name);
                format!("FAIL {:2} {name}: {why}\n", i + 1)
            }
        };
        // Straight to the handle so the lines show without --nocapture.
        let _ = std::io::stdout().write_all(line.as_bytes());
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
