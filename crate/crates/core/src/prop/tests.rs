use super::*;
use crate::desugar::desugar_module;
use crate::infer::{check_module, check_property, Globals};
use crate::interp::{Limits, Program};
use crate::oeis::OfflineFetcher;
use crate::syntax::{parse_expr, parse_module, pretty_with, PrettyOptions};

use proptest::prelude::*;

struct Loaded {
    globals: Globals,
    prog: Program,
}

fn load(src: &str) -> Loaded {
    let m = desugar_module(&parse_module(src).unwrap()).unwrap();
    let (globals, elab) = check_module(&m).unwrap();
    let prog = Program::build(&m, &elab).unwrap();
    Loaded { globals, prog }
}

fn test_with(l: &Loaded, src: &str, cfg: GenConfig) -> Result<(TestResult, String)> {
    let e = parse_expr(src).unwrap();
    let elab = check_property(&l.globals, &e)?;
    let t = l.prog.compile_expr(&e, &elab)?;
    let mut m = Machine::new(&l.prog, &OfflineFetcher, Limits::default());
    let v = m.eval(&t, &Env::default())?;
    let r = Tester::new(&mut m, &l.globals.env, cfg).run(&v)?;
    let echo = pretty_with(
        &e,
        PrettyOptions {
            unicode: true,
            elide_binder_types: true,
        },
    );
    let report = render_report(&r, &echo, &l.globals.env, true);
    Ok((r, report))
}

fn test(l: &Loaded, src: &str) -> (TestResult, String) {
    test_with(l, src, GenConfig::default()).unwrap()
}

const GCD: &str = "\
gcd : N * N -> N
gcd(a, 0) = a
gcd(a, b) = gcd(b, a mod b)
";

#[test]
fn gcd_divides_both() {
    let l = load(GCD);
    let (r, report) = test(
        &l,
        "forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ g divides b",
    );
    assert_eq!(r.verdict, Verdict::PossiblyTrue);
    assert_eq!(r.checked, 100);
    assert_eq!(
        report,
        "  - Possibly true: ∀a, b. let g = gcd(a, b) in g divides a /\\ g divides b\n    \
         Checked 100 possibilities without finding a counterexample."
    );
}

#[test]
fn gcd_strengthened_fails_small() {
    let l = load(GCD);
    for seed in [0, 1, 7, 12345, u64::MAX] {
        let cfg = GenConfig {
            seed,
            ..GenConfig::default()
        };
        let (r, report) = test_with(
            &l,
            "forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ (2g) divides b",
            cfg,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::CertainlyFalse);
        assert_eq!(
            report,
            "  - Certainly false: ∀a, b. let g = gcd(a, b) in g divides a /\\ 2 * g divides b\n    \
             Counterexample:\n      a = 0\n      b = 1"
        );
    }
}

#[test]
fn exhaustive_bool() {
    let l = load("");
    let (r, report) = test(&l, "forall x:Bool. x \\/ not x");
    assert_eq!(r.verdict, Verdict::CertainlyTrue);
    assert_eq!(r.checked, 2);
    assert_eq!(
        report,
        "  - Certainly true: ∀x. x \\/ not x\n    Checked all 2 possibilities."
    );
}

#[test]
fn bad_inverse_counterexample() {
    let l = load("f2 : Q -> Q\nf2(x) = 2x + 1\n\ng2 : Q -> Q\ng2(x) = x - 1/2\n");
    let (r, report) = test(&l, "forall x:Q. f2(g2(x)) == x");
    assert_eq!(r.verdict, Verdict::CertainlyFalse);
    assert_eq!(
        report,
        "  - Certainly false: ∀x. f2(g2(x)) == x\n    Counterexample:\n      x = 1"
    );
}

#[test]
fn plain_boolean() {
    let l = load(GCD);
    let (r, _) = test(&l, "gcd(7,6) == 1");
    assert_eq!(r.verdict, Verdict::CertainlyTrue);
    assert_eq!(r.checked, 1);
    let (r, report) = test(&l, "gcd(7,6) == 2");
    assert_eq!(r.verdict, Verdict::CertainlyFalse);
    assert_eq!(report, "  - Certainly false: gcd(7, 6) == 2");
}

#[test]
fn runtime_error_is_a_counterexample() {
    let l = load("");
    let (r, report) = test(&l, "forall x:N. 1 / x >= 0");
    assert_eq!(r.verdict, Verdict::CertainlyFalse);
    assert_eq!(r.error, Some(DiscoError::DivisionByZero));
    assert!(
        report.ends_with("      x = 0\n    Error: division by zero."),
        "{report}"
    );
}

#[test]
fn nested_foralls_flatten() {
    let l = load("");
    let (r, report) = test(&l, "forall x:N. forall y:N. x + y >= x");
    assert_eq!(r.verdict, Verdict::PossiblyTrue);
    assert_eq!(r.checked, 100);
    assert!(report.starts_with("  - Possibly true: ∀x. ∀y."), "{report}");
    let (r, _) = test(&l, "forall x:N. forall y:N. x * y == x");
    assert_eq!(r.bindings.len(), 2);
    assert_eq!(r.verdict, Verdict::CertainlyFalse);
}

#[test]
fn existentials() {
    let l = load("");
    let (r, report) = test(&l, "exists x:N. x * x == 49");
    assert_eq!(r.verdict, Verdict::CertainlyTrue);
    assert_eq!(
        report,
        "  - Certainly true: ∃x. x * x == 49\n    Example:\n      x = 7"
    );
    let (r, _) = test(&l, "exists b:Bool. b /\\ not b");
    assert_eq!(r.verdict, Verdict::CertainlyFalse);
    assert_eq!(r.checked, 2);
    let err = test_with(&l, "exists x:N. x + 1 == 0", GenConfig::default()).unwrap_err();
    assert_eq!(err.slug(), "cannot-decide");
}

#[test]
fn mixed_nesting_over_finite_domain() {
    let l = load("");
    let (r, _) = test(&l, "forall x:Bool. exists y:Bool. x /= y");
    assert_eq!(r.verdict, Verdict::CertainlyTrue);
    let (r, _) = test(&l, "forall x:Bool. exists y:Bool. x /\\ y");
    assert_eq!(r.verdict, Verdict::CertainlyFalse);
}

#[test]
fn finite_product_is_exhaustive() {
    let l = load("");
    let (r, _) = test(&l, "forall x:Bool, y:Bool. (x /\\ y) == (y /\\ x)");
    assert_eq!(r.verdict, Verdict::CertainlyTrue);
    assert_eq!(r.checked, 4);
}

#[test]
fn threshold_switches_to_sampling() {
    let l = load("");
    let src = "forall c:Char. c == c";
    let (r, _) = test(&l, src);
    assert_eq!(r.verdict, Verdict::PossiblyTrue);
    let cfg = GenConfig {
        exhaustive_threshold: 2_000_000,
        ..GenConfig::default()
    };
    let (r, _) = test_with(&l, src, cfg).unwrap();
    assert_eq!(r.verdict, Verdict::CertainlyTrue);
    assert_eq!(r.checked, 0x11_0000 - 0x800);
}

#[test]
fn functions_cannot_be_tested() {
    let l = load("");
    let err = test_with(&l, "forall f:N -> N. f(0) == f(0)", GenConfig::default()).unwrap_err();
    assert_eq!(err.slug(), "cannot-enumerate");
}

#[test]
fn sampling_finds_larger_counterexamples() {
    // Fails only for x > 40, beyond the deterministic prefix.
    let l = load("");
    let (r, _) = test(&l, "forall x:N. x < 40");
    assert_eq!(r.verdict, Verdict::CertainlyFalse);
    assert!(r.checked > 32);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn same_seed_same_result(seed in any::<u64>()) {
        let l = load("");
        let cfg = GenConfig { seed, ..GenConfig::default() };
        let src = "forall x:N, y:Z. x + y /= 117";
        let (a, ra) = test_with(&l, src, cfg).unwrap();
        let (b, rb) = test_with(&l, src, cfg).unwrap();
        prop_assert_eq!(a.checked, b.checked);
        prop_assert_eq!(ra, rb);
    }

    #[test]
    fn exhaustive_never_possibly(k in 0u32..4) {
        let l = load("");
        let src = format!("forall x:Bool, y:Bool, u:Unit. (x /\\ y) \\/ {} >= 0", k);
        let (r, _) = test(&l, &src);
        prop_assert_ne!(r.verdict, Verdict::PossiblyTrue);
    }
}
