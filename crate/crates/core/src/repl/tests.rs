use super::*;
use crate::oeis::{FixtureFetcher, OfflineFetcher};

const GCD: &str = "\
||| The greatest common divisor of two natural numbers.
!!! gcd(7,6) == 1
!!! forall a:N, b:N. gcd(a,b) divides a /\\ gcd(a,b) divides b
!!! forall a:N, b:N, g:N. (g divides a /\\ g divides b) ==> g divides gcd(a,b)
gcd : N * N -> N
gcd(a, 0) = a
gcd(a, b) = gcd(b, a mod b)
";

fn state() -> ReplState {
    ReplState::new(Arc::new(OfflineFetcher))
}

fn one(st: &mut ReplState, line: &str) -> String {
    let bs = st.exec(line);
    assert_eq!(bs.len(), 1, "{line}: {bs:?}");
    bs[0].text.clone()
}

#[test]
fn numeric_type_transcript() {
    let mut st = state();
    let lines = [
        (":type -3", "-3 : ℤ"),
        (":type |-3|", "abs(-3) : ℕ"),
        (":type 2/3", "2 / 3 : 𝔽"),
        (":type -2/3", "-2 / 3 : ℚ"),
        (":type floor(-2/3)", "floor(-2 / 3) : ℤ"),
        (":type [1,2,3]", "[1, 2, 3] : List(ℕ)"),
        (":type [1,-2,3/5]", "[1, -2, 3 / 5] : List(ℚ)"),
    ];
    for (input, want) in lines {
        assert_eq!(one(&mut st, input), want);
    }
}

#[test]
fn cardinality_echo_stays_bars() {
    let mut st = state();
    assert_eq!(one(&mut st, ":type |{1,2}|"), "|{1, 2}| : ℕ");
}

#[test]
fn lambda_then_application() {
    let mut st = state();
    assert_eq!(one(&mut st, ":type \\x. x - 2"), "λx. x - 2 : ℤ → ℤ");
    assert_eq!(one(&mut st, "(\\x. x - 2) (5/2)"), "1/2");
}

#[test]
fn doc_for_definition() {
    let mut st = state();
    let r = st.load_sources(&[("gcd.disco".into(), GCD.into())]);
    assert!(r.ok, "{:?}", r.blocks);
    assert_eq!(
        r.blocks[0].text,
        "Loading gcd.disco...\nRunning tests...\n  gcd: OK\nLoaded."
    );
    assert_eq!(
        one(&mut st, ":doc gcd"),
        "gcd : ℕ × ℕ → ℕ\n\nThe greatest common divisor of two natural numbers.\n"
    );
}

#[test]
fn doc_for_operator() {
    let mut st = state();
    let bs = st.exec(":doc +");
    assert_eq!(
        bs[0].text,
        "~+~ : ℕ × ℕ → ℕ\nprecedence level 7, left associative\n\n\
         The sum of two numbers, types, or graphs.\n\n\
         https://disco-lang.readthedocs.io/en/latest/reference/addition.html\n"
    );
    assert_eq!(
        bs[0].doc_url.as_deref(),
        Some("https://disco-lang.readthedocs.io/en/latest/reference/addition.html")
    );
}

#[test]
fn doc_for_builtin_and_unknown() {
    let mut st = state();
    let text = one(&mut st, ":doc isPrime");
    assert!(text.starts_with("isPrime : ℕ → Bool\n"), "{text}");
    let bs = st.exec(":doc nothingHere");
    assert_eq!(bs[0].kind, BlockKind::Error);
}

#[test]
fn unbound_error_block() {
    let mut st = state();
    let bs = st.exec("x + 3");
    assert_eq!(bs.len(), 1);
    assert_eq!(bs[0].kind, BlockKind::Error);
    assert_eq!(
        bs[0].text,
        "Error: there is nothing named x.\nhttps://disco-lang.readthedocs.io/en/latest/reference/unbound.html"
    );
}

#[test]
fn shape_mismatch_block() {
    let mut st = state();
    assert_eq!(
        one(&mut st, "each(3, [1,2,3])"),
        "Error: the shape of two types does not match.\n\
         https://disco-lang.readthedocs.io/en/latest/reference/shape-mismatch.html"
    );
}

#[test]
fn test_reports() {
    let mut st = state();
    st.load_sources(&[("gcd.disco".into(), GCD.into())]);
    assert_eq!(
        one(
            &mut st,
            ":test forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ g divides b"
        ),
        "  - Possibly true: ∀a, b. let g = gcd(a, b) in g divides a /\\ g divides b\n    \
         Checked 100 possibilities without finding a counterexample.\n"
    );
    assert_eq!(
        one(
            &mut st,
            ":test forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ (2g) divides b"
        ),
        "  - Certainly false: ∀a, b. let g = gcd(a, b) in g divides a /\\ 2 * g divides b\n    \
         Counterexample:\n      a = 0\n      b = 1\n"
    );
}

#[test]
fn failing_attached_test_is_grouped_by_name() {
    let src = "\
f2 : Q -> Q
f2(x) = 2x + 1

!!! forall x:Q. f2(g2(x)) == x
g2 : Q -> Q
g2(x) = x - 1/2
";
    let mut st = state();
    let r = st.load_sources(&[("bijection.disco".into(), src.into())]);
    assert!(!r.ok);
    assert_eq!(
        r.blocks[0].text,
        "Loading bijection.disco...\nRunning tests...\n  g2:\n  \
         - Certainly false: ∀x. f2(g2(x)) == x\n    Counterexample:\n      x = 1\nLoaded."
    );
    assert_eq!(one(&mut st, "g2(1)"), "1/2");
}

#[test]
fn failed_load_keeps_previous_state() {
    let mut st = state();
    assert!(st.load_sources(&[("gcd.disco".into(), GCD.into())]).ok);
    let r = st.load_sources(&[("bad.disco".into(), "h : N -> N\nh(x) = y\n".into())]);
    assert!(!r.ok);
    assert_eq!(r.blocks[0].kind, BlockKind::Error);
    assert_eq!(one(&mut st, "gcd(12, 18)"), "6");
}

#[test]
fn definitions_are_rejected() {
    let mut st = state();
    let bs = st.exec("f : N -> N");
    assert_eq!(bs[0].kind, BlockKind::Error);
    assert!(bs[0].text.contains(":load"), "{}", bs[0].text);
}

#[test]
fn quit_and_empty_input() {
    let mut st = state();
    assert!(st.exec("").is_empty());
    assert!(st.exec(":quit").is_empty());
    assert!(st.quit_requested());
}

#[test]
fn ascii_mode() {
    let mut st = state();
    st.unicode = false;
    assert_eq!(one(&mut st, ":type \\x. x - 2"), "\\x. x - 2 : Z -> Z");
}

#[test]
fn offline_lookup_warns() {
    let mut st = state();
    let src = "import oeis\n";
    assert!(st.load_sources(&[("o.disco".into(), src.into())]).ok);
    let bs = st.exec("lookupSequence([1,1,2,5,14])");
    assert_eq!(bs.len(), 2);
    assert_eq!(bs[0].kind, BlockKind::Warning);
    assert_eq!(bs[1].text, "left(unit)");
}

#[test]
fn fixture_lookup() {
    let body = r#"[{"number": 108, "data": "1,1,2,5,14,42,132,429"}]"#;
    let f = FixtureFetcher::new().with("1,1,2,5,14", body);
    let mut st = ReplState::new(Arc::new(f));
    assert!(st.load_sources(&[("o.disco".into(), "import oeis\n".into())]).ok);
    assert_eq!(
        one(&mut st, "lookupSequence([1,1,2,5,14])"),
        "right(\"https://oeis.org/A000108\")"
    );
    assert_eq!(
        one(&mut st, "extendSequence([1,1,2,5,14])"),
        "[1, 1, 2, 5, 14, 42, 132, 429]"
    );
}

#[test]
fn blocks_serialize_with_doc_url() {
    let b = OutputBlock::error(&DiscoError::Unbound("x".into()));
    let json = serde_json::to_value(&b).unwrap();
    assert_eq!(json["kind"], "error");
    assert_eq!(
        json["docURL"],
        "https://disco-lang.readthedocs.io/en/latest/reference/unbound.html"
    );
    let v = OutputBlock::new(BlockKind::TestReport, "x");
    let json = serde_json::to_value(&v).unwrap();
    assert_eq!(json["kind"], "test-report");
    assert!(json.get("docURL").is_none());
}
