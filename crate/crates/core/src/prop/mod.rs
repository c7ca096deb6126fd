//! Property testing: exhaustive checking of small domains, and a fixed
//! prefix followed by seeded random samples for large ones.

pub mod enumerate;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Geometric;

pub use enumerate::{Card, Enumerator};

use crate::error::{DiscoError, Result};
use crate::interp::compile::Term;
use crate::interp::value::{show, PropValue, Value};
use crate::interp::{Env, Machine};
use crate::syntax::ast::Quantifier;
use crate::types::{SynEnv, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub samples: u64,
    pub exhaustive_threshold: u64,
    pub deterministic_prefix: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            samples: 100,
            exhaustive_threshold: 10_000,
            deterministic_prefix: 32,
        }
    }
}

/// Success probability of the geometric index distribution.
const GEOMETRIC_P: f64 = 1.0 / 32.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CertainlyTrue,
    PossiblyTrue,
    CertainlyFalse,
}

#[derive(Debug, Clone)]
pub struct Binding {
    pub name: String,
    pub ty: Type,
    pub value: Value,
}

#[derive(Debug, Clone)]
pub struct TestResult {
    pub verdict: Verdict,
    pub quantifier: Quantifier,
    /// Number of inputs evaluated, including a failing one.
    pub checked: u64,
    /// The counterexample of a failed `∀`, or the witness of a `∃`.
    pub bindings: Vec<Binding>,
    /// Runtime error raised by the body at `bindings`.
    pub error: Option<DiscoError>,
    /// Number of quantified variables; zero for a plain boolean test.
    pub binders: usize,
}

impl TestResult {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::CertainlyFalse
    }

    /// A plain test whose evaluation raised `error`.
    pub fn failed(error: DiscoError) -> Self {
        TestResult {
            error: Some(error),
            ..TestResult::new(Verdict::CertainlyFalse, Quantifier::Forall, 1, 0)
        }
    }

    fn new(verdict: Verdict, quantifier: Quantifier, checked: u64, binders: usize) -> Self {
        TestResult {
            verdict,
            quantifier,
            checked,
            bindings: Vec::new(),
            error: None,
            binders,
        }
    }
}

/// One flattened run of same-kind quantifiers.
struct Spec<'v> {
    quant: Quantifier,
    binds: Vec<(String, Type)>,
    body: &'v Term,
    env: &'v Env,
}

fn flatten(p: &PropValue) -> Spec<'_> {
    let mut binds = p.binds.clone();
    let mut body: &Term = &p.body;
    while let Term::Quant(q, more, inner) = body {
        if *q != p.quant {
            break;
        }
        binds.extend(more.iter().cloned());
        body = inner;
    }
    Spec {
        quant: p.quant,
        binds,
        body,
        env: &p.env,
    }
}

fn joint_type(binds: &[(String, Type)]) -> Type {
    match binds {
        [] => Type::unit(),
        [(_, t)] => t.clone(),
        [(_, t), rest @ ..] => Type::prod(t.clone(), joint_type(rest)),
    }
}

fn split_joint(v: Value, n: usize) -> Vec<Value> {
    let mut out = Vec::with_capacity(n);
    let mut v = v;
    for _ in 1..n {
        let (a, b) = {
            let (a, b) = v.as_pair();
            (a.clone(), b.clone())
        };
        out.push(a);
        v = b;
    }
    if n > 0 {
        out.push(v);
    }
    out
}

/// Errors that abort a whole test rather than count as a failing input.
fn is_fatal(e: &DiscoError) -> bool {
    matches!(e, DiscoError::CannotEnumerate(_) | DiscoError::CannotDecide(_))
}

pub struct Tester<'m, 'p> {
    machine: &'m mut Machine<'p>,
    env: &'m SynEnv,
    cfg: GenConfig,
}

impl<'m, 'p> Tester<'m, 'p> {
    pub fn new(machine: &'m mut Machine<'p>, env: &'m SynEnv, cfg: GenConfig) -> Self {
        Tester { machine, env, cfg }
    }

    /// Test a value of type `Bool` or `Prop`.
    pub fn run(&mut self, v: &Value) -> Result<TestResult> {
        match v {
            Value::Bool(b) => {
                let verdict = if *b {
                    Verdict::CertainlyTrue
                } else {
                    Verdict::CertainlyFalse
                };
                Ok(TestResult::new(verdict, Quantifier::Forall, 1, 0))
            }
            Value::Prop(p) => self.run_prop(p),
            other => panic!("tested a non-property {other:?}"),
        }
    }

    fn holds(&mut self, spec: &Spec, values: &[Value]) -> Result<bool> {
        let mut env = spec.env.clone();
        for ((x, _), v) in spec.binds.iter().zip(values) {
            env = env.bind(x.as_str().into(), v.clone());
        }
        match self.machine.eval(spec.body, &env)? {
            Value::Bool(b) => Ok(b),
            Value::Prop(inner) => {
                let r = self.run_prop(&inner)?;
                match r.verdict {
                    Verdict::CertainlyTrue => Ok(true),
                    Verdict::CertainlyFalse => Ok(false),
                    Verdict::PossiblyTrue => Err(DiscoError::CannotDecide("a nested quantifier".to_string())),
                }
            }
            other => panic!("property body evaluated to {other:?}"),
        }
    }

    fn run_prop(&mut self, p: &PropValue) -> Result<TestResult> {
        let spec = flatten(p);
        let en = Enumerator::new(self.env);
        let joint = joint_type(&spec.binds);
        let card = en.cardinality(&joint)?;
        let n = spec.binds.len();

        let exhaustive = match &card {
            Card::Finite(c) => *c <= BigUint::from(self.cfg.exhaustive_threshold),
            Card::Infinite => false,
        };
        let inputs: Box<dyn Iterator<Item = Result<Vec<Value>>> + 'm> = if exhaustive {
            let Card::Finite(c) = &card else { unreachable!() };
            let c = c.to_u64().expect("below the threshold");
            let (en, joint) = (Enumerator::new(self.env), joint.clone());
            Box::new((0..c).map(move |i| Ok(split_joint(en.get(&joint, &BigUint::from(i))?, n))))
        } else {
            Box::new(self.sample_inputs(&spec, &card, &joint)?)
        };

        let mut checked = 0;
        for values in inputs {
            let values = values?;
            checked += 1;
            let outcome = match self.holds(&spec, &values) {
                Err(e) if is_fatal(&e) => return Err(e),
                r => r,
            };
            let decisive = !matches!(
                (spec.quant, &outcome),
                (Quantifier::Forall, Ok(true)) | (Quantifier::Exists, Ok(false) | Err(_))
            );
            if !decisive {
                continue;
            }
            let bindings = spec
                .binds
                .iter()
                .zip(values.iter())
                .map(|((x, t), v)| Binding {
                    name: x.clone(),
                    ty: t.clone(),
                    value: v.clone(),
                })
                .collect();
            let verdict = match spec.quant {
                Quantifier::Forall => Verdict::CertainlyFalse,
                Quantifier::Exists => Verdict::CertainlyTrue,
            };
            let result = TestResult {
                verdict,
                quantifier: spec.quant,
                checked,
                bindings,
                error: outcome.err(),
                binders: n,
            };
            if verdict == Verdict::CertainlyFalse {
                self.recheck(&spec, &values, &result);
            }
            return Ok(result);
        }

        match (spec.quant, exhaustive) {
            (Quantifier::Forall, true) => Ok(TestResult::new(Verdict::CertainlyTrue, spec.quant, checked, n)),
            (Quantifier::Forall, false) => Ok(TestResult::new(Verdict::PossiblyTrue, spec.quant, checked, n)),
            (Quantifier::Exists, true) => {
                Ok(TestResult::new(Verdict::CertainlyFalse, spec.quant, checked, n))
            }
            (Quantifier::Exists, false) => {
                Err(DiscoError::CannotDecide("an existential property".to_string()))
            }
        }
    }

    /// The first inputs of the joint enumeration, then seeded random ones.
    fn sample_inputs(
        &self,
        spec: &Spec,
        card: &Card,
        joint: &Type,
    ) -> Result<impl Iterator<Item = Result<Vec<Value>>> + 'm> {
        let env = self.env;
        let n = spec.binds.len();
        let samples = self.cfg.samples.max(1);
        let prefix = self.cfg.deterministic_prefix.min(samples);
        let en = Enumerator::new(env);
        let joint = joint.clone();
        let card = card.clone();
        let fixed = (0..prefix)
            .map(BigUint::from)
            .take_while(move |i| card.contains(i))
            .map(move |i| Ok(split_joint(en.get(&joint, &i)?, n)));

        let en = Enumerator::new(env);
        let per_binder: Vec<(Type, Card)> = spec
            .binds
            .iter()
            .map(|(_, t)| Ok((t.clone(), en.cardinality(t)?)))
            .collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let geo = Geometric::new(GEOMETRIC_P).expect("valid probability");
        let random = (prefix..samples).map(move |_| {
            per_binder
                .iter()
                .map(|(t, c)| {
                    let mut i = BigUint::from(rng.sample(geo));
                    if let Card::Finite(m) = c {
                        i %= m;
                    }
                    en.get(t, &i)
                })
                .collect::<Result<Vec<_>>>()
        });
        Ok(fixed.chain(random))
    }

    /// A reported counterexample must reproduce.
    fn recheck(&mut self, spec: &Spec, values: &[Value], r: &TestResult) {
        if matches!(r.error, Some(DiscoError::Timeout(_))) {
            return;
        }
        let again = self.holds(spec, values);
        match &r.error {
            None => assert!(matches!(again, Ok(false)), "counterexample did not reproduce"),
            Some(e) => assert_eq!(again.err().as_ref(), Some(e), "error did not reproduce"),
        }
    }
}

fn plural(n: u64) -> &'static str {
    if n == 1 {
        "possibility"
    } else {
        "possibilities"
    }
}

/// Render a report. `echo` is the property as the user should see it.
pub fn render_report(r: &TestResult, echo: &str, env: &SynEnv, unicode: bool) -> String {
    let label = match r.verdict {
        Verdict::CertainlyTrue => "Certainly true",
        Verdict::PossiblyTrue => "Possibly true",
        Verdict::CertainlyFalse => "Certainly false",
    };
    let mut out = format!("  - {label}: {echo}");
    let mut line = |s: &str| {
        out.push('\n');
        out.push_str(s);
    };
    let has_binders = r.binders > 0;
    match (r.verdict, r.quantifier) {
        (Verdict::PossiblyTrue, _) => line(&format!(
            "    Checked {} {} without finding a counterexample.",
            r.checked,
            plural(r.checked)
        )),
        (Verdict::CertainlyTrue, Quantifier::Forall) if has_binders => {
            line(&format!("    Checked all {} {}.", r.checked, plural(r.checked)))
        }
        (Verdict::CertainlyFalse, Quantifier::Exists) => line(&format!(
            "    Checked all {} {} without finding an example.",
            r.checked,
            plural(r.checked)
        )),
        _ => {}
    }
    if !r.bindings.is_empty() {
        line(match r.quantifier {
            Quantifier::Forall => "    Counterexample:",
            Quantifier::Exists => "    Example:",
        });
        for b in &r.bindings {
            line(&format!(
                "      {} = {}",
                b.name,
                show(&b.value, Some(&b.ty), env, unicode)
            ));
        }
    }
    if let Some(e) = &r.error {
        line(&format!("    Error: {e}"));
    }
    out
}

#[cfg(test)]
mod tests;
