//! Fair enumerations of the values of a type, indexed by natural numbers.
//!
//! Every enumeration is a bijection from an initial segment of ℕ (the whole
//! of ℕ for infinite types) onto the values of the type, so random sampling
//! reduces to drawing an index.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{DiscoError, Result};
use crate::interp::value::{make_bag_counts, make_set, Value};
use crate::syntax::ast::Side;
use crate::types::{BaseTy, SynEnv, Type};

/// Number of scalar values: all code points minus the surrogate block.
const CHAR_COUNT: u32 = 0x11_0000 - 0x800;
const PRINTABLE_START: u32 = 0x20;
const PRINTABLE_COUNT: u32 = 0x7F - 0x20;

/// How deep `get` may recurse through type structure before giving up.
const MAX_UNFOLD: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Card {
    Finite(BigUint),
    Infinite,
}

impl Card {
    pub fn finite(n: u32) -> Card {
        Card::Finite(BigUint::from(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Card::Finite(_))
    }

    pub fn mul(&self, other: &Card) -> Card {
        match (self, other) {
            (Card::Finite(a), _) if a.is_zero() => Card::finite(0),
            (_, Card::Finite(b)) if b.is_zero() => Card::finite(0),
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a * b),
            _ => Card::Infinite,
        }
    }

    fn add(&self, other: &Card) -> Card {
        match (self, other) {
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a + b),
            _ => Card::Infinite,
        }
    }

    /// Whether `i` is a valid index.
    pub fn contains(&self, i: &BigUint) -> bool {
        match self {
            Card::Finite(n) => i < n,
            Card::Infinite => true,
        }
    }
}

/// The inverse of the Cantor pairing function, `n ↦ (a, b)`, walking each
/// diagonal `a + b = d` with `a` ascending.
pub fn cantor_unpair(n: &BigUint) -> (BigUint, BigUint) {
    let d = ((n * 8u32 + 1u32).sqrt() - 1u32) >> 1;
    let t = n - ((&d * (&d + 1u32)) >> 1);
    let b = &d - &t;
    (t, b)
}

pub fn cantor_pair(a: &BigUint, b: &BigUint) -> BigUint {
    let d = a + b;
    ((&d * (&d + 1u32)) >> 1) + a
}

/// Node `k ≥ 1` of the Calkin-Wilf tree in breadth-first order.
pub fn calkin_wilf(k: &BigUint) -> BigRational {
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    let bits = k.bits();
    for i in (0..bits.saturating_sub(1)).rev() {
        if k.bit(i) {
            a += &b;
        } else {
            b += &a;
        }
    }
    BigRational::new(a, b)
}

fn char_at(i: u32) -> char {
    let cp = if i < PRINTABLE_COUNT {
        PRINTABLE_START + i
    } else {
        let j = i - PRINTABLE_COUNT;
        if j < PRINTABLE_START {
            j
        } else {
            let cp = 0x7F + (j - PRINTABLE_START);
            if cp >= 0xD800 {
                cp + 0x800
            } else {
                cp
            }
        }
    };
    char::from_u32(cp).expect("index below the scalar count")
}

fn small(i: &BigUint) -> usize {
    i.to_usize().expect("index into a small finite type")
}

pub struct Enumerator<'e> {
    env: &'e SynEnv,
}

impl<'e> Enumerator<'e> {
    pub fn new(env: &'e SynEnv) -> Self {
        Enumerator { env }
    }

    pub fn cardinality(&self, t: &Type) -> Result<Card> {
        self.card(t, &mut Vec::new())
    }

    fn card(&self, t: &Type, visiting: &mut Vec<String>) -> Result<Card> {
        Ok(match t {
            Type::Base(b) => match b {
                BaseTy::Bool => Card::finite(2),
                BaseTy::Unit => Card::finite(1),
                BaseTy::Char => Card::finite(CHAR_COUNT),
                BaseTy::Prop => return Err(cannot(t)),
                _ => Card::Infinite,
            },
            Type::Prod(a, b) => self.card(a, visiting)?.mul(&self.card(b, visiting)?),
            Type::Sum(a, b) => self.card(a, visiting)?.add(&self.card(b, visiting)?),
            Type::List(a) => match self.card(a, visiting)? {
                Card::Finite(n) if n.is_zero() => Card::finite(1),
                _ => Card::Infinite,
            },
            Type::Bag(a) => match self.card(a, visiting)? {
                Card::Finite(n) if n.is_zero() => Card::finite(1),
                _ => Card::Infinite,
            },
            Type::Set(a) => match self.card(a, visiting)? {
                Card::Finite(n) => {
                    let bits = n.to_usize().ok_or_else(|| cannot(t))?;
                    Card::Finite(BigUint::one() << bits)
                }
                Card::Infinite => Card::Infinite,
            },
            Type::Syn(name) => {
                if visiting.contains(name) {
                    return Ok(Card::Infinite);
                }
                let body = self.env.unfold(name)?;
                visiting.push(name.clone());
                let c = self.card(body, visiting);
                visiting.pop();
                c?
            }
            Type::Arrow(..) | Type::Var(_) | Type::Param(_) | Type::Skolem(_) => return Err(cannot(t)),
        })
    }

    /// The value at index `i`; `i` must be below the cardinality.
    pub fn get(&self, t: &Type, i: &BigUint) -> Result<Value> {
        self.at(t, i, 0)
    }

    fn at(&self, t: &Type, i: &BigUint, depth: usize) -> Result<Value> {
        if depth > MAX_UNFOLD {
            return Err(cannot(t));
        }
        let depth = depth + 1;
        Ok(match t {
            Type::Base(b) => match b {
                BaseTy::N => Value::int(BigInt::from(i.clone())),
                BaseTy::Z => Value::int(zigzag(i)),
                BaseTy::F => Value::Num(frac_at(i)),
                BaseTy::Q => {
                    if i.is_zero() {
                        Value::int(0)
                    } else if i.is_odd() {
                        Value::Num(calkin_wilf(&((i + 1u32) >> 1)))
                    } else {
                        Value::Num(-calkin_wilf(&(i >> 1)))
                    }
                }
                BaseTy::Bool => Value::Bool(!i.is_zero()),
                BaseTy::Unit => Value::Unit,
                BaseTy::Char => Value::Char(char_at(i.to_u32().expect("char index"))),
                BaseTy::Prop => return Err(cannot(t)),
            },
            Type::Prod(a, b) => {
                let (ia, ib) = match (self.cardinality(a)?, self.cardinality(b)?) {
                    (Card::Infinite, Card::Infinite) => cantor_unpair(i),
                    (Card::Finite(m), Card::Infinite) => {
                        let (q, r) = i.div_rem(&m);
                        (r, q)
                    }
                    (_, Card::Finite(m)) => i.div_rem(&m),
                };
                Value::pair(self.at(a, &ia, depth)?, self.at(b, &ib, depth)?)
            }
            Type::Sum(a, b) => {
                let (ca, cb) = (self.cardinality(a)?, self.cardinality(b)?);
                let (side, j) = sum_index(&ca, &cb, i);
                let arm = if side == Side::Left { a } else { b };
                Value::Inj(side, Arc::new(self.at(arm, &j, depth)?))
            }
            Type::List(a) => {
                let idxs = match self.cardinality(a)? {
                    Card::Infinite => list_indices(i),
                    Card::Finite(m) => bijective_digits(i, &m),
                };
                let vs = idxs
                    .iter()
                    .map(|j| self.at(a, j, depth))
                    .collect::<Result<Vec<_>>>()?;
                Value::list(vs)
            }
            Type::Set(a) => {
                let vs = bit_positions(i)
                    .iter()
                    .map(|j| self.at(a, j, depth))
                    .collect::<Result<Vec<_>>>()?;
                make_set(vs)?
            }
            Type::Bag(a) => {
                let counts = match self.cardinality(a)? {
                    Card::Infinite => {
                        let mut counts: Vec<(BigUint, usize)> = Vec::new();
                        for (k, p) in bit_positions(i).into_iter().enumerate() {
                            let j = p - BigUint::from(k);
                            match counts.last_mut() {
                                Some((last, n)) if *last == j => *n += 1,
                                _ => counts.push((j, 1)),
                            }
                        }
                        counts
                    }
                    Card::Finite(m) => tuple_counts(i, small(&m))
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(j, c)| (BigUint::from(j), c.to_usize().expect("bag count")))
                        .collect(),
                };
                let vs = counts
                    .into_iter()
                    .map(|(j, n)| Ok((self.at(a, &j, depth)?, n)))
                    .collect::<Result<Vec<_>>>()?;
                make_bag_counts(vs)?
            }
            Type::Syn(name) => self.at(self.env.unfold(name)?, i, depth)?,
            Type::Arrow(..) | Type::Var(_) | Type::Param(_) | Type::Skolem(_) => return Err(cannot(t)),
        })
    }

    /// The first `n` values (fewer if the type is smaller).
    pub fn prefix(&self, t: &Type, n: usize) -> Result<Vec<Value>> {
        let card = self.cardinality(t)?;
        (0..n)
            .map(BigUint::from)
            .take_while(|i| card.contains(i))
            .map(|i| self.get(t, &i))
            .collect()
    }
}

fn cannot(t: &Type) -> DiscoError {
    DiscoError::CannotEnumerate(t.display(true))
}

fn zigzag(i: &BigUint) -> BigInt {
    let half = BigInt::from((i + 1u32) >> 1);
    if i.is_odd() {
        half
    } else {
        -half
    }
}

fn frac_at(i: &BigUint) -> BigRational {
    if i.is_zero() {
        BigRational::zero()
    } else {
        calkin_wilf(i)
    }
}

/// Alternate between the arms while both have values left, then continue
/// with whichever arm remains.
fn sum_index(ca: &Card, cb: &Card, i: &BigUint) -> (Side, BigUint) {
    let min = match (ca, cb) {
        (Card::Finite(a), Card::Finite(b)) => Some(a.min(b).clone()),
        (Card::Finite(a), Card::Infinite) => Some(a.clone()),
        (Card::Infinite, Card::Finite(b)) => Some(b.clone()),
        (Card::Infinite, Card::Infinite) => None,
    };
    match min {
        Some(m) if *i >= &m * 2u32 => {
            let j = i - &m;
            let left_larger = match (ca, cb) {
                (Card::Infinite, _) => true,
                (_, Card::Infinite) => false,
                (Card::Finite(a), Card::Finite(b)) => a > b,
            };
            (if left_larger { Side::Left } else { Side::Right }, j)
        }
        _ => {
            let side = if i.is_even() { Side::Left } else { Side::Right };
            (side, i >> 1)
        }
    }
}

/// `0 ↦ []`, `n ↦ head :: tail` with `(head, tail) = unpair(n - 1)`.
fn list_indices(i: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut n = i.clone();
    while !n.is_zero() {
        let (h, t) = cantor_unpair(&(n - 1u32));
        out.push(h);
        n = t;
    }
    out
}

/// Digits of `i` in bijective base `m`, least significant first.
fn bijective_digits(i: &BigUint, m: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    if m.is_zero() {
        return out;
    }
    let mut n = i.clone();
    while !n.is_zero() {
        let (q, r) = (n - 1u32).div_rem(m);
        out.push(r);
        n = q;
    }
    out
}

fn bit_positions(i: &BigUint) -> Vec<BigUint> {
    (0..i.bits()).filter(|&b| i.bit(b)).map(BigUint::from).collect()
}

/// An `m`-tuple of naturals by nested unpairing; the last entry takes the rest.
fn tuple_counts(i: &BigUint, m: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(m);
    let mut n = i.clone();
    for _ in 1..m {
        let (a, rest) = cantor_unpair(&n);
        out.push(a);
        n = rest;
    }
    if m > 0 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::show;

    fn first(t: &Type, n: usize) -> Vec<String> {
        let env = SynEnv::new();
        Enumerator::new(&env)
            .prefix(t, n)
            .unwrap()
            .iter()
            .map(|v| show(v, Some(t), &env, true))
            .collect()
    }

    #[test]
    fn numeric_orders() {
        assert_eq!(first(&Type::nat(), 5), ["0", "1", "2", "3", "4"]);
        assert_eq!(first(&Type::int(), 5), ["0", "1", "-1", "2", "-2"]);
        assert_eq!(
            first(&Type::frac(), 8),
            ["0", "1", "1/2", "2", "1/3", "3/2", "2/3", "3"]
        );
        assert_eq!(first(&Type::rat(), 5), ["0", "1", "-1", "1/2", "-1/2"]);
    }

    #[test]
    fn small_finite_types() {
        let bb = Type::prod(Type::bool(), Type::bool());
        let env = SynEnv::new();
        assert_eq!(Enumerator::new(&env).cardinality(&bb).unwrap(), Card::finite(4));
        assert_eq!(
            first(&bb, 10),
            ["(false, false)", "(false, true)", "(true, false)", "(true, true)"]
        );
        assert_eq!(first(&Type::unit(), 3), ["unit"]);
    }

    #[test]
    fn cantor_order() {
        let nn = Type::prod(Type::nat(), Type::nat());
        assert_eq!(
            first(&nn, 6),
            ["(0, 0)", "(0, 1)", "(1, 0)", "(0, 2)", "(1, 1)", "(2, 0)"]
        );
        for n in 0..500u32 {
            let n = BigUint::from(n);
            let (a, b) = cantor_unpair(&n);
            assert_eq!(cantor_pair(&a, &b), n);
        }
    }

    #[test]
    fn chars_start_printable() {
        let cs = first(&Type::char(), 2);
        assert_eq!(cs, ["' '", "'!'"]);
        assert_eq!(char_at(PRINTABLE_COUNT), '\0');
        assert_eq!(char_at(CHAR_COUNT - 1), '\u{10FFFF}');
    }

    #[test]
    fn sums_alternate_then_continue() {
        let t = Type::sum(Type::unit(), Type::nat());
        assert_eq!(first(&t, 4), ["left(unit)", "right(0)", "right(1)", "right(2)"]);
        let bool_or_unit = Type::sum(Type::bool(), Type::unit());
        assert_eq!(
            first(&bool_or_unit, 5),
            ["left(false)", "right(unit)", "left(true)"]
        );
    }

    #[test]
    fn collections() {
        assert_eq!(
            first(&Type::list(Type::nat()), 5),
            ["[]", "[0]", "[0, 0]", "[1]", "[0, 0, 0]"]
        );
        assert_eq!(
            first(&Type::list(Type::bool()), 7),
            [
                "[]",
                "[false]",
                "[true]",
                "[false, false]",
                "[true, false]",
                "[false, true]",
                "[true, true]"
            ]
        );
        assert_eq!(
            first(&Type::set(Type::bool()), 5),
            ["{}", "{false}", "{true}", "{false, true}"]
        );
        assert_eq!(first(&Type::set(Type::nat()), 4), ["{}", "{0}", "{1}", "{0, 1}"]);
        assert_eq!(
            first(&Type::bag(Type::nat()), 8),
            [
                "⟅⟆",
                "⟅0⟆",
                "⟅1⟆",
                "⟅0, 0⟆",
                "⟅2⟆",
                "⟅0, 1⟆",
                "⟅1, 1⟆",
                "⟅0, 0, 0⟆"
            ]
        );
        assert_eq!(
            first(&Type::bag(Type::bool()), 4),
            ["⟅⟆", "⟅true⟆", "⟅false⟆", "⟅true, true⟆"]
        );
    }

    #[test]
    fn recursive_synonym() {
        let bt = Type::sum(Type::unit(), Type::prod(Type::syn("BT"), Type::syn("BT")));
        let env = SynEnv::from_defs([("BT".to_string(), bt)]).unwrap();
        let e = Enumerator::new(&env);
        let t = Type::syn("BT");
        assert_eq!(e.cardinality(&t).unwrap(), Card::Infinite);
        let vs = e.prefix(&t, 50).unwrap();
        assert_eq!(vs.len(), 50);
    }

    #[test]
    fn functions_cannot_be_enumerated() {
        let env = SynEnv::new();
        let f = Type::arrow(Type::nat(), Type::nat());
        assert!(matches!(
            Enumerator::new(&env).cardinality(&f),
            Err(DiscoError::CannotEnumerate(_))
        ));
    }

    proptest::proptest! {
        #[test]
        fn integers_are_fair(k in 0u32..300) {
            let env = SynEnv::new();
            let seen = Enumerator::new(&env).prefix(&Type::int(), 2 * k as usize + 1).unwrap();
            for z in -(k as i64)..=(k as i64) {
                let want = Value::int(z);
                proptest::prop_assert!(seen.iter().any(|v| crate::interp::values_equal(v, &want).unwrap()));
            }
        }

        #[test]
        fn pairs_are_fair(a in 0u32..200, b in 0u32..200) {
            let k = a.max(b) as u64;
            let idx = cantor_pair(&BigUint::from(a), &BigUint::from(b));
            proptest::prop_assert!(idx < BigUint::from((2 * k + 1) * (2 * k + 1)));
            proptest::prop_assert_eq!(cantor_unpair(&idx), (BigUint::from(a), BigUint::from(b)));
        }

        #[test]
        fn rationals_are_distinct_and_reduced(n in 1u32..5000) {
            let q = calkin_wilf(&BigUint::from(n));
            let q2 = calkin_wilf(&BigUint::from(n + 1));
            proptest::prop_assert_ne!(&q, &q2);
            proptest::prop_assert!(num_integer::Integer::gcd(q.numer(), q.denom()) == BigInt::one());
        }
    }

    #[test]
    fn calkin_wilf_hits_every_small_fraction() {
        let mut seen = std::collections::HashSet::new();
        for k in 1u32..(1 << 12) {
            seen.insert(calkin_wilf(&BigUint::from(k)));
        }
        // Every a/b with a + b <= 13 sits at depth at most 12.
        for a in 1..13 {
            for b in 1..(14 - a) {
                let q = BigRational::new(BigInt::from(a), BigInt::from(b));
                assert!(seen.contains(&q), "{a}/{b}");
            }
        }
    }

    #[test]
    fn finite_enumerations_are_bijective() {
        let env = SynEnv::new();
        let e = Enumerator::new(&env);
        for t in [
            Type::set(Type::prod(Type::bool(), Type::bool())),
            Type::sum(Type::bool(), Type::prod(Type::unit(), Type::bool())),
            Type::prod(Type::set(Type::bool()), Type::bool()),
        ] {
            let Card::Finite(n) = e.cardinality(&t).unwrap() else {
                panic!()
            };
            let n = n.to_usize().unwrap();
            let vs = e.prefix(&t, n + 5).unwrap();
            assert_eq!(vs.len(), n);
            for i in 0..n {
                for j in 0..i {
                    assert!(!crate::interp::values_equal(&vs[i], &vs[j]).unwrap());
                }
            }
        }
    }
}
