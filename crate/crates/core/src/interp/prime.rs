//! Primality: trial division for small factors, deterministic Miller-Rabin
//! below 3.3 * 10^24, and Baillie-PSW above that.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// The first 13 primes as bases decide every n below this bound.
const MR_DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

pub fn is_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for p in SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    if n < &BigUint::from(97u32 * 97) {
        return true;
    }
    if n.to_u128().is_some_and(|m| m < MR_DETERMINISTIC_BOUND) {
        SMALL_PRIMES[..13]
            .iter()
            .all(|&a| strong_probable_prime(n, &BigUint::from(a)))
    } else {
        strong_probable_prime(n, &BigUint::from(2u32)) && strong_lucas(n)
    }
}

/// Miller-Rabin round for base `a`; `n` odd and greater than `a`.
fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let m = n - &one;
    let s = m.trailing_zeros().unwrap_or(0);
    let d = &m >> s;
    let mut x = a.modpow(&d, n);
    if x == one || x == m {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == m {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd positive n.
fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let mut n = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n);
    let mut result = 1;
    let (three, four, five, eight) = (BigInt::from(3), BigInt::from(4), BigInt::from(5), BigInt::from(8));
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameters.
fn strong_lucas(n: &BigUint) -> bool {
    let r = n.sqrt();
    if &r * &r == *n {
        return false;
    }
    let nn = BigInt::from(n.clone());
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            0 if d.abs() != nn => return false,
            _ => {}
        }
        let two = BigInt::from(2);
        d = if d.is_positive() { -(d + two) } else { -d + two };
    }
    let p = BigInt::one();
    let q: BigInt = (BigInt::one() - &d) / BigInt::from(4);
    let md = |x: BigInt| x.mod_floor(&nn);
    let half = |x: BigInt| {
        let x = if x.is_odd() { x + &nn } else { x };
        md(x >> 1)
    };

    let m = n + BigUint::one();
    let s = m.trailing_zeros().unwrap_or(0);
    let k = &m >> s;
    let (mut u, mut v, mut qk) = (BigInt::one(), p.clone(), md(q.clone()));
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = md(&u * &v);
        v = md(&v * &v - 2 * &qk);
        qk = md(&qk * &qk);
        if k.bit(i) {
            let u2 = half(&p * &u + &v);
            let v2 = half(&d * &u + &p * &v);
            u = u2;
            v = v2;
            qk = md(&qk * &q);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = md(&v * &v - 2 * &qk);
        qk = md(&qk * &qk);
        if v.is_zero() {
            return true;
        }
    }
    false
}
