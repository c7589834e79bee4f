//! Exact integer arithmetic for order-finding post-processing.
//!
//! Everything is `u64` with `u128` intermediates; nothing here touches floating point.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// `y mod n` in `0..n`, also for negative `y`.
pub fn mod_reduce(y: i128, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    Ok(y.rem_euclid(n as i128) as u64)
}

#[inline]
pub fn mod_mul(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `a^x mod n` by repeated squaring. `n` must be positive.
pub fn mod_pow(a: u64, mut x: u64, n: u64) -> u64 {
    assert!(n > 0, "modulus must be positive");
    if n == 1 {
        return 0;
    }
    let mut base = a % n;
    let mut acc = 1u64;
    while x > 0 {
        if x & 1 == 1 {
            acc = mod_mul(acc, base, n);
        }
        base = mod_mul(base, base, n);
        x >>= 1;
    }
    acc
}

/// Euclid's algorithm. `gcd(0, 0)` is 0.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Returns `(g, s, t)` with `g = gcd(a, b) ≥ 0` and `s·a + t·b = g`.
pub fn extended_gcd(a: i128, b: i128) -> Result<(i128, i128, i128)> {
    if a == 0 && b == 0 {
        return Err(Error::invalid("gcd(0, 0) is undefined"));
    }
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        Ok((-old_r, -old_s, -old_t))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

/// Multiplicative inverse of `a` modulo `n`, if it exists.
pub fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let (g, s, _) = extended_gcd(a as i128, n as i128).ok()?;
    if g != 1 {
        return None;
    }
    Some(s.rem_euclid(n as i128) as u64)
}

/// A reduced non-negative rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Fraction {
    numerator: u64,
    denominator: u64,
}

impl Fraction {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        let g = gcd(numerator, denominator);
        Ok(Fraction {
            numerator: numerator / g,
            denominator: denominator / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Continued-fraction convergents of `num/den`, in order.
pub fn convergents(num: u64, den: u64) -> Vec<Fraction> {
    assert!(den > 0);
    let (mut n, mut d) = (num as u128, den as u128);
    let (mut p_prev, mut p) = (0u128, 1u128);
    let (mut q_prev, mut q) = (1u128, 0u128);
    let mut out = Vec::new();
    while d != 0 {
        let a = n / d;
        (n, d) = (d, n - a * d);
        (p_prev, p) = (p, a * p + p_prev);
        (q_prev, q) = (q, a * q + q_prev);
        if p > u64::MAX as u128 || q > u64::MAX as u128 {
            break;
        }
        out.push(Fraction {
            numerator: p as u64,
            denominator: q as u64,
        });
    }
    out
}

/// The reduced `a/b` with `0 < b ≤ max_denominator` and
/// `|y/2^m − a/b| < 1/(2·max_denominator²)`, if one exists.
///
/// Two distinct fractions with denominators ≤ N differ by at least 1/N², so at
/// most one can satisfy the bound, and a fraction that does is always a
/// convergent of `y/2^m`.
pub fn continued_fraction_match(y: u64, m: u32, max_denominator: u64) -> Option<Fraction> {
    assert!(m < 63, "at most 62 precision bits are supported");
    assert!(y < 1u64 << m, "y must be below 2^m");
    if max_denominator == 0 {
        return None;
    }
    let scale = 1u64 << m;
    let bound = 2 * max_denominator as u128 * max_denominator as u128;
    convergents(y, scale)
        .into_iter()
        .take_while(|f| f.denominator <= max_denominator)
        .find(|f| within_bound(y, scale, f, bound))
}

/// `|y/scale − a/b| < 1/bound`, by cross-multiplication.
fn within_bound(y: u64, scale: u64, f: &Fraction, bound: u128) -> bool {
    let lhs = (y as i128 * f.denominator as i128 - f.numerator as i128 * scale as i128).unsigned_abs();
    lhs * bound < scale as u128 * f.denominator as u128
}

/// Least `r ≥ 1` with `a^r ≡ 1 (mod n)`, by brute force.
pub fn multiplicative_order(a: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if gcd(a % n, n) != 1 {
        return Err(Error::NotCoprime { a, modulus: n });
    }
    if n == 1 {
        return Ok(1);
    }
    let base = a % n;
    let mut v = base;
    let mut r = 1u64;
    while v != 1 {
        v = mod_mul(v, base, n);
        r += 1;
    }
    Ok(r)
}

/// Splits `n` using the order `r` of `a`: `gcd(a^{r/2} ∓ 1, n)`.
///
/// Returns `None` when `r` is odd or `a^{r/2} ≡ −1`, in which case another
/// `a` must be tried.
pub fn split_from_order(a: u64, r: u64, n: u64) -> Result<Option<(u64, u64)>> {
    if n < 2 || r == 0 || mod_pow(a, r, n) != 1 {
        return Err(Error::invalid(format!("{a}^{r} is not 1 mod {n}")));
    }
    if r % 2 == 1 {
        return Ok(None);
    }
    let half = mod_pow(a, r / 2, n);
    if half == n - 1 {
        return Ok(None);
    }
    let n1 = gcd((half + n - 1) % n, n);
    let n2 = gcd(half + 1, n);
    let proper = |d: u64| d > 1 && d < n;
    if proper(n1) && proper(n2) {
        Ok(Some((n1, n2)))
    } else {
        Ok(None)
    }
}

const MILLER_RABIN_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MILLER_RABIN_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MILLER_RABIN_BASES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `⌊n^{1/k}⌋`.
pub fn integer_root(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    let pow_le = |b: u64| b.checked_pow(k).is_some_and(|v| v <= n);
    while r > 0 && !pow_le(r) {
        r -= 1;
    }
    while pow_le(r + 1) {
        r += 1;
    }
    r
}

/// `(p, e)` with `p` prime and `p^e = n`, if `n` is a prime power.
pub fn is_prime_power(n: u64) -> Result<Option<(u64, u32)>> {
    if n < 2 {
        return Err(Error::invalid(format!("{n} is below 2")));
    }
    for e in (1..=63u32).rev() {
        let p = integer_root(n, e);
        if p >= 2 && p.checked_pow(e) == Some(n) && is_prime(p) {
            return Ok(Some((p, e)));
        }
    }
    Ok(None)
}

/// Prime factorisation as `prime → exponent`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Factorization {
    prime_powers: BTreeMap<u64, u32>,
}

impl Factorization {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prime: u64, exponent: u32) {
        *self.prime_powers.entry(prime).or_insert(0) += exponent;
    }

    pub fn merge(&mut self, other: Factorization) {
        for (p, e) in other.prime_powers {
            self.insert(p, e);
        }
    }

    pub fn prime_powers(&self) -> &BTreeMap<u64, u32> {
        &self.prime_powers
    }

    pub fn product(&self) -> u128 {
        self.prime_powers
            .iter()
            .map(|(&p, &e)| (p as u128).pow(e))
            .product()
    }

    pub fn all_prime(&self) -> bool {
        self.prime_powers.keys().all(|&p| is_prime(p))
    }
}

impl<const K: usize> From<[(u64, u32); K]> for Factorization {
    fn from(pairs: [(u64, u32); K]) -> Self {
        let mut f = Factorization::new();
        for (p, e) in pairs {
            f.insert(p, e);
        }
        f
    }
}

/// Reference factorisation by trial division.
pub fn factor_by_trial_division(mut n: u64) -> Factorization {
    let mut f = Factorization::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        while n.is_multiple_of(p) {
            f.insert(p, 1);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        f.insert(n, 1);
    }
    f
}
