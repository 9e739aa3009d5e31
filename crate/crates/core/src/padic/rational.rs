//! Exact rational helpers: parsing, p-adic valuations of integers and
//! rationals, factorials and generalized binomial coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

/// Parses `"num/den"` or a bare integer. Decimal input is rejected.
pub fn parse_rational(input: &str) -> Result<ExactRational> {
    let text = input.trim();
    if text.is_empty() {
        return Err(Error::parse(input, "empty string"));
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let parse_int = |s: &str| -> Result<BigInt> {
        if s.contains('.') {
            return Err(Error::parse(input, "decimal notation is not accepted"));
        }
        s.parse::<BigInt>()
            .map_err(|e| Error::parse(input, e.to_string()))
    };
    let num = parse_int(num)?;
    let den = parse_int(den)?;
    if den.is_zero() {
        return Err(Error::parse(input, "zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Splits a nonzero integer as `p^v * m` with `p ∤ m`; returns `None` for 0.
pub fn split_prime_power(n: &BigInt, p: u64) -> Option<(i64, BigInt)> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    Some((v, m))
}

/// `v_p(q)`, or `None` when `q = 0`.
pub fn rational_valuation(q: &ExactRational, p: u64) -> Option<i64> {
    let (vn, _) = split_prime_power(q.numer(), p)?;
    let (vd, _) = split_prime_power(q.denom(), p).expect("denominator is nonzero");
    Some(vn - vd)
}

/// `|q|_p` as an exact rational (0 for q = 0).
pub fn rational_norm(q: &ExactRational, p: u64) -> ExactRational {
    match rational_valuation(q, p) {
        None => ExactRational::zero(),
        Some(v) => prime_power(p, -v),
    }
}

/// `p^e` as an exact rational, for any sign of `e`.
pub fn prime_power(p: u64, e: i64) -> ExactRational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        ExactRational::from_integer(base)
    } else {
        ExactRational::new(BigInt::one(), base)
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `v_p(n!)` by Legendre's formula.
pub fn factorial_valuation(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// Generalized binomial coefficient `s(s-1)...(s-n+1)/n!` in exact arithmetic.
pub fn binomial(s: &ExactRational, n: u64) -> ExactRational {
    let mut acc = ExactRational::one();
    for j in 0..n {
        acc *= s - ExactRational::from_integer(BigInt::from(j));
        acc /= ExactRational::from_integer(BigInt::from(j + 1));
    }
    acc
}

/// Rational `q` as an `i64` when it is an integer that fits.
pub fn as_small_integer(q: &ExactRational) -> Option<i64> {
    if !q.is_integer() {
        return None;
    }
    i64::try_from(q.numer()).ok()
}

/// Integer `k` as a rational.
pub fn from_int(k: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(k))
}

/// True when `p` does not divide the denominator, i.e. `q ∈ Z_p ∩ Q`.
pub fn is_padic_integer(q: &ExactRational, p: u64) -> bool {
    q.is_zero() || rational_valuation(q, p).is_some_and(|v| v >= 0)
}
