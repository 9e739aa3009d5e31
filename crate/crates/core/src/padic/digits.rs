//! Text rendering of p-adic numbers.
//!
//! A value `p^v * u + O(p^(v+N))` is written as its `N` unit digits
//! low-to-high, the valuation and the tail marker:
//!
//! ```text
//! (1, 1, 0) * 5^-1 + O(5^2)
//! ```
//!
//! A value that is zero to precision renders as `O(5^20)` and an exact zero
//! as `0`.

use num_bigint::BigUint;
use num_traits::Zero;

use super::{PadicNumber, Prime};
use crate::error::{Error, Result};

impl PadicNumber {
    pub fn to_digit_string(&self) -> String {
        let p = self.prime().get();
        if self.is_exact_zero() {
            return "0".to_string();
        }
        let abs = self.absolute_precision().expect("not an exact zero");
        let Ok(v) = self.valuation() else {
            return format!("O({p}^{abs})");
        };
        let digits: Vec<String> = self.digits().iter().map(u64::to_string).collect();
        format!("({}) * {p}^{v} + O({p}^{abs})", digits.join(", "))
    }
}

/// Inverse of [`PadicNumber::to_digit_string`].
pub fn parse_digit_string(text: &str, prime: Prime) -> Result<PadicNumber> {
    let text = text.trim();
    if text == "0" {
        return Ok(PadicNumber::exact_zero(prime));
    }
    let p = prime.get();
    let parse_tail = |tail: &str| -> Result<i64> {
        let inner = tail
            .trim()
            .strip_prefix("O(")
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::parse(text, "expected O(p^M) tail"))?;
        parse_power(inner, p, text)
    };
    let Some((head, tail)) = text.split_once('+') else {
        return Ok(PadicNumber::zero_to(prime, parse_tail(text)?));
    };
    let abs = parse_tail(tail)?;
    let (digits, power) = head
        .split_once('*')
        .ok_or_else(|| Error::parse(text, "expected (digits) * p^v"))?;
    let valuation = parse_power(power.trim(), p, text)?;
    let digits = digits
        .trim()
        .strip_prefix('(')
        .and_then(|d| d.strip_suffix(')'))
        .ok_or_else(|| Error::parse(text, "digits must be parenthesized"))?;
    let mut unit = BigUint::zero();
    let mut count = 0u32;
    for d in digits.split(',').rev() {
        let d: u64 = d
            .trim()
            .parse()
            .map_err(|_| Error::parse(text, "bad digit"))?;
        if d >= p {
            return Err(Error::parse(text, format!("digit {d} is not below {p}")));
        }
        unit = unit * p + d;
        count += 1;
    }
    if abs - valuation != count as i64 {
        return Err(Error::parse(text, "digit count disagrees with the O(p^M) tail"));
    }
    PadicNumber::from_parts(prime, valuation, unit, count)
        .map_err(|e| Error::parse(text, e.to_string()))
}

fn parse_power(s: &str, p: u64, whole: &str) -> Result<i64> {
    let (base, exp) = s
        .split_once('^')
        .ok_or_else(|| Error::parse(whole, "expected p^k"))?;
    if base.trim().parse::<u64>().ok() != Some(p) {
        return Err(Error::parse(whole, format!("base must be {p}")));
    }
    exp.trim()
        .parse()
        .map_err(|_| Error::parse(whole, "bad exponent"))
}
