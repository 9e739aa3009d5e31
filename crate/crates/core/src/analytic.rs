//! p-adic exponential and logarithm, generalized binomial coefficients and
//! the two-variable power `<a>^s` together with its s-derivatives.
//!
//! `<a>^s` is evaluated by the binomial series `sum binom(s, n) (<a> - 1)^n`.
//! The route `exp_p(s log_p <a>)` is exposed separately so the two can be
//! checked against each other.
//!
//! Truncation: a series is cut once a lower bound for the valuation of every
//! remaining term reaches the target absolute precision, and the result is
//! then capped at that precision.

use crate::error::{Error, Result};
use crate::padic::{
    binomial, factorial, factorial_valuation, ExactRational, PadicContext, PadicNumber, Prime,
    QpValue,
};
use crate::projection::angle;

/// Truncation control for the power series in this module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PowerSeriesBudget {
    pub max_terms: usize,
    /// Absolute precision (power of p) the truncated sum must reach.
    pub target_abs_precision: i64,
}

impl PowerSeriesBudget {
    pub fn new(max_terms: usize, target_abs_precision: i64) -> Self {
        assert!(max_terms >= 1, "a series needs at least one term");
        Self {
            max_terms,
            target_abs_precision,
        }
    }

    /// `series_term_cap` terms, `N` absolute digits.
    pub fn from_context(ctx: &PadicContext) -> Self {
        Self::new(ctx.series_term_cap(), ctx.precision() as i64)
    }

    fn constant_precision(&self) -> u32 {
        self.target_abs_precision.max(1) as u32
    }
}

/// Lower bound for the valuation of `x`: its valuation, or its absolute
/// precision when it is zero to precision.
fn valuation_floor(x: &PadicNumber) -> i64 {
    x.valuation()
        .unwrap_or_else(|_| x.absolute_precision().unwrap_or(i64::MAX))
}

fn rational_constant(q: &ExactRational, prime: Prime, precision: u32) -> PadicNumber {
    PadicNumber::from_rational_at(q, prime, precision)
}

/// `exp_p(x) = sum x^k / k!` for `v_p(x) >= 1`.
pub fn exp_p(x: &PadicNumber, budget: PowerSeriesBudget) -> Result<PadicNumber> {
    let prime = x.prime();
    let p = prime.get() as i64;
    let target = budget.target_abs_precision;
    let one = PadicNumber::one(prime, budget.constant_precision());
    if x.is_exact_zero() {
        return Ok(one);
    }
    let v = valuation_floor(x);
    if v < 1 {
        return Err(Error::OutOfDomain(format!(
            "exp_p needs v_p(x) >= 1, got {v}"
        )));
    }
    let mut sum = one.clone();
    let mut power = one;
    for k in 1..=budget.max_terms as u64 {
        power = power.mul(x)?;
        let kf = factorial_valuation(k, prime.get()) as u32;
        let inv_fact = rational_constant(
            &ExactRational::new(1.into(), factorial(k)),
            prime,
            budget.constant_precision() + kf,
        );
        sum = sum.add(&power.mul(&inv_fact)?)?;
        // v_p(j!) <= (j - 1)/(p - 1), so every later term has valuation
        // at least j*v - (j - 1)/(p - 1), which increases with j
        let next = k as i64 + 1;
        if next * v - (next - 1) / (p - 1) >= target {
            return Ok(sum.truncate_absolute(target));
        }
    }
    Err(Error::TruncationFailure(budget.max_terms))
}

/// `log_p(x) = sum (-1)^(k+1) (x - 1)^k / k` for `|x - 1|_p < 1`.
pub fn log_p(x: &PadicNumber, budget: PowerSeriesBudget) -> Result<PadicNumber> {
    let prime = x.prime();
    let p = prime.get();
    let target = budget.target_abs_precision;
    let one = PadicNumber::one(prime, budget.constant_precision());
    let y = x.sub(&one)?;
    if y.is_exact_zero() {
        return Ok(PadicNumber::exact_zero(prime));
    }
    let v = valuation_floor(&y);
    if v < 1 {
        return Err(Error::OutOfDomain(format!(
            "log_p needs |x - 1|_p < 1, got v_p(x - 1) = {v}"
        )));
    }
    let mut sum = PadicNumber::exact_zero(prime);
    let mut power = one;
    for k in 1..=budget.max_terms as u64 {
        power = power.mul(&y)?;
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let inv_k = rational_constant(
            &ExactRational::new(sign.into(), k.into()),
            prime,
            budget.constant_precision(),
        );
        sum = sum.add(&power.mul(&inv_k)?)?;
        if tail_floor_log(k + 1, v, p) >= target {
            return Ok(sum.truncate_absolute(target));
        }
    }
    Err(Error::TruncationFailure(budget.max_terms))
}

/// Lower bound on `j*v - v_p(j)` over all `j >= from`.
fn tail_floor_log(from: u64, v: i64, p: u64) -> i64 {
    // j*v - log_p(j) is increasing for v >= 1, p >= 3
    let mut log = 0i64;
    let mut q = from;
    while q >= p {
        q /= p;
        log += 1;
    }
    from as i64 * v - log
}

/// `binom(s, n) = s(s-1)...(s-n+1)/n!` for `s` in `Z_p`.
pub fn binom(s: &PadicNumber, n: u64) -> Result<PadicNumber> {
    let prime = s.prime();
    let abs = s.absolute_precision().unwrap_or(i64::MAX / 4);
    if !s.is_zero() && s.valuation()? < 0 {
        return Err(Error::OutOfDomain("binom(s, n) needs s in Z_p".into()));
    }
    let working = abs.clamp(1, u32::MAX as i64 / 2) as u32;
    let mut acc = PadicNumber::one(prime, working);
    for j in 0..n {
        let shifted = s.sub(&PadicNumber::from_integer(j as i64, prime, working))?;
        acc = acc.mul(&shifted)?;
    }
    let fact_digits = working + factorial_valuation(n, prime.get()) as u32;
    let fact = rational_constant(&ExactRational::from_integer(factorial(n)), prime, fact_digits);
    let result = acc.div(&fact)?;
    debug_assert!(result.is_zero() || result.valuation()? >= 0, "|binom(s, n)|_p <= 1");
    Ok(result)
}

/// Binomial coefficient of a [`QpValue`]: exact for rationals, otherwise
/// through [`binom`].
pub fn binom_value(s: &QpValue, n: u64, prime: Prime, precision: u32) -> Result<PadicNumber> {
    match s {
        QpValue::Rational(q) => Ok(rational_constant(&binomial(q, n), prime, precision)),
        QpValue::Padic(x) => binom(x, n),
    }
}

fn require_zp(s: &QpValue, prime: Prime) -> Result<()> {
    if s.is_zero() {
        return Ok(());
    }
    let v = s.valuation(prime)?;
    if v < 0 {
        return Err(Error::OutOfDomain(format!(
            "exponent must lie in Z_p, got valuation {v}"
        )));
    }
    Ok(())
}

/// `<a>^s` through the binomial series.
pub fn angle_pow(a: &PadicNumber, s: &QpValue, budget: PowerSeriesBudget) -> Result<PadicNumber> {
    let prime = a.prime();
    require_zp(s, prime)?;
    let target = budget.target_abs_precision;
    let precision = budget.constant_precision();
    let one = PadicNumber::one(prime, precision);
    let y = angle(a)?.sub(&one)?;
    if y.is_exact_zero() {
        return Ok(one);
    }
    let v = valuation_floor(&y);
    debug_assert!(v >= 1, "<a> is a 1-unit");
    let mut sum = one.clone();
    let mut power = one;
    for n in 1..=budget.max_terms as u64 {
        power = power.mul(&y)?;
        let coefficient = binom_value(s, n, prime, precision)?;
        sum = sum.add(&coefficient.mul(&power)?)?;
        if (n as i64 + 1) * v >= target {
            return Ok(sum.truncate_absolute(target));
        }
    }
    Err(Error::TruncationFailure(budget.max_terms))
}

/// `<a>^s` through `exp_p(s log_p <a>)`.
pub fn angle_pow_exp_log(
    a: &PadicNumber,
    s: &QpValue,
    budget: PowerSeriesBudget,
) -> Result<PadicNumber> {
    let prime = a.prime();
    require_zp(s, prime)?;
    let log = log_p(&angle(a)?, budget)?;
    let s = s.to_padic(prime, budget.constant_precision())?;
    exp_p(&s.mul(&log)?, budget)
}

/// `<x>^e (log_p <x>)^k`. With `e = 1 - s` the k-th s-derivative of
/// `<x>^(1-s)` is this value times `(-1)^k`.
pub fn angle_pow_log_k(
    x: &PadicNumber,
    e: &QpValue,
    k: u32,
    budget: PowerSeriesBudget,
) -> Result<PadicNumber> {
    let power = angle_pow(x, e, budget)?;
    if k == 0 {
        return Ok(power);
    }
    let log = log_p(&angle(x)?, budget)?;
    power.mul(&log.pow(k as i64)?)
}

#[cfg(test)]
mod tests {
    use num_traits::One;
    use proptest::prelude::*;

    use super::*;
    use crate::padic::{from_int, parse_rational, prime_power, rational_valuation};

    fn q(s: &str) -> ExactRational {
        parse_rational(s).unwrap()
    }

    fn pn(s: &str, p: u64, n: u32) -> PadicNumber {
        PadicNumber::from_rational_at(&q(s), Prime::new(p).unwrap(), n)
    }

    fn budget(n: i64) -> PowerSeriesBudget {
        PowerSeriesBudget::new(500, n)
    }

    #[test]
    fn exp_examples() {
        let five = Prime::new(5).unwrap();
        assert_eq!(
            exp_p(&PadicNumber::exact_zero(five), budget(10)).unwrap(),
            PadicNumber::one(five, 10)
        );
        let x = pn("5", 5, 10);
        let prod = exp_p(&x, budget(10))
            .unwrap()
            .mul(&exp_p(&x.neg(), budget(10)).unwrap())
            .unwrap();
        assert!(prod.agreement(&PadicNumber::one(five, 10)).unwrap() >= 10);
        let e = exp_p(&x, budget(10)).unwrap();
        assert_eq!(e.truncate(1), PadicNumber::one(five, 1));
        assert!(matches!(exp_p(&pn("2", 5, 10), budget(10)), Err(Error::OutOfDomain(_))));
        assert!(matches!(exp_p(&pn("1/5", 5, 10), budget(10)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn exp_log_round_trip() {
        let six = pn("6", 5, 10);
        let back = exp_p(&log_p(&six, budget(10)).unwrap(), budget(10)).unwrap();
        assert!(back.agreement(&six).unwrap() >= 10);
    }

    #[test]
    fn log_examples() {
        assert!(log_p(&pn("1", 5, 10), budget(10)).unwrap().is_zero());
        let log6 = log_p(&pn("6", 5, 10), budget(10)).unwrap();
        assert_eq!(log6.norm(), q("1/5"));
        let log36 = log_p(&pn("36", 5, 10), budget(10)).unwrap();
        let twice = log6.add(&log6).unwrap();
        assert!(log36.agreement(&twice).unwrap() >= 10);
        assert!(matches!(log_p(&pn("2", 5, 10), budget(10)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn log_norm_matches_distance_to_one() {
        for p in [3u64, 5, 7] {
            for k in 1..40i64 {
                let x = pn(&(1 + k * p as i64).to_string(), p, 20);
                let y = x.sub(&PadicNumber::one(x.prime(), 20)).unwrap();
                assert_eq!(log_p(&x, budget(20)).unwrap().norm(), y.norm(), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn exp_truncation_respects_factorial_dips() {
        // p = 3: v(x^9/9!) = 9 - 4 = 5 < v(x^8/8!) = 6; the cut must not
        // happen before k = 9 when the target is 6
        let x = pn("3", 3, 30);
        let short = exp_p(&x, budget(6)).unwrap();
        let long = exp_p(&x, budget(30)).unwrap();
        assert!(short.agreement(&long).unwrap() >= 6);
    }

    #[test]
    fn binom_examples() {
        let five = Prime::new(5).unwrap();
        let s = pn("7/3", 5, 20);
        assert_eq!(binom(&s, 0).unwrap(), PadicNumber::one(five, 20));
        assert_eq!(binom(&pn("4", 5, 20), 2).unwrap(), pn("6", 5, 20));
        let half = binom(&pn("1/2", 5, 20), 3).unwrap();
        assert_eq!(half.norm(), ExactRational::one());
        assert!(half.agreement(&pn("1/16", 5, 20)).unwrap() >= 20);
        assert!(binom(&pn("1/5", 5, 20), 2).is_err());
    }

    #[test]
    fn binomials_are_integral() {
        for p in [3u64, 5, 7] {
            for s in ["1/2", "-1/3", "17/4", "-8", "100"] {
                let s = q(s);
                if rational_valuation(&s, p).is_some_and(|v| v < 0) {
                    continue;
                }
                for n in 0..30 {
                    let x = binom(&PadicNumber::from_rational_at(&s, Prime::new(p).unwrap(), 25), n).unwrap();
                    assert!(x.is_zero() || x.valuation().unwrap() >= 0);
                    let exact = PadicNumber::from_rational_at(&binomial(&s, n), x.prime(), 25);
                    let needed = x.absolute_precision().unwrap().min(exact.absolute_precision().unwrap());
                    assert!(x.agreement(&exact).unwrap() >= needed, "p={p} s={s} n={n}");
                }
            }
        }
    }

    #[test]
    fn angle_pow_examples() {
        let a = pn("16/5", 5, 20);
        let one = PadicNumber::one(Prime::new(5).unwrap(), 20);
        assert_eq!(angle_pow(&a, &QpValue::integer(0), budget(20)).unwrap(), one);
        for s in ["0", "3", "1/2", "-7/3"] {
            let r = angle_pow(&pn("1/5", 5, 20), &q(s).into(), budget(20)).unwrap();
            assert_eq!(r, one, "s = {s}");
        }
        let series = angle_pow(&pn("6/5", 5, 20), &QpValue::integer(2), budget(20)).unwrap();
        assert!(series.agreement(&pn("36", 5, 20)).unwrap() >= 20);
        let squared = angle(&pn("6/5", 5, 20)).unwrap().pow(2).unwrap();
        assert!(series.agreement(&squared).unwrap() >= 20);
        assert!(angle_pow(&a, &q("1/5").into(), budget(20)).is_err());
    }

    #[test]
    fn angle_pow_log_k_examples() {
        let x = pn("6/5", 5, 20);
        let e = QpValue::integer(0);
        assert_eq!(
            angle_pow_log_k(&x, &e, 0, budget(20)).unwrap(),
            angle_pow(&x, &e, budget(20)).unwrap()
        );
        for k in 1..4 {
            let r = angle_pow_log_k(&pn("1/5", 5, 20), &q("1/2").into(), k, budget(20)).unwrap();
            assert!(r.is_zero());
        }
        let d1 = angle_pow_log_k(&x, &e, 1, budget(20)).unwrap();
        let log6 = log_p(&pn("6", 5, 20), budget(20)).unwrap();
        assert!(d1.agreement(&log6).unwrap() >= 20);
    }

    #[test]
    fn derivative_matches_difference_quotients() {
        let p = 5u64;
        let a = pn("2/5", p, 30);
        let s = q("1/3");
        let b = budget(30);
        let base = angle_pow(&a, &s.clone().into(), b).unwrap();
        let derivative = angle_pow_log_k(&a, &s.clone().into(), 1, b).unwrap();
        for j in 2..=10i64 {
            let h = prime_power(p, j);
            let shifted = angle_pow(&a, &(&s + &h).into(), b).unwrap();
            let quotient = shifted
                .sub(&base)
                .unwrap()
                .div(&PadicNumber::from_rational_at(&h, a.prime(), 30))
                .unwrap();
            assert!(quotient.agreement(&derivative).unwrap() >= j, "h = 5^{j}");
        }
    }

    #[test]
    fn expansion_identity_for_shifted_quotients() {
        // <(k+a)/(k-1+a)>^(s-1) = 1 + sum_{n>=1} prod_{j<n}(s-1+j)/n! (k+a)^-n
        let p = 7u64;
        let prime = Prime::new(p).unwrap();
        for (a, s, k) in [("3/7", "1/2", 1i64), ("1/49", "-2", 5), ("10/7", "5/3", 12)] {
            let (a, s) = (q(a), q(s));
            let ka = &a + from_int(k);
            let quotient = &ka / (&a + from_int(k - 1));
            let lhs = angle_pow(
                &PadicNumber::from_rational_at(&quotient, prime, 20),
                &(&s - from_int(1)).into(),
                budget(20),
            )
            .unwrap();
            let mut rhs = ExactRational::one();
            let mut coefficient = ExactRational::one();
            for n in 1..40i64 {
                coefficient = coefficient * (&s - from_int(1) + from_int(n - 1)) / from_int(n);
                rhs += &coefficient / crate::padic::ExactRational::from(ka.clone()).pow(n as i32);
            }
            let rhs = PadicNumber::from_rational_at(&rhs, prime, 20);
            assert!(lhs.agreement(&rhs).unwrap() >= 20);
        }
    }

    fn prime_strategy() -> impl Strategy<Value = u64> {
        prop_oneof![Just(3u64), Just(5), Just(7)]
    }

    fn nonzero_rational(p: u64) -> impl Strategy<Value = ExactRational> {
        (-100_000i64..100_000, 1i64..2_000, -3i64..=3)
            .prop_filter("nonzero", |(n, _, _)| *n != 0)
            .prop_map(move |(n, d, e)| ExactRational::new(n.into(), d.into()) * prime_power(p, e))
    }

    fn zp_rational(p: u64) -> impl Strategy<Value = ExactRational> {
        (-10_000i64..10_000, 1i64..500)
            .prop_filter("p must not divide the denominator", move |(_, d)| d % p as i64 != 0)
            .prop_map(|(n, d)| ExactRational::new(n.into(), d.into()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn binomial_series_matches_exp_log(
            (p, a, s) in prime_strategy().prop_flat_map(|p| (Just(p), nonzero_rational(p), zp_rational(p)))
        ) {
            let x = PadicNumber::from_rational_at(&a, Prime::new(p).unwrap(), 20);
            let s: QpValue = s.into();
            let series = angle_pow(&x, &s, budget(20)).unwrap();
            let via_exp = angle_pow_exp_log(&x, &s, budget(20)).unwrap();
            prop_assert!(series.agreement(&via_exp).unwrap() >= 20);
        }

        #[test]
        fn exponents_add(
            (p, a, s, t) in prime_strategy().prop_flat_map(|p| (Just(p), nonzero_rational(p), zp_rational(p), zp_rational(p)))
        ) {
            let x = PadicNumber::from_rational_at(&a, Prime::new(p).unwrap(), 20);
            let lhs = angle_pow(&x, &(&s + &t).into(), budget(20)).unwrap();
            let rhs = angle_pow(&x, &s.into(), budget(20)).unwrap()
                .mul(&angle_pow(&x, &t.into(), budget(20)).unwrap()).unwrap();
            prop_assert!(lhs.agreement(&rhs).unwrap() >= 20);
        }

        #[test]
        fn nonnegative_integer_powers_are_products(
            (p, a) in prime_strategy().prop_flat_map(|p| (Just(p), nonzero_rational(p))),
            n in 0i64..12
        ) {
            let x = PadicNumber::from_rational_at(&a, Prime::new(p).unwrap(), 20);
            let series = angle_pow(&x, &QpValue::integer(n), budget(20)).unwrap();
            let product = angle(&x).unwrap().pow(n).unwrap();
            prop_assert!(series.agreement(&product).unwrap() >= 20);
        }
    }
}
