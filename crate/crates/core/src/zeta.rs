//! Euler polynomials, the Hurwitz-type Euler zeta function
//! `zeta_{p,E}(s, a) = I(<a + t>^(1-s))` and its values at `s = 1 - m`.
//!
//! For `|a|_p > 1` and `t` in `Z_p` the disc of `a` is preserved, so
//! `omega_v(a + t) = omega_v(a)` and
//!
//! ```text
//! <a + t> = <a> + t / omega_v(a) = <a> (1 + t/a)
//! ```
//!
//! The integrand is therefore an integer power of a linear polynomial, or a
//! binomial series in `t` whose n-th coefficient has valuation at least
//! `n |v_p(a)|` and is cut off below the ring precision.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::analytic::{angle_pow, binom_value, PowerSeriesBudget};
use crate::error::{Error, Result};
use crate::integral::{
    integrate, working_ring, Integrand, IntegralResult, PolynomialIntegrand, PowerIntegrand,
};
use crate::padic::{binomial, from_int, ExactRational, PadicContext, PadicNumber, QpValue};
use crate::projection::{angle, omega_v};

/// `E_m(x)` with exact coefficients in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerPolynomial {
    coeffs: Vec<ExactRational>,
}

impl EulerPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coeffs
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for EulerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            match (first, c.is_negative()) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let show_coefficient = n == 0 || !magnitude.is_one();
            if show_coefficient {
                write!(f, "{magnitude}")?;
            }
            match n {
                0 => {}
                _ if show_coefficient => write!(f, " ")?,
                _ => {}
            }
            match n {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `E_0, ..., E_m` from `2 E_m(x) = 2 x^m - sum_{k<m} C(m, k) E_k(x)`.
pub fn euler_polynomials(m: usize) -> Vec<EulerPolynomial> {
    let mut all: Vec<EulerPolynomial> = Vec::with_capacity(m + 1);
    for degree in 0..=m {
        let mut coeffs = vec![ExactRational::zero(); degree + 1];
        coeffs[degree] = from_int(2);
        for (k, e) in all.iter().enumerate() {
            let c = binomial(&from_int(degree as i64), k as u64);
            for (i, ek) in e.coeffs.iter().enumerate() {
                coeffs[i] -= &c * ek;
            }
        }
        for c in coeffs.iter_mut() {
            *c /= from_int(2);
        }
        all.push(EulerPolynomial { coeffs });
    }
    all
}

pub fn euler_polynomial(m: usize) -> EulerPolynomial {
    euler_polynomials(m).pop().expect("m + 1 polynomials")
}

/// A zeta value together with the diagnostics of the integral behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaValue {
    pub value: PadicNumber,
    pub integral_diag: IntegralResult,
}

/// `v_p(a)`, rejecting `|a|_p <= 1`.
pub(crate) fn require_large(a: &QpValue, ctx: &PadicContext) -> Result<i64> {
    let v = if a.is_zero() {
        None
    } else {
        Some(a.valuation(ctx.prime())?)
    };
    match v {
        Some(v) if v < 0 => Ok(v),
        _ => Err(Error::Domain(format!(
            "|a|_p must exceed 1 (got a = {a}, p = {})",
            ctx.p()
        ))),
    }
}

pub(crate) fn require_zp(s: &QpValue, ctx: &PadicContext) -> Result<()> {
    if !s.is_zero() && s.valuation(ctx.prime())? < 0 {
        return Err(Error::Domain(format!(
            "s must lie in Z_p (got s = {s}, p = {})",
            ctx.p()
        )));
    }
    Ok(())
}

/// Coefficients of `<a + t>^e` as a polynomial in `t`, reduced to the
/// working ring; `a` must already satisfy `|a|_p > 1`.
pub(crate) fn shifted_power_series(
    a: &PadicNumber,
    e: &QpValue,
    ctx: &PadicContext,
) -> Result<PolynomialIntegrand> {
    let ring = working_ring(ctx);
    let digits = ring.digits();
    let v = -a.valuation()?;
    let budget = PowerSeriesBudget::new(ctx.series_term_cap(), digits as i64);
    let lead = angle_pow(a, e, budget)?;
    let inverse = a.inverse()?;
    let mut coeffs = Vec::new();
    let mut power = PadicNumber::one(ctx.prime(), digits);
    let mut n = 0u64;
    while (n as i64) * v < digits as i64 {
        let c = lead.mul(&binom_value(e, n, ctx.prime(), digits)?)?.mul(&power)?;
        coeffs.push(ring.from_padic(&c)?);
        power = power.mul(&inverse)?;
        n += 1;
    }
    Ok(PolynomialIntegrand::new(ring, coeffs))
}

/// The linear polynomial `<a> + t/omega_v(a)` equal to `<a + t>` on `Z_p`.
pub(crate) fn shifted_angle(a: &PadicNumber, ctx: &PadicContext) -> Result<PolynomialIntegrand> {
    let ring = working_ring(ctx);
    let c0 = ring.from_padic(&angle(a)?)?;
    let c1 = ring.from_padic(&omega_v(a)?.inverse()?)?;
    Ok(PolynomialIntegrand::new(ring, vec![c0, c1]))
}

pub(crate) fn embed(a: &QpValue, ctx: &PadicContext) -> Result<PadicNumber> {
    a.to_padic(ctx.prime(), ctx.working_precision())
}

/// `zeta_{p,E}(s, a)` for `s` in `Z_p` and `|a|_p > 1`.
pub fn zeta_pe(s: &QpValue, a: &QpValue, ctx: &PadicContext) -> Result<ZetaValue> {
    require_large(a, ctx)?;
    require_zp(s, ctx)?;
    let a = embed(a, ctx)?;
    let e = s.one_minus()?;
    let integrand: Box<dyn Integrand> = match e.as_integer() {
        Some(exponent) => Box::new(PowerIntegrand::new(shifted_angle(&a, ctx)?, exponent)),
        None => Box::new(shifted_power_series(&a, &e, ctx)?),
    };
    let integral_diag = integrate(integrand.as_ref(), ctx)?;
    if !integral_diag.converged {
        log::warn!(
            "zeta integral did not converge within r_max = {}",
            ctx.integral_level_cap()
        );
    }
    Ok(ZetaValue {
        value: integral_diag.value.clone(),
        integral_diag,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationCheck {
    pub lhs: ZetaValue,
    pub rhs: PadicNumber,
    pub agree_digits: i64,
}

/// Compares `zeta_{p,E}(1 - m, a)` with `E_m(a) / omega_v(a)^m`.
pub fn interpolation_check(
    m: u32,
    a: &ExactRational,
    ctx: &PadicContext,
) -> Result<InterpolationCheck> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let a_value = QpValue::Rational(a.clone());
    let lhs = zeta_pe(&QpValue::integer(1 - m as i64), &a_value, ctx)?;
    let euler = euler_polynomial(m as usize).eval(a);
    let omega = omega_v(&embed(&a_value, ctx)?)?;
    let rhs = PadicNumber::from_rational_at(&euler, ctx.prime(), ctx.working_precision())
        .div(&omega.pow(m as i64)?)?;
    let agree_digits = lhs.value.agreement(&rhs)?;
    Ok(InterpolationCheck {
        lhs,
        rhs,
        agree_digits,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::integral::FnIntegrand;
    use crate::padic::{factorial, parse_rational, prime_power, Prime};

    fn q(s: &str) -> ExactRational {
        parse_rational(s).unwrap()
    }

    fn ctx(p: u64, n: u32, r_max: u32) -> PadicContext {
        PadicContext::with_budgets(p, n, r_max, 200).unwrap()
    }

    fn rational(s: &str) -> QpValue {
        q(s).into()
    }

    /// Coefficients of `E_m` from `2 e^(xz) / (e^z + 1)`: the product of the
    /// series of `e^(xz)` and of `2 / (e^z + 1)`, read off at `z^m / m!`.
    fn euler_from_generating_function(m: usize) -> Vec<ExactRational> {
        let g: Vec<ExactRational> = (0..=m)
            .map(|k| match k {
                0 => ExactRational::one(),
                _ => ExactRational::new(1.into(), factorial(k as u64) * 2),
            })
            .collect();
        let mut h = vec![ExactRational::one()];
        for n in 1..=m {
            let s: ExactRational = (1..=n).map(|k| &g[k] * &h[n - k]).sum();
            h.push(-s);
        }
        // [z^m] e^(xz) h(z) = sum_j x^j / j! * h_{m-j}
        (0..=m)
            .map(|j| {
                &h[m - j] * ExactRational::new(factorial(m as u64), factorial(j as u64))
            })
            .collect()
    }

    #[test]
    fn euler_polynomial_examples() {
        assert_eq!(euler_polynomial(0).coeffs(), &[q("1")]);
        assert_eq!(euler_polynomial(1).coeffs(), &[q("-1/2"), q("1")]);
        assert_eq!(euler_polynomial(2).coeffs(), &[q("0"), q("-1"), q("1")]);
        assert_eq!(euler_polynomial(2).to_string(), "x^2 - x");
        assert_eq!(euler_polynomial(1).to_string(), "x - 1/2");
        assert_eq!(euler_polynomial(0).to_string(), "1");
        assert_eq!(euler_polynomial(3).to_string(), "x^3 - 3/2 x^2 + 1/4");
    }

    #[test]
    fn euler_polynomials_match_generating_function() {
        for (m, e) in euler_polynomials(14).iter().enumerate() {
            assert_eq!(e.coeffs(), euler_from_generating_function(m).as_slice(), "m = {m}");
        }
    }

    #[test]
    fn euler_polynomials_satisfy_difference_equation() {
        for (m, e) in euler_polynomials(12).iter().enumerate() {
            assert_eq!(e.degree(), m);
            assert!(e.coeffs()[m].is_one());
            for x in ["0", "1/5", "-7/3", "11"] {
                let x = q(x);
                let lhs = e.eval(&(&x + from_int(1))) + e.eval(&x);
                assert_eq!(lhs, from_int(2) * x.pow(m as i32));
            }
        }
    }

    #[test]
    fn zeta_examples() {
        let c = ctx(5, 20, 8);
        let at = |s: &str, a: &str| zeta_pe(&rational(s), &rational(a), &c).unwrap().value;
        let check = |x: PadicNumber, expected: &str| {
            let e = PadicNumber::from_rational_at(&q(expected), Prime::new(5).unwrap(), 20);
            assert!(x.agreement(&e).unwrap() >= 20, "{x} vs {expected}");
        };
        for a in ["1/5", "2/5", "-3/25", "7/5"] {
            check(at("1", a), "1");
        }
        check(at("0", "1/5"), "-3/2");
        check(at("-1", "1/5"), "-4");
        // omega_v(2/5) = omega(2)/5, so zeta(0, 2/5) * omega(2) = 5 * E_1(2/5) / 5
        check(at("0", "2/5").mul(&teichmuller_of_two(20)).unwrap(), "-1/2");
    }

    /// `omega(2) = lim 2^(5^n)` in `Z_5`.
    fn teichmuller_of_two(n: u32) -> PadicNumber {
        let modulus = num_bigint::BigUint::from(5u32).pow(n);
        let exponent = num_bigint::BigUint::from(5u32).pow(n);
        let w = num_bigint::BigUint::from(2u32).modpow(&exponent, &modulus);
        PadicNumber::from_parts(Prime::new(5).unwrap(), 0, w, n).unwrap()
    }

    #[test]
    fn zeta_rejects_small_a() {
        let c = ctx(5, 10, 4);
        for a in ["1", "2", "5", "0", "1/3"] {
            let err = zeta_pe(&rational("0"), &rational(a), &c).unwrap_err();
            assert!(err.to_string().contains("|a|_p must exceed 1"), "a = {a}");
        }
        assert!(zeta_pe(&rational("1/5"), &rational("1/5"), &c).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let c = ctx(5, 20, 8);
        for (m, a, expected) in [(1, "1/5", "-3/2"), (2, "1/5", "-4"), (1, "2/5", "-1/2")] {
            let check = interpolation_check(m, &q(a), &c).unwrap();
            assert!(check.agree_digits >= 20, "m = {m}, a = {a}");
            let e = PadicNumber::from_rational_at(&q(expected), c.prime(), 20);
            let rhs = match a {
                "2/5" => check.rhs.mul(&teichmuller_of_two(22)).unwrap(),
                _ => check.rhs,
            };
            assert!(rhs.agreement(&e).unwrap() >= 20, "m = {m}, a = {a}");
        }
    }

    #[test]
    fn non_integer_exponent_matches_pointwise_route() {
        // polynomial integrand against pointwise evaluation of <a + k>^(1-s)
        let c = ctx(5, 12, 6);
        for (s, a) in [("1/2", "1/5"), ("-1/3", "2/5"), ("7/4", "-6/25")] {
            let fast = zeta_pe(&rational(s), &rational(a), &c).unwrap();
            let e: QpValue = (ExactRational::one() - q(s)).into();
            let budget = PowerSeriesBudget::new(200, 14);
            let a = q(a);
            let slow = FnIntegrand::new(working_ring(&c), |k| {
                let x = PadicNumber::from_rational_at(&(&a + from_int(k as i64)), c.prime(), 14);
                angle_pow(&x, &e, budget)
            });
            let slow = integrate(&slow, &c).unwrap();
            assert!(fast.integral_diag.converged && slow.converged);
            assert!(fast.value.agreement(&slow.value).unwrap() >= 12, "s = {s}");
        }
    }

    #[test]
    fn integer_exponents_match_series_route() {
        let c = ctx(3, 15, 7);
        for (s, a) in [(-2i64, "1/3"), (3, "2/9"), (0, "4/3")] {
            let a = embed(&rational(a), &c).unwrap();
            let power = PowerIntegrand::new(shifted_angle(&a, &c).unwrap(), 1 - s);
            let series = shifted_power_series(&a, &QpValue::integer(1 - s), &c).unwrap();
            for k in 0..200 {
                assert_eq!(power.eval(k).unwrap(), series.eval(k).unwrap());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn more_digits_extend_the_value(
            n in 1i64..20, d in 1i64..20, s in -4i64..4, half in any::<bool>()
        ) {
            prop_assume!(n % 5 != 0 && d % 5 != 0);
            let a = ExactRational::new(n.into(), (5 * d).into());
            let s = if half { from_int(s) + q("1/2") } else { from_int(s) };
            let (low, high) = (ctx(5, 10, 8), ctx(5, 15, 8));
            let x = zeta_pe(&s.clone().into(), &a.clone().into(), &low).unwrap();
            let y = zeta_pe(&s.into(), &a.into(), &high).unwrap();
            prop_assert!(x.value.agreement(&y.value).unwrap() >= 10);
        }

        #[test]
        fn zeta_is_continuous_in_a(n in 1i64..30, s in -3i64..3, eps in 1i64..4) {
            prop_assume!(n % 5 != 0);
            let c = ctx(5, 12, 8);
            let a = ExactRational::new(n.into(), 5.into());
            let base = zeta_pe(&QpValue::integer(s), &a.clone().into(), &c).unwrap().value;
            let mut last = 0;
            for j in 1..6 {
                let moved = &a + prime_power(5, j) * from_int(eps);
                let z = zeta_pe(&QpValue::integer(s), &moved.into(), &c).unwrap().value;
                let agreement = z.agreement(&base).unwrap();
                prop_assert!(agreement >= last);
                prop_assert!(agreement >= j);
                last = agreement;
            }
        }
    }
}
