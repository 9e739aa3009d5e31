//! The operator `T_p^a = sum_n P_n(s) exp_p(nD)`, applied in shift form:
//!
//! ```text
//! T_p^a [zeta(s, a) - <a>^(1-s)] = sum_n P_n(s) (zeta(s+n, a) - <a>^(1-s-n))
//! ```
//!
//! with `P_0 = 2/(s-1)`, `P_1 = 1/omega_v(a)` and
//! `P_n = prod_{j=1}^{n-1} (s-1+j) / (n! omega_v(a)^n)`, so that
//! `|P_n|_p <= n p^(n v_p(a))`. The sum is cut once that bound times the
//! largest `|zeta(s+n, a) - <a>^(1-s-n)|_p` seen so far drops below
//! `p^-N`.

use num_traits::{One, Zero};

use crate::analytic::{angle_pow, log_p, PowerSeriesBudget};
use crate::error::{Error, Result};
use crate::integral::{
    fermionic_integrals, working_ring, Integrand, IntegralOptions, IntegralResult,
    PolynomialIntegrand, VectorIntegrand,
};
use crate::padic::{
    factorial, factorial_valuation, from_int, prime_power, ExactRational, PadicContext,
    PadicNumber, QpValue,
};
use crate::projection::{angle, omega_v};
use crate::zeta::{embed, require_large, require_zp, shifted_power_series, zeta_pe};

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorCoefficient {
    pub n: u64,
    pub value: PadicNumber,
    /// `n p^(n v_p(a))` for `n >= 2`.
    pub bound: Option<ExactRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    BoundBelowTarget,
    TermCap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermReport {
    pub n: u64,
    pub coefficient_norm: ExactRational,
    pub term_norm: ExactRational,
    pub bound: Option<ExactRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub terms: Vec<TermReport>,
    pub stop_reason: StopReason,
    /// Largest `|zeta(s+n, a) - <a>^(1-s-n)|_p` over the evaluated terms.
    pub measured_sup: ExactRational,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::BoundBelowTarget
    }

    /// True when every coefficient with `n >= 2` respects its bound.
    pub fn bounds_hold(&self) -> bool {
        self.terms.iter().all(|t| match &t.bound {
            Some(b) => &t.coefficient_norm <= b && &t.term_norm <= b,
            None => true,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdeCheckResult {
    pub lhs: PadicNumber,
    pub rhs: PadicNumber,
    pub agree_digits: i64,
    pub report: ConvergenceReport,
}

fn require_not_pole(s: &QpValue) -> Result<QpValue> {
    let shifted = s.add_integer(-1)?;
    if shifted.is_zero() {
        return Err(Error::PoleAtOne);
    }
    Ok(shifted)
}

/// `n p^(n v)` as an exact rational.
pub fn coefficient_bound(n: u64, v: i64, p: u64) -> ExactRational {
    from_int(n as i64) * prime_power(p, n as i64 * v)
}

/// `<a>^e`, by exact powering for integer `e`.
fn angle_power(a: &PadicNumber, e: &QpValue, ctx: &PadicContext) -> Result<PadicNumber> {
    match e.as_integer() {
        Some(k) => angle(a)?.pow(k),
        None => {
            let budget = PowerSeriesBudget::new(ctx.series_term_cap(), ctx.working_precision() as i64);
            angle_pow(a, e, budget)
        }
    }
}

/// `prod_{j=1}^{n-1} (s-1+j) / n!`, exact when `s` is rational.
fn product_factor(n: u64, s: &QpValue, ctx: &PadicContext) -> Result<PadicNumber> {
    let digits = ctx.working_precision();
    if let Some(q) = s.as_rational() {
        let mut acc = ExactRational::one();
        for j in 1..n {
            acc *= q - ExactRational::one() + from_int(j as i64);
        }
        acc /= ExactRational::from_integer(factorial(n));
        return Ok(PadicNumber::from_rational_at(&acc, ctx.prime(), digits));
    }
    let s = s.to_padic(ctx.prime(), digits)?;
    let mut acc = PadicNumber::one(ctx.prime(), digits);
    for j in 1..n {
        let shift = PadicNumber::from_integer(j as i64 - 1, ctx.prime(), digits);
        acc = acc.mul(&s.add(&shift)?)?;
    }
    let extra = factorial_valuation(n, ctx.p()) as u32;
    let fact = PadicNumber::from_rational_at(
        &ExactRational::from_integer(factorial(n)),
        ctx.prime(),
        digits + extra,
    );
    acc.div(&fact)
}

/// `P_n(s)` for `T_p^a`.
pub fn coefficient(
    n: u64,
    s: &QpValue,
    a: &QpValue,
    ctx: &PadicContext,
) -> Result<OperatorCoefficient> {
    let s_minus_one = require_not_pole(s)?;
    let v = require_large(a, ctx)?;
    require_zp(s, ctx)?;
    let digits = ctx.working_precision();
    let omega = omega_v(&embed(a, ctx)?)?;
    let value = match n {
        0 => PadicNumber::from_integer(2, ctx.prime(), digits)
            .div(&s_minus_one.to_padic(ctx.prime(), digits)?)?,
        1 => omega.inverse()?,
        _ => {
            let factor = product_factor(n, s, ctx)?;
            if factor.is_exact_zero() {
                factor
            } else {
                factor.div(&omega.pow(n as i64)?)?
            }
        }
    };
    let bound = (n >= 2).then(|| coefficient_bound(n, v, ctx.p()));
    Ok(OperatorCoefficient { n, value, bound })
}

/// `zeta(s, a) - <a>^(1-s)`.
pub fn shifted_difference(s: &QpValue, a: &QpValue, ctx: &PadicContext) -> Result<PadicNumber> {
    let zeta = zeta_pe(s, a, ctx)?;
    let power = angle_power(&embed(a, ctx)?, &s.one_minus()?, ctx)?;
    zeta.value.sub(&power)
}

/// Shift form of `T_p^a [zeta(s, a) - <a>^(1-s)]`.
pub fn apply_t(
    s: &QpValue,
    a: &QpValue,
    ctx: &PadicContext,
) -> Result<(PadicNumber, ConvergenceReport)> {
    require_not_pole(s)?;
    let v = require_large(a, ctx)?;
    require_zp(s, ctx)?;
    let p = ctx.p();
    let threshold = prime_power(p, -(ctx.precision() as i64));
    let mut sum = PadicNumber::exact_zero(ctx.prime());
    let mut terms = Vec::new();
    let mut measured_sup = ExactRational::zero();
    let mut stop_reason = StopReason::TermCap;
    for n in 0..ctx.series_term_cap() as u64 {
        let c = coefficient(n, s, a, ctx)?;
        let term = if c.value.is_exact_zero() {
            // s is a nonpositive integer and the product has a zero factor
            PadicNumber::exact_zero(ctx.prime())
        } else {
            let g = shifted_difference(&s.add_integer(n as i64)?, a, ctx)?;
            if g.norm() > measured_sup {
                measured_sup = g.norm();
            }
            c.value.mul(&g)?
        };
        sum = sum.add(&term)?;
        terms.push(TermReport {
            n,
            coefficient_norm: c.value.norm(),
            term_norm: term.norm(),
            bound: c.bound,
        });
        if n >= 2 && coefficient_bound(n, v, p) * &measured_sup < threshold {
            stop_reason = StopReason::BoundBelowTarget;
            break;
        }
    }
    if stop_reason == StopReason::TermCap {
        log::warn!("operator series hit the term cap {}", ctx.series_term_cap());
    }
    let digits = ctx.precision() as i64;
    let sum = match sum.absolute_precision() {
        Some(abs) if abs > digits => sum.truncate_absolute(digits),
        _ => sum,
    };
    Ok((
        sum,
        ConvergenceReport {
            terms,
            stop_reason,
            measured_sup,
        },
    ))
}

/// `(<a-1>^(1-s) - <a>^(1-s)) / (s - 1)`.
pub fn rhs(s: &QpValue, a: &QpValue, ctx: &PadicContext) -> Result<PadicNumber> {
    let s_minus_one = require_not_pole(s)?;
    require_zp(s, ctx)?;
    let e = s.one_minus()?;
    let a_minus_one = a.add_integer(-1)?;
    if a.is_zero() || a_minus_one.is_zero() {
        return Err(Error::Domain("a and a - 1 must be nonzero".into()));
    }
    let upper = angle_power(&embed(&a_minus_one, ctx)?, &e, ctx)?;
    let lower = angle_power(&embed(a, ctx)?, &e, ctx)?;
    upper
        .sub(&lower)?
        .div(&s_minus_one.to_padic(ctx.prime(), ctx.working_precision())?)
}

/// Both sides of the equation and their agreement.
pub fn verify_ode(s: &QpValue, a: &QpValue, ctx: &PadicContext) -> Result<OdeCheckResult> {
    let (lhs, report) = apply_t(s, a, ctx)?;
    let rhs = rhs(s, a, ctx)?;
    let agree_digits = lhs.agreement(&rhs)?;
    Ok(OdeCheckResult {
        lhs,
        rhs,
        agree_digits,
        report,
    })
}

/// Digits of agreement the Taylor check asks for.
pub const TAYLOR_TARGET_DIGITS: i64 = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorStep {
    pub k: u32,
    /// `v_p` of the error of the k-th partial sum, capped at `N`.
    pub error_valuation: i64,
    pub error_norm: ExactRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorCheck {
    pub steps: Vec<TaylorStep>,
    /// `zeta(s+n, a) - <a>^(1-s-n)`, the value the partial sums approach.
    pub target: PadicNumber,
    pub partial_sums: Vec<PadicNumber>,
    /// Diagnostics of the integrals behind `d_0, ..., d_K`.
    pub integrals: Vec<IntegralResult>,
    /// First `k` whose error is at most `p^-8`.
    pub reached_at: Option<u32>,
}

impl TaylorCheck {
    /// Nonincreasing error norms from `k` on.
    pub fn nonincreasing_from(&self, k: u32) -> bool {
        self.steps
            .iter()
            .skip_while(|s| s.k < k)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1].error_valuation >= w[0].error_valuation)
    }
}

/// `<a+t>^(1-s) (-log_p <a+t>)^j` for `j = 0..width`.
struct LogMoments {
    base: PolynomialIntegrand,
    minus_log: PolynomialIntegrand,
    width: usize,
}

impl VectorIntegrand for LogMoments {
    fn ring(&self) -> &crate::padic::ResidueRing {
        self.base.ring()
    }

    fn width(&self) -> usize {
        self.width
    }

    fn eval(&self, k: u64) -> Result<Vec<crate::padic::Residue>> {
        let ring = self.base.ring();
        let mut value = self.base.eval(k)?;
        let log = self.minus_log.eval(k)?;
        let mut out = Vec::with_capacity(self.width);
        for _ in 0..self.width {
            out.push(value.clone());
            value = ring.mul(&value, &log);
        }
        Ok(out)
    }
}

/// Smallest `D` with `n |v| - log_p(n) >= digits` for every `n > D`.
fn log_series_degree(v: i64, p: u64, digits: u32) -> usize {
    let floor_log = |n: u64| {
        let (mut q, mut l) = (n, 0i64);
        while q >= p {
            q /= p;
            l += 1;
        }
        l
    };
    let mut n = 1u64;
    while (n as i64) * v - floor_log(n) < digits as i64 {
        n += 1;
    }
    n as usize - 1
}

/// Partial sums of `sum_k d_k n^k / k!` against `zeta(s+n, a) - <a>^(1-s-n)`,
/// where `d_k = I(<a+t>^(1-s) (-log_p <a+t>)^k) - <a>^(1-s) (-log_p <a>)^k`
/// is the k-th s-derivative of `zeta(s, a) - <a>^(1-s)`.
pub fn taylor_shift_check(
    s: &QpValue,
    a: &QpValue,
    n: u32,
    max_k: u32,
    ctx: &PadicContext,
) -> Result<TaylorCheck> {
    if n < 2 {
        return Err(Error::Domain("the shift n must be at least 2".into()));
    }
    if max_k as usize > ctx.series_term_cap() {
        return Err(Error::Domain(format!(
            "K = {max_k} exceeds the series term cap {}",
            ctx.series_term_cap()
        )));
    }
    require_not_pole(s)?;
    let v = -require_large(a, ctx)?;
    require_zp(s, ctx)?;
    let prime = ctx.prime();
    let digits = ctx.precision();
    // d_k / k! needs d_k to v_p(k!) more digits
    let extra = factorial_valuation(max_k as u64, prime.get()) as u32;
    let wide = ctx.with_precision(digits + extra)?;
    let ring = working_ring(&wide);
    let ring_digits = ring.digits();
    let budget = PowerSeriesBudget::new(ctx.series_term_cap().max(400), ring_digits as i64);

    let a_padic = a.to_padic(prime, ring_digits)?;
    let e = s.one_minus()?;
    let base = shifted_power_series(&a_padic, &e, &wide)?;
    let degree = log_series_degree(v, prime.get(), ring_digits);

    // -log_p <a + t> = -log_p <a> - sum_m (-1)^(m+1) (t/a)^m / m
    let log_a = log_p(&angle(&a_padic)?, budget)?;
    let inverse = a_padic.inverse()?;
    let mut coeffs = vec![log_a.neg()];
    let mut power = PadicNumber::one(prime, ring_digits);
    for m in 1..=degree as i64 {
        power = power.mul(&inverse)?;
        let sign = if m % 2 == 1 { -1 } else { 1 };
        let c = power.mul(&PadicNumber::from_rational_at(
            &ExactRational::new(sign.into(), m.into()),
            prime,
            ring_digits,
        ))?;
        coeffs.push(c);
    }
    let coeffs: Vec<PadicNumber> = coeffs
        .into_iter()
        .map(|c| match c.absolute_precision() {
            Some(abs) if abs > ring_digits as i64 => c.truncate_absolute(ring_digits as i64),
            _ => c,
        })
        .collect();
    let minus_log = PolynomialIntegrand::from_padic(ring.clone(), &coeffs)?;

    let lead = angle_power(&a_padic, &e, &wide)?;
    let options = IntegralOptions::from_context(&wide);
    let target = shifted_difference(&s.add_integer(n as i64)?, a, ctx)?;
    let shift = PadicNumber::from_integer(n as i64, prime, ring_digits);

    let moments = LogMoments {
        base,
        minus_log,
        width: max_k as usize + 1,
    };
    let integrals = fermionic_integrals(&moments, options)?;
    let mut constant = lead;
    let mut partial = PadicNumber::exact_zero(prime);
    let mut steps = Vec::new();
    let mut partial_sums = Vec::new();
    let mut reached_at = None;
    for k in 0..=max_k {
        if k > 0 {
            constant = constant.mul(&log_a.neg())?;
        }
        let d = integrals[k as usize].value.sub(&constant)?;
        let weight = shift.pow(k as i64)?.div(&PadicNumber::from_rational_at(
            &ExactRational::from_integer(factorial(k as u64)),
            prime,
            ring_digits + extra,
        ))?;
        partial = partial.add(&d.mul(&weight)?)?;
        let error = partial.sub(&target)?;
        let error_valuation = error.agreement(&PadicNumber::exact_zero(prime))?.min(digits as i64);
        if reached_at.is_none() && error_valuation >= TAYLOR_TARGET_DIGITS {
            reached_at = Some(k);
        }
        steps.push(TaylorStep {
            k,
            error_valuation,
            error_norm: prime_power(prime.get(), -error_valuation),
        });
        partial_sums.push(partial.clone());
    }
    Ok(TaylorCheck {
        steps,
        target,
        partial_sums,
        integrals,
        reached_at,
    })
}
