//! Finite-precision arithmetic in `Q_p`.
//!
//! Elements are stored in capped-relative form `p^v * u` where `u` is a unit
//! known modulo `p^N` (`N` relative digits). The absolute precision of such a
//! value is `v + N`. Multiplication and division keep the smaller relative
//! precision; addition and subtraction keep the smaller absolute precision.
//! A sum whose known digits all cancel becomes *zero to precision*: a value
//! about which only `|x|_p <= p^-A` is known.

mod digits;
mod rational;
mod residue;
mod value;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use digits::parse_digit_string;
pub use rational::{
    as_small_integer, binomial, factorial, factorial_valuation, from_int, is_padic_integer,
    parse_rational, prime_power, rational_norm, rational_valuation, split_prime_power,
    ExactRational,
};
pub use residue::{Residue, ResidueRing};
pub use value::QpValue;

pub const DEFAULT_PRECISION: u32 = 20;
pub const DEFAULT_LEVEL_CAP: u32 = 8;
pub const DEFAULT_TERM_CAP: usize = 200;
/// Extra digits carried by internal sums beyond the requested precision.
pub const GUARD_DIGITS: u32 = 2;

/// An odd rational prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenPrime);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn power(self, e: u32) -> BigUint {
        BigUint::from(self.0).pow(e)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; these witnesses are exact for all `u64`.
fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod_u64(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime plus the precision and truncation budgets shared by every
/// computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicContext {
    prime: Prime,
    precision: u32,
    integral_level_cap: u32,
    series_term_cap: usize,
}

impl PadicContext {
    /// Context with the default budgets: 20 digits, `r_max = 8`, 200 terms.
    pub fn new(p: u64) -> Result<Self> {
        Self::with_budgets(p, DEFAULT_PRECISION, DEFAULT_LEVEL_CAP, DEFAULT_TERM_CAP)
    }

    pub fn with_budgets(
        p: u64,
        precision: u32,
        integral_level_cap: u32,
        series_term_cap: usize,
    ) -> Result<Self> {
        let prime = Prime::new(p)?;
        if precision < 1 {
            return Err(Error::InvalidContext("precision must be at least 1".into()));
        }
        if integral_level_cap < 1 {
            return Err(Error::InvalidContext("r_max must be at least 1".into()));
        }
        if integral_level_cap > 40 {
            return Err(Error::InvalidContext("r_max must be at most 40".into()));
        }
        if series_term_cap < 2 {
            return Err(Error::InvalidContext("series term cap must be at least 2".into()));
        }
        Ok(Self {
            prime,
            precision,
            integral_level_cap,
            series_term_cap,
        })
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Self::with_budgets(
            self.prime.get(),
            precision,
            self.integral_level_cap,
            self.series_term_cap,
        )
    }

    pub fn with_level_cap(&self, r_max: u32) -> Result<Self> {
        Self::with_budgets(self.prime.get(), self.precision, r_max, self.series_term_cap)
    }

    pub fn with_term_cap(&self, cap: usize) -> Result<Self> {
        Self::with_budgets(self.prime.get(), self.precision, self.integral_level_cap, cap)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn p(&self) -> u64 {
        self.prime.get()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn integral_level_cap(&self) -> u32 {
        self.integral_level_cap
    }

    pub fn series_term_cap(&self) -> usize {
        self.series_term_cap
    }

    /// Precision used for intermediate quantities: `N + GUARD_DIGITS`.
    pub fn working_precision(&self) -> u32 {
        self.precision + GUARD_DIGITS
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// Exactly zero, e.g. the image of the rational 0.
    ExactZero,
    /// All known digits vanish; only `|x|_p <= p^-abs` is known.
    Zero { abs: i64 },
    /// `p^valuation * unit`, `unit` coprime to p and reduced mod `p^precision`.
    Unit {
        valuation: i64,
        unit: BigUint,
        precision: u32,
    },
}

/// An element of `Q_p` known to finite precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    prime: Prime,
    repr: Repr,
}

impl PadicNumber {
    /// Embeds `q` with the context's relative precision.
    pub fn from_rational(q: &ExactRational, ctx: &PadicContext) -> Self {
        Self::from_rational_at(q, ctx.prime(), ctx.precision())
    }

    pub fn from_rational_at(q: &ExactRational, prime: Prime, precision: u32) -> Self {
        assert!(precision >= 1, "relative precision must be positive");
        let p = prime.get();
        let Some((vn, num)) = split_prime_power(q.numer(), p) else {
            return Self::exact_zero(prime);
        };
        let (vd, den) = split_prime_power(q.denom(), p).expect("denominator is nonzero");
        let modulus = BigInt::from(prime.power(precision));
        let den_inv = inverse_mod(&den, &modulus).expect("cofactor is coprime to p");
        let unit = (num * den_inv).mod_floor(&modulus);
        Self {
            prime,
            repr: Repr::Unit {
                valuation: vn - vd,
                unit: unit.to_biguint().expect("reduced residue is nonnegative"),
                precision,
            },
        }
    }

    pub fn from_integer(k: i64, prime: Prime, precision: u32) -> Self {
        Self::from_rational_at(&from_int(k), prime, precision)
    }

    pub fn one(prime: Prime, precision: u32) -> Self {
        Self::from_integer(1, prime, precision)
    }

    pub fn exact_zero(prime: Prime) -> Self {
        Self {
            prime,
            repr: Repr::ExactZero,
        }
    }

    /// A value known only to satisfy `|x|_p <= p^-abs`.
    pub fn zero_to(prime: Prime, abs: i64) -> Self {
        Self {
            prime,
            repr: Repr::Zero { abs },
        }
    }

    /// `p^valuation * unit` with `unit` taken modulo `p^precision`.
    pub fn from_parts(prime: Prime, valuation: i64, unit: BigUint, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::PrecisionExhausted("relative precision 0".into()));
        }
        let unit = unit % prime.power(precision);
        if (&unit % prime.get()).is_zero() {
            return Err(Error::NotAUnit(valuation));
        }
        Ok(Self {
            prime,
            repr: Repr::Unit {
                valuation,
                unit,
                precision,
            },
        })
    }

    /// Builds `p^valuation * unit` from an arbitrary integer residue modulo
    /// `p^digits`, detecting the true valuation of `residue`.
    pub(crate) fn from_scaled_residue(prime: Prime, shift: i64, residue: BigUint, digits: u32) -> Self {
        let p = prime.get();
        if residue.is_zero() {
            return Self::zero_to(prime, shift + digits as i64);
        }
        let mut unit = residue;
        let mut v = 0u32;
        while (&unit % p).is_zero() {
            unit /= p;
            v += 1;
        }
        if v >= digits {
            return Self::zero_to(prime, shift + digits as i64);
        }
        Self {
            prime,
            repr: Repr::Unit {
                valuation: shift + v as i64,
                unit,
                precision: digits - v,
            },
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// True for exact zeros and for values that are zero to precision.
    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    pub fn valuation(&self) -> Result<i64> {
        match &self.repr {
            Repr::Unit { valuation, .. } => Ok(*valuation),
            _ => Err(Error::ZeroValuation),
        }
    }

    /// Unit part `u` with `x = p^v u`, reduced modulo `p^N`.
    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    pub fn relative_precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Unit { precision, .. } => Some(*precision),
            _ => None,
        }
    }

    /// Power of p below which nothing is known; `None` for an exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::Zero { abs } => Some(*abs),
            Repr::Unit {
                valuation,
                precision,
                ..
            } => Some(valuation + *precision as i64),
        }
    }

    /// `|x|_p = p^-v` as an exact rational; 0 for zeros.
    pub fn norm(&self) -> ExactRational {
        match &self.repr {
            Repr::Unit { valuation, .. } => prime_power(self.prime.get(), -valuation),
            _ => ExactRational::zero(),
        }
    }

    /// Unit part `x / p^v` as a p-adic number of valuation 0.
    pub fn unit_part(&self) -> Result<Self> {
        match &self.repr {
            Repr::Unit {
                unit, precision, ..
            } => Ok(Self {
                prime: self.prime,
                repr: Repr::Unit {
                    valuation: 0,
                    unit: unit.clone(),
                    precision: *precision,
                },
            }),
            _ => Err(Error::ZeroValuation),
        }
    }

    /// Multiplies by the exact power `p^e`.
    pub fn shift(&self, e: i64) -> Self {
        let repr = match &self.repr {
            Repr::ExactZero => Repr::ExactZero,
            Repr::Zero { abs } => Repr::Zero { abs: abs + e },
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => Repr::Unit {
                valuation: valuation + e,
                unit: unit.clone(),
                precision: *precision,
            },
        };
        Self {
            prime: self.prime,
            repr,
        }
    }

    /// Drops relative digits beyond `precision` (never adds any).
    pub fn truncate(&self, precision: u32) -> Self {
        match &self.repr {
            Repr::Unit {
                valuation,
                unit,
                precision: current,
            } if precision < *current => {
                if precision == 0 {
                    return Self::zero_to(self.prime, *valuation);
                }
                Self {
                    prime: self.prime,
                    repr: Repr::Unit {
                        valuation: *valuation,
                        unit: unit % self.prime.power(precision),
                        precision,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    /// Caps the absolute precision at `abs`.
    pub fn truncate_absolute(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::ExactZero => Self::zero_to(self.prime, abs),
            Repr::Zero { abs: current } => Self::zero_to(self.prime, abs.min(*current)),
            Repr::Unit { valuation, .. } => {
                let rel = abs - valuation;
                if rel <= 0 {
                    Self::zero_to(self.prime, abs)
                } else {
                    self.truncate(rel.min(u32::MAX as i64) as u32)
                }
            }
        }
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), other.prime.get()));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => Self {
                prime: self.prime,
                repr: Repr::Unit {
                    valuation: *valuation,
                    unit: self.prime.power(*precision) - unit,
                    precision: *precision,
                },
            },
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let (abs, terms) = match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) => return Ok(other.clone()),
            (_, Repr::ExactZero) => return Ok(self.clone()),
            _ => {
                let abs = self
                    .absolute_precision()
                    .unwrap()
                    .min(other.absolute_precision().unwrap());
                let terms: Vec<(i64, &BigUint)> = [&self.repr, &other.repr]
                    .into_iter()
                    .filter_map(|r| match r {
                        Repr::Unit {
                            valuation, unit, ..
                        } => Some((*valuation, unit)),
                        _ => None,
                    })
                    .collect();
                (abs, terms)
            }
        };
        let Some(base) = terms.iter().map(|(v, _)| *v).min() else {
            return Ok(Self::zero_to(self.prime, abs));
        };
        if base >= abs {
            return Ok(Self::zero_to(self.prime, abs));
        }
        let digits = (abs - base) as u32;
        let modulus = self.prime.power(digits);
        let mut total = BigUint::zero();
        for (v, u) in terms {
            let offset = (v - base) as u32;
            if offset < digits {
                total += u * self.prime.power(offset);
            }
        }
        total %= &modulus;
        Ok(Self::from_scaled_residue(self.prime, base, total, digits))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let prime = self.prime;
        Ok(match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Self::exact_zero(prime),
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => Self::zero_to(prime, a + b),
            (Repr::Zero { abs }, Repr::Unit { valuation, .. })
            | (Repr::Unit { valuation, .. }, Repr::Zero { abs }) => {
                Self::zero_to(prime, abs + valuation)
            }
            (
                Repr::Unit {
                    valuation: v1,
                    unit: u1,
                    precision: n1,
                },
                Repr::Unit {
                    valuation: v2,
                    unit: u2,
                    precision: n2,
                },
            ) => {
                let precision = (*n1).min(*n2);
                Self {
                    prime,
                    repr: Repr::Unit {
                        valuation: v1 + v2,
                        unit: (u1 * u2) % prime.power(precision),
                        precision,
                    },
                }
            }
        })
    }

    /// Multiplicative inverse; fails on zeros.
    pub fn inverse(&self) -> Result<Self> {
        match &self.repr {
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                let modulus = BigInt::from(self.prime.power(*precision));
                let inv = inverse_mod(&BigInt::from(unit.clone()), &modulus)
                    .expect("unit is invertible");
                Ok(Self {
                    prime: self.prime,
                    repr: Repr::Unit {
                        valuation: -valuation,
                        unit: inv.to_biguint().unwrap(),
                        precision: *precision,
                    },
                })
            }
            _ => Err(Error::DivisionByZero),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let inv = other.inverse()?;
        self.mul(&inv)
    }

    /// Integer power by square-and-multiply; negative exponents invert first.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        match &self.repr {
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => Ok(Self {
                prime: self.prime,
                repr: Repr::Unit {
                    valuation: valuation * k,
                    unit: unit.modpow(&BigUint::from(k as u64), &self.prime.power(*precision)),
                    precision: *precision,
                },
            }),
            _ if k == 0 => Err(Error::PrecisionExhausted("0^0 of an inexact zero".into())),
            Repr::ExactZero => Ok(self.clone()),
            Repr::Zero { abs } => Ok(Self::zero_to(self.prime, abs * k)),
        }
    }

    /// Number of absolute digits to which `self` and `other` agree, i.e.
    /// `v_p(self - other)` capped by the precision of the difference.
    /// Two exact zeros agree to `i64::MAX` digits.
    pub fn agreement(&self, other: &Self) -> Result<i64> {
        let diff = self.sub(other)?;
        Ok(match &diff.repr {
            Repr::ExactZero => i64::MAX,
            Repr::Zero { abs } => *abs,
            Repr::Unit { valuation, .. } => *valuation,
        })
    }

    /// Smallest rational `n/d` (in the sense of `|n|, |d| <= sqrt(p^N / 2)`)
    /// congruent to the known digits, if one exists.
    pub fn rational_reconstruction(&self) -> Option<ExactRational> {
        let (valuation, unit, precision) = match &self.repr {
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision),
            _ => return Some(ExactRational::zero()),
        };
        let modulus = BigInt::from(self.prime.power(precision));
        let bound = (&modulus / BigInt::from(2u32)).sqrt();
        let (mut r0, mut r1) = (modulus.clone(), BigInt::from(unit.clone()));
        let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
        while r1 > bound {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let t2 = &t0 - &q * &t1;
            r0 = std::mem::replace(&mut r1, r2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
            return None;
        }
        let unit_value = ExactRational::new(r1, t1);
        Some(unit_value * prime_power(self.prime.get(), valuation))
    }

    /// The unit digits low-to-high (exactly `N` of them), or empty for zeros.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Unit {
                unit, precision, ..
            } => {
                let p = self.prime.get();
                let mut rest = unit.clone();
                (0..*precision)
                    .map(|_| {
                        let (q, r) = rest.div_rem(&BigUint::from(p));
                        rest = q;
                        r.to_u64().unwrap()
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// `p^v * u mod p^digits` as an integer residue; requires the value to
    /// be a p-adic integer known to at least `digits` absolute digits.
    pub(crate) fn residue_mod(&self, digits: u32) -> Result<BigUint> {
        match &self.repr {
            Repr::ExactZero => Ok(BigUint::zero()),
            Repr::Zero { abs } => {
                if *abs >= digits as i64 {
                    Ok(BigUint::zero())
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "value known to {abs} digits, {digits} required"
                    )))
                }
            }
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                if *valuation < 0 {
                    return Err(Error::OutOfDomain(format!(
                        "expected a p-adic integer, got valuation {valuation}"
                    )));
                }
                if valuation + (*precision as i64) < digits as i64 {
                    return Err(Error::PrecisionExhausted(format!(
                        "value known to {} digits, {digits} required",
                        valuation + *precision as i64
                    )));
                }
                if *valuation >= digits as i64 {
                    return Ok(BigUint::zero());
                }
                let scaled = unit * self.prime.power(*valuation as u32);
                Ok(scaled % self.prime.power(digits))
            }
        }
    }
}

/// `a^{-1} mod m` for coprime `a`, `m`.
pub(crate) fn inverse_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_digit_string())
    }
}
