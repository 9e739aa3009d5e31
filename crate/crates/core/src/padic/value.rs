use std::fmt;

use num_traits::{One, Zero};

use super::{as_small_integer, from_int, rational_valuation, ExactRational, PadicNumber, Prime};
use crate::error::{Error, Result};

/// An input to the analytic layers: either an exact rational (kept exact as
/// long as possible) or a p-adic approximation.
#[derive(Clone, Debug, PartialEq)]
pub enum QpValue {
    Rational(ExactRational),
    Padic(PadicNumber),
}

impl QpValue {
    pub fn integer(k: i64) -> Self {
        QpValue::Rational(from_int(k))
    }

    pub fn to_padic(&self, prime: Prime, precision: u32) -> Result<PadicNumber> {
        match self {
            QpValue::Rational(q) => Ok(PadicNumber::from_rational_at(q, prime, precision)),
            QpValue::Padic(x) if x.prime() != prime => {
                Err(Error::PrimeMismatch(x.prime().get(), prime.get()))
            }
            QpValue::Padic(x) => Ok(x.clone()),
        }
    }

    pub fn as_rational(&self) -> Option<&ExactRational> {
        match self {
            QpValue::Rational(q) => Some(q),
            QpValue::Padic(_) => None,
        }
    }

    /// The value as an `i64` when it is an exact integer.
    pub fn as_integer(&self) -> Option<i64> {
        self.as_rational().and_then(as_small_integer)
    }

    pub fn valuation(&self, prime: Prime) -> Result<i64> {
        match self {
            QpValue::Rational(q) => rational_valuation(q, prime.get()).ok_or(Error::ZeroValuation),
            QpValue::Padic(x) => x.valuation(),
        }
    }

    /// True when the value is 0 exactly or to its known precision.
    pub fn is_zero(&self) -> bool {
        match self {
            QpValue::Rational(q) => q.is_zero(),
            QpValue::Padic(x) => x.is_zero(),
        }
    }

    /// `self + n`, exact for rationals.
    pub fn add_integer(&self, n: i64) -> Result<Self> {
        match self {
            QpValue::Rational(q) => Ok(QpValue::Rational(q + from_int(n))),
            QpValue::Padic(x) => {
                let precision = x.absolute_precision().unwrap_or(1).max(1) as u32;
                let n = PadicNumber::from_integer(n, x.prime(), precision);
                Ok(QpValue::Padic(x.add(&n)?))
            }
        }
    }

    /// `1 - self`.
    pub fn one_minus(&self) -> Result<Self> {
        match self {
            QpValue::Rational(q) => Ok(QpValue::Rational(ExactRational::one() - q)),
            QpValue::Padic(x) => Ok(QpValue::Padic(x.neg()).add_integer(1)?),
        }
    }
}

impl From<ExactRational> for QpValue {
    fn from(q: ExactRational) -> Self {
        QpValue::Rational(q)
    }
}

impl From<PadicNumber> for QpValue {
    fn from(x: PadicNumber) -> Self {
        QpValue::Padic(x)
    }
}

impl fmt::Display for QpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QpValue::Rational(q) => write!(f, "{q}"),
            QpValue::Padic(x) => write!(f, "{x}"),
        }
    }
}
