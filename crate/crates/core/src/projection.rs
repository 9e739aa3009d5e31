//! The decomposition `a = p^v(a) * â * <a>` of a nonzero element of `Q_p`
//! into a power of p, a Teichmüller representative (a `(p-1)`-th root of
//! unity) and a 1-unit.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::padic::PadicNumber;

/// `(p^v(a), â, <a>)` with `p_part * teich * one_unit = a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitDecomposition {
    pub p_part: PadicNumber,
    pub teich: PadicNumber,
    pub one_unit: PadicNumber,
}

impl UnitDecomposition {
    /// `omega_v(a) = p^v(a) * â`.
    pub fn omega_v(&self) -> Result<PadicNumber> {
        self.p_part.mul(&self.teich)
    }
}

/// Teichmüller representative `ω(u)` of a unit: the `(p-1)`-th root of unity
/// congruent to `u` mod p.
///
/// Iterates `x -> x^p`; every step fixes one more digit, so the iteration is
/// stationary after at most `N` steps at relative precision `N`.
pub fn teichmuller(u: &PadicNumber) -> Result<PadicNumber> {
    let v = u.valuation()?;
    if v != 0 {
        return Err(Error::NotAUnit(v));
    }
    let prime = u.prime();
    let precision = u.relative_precision().expect("nonzero value");
    let modulus = prime.power(precision);
    let exponent = BigUint::from(prime.get());
    let mut x = u.unit().expect("nonzero value").clone();
    for _ in 0..=precision {
        let next = x.modpow(&exponent, &modulus);
        if next == x {
            break;
        }
        x = next;
    }
    PadicNumber::from_parts(prime, 0, x, precision)
}

pub fn decompose(a: &PadicNumber) -> Result<UnitDecomposition> {
    let v = a.valuation().map_err(|_| Error::ZeroDecomposition)?;
    let unit = a.unit_part()?;
    let precision = unit.relative_precision().expect("nonzero value");
    let teich = teichmuller(&unit)?;
    let one_unit = unit.div(&teich)?;
    let p_part = PadicNumber::one(a.prime(), precision).shift(v);
    Ok(UnitDecomposition {
        p_part,
        teich,
        one_unit,
    })
}

/// The projection `<a>`, a 1-unit.
pub fn angle(a: &PadicNumber) -> Result<PadicNumber> {
    Ok(decompose(a)?.one_unit)
}

/// `omega_v(a) = a / <a> = p^v(a) * â`.
pub fn omega_v(a: &PadicNumber) -> Result<PadicNumber> {
    decompose(a)?.omega_v()
}
