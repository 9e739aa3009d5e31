//! The residue ring `Z/p^M`, i.e. `Z_p` at fixed absolute precision `M`.
//!
//! Hot loops (alternating sums over up to `p^r_max` sample points) run here.
//! When `p^M < 2^63` elements are machine words and products go through
//! `u128`; below `2^127` they are `u128` with modular products from
//! `num-modular`; otherwise a `BigUint` backend is used.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_modular::ModularCoreOps;
use num_traits::{One, ToPrimitive, Zero};

use super::{inverse_mod, ExactRational, PadicNumber, Prime};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Modulus {
    Word(u64),
    Wide(u128),
    Big(BigUint),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Residue {
    Word(u64),
    Wide(u128),
    Big(BigUint),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    prime: Prime,
    digits: u32,
    modulus: Modulus,
}

impl ResidueRing {
    pub fn new(prime: Prime, digits: u32) -> Self {
        assert!(digits >= 1, "residue ring needs at least one digit");
        let m = prime.power(digits);
        let modulus = match (m.to_u64(), m.to_u128()) {
            (Some(w), _) if w < (1u64 << 63) => Modulus::Word(w),
            (_, Some(w)) if w < (1u128 << 127) => Modulus::Wide(w),
            _ => Modulus::Big(m),
        };
        Self {
            prime,
            digits,
            modulus,
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// Absolute precision `M` of every element.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn is_word_sized(&self) -> bool {
        matches!(self.modulus, Modulus::Word(_))
    }

    /// True unless elements need the arbitrary-precision backend.
    pub fn is_fixed_width(&self) -> bool {
        !matches!(self.modulus, Modulus::Big(_))
    }

    pub fn zero(&self) -> Residue {
        match self.modulus {
            Modulus::Word(_) => Residue::Word(0),
            Modulus::Wide(_) => Residue::Wide(0),
            Modulus::Big(_) => Residue::Big(BigUint::zero()),
        }
    }

    pub fn one(&self) -> Residue {
        self.from_u64(1)
    }

    pub fn from_u64(&self, k: u64) -> Residue {
        match &self.modulus {
            Modulus::Word(m) => Residue::Word(k % m),
            Modulus::Wide(m) => Residue::Wide(k as u128 % m),
            Modulus::Big(m) => Residue::Big(BigUint::from(k) % m),
        }
    }

    fn reduce_biguint(&self, k: BigUint) -> Residue {
        match &self.modulus {
            Modulus::Word(m) => Residue::Word((k % m).to_u64().unwrap()),
            Modulus::Wide(m) => Residue::Wide((k % m).to_u128().unwrap()),
            Modulus::Big(m) => Residue::Big(k % m),
        }
    }

    fn modulus_big(&self) -> BigUint {
        match &self.modulus {
            Modulus::Word(m) => BigUint::from(*m),
            Modulus::Wide(m) => BigUint::from(*m),
            Modulus::Big(m) => m.clone(),
        }
    }

    pub fn from_i64(&self, k: i64) -> Residue {
        let r = self.from_u64(k.unsigned_abs());
        if k < 0 {
            self.neg(&r)
        } else {
            r
        }
    }

    /// Reduction of a rational whose denominator is prime to p.
    pub fn from_rational(&self, q: &ExactRational) -> Result<Residue> {
        let m = BigInt::from(self.modulus_big());
        let inv = inverse_mod(q.denom(), &m).ok_or_else(|| {
            Error::OutOfDomain(format!("{q} is not a p-adic integer"))
        })?;
        let value = (q.numer() * inv).mod_floor(&m);
        Ok(self.reduce_biguint(value.to_biguint().unwrap()))
    }

    /// Reduction of a p-adic integer known to at least `M` digits.
    pub fn from_padic(&self, x: &PadicNumber) -> Result<Residue> {
        if x.prime() != self.prime {
            return Err(Error::PrimeMismatch(x.prime().get(), self.prime.get()));
        }
        Ok(self.reduce_biguint(x.residue_mod(self.digits)?))
    }

    /// The element as a p-adic number with absolute precision `M`.
    pub fn to_padic(&self, r: &Residue) -> PadicNumber {
        PadicNumber::from_scaled_residue(self.prime, 0, r.to_biguint(), self.digits)
    }

    pub fn is_zero(&self, r: &Residue) -> bool {
        match r {
            Residue::Word(w) => *w == 0,
            Residue::Wide(w) => *w == 0,
            Residue::Big(b) => b.is_zero(),
        }
    }

    pub fn add(&self, a: &Residue, b: &Residue) -> Residue {
        match (&self.modulus, a, b) {
            (Modulus::Word(m), Residue::Word(x), Residue::Word(y)) => {
                let s = x + y;
                Residue::Word(if s >= *m { s - m } else { s })
            }
            (Modulus::Wide(m), Residue::Wide(x), Residue::Wide(y)) => {
                let s = x + y;
                Residue::Wide(if s >= *m { s - m } else { s })
            }
            (Modulus::Big(m), Residue::Big(x), Residue::Big(y)) => {
                let s = x + y;
                Residue::Big(if &s >= m { s - m } else { s })
            }
            _ => panic!("residue from a different ring"),
        }
    }

    pub fn neg(&self, a: &Residue) -> Residue {
        match (&self.modulus, a) {
            (Modulus::Word(m), Residue::Word(x)) => Residue::Word(if *x == 0 { 0 } else { m - x }),
            (Modulus::Wide(m), Residue::Wide(x)) => Residue::Wide(if *x == 0 { 0 } else { m - x }),
            (Modulus::Big(m), Residue::Big(x)) => {
                Residue::Big(if x.is_zero() { BigUint::zero() } else { m - x })
            }
            _ => panic!("residue from a different ring"),
        }
    }

    pub fn sub(&self, a: &Residue, b: &Residue) -> Residue {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Residue, b: &Residue) -> Residue {
        match (&self.modulus, a, b) {
            (Modulus::Word(m), Residue::Word(x), Residue::Word(y)) => {
                Residue::Word(((*x as u128 * *y as u128) % *m as u128) as u64)
            }
            (Modulus::Wide(m), Residue::Wide(x), Residue::Wide(y)) => Residue::Wide(x.mulm(*y, m)),
            (Modulus::Big(m), Residue::Big(x), Residue::Big(y)) => Residue::Big((x * y) % m),
            _ => panic!("residue from a different ring"),
        }
    }

    pub fn pow(&self, a: &Residue, mut e: u64) -> Residue {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn inverse(&self, a: &Residue) -> Result<Residue> {
        match (&self.modulus, a) {
            (Modulus::Word(m), Residue::Word(x)) => {
                let (g, inv) = ext_gcd_inverse(*x as i128, *m as i128);
                if g != 1 {
                    return Err(Error::DivisionByZero);
                }
                Ok(Residue::Word(inv as u64))
            }
            // m < 2^127, so every Bezout coefficient fits in an i128.
            (Modulus::Wide(m), Residue::Wide(x)) => {
                let (g, inv) = ext_gcd_inverse(*x as i128, *m as i128);
                if g != 1 {
                    return Err(Error::DivisionByZero);
                }
                Ok(Residue::Wide(inv as u128))
            }
            (Modulus::Big(m), Residue::Big(x)) => {
                let inv = inverse_mod(&BigInt::from(x.clone()), &BigInt::from(m.clone()))
                    .ok_or(Error::DivisionByZero)?;
                Ok(Residue::Big(inv.to_biguint().unwrap()))
            }
            _ => panic!("residue from a different ring"),
        }
    }

    /// Integer power with inversion for negative exponents.
    pub fn pow_signed(&self, a: &Residue, e: i64) -> Result<Residue> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inverse(a)?, e.unsigned_abs()))
        }
    }

    /// Horner evaluation of `sum coeffs[n] * k^n`.
    pub fn eval_poly(&self, coeffs: &[Residue], k: u64) -> Residue {
        let x = self.from_u64(k);
        coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, &x), c))
    }

    /// `v_p(a)`, capped at `M` for the zero residue.
    pub fn valuation(&self, a: &Residue) -> u32 {
        let p = self.prime.get();
        match a {
            Residue::Word(w) => {
                if *w == 0 {
                    return self.digits;
                }
                let (mut w, mut v) = (*w, 0);
                while w % p == 0 {
                    w /= p;
                    v += 1;
                }
                v
            }
            Residue::Wide(w) => {
                if *w == 0 {
                    return self.digits;
                }
                let (mut w, mut v) = (*w, 0);
                while w % p as u128 == 0 {
                    w /= p as u128;
                    v += 1;
                }
                v
            }
            Residue::Big(b) => {
                if b.is_zero() {
                    return self.digits;
                }
                let mut w = b.clone();
                let mut v = 0;
                while (&w % p).is_zero() {
                    w /= p;
                    v += 1;
                }
                v
            }
        }
    }
}

fn ext_gcd_inverse(a: i128, m: i128) -> (i128, i128) {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, t0.rem_euclid(m))
}

impl Residue {
    pub fn is_one(&self) -> bool {
        match self {
            Residue::Word(w) => *w == 1,
            Residue::Wide(w) => *w == 1,
            Residue::Big(b) => b.is_one(),
        }
    }

    fn to_biguint(&self) -> BigUint {
        match self {
            Residue::Word(w) => BigUint::from(*w),
            Residue::Wide(w) => BigUint::from(*w),
            Residue::Big(b) => b.clone(),
        }
    }
}
