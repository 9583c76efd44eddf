use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::rat::{inv_mod, mul_mod};
use super::Rat;
use crate::error::{Error, Result};

/// A nonzero class in 𝔽_p, stored by its least nonnegative representative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct ResidueClass {
    value: u64,
    modulus: u64,
}

impl ResidueClass {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        let v = value.rem_euclid(modulus as i64) as u64;
        if v == 0 {
            return Err(Error::NonInvertibleEntry(format!("0 mod {modulus}")));
        }
        Ok(ResidueClass { value: v, modulus })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    pub fn is_minus_one(&self) -> bool {
        self.value == self.modulus - 1
    }

    pub fn mul(&self, other: &ResidueClass) -> ResidueClass {
        debug_assert_eq!(self.modulus, other.modulus);
        ResidueClass {
            value: mul_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn pow(&self, e: i64) -> ResidueClass {
        let base = if e < 0 {
            inv_mod(self.value, self.modulus).expect("nonzero class is invertible")
        } else {
            self.value
        };
        ResidueClass {
            value: super::rat::pow_mod(base, e.unsigned_abs(), self.modulus),
            modulus: self.modulus,
        }
    }
}

impl TryFrom<(u64, u64)> for ResidueClass {
    type Error = Error;
    fn try_from((v, p): (u64, u64)) -> Result<Self> {
        ResidueClass::new((v % p.max(1)) as i64, p)
    }
}

impl From<ResidueClass> for (u64, u64) {
    fn from(r: ResidueClass) -> Self {
        (r.value, r.modulus)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl fmt::Debug for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn int_valuation(n: &BigInt, p: &BigInt) -> (i64, BigInt) {
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// `v_p(x)`.
pub fn padic_valuation(x: &Rat, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pb = BigInt::from(p);
    Ok(int_valuation(x.numer(), &pb).0 - int_valuation(x.denom(), &pb).0)
}

/// The class of `x · p^{-v_p(x)}` in 𝔽_p^×.
pub fn padic_residue(x: &Rat, p: u64) -> Result<ResidueClass> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pb = BigInt::from(p);
    let (_, n) = int_valuation(x.numer(), &pb);
    let (_, d) = int_valuation(x.denom(), &pb);
    let n = n.mod_floor(&pb).to_u64().expect("reduced mod p");
    let d = d.mod_floor(&pb).to_u64().expect("reduced mod p");
    let value = mul_mod(n, inv_mod(d, p).expect("unit mod p"), p);
    Ok(ResidueClass { value, modulus: p })
}

/// Largest trial divisor used by [`factor_integer`].
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Prime factorization of a positive integer by trial division up to
/// [`TRIAL_DIVISION_LIMIT`]. Fails when the cofactor left over is too large to be
/// certified prime by that bound.
pub fn factor_integer(n: &BigInt) -> Result<Vec<(u64, i64)>> {
    let too_large = || Error::FactorizationTooLarge(n.to_string());
    let mut m = n.to_u128().filter(|m| *m >= 1).ok_or_else(too_large)?;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_LIMIT && u128::from(d) * u128::from(d) <= m {
        let mut e = 0;
        while m % u128::from(d) == 0 {
            m /= u128::from(d);
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        // every divisor below d has been removed, so m is prime when m < d²
        if m >= u128::from(d) * u128::from(d) {
            return Err(too_large());
        }
        out.push((u64::try_from(m).map_err(|_| too_large())?, 1));
    }
    Ok(out)
}

/// Sign and prime powers of a nonzero rational: `x = ±∏ p^e`.
pub fn factor_rat(x: &Rat) -> Result<(bool, Vec<(u64, i64)>)> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let num = factor_integer(&x.numer().magnitude().clone().into())?;
    let den = factor_integer(&x.denom().clone())?;
    let mut all: Vec<(u64, i64)> = num;
    all.extend(den.into_iter().map(|(p, e)| (p, -e)));
    all.sort();
    Ok((x.is_negative(), all))
}
