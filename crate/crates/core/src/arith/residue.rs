use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::primes::is_prime;
use crate::{Error, Result};

/// An element of `Z/p^t`, stored fully reduced.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    #[serde(with = "crate::decimal")]
    p: BigUint,
    t: u32,
    #[serde(with = "crate::decimal")]
    modulus: BigUint,
    #[serde(with = "crate::decimal")]
    value: BigUint,
}

impl Residue {
    /// Checks primality of `p`; use [`Residue::new_unchecked`] inside loops
    /// where `p` is already known prime.
    pub fn new(p: &BigUint, t: u32, value: &BigInt) -> Result<Self> {
        if t == 0 {
            return Err(Error::invalid("residue exponent must be at least 1"));
        }
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(Self::new_unchecked(p, t, value))
    }

    pub fn new_unchecked(p: &BigUint, t: u32, value: &BigInt) -> Self {
        let modulus = p.pow(t);
        let value = reduce(value, &modulus);
        Residue {
            p: p.clone(),
            t,
            modulus,
            value,
        }
    }

    pub fn zero(p: &BigUint, t: u32) -> Self {
        Self::new_unchecked(p, t, &BigInt::zero())
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn exponent(&self) -> u32 {
        self.t
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Same value, different backing ring.
    fn with_value(&self, value: BigUint) -> Self {
        Residue {
            p: self.p.clone(),
            t: self.t,
            modulus: self.modulus.clone(),
            value,
        }
    }

    pub fn add(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        self.with_value((&self.value + &other.value) % &self.modulus)
    }

    pub fn sub(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        let v = if self.value >= other.value {
            &self.value - &other.value
        } else {
            &self.modulus - (&other.value - &self.value)
        };
        self.with_value(v)
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        self.with_value(&self.value * &other.value % &self.modulus)
    }

    pub fn pow(&self, e: u64) -> Residue {
        self.with_value(self.value.modpow(&BigUint::from(e), &self.modulus))
    }

    /// `p`-adic valuation of the stored value, `None` when it is zero in `Z/p^t`
    /// (the true valuation is then at least `t`).
    pub fn valuation(&self) -> Option<u32> {
        valuation_below(&self.value, &self.p, self.t)
    }

    /// Multiplicative inverse; exists iff the value is a unit.
    pub fn inverse(&self) -> Option<Residue> {
        let v = BigInt::from(self.value.clone());
        let m = BigInt::from(self.modulus.clone());
        let e = v.extended_gcd(&m);
        if !e.gcd.is_one() {
            return None;
        }
        Some(self.with_value(reduce(&e.x, &self.modulus)))
    }

    /// Image in `Z/p^s` for `s ≤ t`.
    pub fn reduce_to(&self, s: u32) -> Residue {
        assert!(s >= 1 && s <= self.t, "cannot reduce Z/p^{} to Z/p^{}", self.t, s);
        Residue::new_unchecked(&self.p, s, &BigInt::from(self.value.clone()))
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.value.clone())
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.p, self.t)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// Least nonnegative representative of `x` modulo `m`.
pub fn reduce(x: &BigInt, m: &BigUint) -> BigUint {
    let (sign, mag) = (x.sign(), x.magnitude());
    let r = mag % m;
    if sign == Sign::Minus && !r.is_zero() {
        m - r
    } else {
        r
    }
}

/// Largest `e < cap` with `p^e | x`, or `None` if `p^cap | x`.
pub fn valuation_below(x: &BigUint, p: &BigUint, cap: u32) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let mut e = 0;
    let mut y = x.clone();
    while e < cap {
        let (q, r) = y.div_rem(p);
        if !r.is_zero() {
            return Some(e);
        }
        y = q;
        e += 1;
    }
    None
}
