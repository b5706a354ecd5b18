//! Integer utilities: valuations, CRT, Möbius, primality, factorization and
//! the residue rings `Z/p^t` that every orbit computation runs in.

mod factor;
pub mod modular;
mod primes;
mod residue;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

pub use factor::{factorize, FactorBudget, Factorization, PrimePower};
pub use primes::{
    is_prime, is_prime_seeded, is_prime_u64, next_prime, next_prime_u64, primes_up_to,
    set_primality_seed, DEFAULT_SEED,
};
pub use residue::{reduce, valuation_below, Residue};

use crate::{Error, Result};

/// `v_p(x)`: the largest `e` with `p^e | x`.
pub fn val_p(x: &BigInt, p: &BigUint) -> Result<u32> {
    if x.is_zero() {
        return Err(Error::InfiniteValuation);
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(valuation_below(x.magnitude(), p, u32::MAX).expect("nonzero input has finite valuation"))
}

/// Smallest nonnegative `x` with `x ≡ value_i (mod modulus_i)` for all `i`.
pub fn crt(pairs: &[(BigInt, BigUint)]) -> Result<BigUint> {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (value, modulus) in pairs {
        if *modulus <= BigUint::one() {
            return Err(Error::invalid(format!("CRT modulus {modulus} must exceed 1")));
        }
        let mi = BigInt::from(modulus.clone());
        let e = m.extended_gcd(&mi);
        if !e.gcd.is_one() {
            return Err(Error::invalid(format!(
                "CRT moduli are not pairwise coprime (gcd {} with {modulus})",
                e.gcd
            )));
        }
        // x + m·s ≡ value (mod mi) with s = (value - x)·m^{-1} mod mi
        let s = ((value - &x) * &e.x).mod_floor(&mi);
        x += &m * s;
        m *= mi;
        x = x.mod_floor(&m);
    }
    Ok(x.to_biguint().expect("reduced CRT value is nonnegative"))
}

/// Möbius function.
pub fn moebius(n: u64) -> i8 {
    assert!(n >= 1, "moebius is defined for n >= 1");
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut n = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}
