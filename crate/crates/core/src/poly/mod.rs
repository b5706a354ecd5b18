//! Dense univariate polynomials over `Z` (in the parameter `c`) and over
//! word-size prime fields.

mod fp;

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use fp::FpPoly;

use crate::arith::is_prime_u64;
use crate::arith::modular::{inv_mod, mul_mod, sub_mod};
use crate::{Error, Result};

/// Integer polynomial, constant term first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly {
    #[serde(with = "crate::decimal::vec")]
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The variable `c`.
    pub fn var() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        if std::ptr::eq(self, other) {
            return self.square();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Squaring with the cross terms counted once.
    pub fn square(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); 2 * n - 1];
        for i in 0..n {
            let a = &self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            for j in i + 1..n {
                out[i + j] += a * &self.coeffs[j];
            }
        }
        for x in out.iter_mut() {
            *x <<= 1u32;
        }
        for i in 0..n {
            out[2 * i] += &self.coeffs[i] * &self.coeffs[i];
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut result = IntPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Quotient and remainder over `Z`, failing if some quotient coefficient
    /// is not integral.
    pub fn div_rem(&self, divisor: &IntPoly) -> Result<(IntPoly, IntPoly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::invalid("division by the zero polynomial"))?;
        let lc = divisor.leading().expect("nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((IntPoly::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lc);
            if !r.is_zero() {
                return Err(Error::Inconsistency(
                    "non-integral quotient in polynomial division".into(),
                ));
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * dc;
            }
            quot[k] = q;
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Exact division; a nonzero remainder is an internal inconsistency.
    pub fn div_exact(&self, divisor: &IntPoly) -> Result<IntPoly> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Inconsistency("polynomial division is not exact".into()));
        }
        Ok(q)
    }

    pub fn derivative(&self) -> IntPoly {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Value at `x` reduced into `[0, m)`.
    pub fn eval_mod(&self, x: &BigUint, m: &BigUint) -> BigUint {
        let mut acc = BigUint::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * x + crate::arith::reduce(c, m)) % m;
        }
        acc
    }

    /// Image in `F_p[c]`.
    pub fn to_fp(&self, p: u64) -> FpPoly {
        let pb = BigUint::from(p);
        FpPoly::new(
            p,
            self.coeffs
                .iter()
                .map(|c| crate::arith::reduce(c, &pb).to_u64().expect("reduced below p"))
                .collect(),
        )
    }

    /// Largest coefficient bit length.
    pub fn height_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// `log2` of the Euclidean norm of the coefficient vector, rounded up.
    fn log2_norm(&self) -> f64 {
        let max_bits = self.height_bits() as f64;
        max_bits + 0.5 * (self.coeffs.len().max(1) as f64).log2()
    }

    /// Discriminant `(-1)^(D(D-1)/2) · Res(f, f') / lc(f)`, via resultants
    /// modulo 62-bit primes until the Hadamard bound is covered.
    pub fn discriminant(&self) -> Result<BigInt> {
        let deg = self
            .degree()
            .ok_or_else(|| Error::invalid("discriminant of the zero polynomial"))?;
        if deg == 0 {
            return Err(Error::invalid("discriminant of a constant polynomial"));
        }
        if deg == 1 {
            return Ok(BigInt::one());
        }
        let df = self.derivative();
        // |Res(f, f')| ≤ ‖f‖^(D-1) ‖f'‖^D, and disc = ±Res/lc.
        let bound_bits = (deg as f64 - 1.0) * self.log2_norm() + deg as f64 * df.log2_norm();
        let needed = bound_bits.ceil() as u64 + 2;

        let lc = self.leading().expect("nonzero").clone();
        let mut modulus = BigUint::one();
        let mut value = BigUint::zero();
        let mut q = 1u64 << 62;
        while modulus.bits() < needed {
            q = prev_prime_u64(q);
            let lc_mod = crate::arith::reduce(&lc, &BigUint::from(q)).to_u64().unwrap();
            if lc_mod == 0 {
                continue;
            }
            let r = self.disc_mod_prime(q).expect("leading coefficient is a unit");
            // incremental CRT: value + modulus·s ≡ r (mod q)
            let vm = (&value % q).to_u64().unwrap();
            let mm = (&modulus % q).to_u64().unwrap();
            let inv = inv_mod(mm, q).expect("distinct primes");
            let s = mul_mod(sub_mod(r, vm, q), inv, q);
            value += &modulus * s;
            modulus *= q;
        }
        // symmetric representative
        let half = &modulus >> 1u32;
        let disc = if value > half {
            -BigInt::from(&modulus - &value)
        } else {
            BigInt::from(value)
        };
        Ok(disc)
    }

    /// `disc(f) mod q` for a prime `q` not dividing the leading coefficient,
    /// using the formal degree `D - 1` for `f'`.
    pub fn disc_mod_prime(&self, q: u64) -> Option<u64> {
        let deg = self.degree()?;
        let f = self.to_fp(q);
        if f.degree() != Some(deg) {
            return None;
        }
        if deg == 0 {
            return None;
        }
        if deg == 1 {
            return Some(1 % q);
        }
        let df = self.derivative().to_fp(q);
        let res = f.resultant_formal(&df, deg - 1);
        let lc_inv = inv_mod(*f.coeffs().last().unwrap(), q)?;
        let mut d = mul_mod(res, lc_inv, q);
        if (deg * (deg - 1) / 2) % 2 == 1 {
            d = (q - d) % q;
        }
        Some(d)
    }
}

fn prev_prime_u64(mut q: u64) -> u64 {
    loop {
        q -= 1;
        if is_prime_u64(q) {
            return q;
        }
    }
}

impl fmt::Display for IntPoly {
    /// Human form in the variable `c`, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.sign() == Sign::Minus;
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mag = a.abs();
            let unit = mag.is_one();
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "c")?,
                1 => write!(f, "{mag}c")?,
                _ if unit => write!(f, "c^{i}")?,
                _ => write!(f, "{mag}c^{i}")?,
            }
        }
        Ok(())
    }
}
