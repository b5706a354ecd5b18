//! The critical orbit `0, f(0), f^2(0), ...` of `f(x) = x^d + c`, over
//! `Z/p^t` and over `Q`.
//!
//! For `c = a/b` in lowest terms, `f^n(0) = a_n / b^(d^(n-1))` with
//! `a_1 = a` and `a_{n+1} = a_n^d + a·b^(d^n - 1)`. When `p ∤ b` the valuation
//! `v_p(a_n)` equals `v_p(f^n(0))`, so everything p-adic is read off the orbit
//! of `c mod p^T`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::modular::{add_mod, pow_mod};
use crate::arith::{is_prime, reduce, valuation_below, Residue};
use crate::cycle::find_cycle;
use crate::{Error, Result};

/// Tail length `m` and exact period `n` of an eventually periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodType {
    #[serde(rename = "m")]
    pub tail: u64,
    #[serde(rename = "n")]
    pub period: u64,
}

impl PeriodType {
    pub fn is_periodic(&self) -> bool {
        self.tail == 0
    }
}

impl fmt::Display for PeriodType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tail, self.period)
    }
}

/// A rational parameter `a/b` in lowest terms with `b ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalParam {
    #[serde(with = "crate::decimal")]
    a: BigInt,
    #[serde(with = "crate::decimal")]
    b: BigUint,
}

impl RationalParam {
    pub fn new(a: BigInt, b: BigInt) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::invalid("denominator is zero"));
        }
        let g = a.gcd(&b);
        let (mut a, mut b) = (a / &g, b / &g);
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        Ok(RationalParam {
            a,
            b: b.to_biguint().expect("positive denominator"),
        })
    }

    pub fn integer(a: BigInt) -> Self {
        RationalParam { a, b: BigUint::one() }
    }

    pub fn numer(&self) -> &BigInt {
        &self.a
    }

    pub fn denom(&self) -> &BigUint {
        &self.b
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_one()
    }

    /// `c mod p^t`; requires `p ∤ b`.
    pub fn to_residue(&self, p: &BigUint, t: u32) -> Result<Residue> {
        let m = p.pow(t);
        if (&self.b % p).is_zero() {
            return Err(Error::invalid(format!("{p} divides the denominator {}", self.b)));
        }
        let binv = BigInt::from(self.b.clone())
            .extended_gcd(&BigInt::from(m.clone()))
            .x;
        let v = reduce(&(&self.a * binv), &m);
        Ok(Residue::new_unchecked(p, t, &BigInt::from(v)))
    }
}

impl From<i64> for RationalParam {
    fn from(a: i64) -> Self {
        RationalParam::integer(BigInt::from(a))
    }
}

impl From<BigInt> for RationalParam {
    fn from(a: BigInt) -> Self {
        RationalParam::integer(a)
    }
}

impl FromStr for RationalParam {
    type Err = Error;

    /// Accepts `a` or `a/b` in decimal.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed rational parameter {s:?}"));
        match s.split_once('/') {
            None => Ok(RationalParam::integer(
                crate::decimal::parse_bigint(s).ok_or_else(bad)?,
            )),
            Some((a, b)) => {
                let a = crate::decimal::parse_bigint(a).ok_or_else(bad)?;
                let b = crate::decimal::parse_bigint(b).ok_or_else(bad)?;
                RationalParam::new(a, b)
            }
        }
    }
}

impl fmt::Display for RationalParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_one() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}/{}", self.a, self.b)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitKind {
    PcfInteger,
    PresumedWandering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcfReason {
    /// `c = 0`: the critical point is fixed.
    Zero,
    /// `c = -1`, `d` even: `0 -> -1 -> 0`.
    MinusOneEvenDegree,
    /// `c = -2`, `d = 2`: `0 -> -2 -> 2 -> 2`.
    MinusTwoQuadratic,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClassification {
    pub kind: OrbitKind,
    pub reason: PcfReason,
}

/// The integer parameters with finite critical orbit are exactly `c = 0`,
/// `c = -1` with `d` even, and `c = -2` with `d = 2`.
pub fn classify_integer_param(d: u32, c: &BigInt) -> OrbitClassification {
    let reason = if c.is_zero() {
        PcfReason::Zero
    } else if *c == BigInt::from(-1) && d % 2 == 0 {
        PcfReason::MinusOneEvenDegree
    } else if *c == BigInt::from(-2) && d == 2 {
        PcfReason::MinusTwoQuadratic
    } else {
        PcfReason::None
    };
    let kind = if reason == PcfReason::None {
        OrbitKind::PresumedWandering
    } else {
        OrbitKind::PcfInteger
    };
    OrbitClassification { kind, reason }
}

/// Whether `f^n(0) = 0` exactly. A rational root of the monic integer
/// polynomial `f^n(0) ∈ Z[c]` is an integer, and a periodic critical point
/// forces `c ∈ {0, -1}` (the latter only for even `d`, period 2).
pub fn iterate_is_zero(d: u32, c: &RationalParam, n: u64) -> bool {
    if !c.is_integer() {
        return false;
    }
    let a = c.numer();
    a.is_zero() || (*a == BigInt::from(-1) && d % 2 == 0 && n % 2 == 0)
}

fn check_degree(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid(format!("degree must be at least 2, got {d}")));
    }
    Ok(())
}

fn check_prime(p: &BigUint) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(())
}

/// `f^1(0), ..., f^n(0)` modulo `m`, where `c` is already reduced mod `m`.
pub(crate) fn orbit_prefix(d: u32, c: &BigUint, n: u64, m: &BigUint) -> Vec<BigUint> {
    if let (Some(mw), Some(cw)) = (m.to_u64(), c.to_u64()) {
        let mut x = 0u64;
        return (0..n)
            .map(|_| {
                x = add_mod(pow_mod(x, d as u64, mw), cw, mw);
                BigUint::from(x)
            })
            .collect();
    }
    let de = BigUint::from(d);
    let mut x = BigUint::zero();
    (0..n)
        .map(|_| {
            x = (x.modpow(&de, m) + c) % m;
            x.clone()
        })
        .collect()
}

/// `f^n(0) mod m` without keeping the prefix.
pub(crate) fn iterate_mod(d: u32, c: &BigUint, n: u64, m: &BigUint) -> BigUint {
    if let (Some(mw), Some(cw)) = (m.to_u64(), c.to_u64()) {
        let mut x = 0u64;
        for _ in 0..n {
            x = add_mod(pow_mod(x, d as u64, mw), cw, mw);
        }
        return BigUint::from(x);
    }
    let de = BigUint::from(d);
    let mut x = BigUint::zero();
    for _ in 0..n {
        x = (x.modpow(&de, m) + c) % m;
    }
    x
}

/// Period type of the critical orbit in `Z/p^t`, plus the cycle entry
/// `f^m(0)`.
pub fn period_type_mod(d: u32, c: &Residue) -> Result<(PeriodType, Residue)> {
    let zero = Residue::zero(c.p(), c.exponent());
    point_period_type_mod(d, c, &zero)
}

/// Period type of an arbitrary starting point `r` in `Z/p^t`.
pub fn point_period_type_mod(d: u32, c: &Residue, r: &Residue) -> Result<(PeriodType, Residue)> {
    check_degree(d)?;
    if c.modulus() != r.modulus() {
        return Err(Error::invalid("parameter and point live in different rings"));
    }
    let m = c.modulus().clone();
    let cycle = if let (Some(mw), Some(cw), Some(rw)) =
        (m.to_u64(), c.value().to_u64(), r.value().to_u64())
    {
        let de = d as u64;
        let cyc = find_cycle(rw, move |x: &u64| add_mod(pow_mod(*x, de, mw), cw, mw));
        crate::cycle::Cycle {
            tail: cyc.tail,
            period: cyc.period,
            entry: BigUint::from(cyc.entry),
        }
    } else {
        let de = BigUint::from(d);
        let cv = c.value().clone();
        find_cycle(r.value().clone(), move |x: &BigUint| {
            (x.modpow(&de, &m) + &cv) % &m
        })
    };
    let entry = Residue::new_unchecked(c.p(), c.exponent(), &BigInt::from(cycle.entry));
    Ok((
        PeriodType {
            tail: cycle.tail,
            period: cycle.period,
        },
        entry,
    ))
}

/// Multiplier of the cycle through `entry` of length `period`:
/// `d^n · Π_{i<n} f^i(entry)^(d-1)`.
pub fn cycle_multiplier(d: u32, c: &Residue, entry: &Residue, period: u64) -> Residue {
    let dm = Residue::new_unchecked(c.p(), c.exponent(), &BigInt::from(d));
    let mut acc = dm.pow(period);
    let mut x = entry.clone();
    for _ in 0..period {
        acc = acc.mul(&x.pow(d as u64 - 1));
        x = x.pow(d as u64).add(c);
    }
    acc
}

/// Result of a capped valuation computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Valuation {
    Exact(u32),
    /// The iterate vanished modulo `p^T` at the largest precision tried.
    AtLeast(u32),
}

impl Valuation {
    pub fn exact(self) -> Option<u32> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }
}

pub const DEFAULT_VALUATION_CAP: u32 = 1 << 16;
const INITIAL_PRECISION: u32 = 8;

/// `v_p(f^n(0))` read from orbits mod `p^T`, doubling `T` from 8 until the
/// iterate is nonzero or `T` reaches `cap`.
pub fn iterate_valuation(
    d: u32,
    c: &RationalParam,
    n: u64,
    p: &BigUint,
    cap: u32,
) -> Result<Valuation> {
    check_degree(d)?;
    check_prime(p)?;
    if n == 0 {
        return Err(Error::invalid("iterate index must be at least 1"));
    }
    iterate_valuation_unchecked(d, c, n, p, cap)
}

pub(crate) fn iterate_valuation_unchecked(
    d: u32,
    c: &RationalParam,
    n: u64,
    p: &BigUint,
    cap: u32,
) -> Result<Valuation> {
    let cap = cap.max(1);
    let mut t = INITIAL_PRECISION.min(cap);
    loop {
        let cr = c.to_residue(p, t)?;
        let x = iterate_mod(d, cr.value(), n, cr.modulus());
        if let Some(v) = valuation_below(&x, p, t) {
            return Ok(Valuation::Exact(v));
        }
        if t >= cap {
            return Ok(Valuation::AtLeast(t));
        }
        t = (t * 2).min(cap);
    }
}

/// Whether `p` is a primitive prime divisor of `a_n`, together with
/// `v_p(a_n)`.
pub fn is_primitive_divisor(d: u32, c: &RationalParam, n: u64, p: &BigUint) -> Result<(bool, u32)> {
    check_degree(d)?;
    check_prime(p)?;
    if n == 0 {
        return Err(Error::invalid("iterate index must be at least 1"));
    }
    if (c.denom() % p).is_zero() {
        return Err(Error::invalid(format!(
            "{p} divides the denominator of c = {c}; it divides no a_n"
        )));
    }
    if iterate_is_zero(d, c, n) {
        return Err(Error::ZeroIterate { n: n as u32 });
    }
    let c1 = c.to_residue(p, 1)?;
    let prefix = orbit_prefix(d, c1.value(), n, c1.modulus());
    let earlier_clear = prefix[..(n - 1) as usize].iter().all(|x| !x.is_zero());
    if !prefix[(n - 1) as usize].is_zero() {
        return Ok((false, 0));
    }
    let v = match iterate_valuation_unchecked(d, c, n, p, DEFAULT_VALUATION_CAP)? {
        Valuation::Exact(v) => v,
        Valuation::AtLeast(t) => {
            return Err(Error::Inconsistency(format!(
                "f^{n}(0) is nonzero yet vanishes mod {p}^{t}"
            )))
        }
    };
    Ok((earlier_clear, v))
}

/// `(F, F')` with `F = f^n(0)` and `F' = ∂f^n(0)/∂c`, both mod `p^N`, from
/// the coupled recurrence `w <- d·v^(d-1)·w + 1`, `v <- v^d + c`.
pub fn orbit_with_derivative(d: u32, c: &Residue, n: u64) -> (Residue, Residue) {
    let m = c.modulus();
    let dm = BigUint::from(d);
    let mut v = BigUint::zero();
    let mut w = BigUint::zero();
    for _ in 0..n {
        let vpow = v.modpow(&BigUint::from(d - 1), m);
        w = (&dm * &vpow % m * &w + 1u32) % m;
        v = (&vpow * &v + c.value()) % m;
    }
    (
        Residue::new_unchecked(c.p(), c.exponent(), &BigInt::from(v)),
        Residue::new_unchecked(c.p(), c.exponent(), &BigInt::from(w)),
    )
}

/// Default ceiling on the estimated bit length of an exact iterate.
pub const DEFAULT_MAX_BITS: u64 = 1 << 26;

/// Exact numerator `a_n` of `f^n(0)`; the denominator is `b^(d^(n-1))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactIterate {
    #[serde(with = "crate::decimal")]
    pub numerator: BigInt,
    #[serde(with = "crate::decimal")]
    pub denominator_exponent: BigUint,
}

/// Upper estimate for the bit length of `a_n`: each step at most multiplies
/// the length by `d` and adds a few bits.
pub fn estimate_iterate_bits(d: u32, c: &RationalParam, n: u64) -> u64 {
    let h = c.numer().magnitude().max(c.denom()).bits().max(1) + 1;
    let growth = (d as f64).powf(n.saturating_sub(1) as f64);
    let est = growth * h as f64;
    if est > u64::MAX as f64 {
        u64::MAX
    } else {
        est as u64
    }
}

pub fn exact_iterate(d: u32, c: &RationalParam, n: u64) -> Result<ExactIterate> {
    exact_iterate_guarded(d, c, n, DEFAULT_MAX_BITS)
}

pub fn exact_iterate_guarded(d: u32, c: &RationalParam, n: u64, max_bits: u64) -> Result<ExactIterate> {
    let all = exact_iterates_guarded(d, c, n, max_bits)?;
    Ok(all.into_iter().last().expect("n >= 1"))
}

/// `a_1, ..., a_n` exactly.
pub fn exact_iterates_guarded(
    d: u32,
    c: &RationalParam,
    n: u64,
    max_bits: u64,
) -> Result<Vec<ExactIterate>> {
    check_degree(d)?;
    if n == 0 {
        return Err(Error::invalid("iterate index must be at least 1"));
    }
    let est = estimate_iterate_bits(d, c, n);
    if est > max_bits {
        return Err(Error::SizeGuard {
            what: format!("a_{n} for d = {d}, c = {c}"),
            estimate_bits: est,
            limit_bits: max_bits,
        });
    }
    let a = c.numer();
    let b = BigInt::from(c.denom().clone());
    let mut out = Vec::with_capacity(n as usize);
    let mut an = a.clone();
    let mut dpow = BigUint::one(); // d^(i-1)
    out.push(ExactIterate {
        numerator: an.clone(),
        denominator_exponent: dpow.clone(),
    });
    for _ in 1..n {
        let next_dpow = &dpow * d;
        // a_{i+1} = a_i^d + a·b^(d^i - 1)
        let scale = if b.is_one() {
            BigInt::one()
        } else {
            let e = (&next_dpow - 1u32)
                .to_u32()
                .ok_or_else(|| Error::SizeGuard {
                    what: "denominator power".into(),
                    estimate_bits: u64::MAX,
                    limit_bits: max_bits,
                })?;
            b.pow(e)
        };
        an = an.pow(d) + a * scale;
        dpow = next_dpow;
        out.push(ExactIterate {
            numerator: an.clone(),
            denominator_exponent: dpow.clone(),
        });
    }
    Ok(out)
}
