//! Counting primitive prime divisors of `a_n`, the piecewise upper bound on
//! their number, and per-iterate witnesses for maximal iterated Galois
//! layers.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, primes_up_to, totient, FactorBudget};
use crate::orbit::{
    classify_integer_param, estimate_iterate_bits, exact_iterates_guarded, is_primitive_divisor,
    iterate_is_zero, OrbitKind, RationalParam, DEFAULT_MAX_BITS,
};
use crate::{Error, Result};

/// `h(a/b) = max(|a|, b)`.
pub fn height(c: &RationalParam) -> BigUint {
    c.numer().magnitude().max(c.denom()).clone()
}

fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().log2() + shift as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoCase {
    /// `c ≤ -2`, `d` even.
    AtMostMinusTwo,
    /// `-2 < c < -2^(1/(d-1))`, `d` even.
    BetweenMinusTwoAndRoot,
    /// `-2^(1/(d-1)) < c < 0`, `d` even.
    RootToZero,
    /// `0 < c < 1` (after the odd-degree sign flip).
    ZeroToOne,
    /// `c ≥ 1` (after the odd-degree sign flip).
    AtLeastOne,
    /// Boundary values: the bound valid for every `c`.
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoBound {
    pub case: RhoCase,
    pub value: f64,
    /// The bound valid for every parameter, for comparison.
    pub general: f64,
}

/// Upper bound on the number of primitive prime divisors of `a_n`. Interval
/// membership is decided by exact integer comparison.
pub fn rho_upper_bound(d: u32, n: u64, c: &RationalParam) -> Result<RhoBound> {
    if d < 2 || n == 0 {
        return Err(Error::invalid("rho_upper_bound needs d ≥ 2 and n ≥ 1"));
    }
    if c.is_integer() && classify_integer_param(d, c.numer()).kind == OrbitKind::PcfInteger {
        return Err(Error::invalid(format!(
            "infinite-orbit precondition fails: c = {c} is post-critically finite for d = {d}"
        )));
    }
    let even = d % 2 == 0;
    // odd d: f^n_{d,c}(0) = -f^n_{d,-c}(0)
    let a = if !even && c.numer().is_negative() {
        -c.numer().clone()
    } else {
        c.numer().clone()
    };
    let b = BigInt::from(c.denom().clone());
    let dn1 = (d as f64).powf((n - 1) as f64);
    let inv = 1.0 / (d as f64 - 1.0);
    let log_a = log2_big(a.magnitude());
    let log_b = log2_big(c.denom());
    let general = dn1 * (3.0 + log2_big(&height(c))) + log_a;

    let case = match a.sign() {
        Sign::Minus => {
            // only even d reaches here
            let minus_two_b = -(&b * 2u32);
            if a <= minus_two_b {
                RhoCase::AtMostMinusTwo
            } else {
                // |c|^(d-1) against 2
                let lhs = a.magnitude().pow(d - 1);
                let rhs = c.denom().pow(d - 1) * 2u32;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => RhoCase::BetweenMinusTwoAndRoot,
                    Ordering::Less => RhoCase::RootToZero,
                    Ordering::Equal => RhoCase::General,
                }
            }
        }
        Sign::Plus => {
            if a >= b {
                RhoCase::AtLeastOne
            } else {
                RhoCase::ZeroToOne
            }
        }
        Sign::NoSign => RhoCase::General,
    };
    let value = match case {
        RhoCase::AtMostMinusTwo => dn1 * log_a,
        RhoCase::BetweenMinusTwoAndRoot => dn1 * (3.0 + log_b) - 1.0,
        RhoCase::RootToZero => (dn1 - 1.0) * log_b + log_a,
        RhoCase::ZeroToOne => (dn1 - 1.0) * (inv + log_b) + log_a,
        RhoCase::AtLeastOne => dn1 * (inv + log_a) - inv,
        RhoCase::General => general,
    };
    Ok(RhoBound {
        case,
        value,
        general,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveCount {
    pub rho: u64,
    /// `false` when `a_n` was only partially factored; `rho` is then a lower
    /// bound.
    pub complete: bool,
    #[serde(with = "crate::decimal::vec")]
    pub primes: Vec<BigUint>,
    #[serde(with = "crate::decimal")]
    pub a_n: BigInt,
}

/// Factors `a_n` and keeps the primes dividing no earlier `a_i`.
pub fn count_primitive_primes(
    d: u32,
    c: &RationalParam,
    n: u64,
    budget: FactorBudget,
) -> Result<PrimitiveCount> {
    if iterate_is_zero(d, c, n) {
        return Err(Error::ZeroIterate { n: n as u32 });
    }
    let iterates = exact_iterates_guarded(d, c, n, DEFAULT_MAX_BITS)?;
    let a_n = iterates.last().expect("n ≥ 1").numerator.clone();
    let fact = factorize(a_n.magnitude(), budget);
    let earlier: Vec<&BigInt> = iterates[..iterates.len() - 1]
        .iter()
        .map(|e| &e.numerator)
        .collect();
    let primes: Vec<BigUint> = fact
        .primes()
        .filter(|p| {
            let pi = BigInt::from((*p).clone());
            earlier.iter().all(|a| !a.is_multiple_of(&pi))
        })
        .cloned()
        .collect();
    Ok(PrimitiveCount {
        rho: primes.len() as u64,
        complete: fact.complete,
        primes,
        a_n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryChecks {
    pub primitive: bool,
    pub valuation_coprime_to_d: bool,
    pub p_not_dividing_d: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    Factorization,
    PrimeScan,
    Listed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub n: u64,
    #[serde(with = "crate::decimal")]
    pub p: BigUint,
    pub v: u32,
    pub checks: EntryChecks,
    pub source: WitnessSource,
}

impl CertificateEntry {
    pub fn valid(&self) -> bool {
        self.checks.primitive && self.checks.valuation_coprime_to_d && self.checks.p_not_dividing_d
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimedOrder {
    /// `φ(d)`.
    pub totient: u64,
    pub base: u32,
    /// `d^m - 1`.
    #[serde(with = "crate::decimal")]
    pub exponent: BigUint,
}

impl std::fmt::Display for ClaimedOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}*{}^{}", self.totient, self.base, self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalityCertificate {
    pub d: u32,
    #[serde(with = "crate::decimal")]
    pub c: BigInt,
    pub m: u64,
    /// One per `n` in `1..=m`; `None` where no witness was found in budget.
    pub entries: Vec<Option<CertificateEntry>>,
    /// Iterates without a witness.
    pub gaps: Vec<u64>,
    /// `d = 2` only: whether `-c` is a perfect square (then `f` is reducible).
    pub minus_c_is_square: Option<bool>,
    /// Irreducibility of the iterates is assumed, not proved.
    pub irreducibility_assumed: bool,
    pub claimed_order: Option<ClaimedOrder>,
}

/// Budgets for the witness search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateBudget {
    /// Iterates with at most this many bits are factored for candidates.
    pub factor_bits: u64,
    pub factor: FactorBudget,
    /// Number of primes tried by the ascending scan, per iterate.
    pub scan_primes: usize,
}

impl Default for CertificateBudget {
    fn default() -> Self {
        CertificateBudget {
            factor_bits: 2048,
            factor: FactorBudget {
                trial_limit: 100_000,
                rho_iterations: 200_000,
            },
            scan_primes: 100_000,
        }
    }
}

/// Checks a claimed witness `(n, p)` for the parameter `c`.
pub fn check_witness(d: u32, c: &BigInt, n: u64, p: &BigUint, source: WitnessSource) -> CertificateEntry {
    let param = RationalParam::integer(c.clone());
    let (primitive, v) = is_primitive_divisor(d, &param, n, p).unwrap_or((false, 0));
    CertificateEntry {
        n,
        p: p.clone(),
        v,
        checks: EntryChecks {
            primitive,
            valuation_coprime_to_d: primitive && v.gcd(&d) == 1,
            p_not_dividing_d: !(BigUint::from(d) % p).is_zero(),
        },
        source,
    }
}

fn scan_primes(count: usize) -> Vec<u64> {
    // the k-th prime is below k (ln k + ln ln k) for k ≥ 6
    let k = count.max(6) as f64;
    let bound = (k * (k.ln() + k.ln().ln())).ceil() as u64;
    let mut ps = primes_up_to(bound);
    ps.truncate(count);
    ps
}

fn find_witness(d: u32, c: &BigInt, n: u64, budget: &CertificateBudget, scan: &[u64]) -> Option<CertificateEntry> {
    let param = RationalParam::integer(c.clone());
    if estimate_iterate_bits(d, &param, n) <= budget.factor_bits {
        if let Ok(all) = exact_iterates_guarded(d, &param, n, budget.factor_bits) {
            let a_n = &all.last().unwrap().numerator;
            if !a_n.is_zero() {
                let fact = factorize(a_n.magnitude(), budget.factor);
                for p in fact.primes() {
                    let e = check_witness(d, c, n, p, WitnessSource::Factorization);
                    if e.valid() {
                        return Some(e);
                    }
                }
            }
        }
    }
    let dd = d as u64;
    scan.iter()
        .filter(|&&p| dd % p != 0)
        .map(|&p| check_witness(d, c, n, &BigUint::from(p), WitnessSource::PrimeScan))
        .find(|e| e.valid())
}

fn is_perfect_square(x: &BigInt) -> bool {
    if x.is_negative() {
        return false;
    }
    let r = x.sqrt();
    &r * &r == *x
}

fn claimed_order(d: u32, m: u64) -> ClaimedOrder {
    let exponent = BigUint::from(d).pow(m as u32) - BigUint::one();
    ClaimedOrder {
        totient: totient(d as u64),
        base: d,
        exponent,
    }
}

fn assemble(d: u32, c: &BigInt, m: u64, entries: Vec<Option<CertificateEntry>>) -> MaximalityCertificate {
    let gaps: Vec<u64> = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.as_ref().is_some_and(|e| e.valid()))
        .map(|(i, _)| i as u64 + 1)
        .collect();
    let claimed = gaps.is_empty().then(|| claimed_order(d, m));
    MaximalityCertificate {
        d,
        c: c.clone(),
        m,
        entries,
        gaps,
        minus_c_is_square: (d == 2).then(|| is_perfect_square(&-c.clone())),
        irreducibility_assumed: true,
        claimed_order: claimed,
    }
}

/// For each `1 ≤ n ≤ m`, a prime `p ∤ d` primitive for `a_n` with
/// `gcd(v_p(a_n), d) = 1`: factor-based candidates first when `a_n` is
/// small, then an ascending prime scan.
pub fn maximality_certificate(d: u32, c: &BigInt, m: u64) -> Result<MaximalityCertificate> {
    maximality_certificate_with(d, c, m, &CertificateBudget::default())
}

pub fn maximality_certificate_with(
    d: u32,
    c: &BigInt,
    m: u64,
    budget: &CertificateBudget,
) -> Result<MaximalityCertificate> {
    if d < 2 || m == 0 {
        return Err(Error::invalid("maximality_certificate needs d ≥ 2 and m ≥ 1"));
    }
    use rayon::prelude::*;
    let scan = scan_primes(budget.scan_primes);
    let param = RationalParam::integer(c.clone());
    let entries: Vec<Option<CertificateEntry>> = (1..=m)
        .into_par_iter()
        .map(|n| {
            if iterate_is_zero(d, &param, n) {
                None
            } else {
                find_witness(d, c, n, budget, &scan)
            }
        })
        .collect();
    Ok(assemble(d, c, m, entries))
}

/// Certificate built from a caller-supplied list: `primes[i]` is claimed for
/// iterate `i + 1`.
pub fn certificate_from_list(d: u32, c: &BigInt, primes: &[BigUint]) -> Result<MaximalityCertificate> {
    if d < 2 || primes.is_empty() {
        return Err(Error::invalid("need d ≥ 2 and at least one listed prime"));
    }
    use rayon::prelude::*;
    let entries = primes
        .par_iter()
        .enumerate()
        .map(|(i, p)| Some(check_witness(d, c, i as u64 + 1, p, WitnessSource::Listed)))
        .collect();
    Ok(assemble(d, c, primes.len() as u64, entries))
}

/// Re-derives every entry of `cert`; true iff each stored entry reproduces
/// and the claimed order is present exactly when all entries are valid.
pub fn verify_certificate(cert: &MaximalityCertificate) -> bool {
    let entries_ok = cert.entries.iter().enumerate().all(|(i, e)| match e {
        None => true,
        Some(e) => {
            e.n == i as u64 + 1 && check_witness(cert.d, &cert.c, e.n, &e.p, e.source) == *e
        }
    });
    let all_valid = cert.entries.iter().all(|e| e.as_ref().is_some_and(|e| e.valid()));
    entries_ok
        && cert.claimed_order.is_some() == all_valid
        && (!all_valid || cert.claimed_order == Some(claimed_order(cert.d, cert.m)))
}
