//! Density of primes `p` for which `G_{d,n}` has a root in `F_p`: the
//! symmetric-group fixed-point proportion, the `1/D!` lower bound, the error
//! against `1 - 1/e`, and an empirical prime scan.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes_up_to;
use crate::dynatomic::{discriminant, disc_feasible, gleason_degree, gleason_poly, MAX_DISC_DEGREE};
use crate::{Error, Result};

/// Largest argument for which a reciprocal factorial is expanded.
const EXPAND_LIMIT: u64 = 2000;

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `Σ_{i=1}^{D} (-1)^(i+1) / i!`: the proportion of `S_D` fixing a point.
pub fn fpp_symmetric(big_d: u64) -> Result<BigRational> {
    if big_d == 0 {
        return Err(Error::invalid("D must be at least 1"));
    }
    if big_d > EXPAND_LIMIT {
        return Err(Error::SizeGuard {
            what: format!("alternating factorial sum to {big_d}"),
            estimate_bits: big_d.saturating_mul(64 - big_d.leading_zeros() as u64),
            limit_bits: EXPAND_LIMIT * 11,
        });
    }
    // Σ (-1)^(i+1) D!/i!, over D!
    let mut num = BigInt::zero();
    let mut term = BigInt::one(); // D!/i!, built downward from i = D
    for i in (1..=big_d).rev() {
        if i % 2 == 1 {
            num += &term;
        } else {
            num -= &term;
        }
        term *= i;
    }
    Ok(BigRational::new(num, factorial(big_d)))
}

/// `1/k!`, kept symbolic because `k` is often astronomically large.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReciprocalFactorial {
    #[serde(with = "crate::decimal")]
    pub of: BigUint,
}

impl ReciprocalFactorial {
    pub fn new(of: impl Into<BigUint>) -> Self {
        ReciprocalFactorial { of: of.into() }
    }

    /// Exact value when `k` is small enough to expand.
    pub fn to_rational(&self) -> Option<BigRational> {
        let k = self.of.to_u64().filter(|&k| k <= EXPAND_LIMIT)?;
        Some(BigRational::new(BigInt::one(), factorial(k)))
    }
}

impl std::fmt::Display for ReciprocalFactorial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_rational() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "1/({})!", self.of),
        }
    }
}

/// `1 / D_{d,n}!`.
pub fn density_lower_bound(d: u32, n: u64) -> Result<BigRational> {
    let big_d = gleason_degree(d, n)?;
    ReciprocalFactorial::new(big_d)
        .to_rational()
        .ok_or_else(|| Error::SizeGuard {
            what: format!("1/D! for D = {big_d}"),
            estimate_bits: big_d.saturating_mul(64 - big_d.leading_zeros() as u64),
            limit_bits: EXPAND_LIMIT * 11,
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitErrorBound {
    pub n: u64,
    #[serde(rename = "D")]
    pub degree: u64,
    /// `1/(D_{2,n} + 1)!`.
    pub bound: ReciprocalFactorial,
    /// `1/(2^(n-2))!`, weaker, from `D_{2,n} ≥ 2^(n-2)`.
    pub coarse: ReciprocalFactorial,
}

/// Bounds on `|fpp_symmetric(D_{2,n}) - (1 - 1/e)|`.
pub fn limit_error_bound(n: u64) -> Result<LimitErrorBound> {
    if n < 2 {
        return Err(Error::invalid("limit_error_bound needs n ≥ 2"));
    }
    let degree = gleason_degree(2, n)?;
    Ok(LimitErrorBound {
        n,
        degree,
        bound: ReciprocalFactorial::new(degree + 1),
        coarse: ReciprocalFactorial::new(BigUint::one() << (n - 2)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDensity {
    pub d: u32,
    pub n: u64,
    #[serde(rename = "X")]
    pub limit: u64,
    /// Primes counted in the denominator.
    pub primes_scanned: u64,
    pub hits: u64,
    pub fraction: f64,
    /// Primes dividing `d` or `disc(G_{d,n})`, kept out of both counts.
    pub skipped: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<(u64, bool)>>,
}

impl EmpiricalDensity {
    pub fn exact_fraction(&self) -> Option<BigRational> {
        (self.primes_scanned > 0).then(|| {
            BigRational::new(BigInt::from(self.hits), BigInt::from(self.primes_scanned))
        })
    }
}

/// Fraction of primes `p ≤ X` (away from `d` and the discriminant) for which
/// `G_{d,n}` has a root mod `p`.
pub fn empirical_density(d: u32, n: u64, limit: u64) -> Result<EmpiricalDensity> {
    empirical_density_rows(d, n, limit, false)
}

pub fn empirical_density_rows(d: u32, n: u64, limit: u64, keep_rows: bool) -> Result<EmpiricalDensity> {
    if limit < 2 {
        return Err(Error::invalid("X must be at least 2"));
    }
    let g = gleason_poly(d, n)?;
    let exact_disc = match g.degree() {
        Some(deg) if deg <= MAX_DISC_DEGREE && disc_feasible(d, n) => Some(discriminant(&g)?),
        _ => None,
    };
    let primes = primes_up_to(limit);
    let outcome: Vec<(u64, Option<bool>)> = primes
        .par_iter()
        .map(|&p| {
            let bad = d as u64 % p == 0
                || match &exact_disc {
                    Some(disc) => disc.is_multiple_of(&BigInt::from(p)),
                    None => g.disc_mod_prime(p) == Some(0),
                };
            if bad {
                (p, None)
            } else {
                (p, Some(g.to_fp(p).has_root()))
            }
        })
        .collect();

    let mut skipped = Vec::new();
    let mut hits = 0;
    let mut scanned = 0;
    let mut rows = Vec::new();
    for (p, r) in outcome {
        match r {
            None => skipped.push(p),
            Some(h) => {
                scanned += 1;
                hits += h as u64;
                if keep_rows {
                    rows.push((p, h));
                }
            }
        }
    }
    Ok(EmpiricalDensity {
        d,
        n,
        limit,
        primes_scanned: scanned,
        hits,
        fraction: if scanned == 0 { 0.0 } else { hits as f64 / scanned as f64 },
        skipped,
        rows: keep_rows.then_some(rows),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub d: u32,
    pub n: u64,
    #[serde(rename = "D")]
    pub degree: u64,
    /// Exact derangement sum; the density only if the Galois group of
    /// `G_{d,n}` is the full symmetric group.
    pub conditional_density: Option<String>,
    pub conditional_note: &'static str,
    pub lower_bound: ReciprocalFactorial,
    pub empirical: Option<EmpiricalDensity>,
    pub error_bound_vs_limit: Option<ReciprocalFactorial>,
}

pub fn density_report(d: u32, n: u64, limit: Option<u64>) -> Result<DensityReport> {
    let degree = gleason_degree(d, n)?;
    let conditional = if degree <= EXPAND_LIMIT {
        Some(fpp_symmetric(degree)?.to_string())
    } else {
        None
    };
    let empirical = match limit {
        Some(x) => Some(empirical_density(d, n, x)?),
        None => None,
    };
    Ok(DensityReport {
        d,
        n,
        degree,
        conditional_density: conditional,
        conditional_note: "valid only under symmetric Galois group",
        lower_bound: ReciprocalFactorial::new(degree),
        empirical,
        error_bound_vs_limit: (d == 2).then(|| ReciprocalFactorial::new(degree + 1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn derangement_sums() {
        assert_eq!(fpp_symmetric(1).unwrap(), q(1, 1));
        assert_eq!(fpp_symmetric(2).unwrap(), q(1, 2));
        assert_eq!(fpp_symmetric(3).unwrap(), q(2, 3));
        assert_eq!(fpp_symmetric(6).unwrap(), q(91, 144));
        assert!(fpp_symmetric(0).is_err());
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(density_lower_bound(2, 3).unwrap(), q(1, 6));
        assert_eq!(density_lower_bound(2, 1).unwrap(), q(1, 1));
        assert_eq!(density_lower_bound(3, 3).unwrap(), q(1, 40320));
    }

    #[test]
    fn limit_bounds() {
        assert_eq!(limit_error_bound(3).unwrap().bound.to_rational(), Some(q(1, 24)));
        assert_eq!(limit_error_bound(4).unwrap().bound.to_rational(), Some(q(1, 5040)));
        let b2 = limit_error_bound(2).unwrap();
        assert_eq!(b2.bound.to_rational(), Some(q(1, 2)));
        assert_eq!(b2.coarse.to_rational(), Some(q(1, 1)));
        let b30 = limit_error_bound(30).unwrap();
        assert_eq!(b30.coarse.to_rational(), None);
        assert_eq!(b30.coarse.to_string(), format!("1/({})!", 1u64 << 28));
    }

    #[test]
    fn trivial_scans() {
        let e = empirical_density(2, 1, 100).unwrap();
        assert_eq!(e.fraction, 1.0);
        assert_eq!(e.skipped, vec![2]);
        let e = empirical_density(2, 2, 100).unwrap();
        assert_eq!(e.hits, e.primes_scanned);
        let e = empirical_density(2, 3, 1000).unwrap();
        assert!(e.skipped.contains(&23));
        assert!(e.rows.is_none());
    }
}
