//! Integer parameters `c` realizing prescribed exact prime powers
//! `p^k ∥ f^n_{d,c}(0)` with each `p` primitive: lift a base parameter at
//! every prime, adjust the valuation to `k`, then glue with CRT modulo
//! `p^(k+1)`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::modular::{add_mod, pow_mod};
use crate::arith::{crt, is_prime, next_prime_u64};
use crate::dynatomic::{gleason_disc_mod, disc_feasible};
use crate::lifting::{adjust_power, hensel_lift};
use crate::orbit::{is_primitive_divisor, orbit_with_derivative, RationalParam};
use crate::{Error, Residue, Result};

/// Default ceiling for prime auto-selection.
pub const DEFAULT_PRIME_CEILING: u64 = 1_000_000;

/// One prime slot inside a constraint group; `p = None` asks the
/// constructor to choose the prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSlot {
    #[serde(default, with = "crate::decimal::opt", skip_serializing_if = "Option::is_none")]
    pub p: Option<BigUint>,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintGroup {
    pub n: u64,
    pub primes: Vec<PrimeSlot>,
}

/// Input document for [`build_parameter`] and [`verify_spec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilitySpec {
    pub d: u32,
    pub constraints: Vec<ConstraintGroup>,
    #[serde(default, with = "crate::decimal::vec")]
    pub exclude_primes: Vec<BigUint>,
}

/// A fully resolved requirement `p^k ∥ f^n(0)` with `p` primitive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePowerConstraint {
    pub n: u64,
    #[serde(with = "crate::decimal")]
    pub p: BigUint,
    pub k: u32,
}

impl DivisibilitySpec {
    /// Shorthand for a spec with every prime pinned.
    pub fn pinned(d: u32, groups: &[(u64, &[(u64, u32)])]) -> Self {
        DivisibilitySpec {
            d,
            constraints: groups
                .iter()
                .map(|(n, ps)| ConstraintGroup {
                    n: *n,
                    primes: ps
                        .iter()
                        .map(|&(p, k)| PrimeSlot {
                            p: Some(BigUint::from(p)),
                            k,
                        })
                        .collect(),
                })
                .collect(),
            exclude_primes: Vec::new(),
        }
    }

    /// Every slot with its prime, or an error if some prime is unpinned.
    pub fn resolved(&self) -> Result<Vec<PrimePowerConstraint>> {
        let mut out = Vec::new();
        for g in &self.constraints {
            for s in &g.primes {
                let p = s
                    .p
                    .clone()
                    .ok_or_else(|| Error::invalid(format!("prime for iterate {} is not pinned", g.n)))?;
                out.push(PrimePowerConstraint { n: g.n, p, k: s.k });
            }
        }
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid(format!("degree must be at least 2, got {}", self.d)));
        }
        if self.constraints.is_empty() {
            return Err(Error::invalid("spec has no constraints"));
        }
        let excluded: BTreeSet<&BigUint> = self.exclude_primes.iter().collect();
        let mut seen = BTreeSet::new();
        for g in &self.constraints {
            if g.n == 0 {
                return Err(Error::invalid("iterate index must be at least 1"));
            }
            if g.primes.is_empty() {
                return Err(Error::invalid(format!("constraint at n = {} lists no primes", g.n)));
            }
            for s in &g.primes {
                if s.k == 0 {
                    return Err(Error::invalid("exact valuation k must be at least 1"));
                }
                if let Some(p) = &s.p {
                    if !is_prime(p) {
                        return Err(Error::invalid(format!("{p} is not prime")));
                    }
                    if excluded.contains(p) {
                        return Err(Error::invalid(format!("{p} is both pinned and excluded")));
                    }
                    if !seen.insert(p.clone()) {
                        return Err(Error::invalid(format!("{p} appears in two constraints")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintRecord {
    pub n: u64,
    #[serde(with = "crate::decimal")]
    pub p: BigUint,
    pub k: u32,
    #[serde(with = "crate::decimal")]
    pub base_c0: BigUint,
    /// `c ≡ residue (mod p^(k+1))`.
    #[serde(with = "crate::decimal")]
    pub residue: BigUint,
    #[serde(with = "crate::decimal")]
    pub lift_modulus: BigUint,
    pub auto_selected: bool,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub d: u32,
    #[serde(with = "crate::decimal")]
    pub c: BigUint,
    #[serde(with = "crate::decimal")]
    pub modulus: BigUint,
    pub records: Vec<ConstraintRecord>,
    pub verified: bool,
}

impl ConstructionReport {
    pub fn constraints(&self) -> Vec<PrimePowerConstraint> {
        self.records
            .iter()
            .map(|r| PrimePowerConstraint {
                n: r.n,
                p: r.p.clone(),
                k: r.k,
            })
            .collect()
    }
}

/// Smallest `c0 ∈ [0, p)` whose critical orbit mod `p` has exact period `n`.
/// These are exactly the `F_p` roots of `G_{d,n}` with exact period `n`.
pub fn find_base(d: u32, n: u64, p: &BigUint) -> Result<Option<BigUint>> {
    if d < 2 || n == 0 {
        return Err(Error::invalid("find_base needs d ≥ 2 and n ≥ 1"));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let pw = p
        .to_u64()
        .filter(|&w| w < (1 << 40))
        .ok_or_else(|| Error::invalid(format!("prime {p} is too large for a base search")))?;
    if n > pw {
        // an orbit in F_p has period at most p
        return Ok(None);
    }
    Ok((0..pw).find(|&c| has_exact_period_word(d, c, n, pw)).map(BigUint::from))
}

/// `f^n(0) ≡ 0` and `f^i(0) ≢ 0` for `1 ≤ i < n`, over `F_p`.
pub(crate) fn has_exact_period_word(d: u32, c: u64, n: u64, p: u64) -> bool {
    let mut x = 0u64;
    for i in 1..=n {
        x = add_mod(pow_mod(x, d as u64, p), c, p);
        if x == 0 {
            return i == n;
        }
    }
    false
}

/// Whether `p` divides `disc(G_{d,n})`. When `G_{d,n}` is too large to
/// expand, falls back to asking that `c0` be a simple root of `f^n(0)` mod p.
fn disc_obstructed(d: u32, n: u64, p: u64, c0: u64) -> Result<bool> {
    if disc_feasible(d, n) {
        return Ok(gleason_disc_mod(d, n, p)? == 0);
    }
    let c = Residue::new_unchecked(&BigUint::from(p), 1, &BigInt::from(c0));
    let (_, df) = orbit_with_derivative(d, &c, n);
    Ok(df.is_zero())
}

/// Smallest prime `p ∉ excluded`, `p ∤ d`, `p ∤ disc(G_{d,n})`, admitting a
/// base parameter; scans up to `ceiling`.
pub fn find_prime_for_iterate(
    d: u32,
    n: u64,
    excluded: &BTreeSet<BigUint>,
) -> Result<(BigUint, BigUint)> {
    find_prime_for_iterate_below(d, n, excluded, DEFAULT_PRIME_CEILING)
}

pub fn find_prime_for_iterate_below(
    d: u32,
    n: u64,
    excluded: &BTreeSet<BigUint>,
    ceiling: u64,
) -> Result<(BigUint, BigUint)> {
    if d < 2 || n == 0 {
        return Err(Error::invalid("find_prime_for_iterate needs d ≥ 2 and n ≥ 1"));
    }
    let mut p = 2u64;
    while p <= ceiling {
        if d as u64 % p != 0 && !excluded.contains(&BigUint::from(p)) && n <= p {
            if let Some(c0) = (0..p).find(|&c| has_exact_period_word(d, c, n, p)) {
                if !disc_obstructed(d, n, p, c0)? {
                    return Ok((BigUint::from(p), BigUint::from(c0)));
                }
            }
        }
        p = next_prime_u64(p);
    }
    Err(Error::NoPrimeFound { bound: ceiling })
}

struct Slot {
    n: u64,
    p: BigUint,
    k: u32,
    base: BigUint,
    auto: bool,
}

fn resolve_slots(spec: &DivisibilitySpec, ceiling: u64) -> Result<Vec<Slot>> {
    let mut taken: BTreeSet<BigUint> = spec.exclude_primes.iter().cloned().collect();
    for g in &spec.constraints {
        for s in &g.primes {
            if let Some(p) = &s.p {
                taken.insert(p.clone());
            }
        }
    }
    let mut slots = Vec::new();
    for g in &spec.constraints {
        for s in &g.primes {
            let slot = match &s.p {
                Some(p) => {
                    let base = find_base(spec.d, g.n, p)?.ok_or_else(|| Error::NotAdmissible {
                        p: p.clone(),
                        n: g.n as u32,
                    })?;
                    let pw = p.to_u64().expect("bounded by find_base");
                    if disc_obstructed(spec.d, g.n, pw, base.to_u64().unwrap())? {
                        return Err(Error::DiscObstruction {
                            p: p.clone(),
                            n: g.n as u32,
                        });
                    }
                    Slot {
                        n: g.n,
                        p: p.clone(),
                        k: s.k,
                        base,
                        auto: false,
                    }
                }
                None => {
                    let (p, base) = find_prime_for_iterate_below(spec.d, g.n, &taken, ceiling)?;
                    taken.insert(p.clone());
                    Slot {
                        n: g.n,
                        p,
                        k: s.k,
                        base,
                        auto: true,
                    }
                }
            };
            slots.push(slot);
        }
    }
    Ok(slots)
}

pub fn build_parameter(spec: &DivisibilitySpec) -> Result<ConstructionReport> {
    build_parameter_with_ceiling(spec, DEFAULT_PRIME_CEILING)
}

/// Resolves primes, lifts each base to precision `k + 2`, moves the
/// valuation to exactly `k`, combines modulo `Π p^(k+1)` and verifies.
pub fn build_parameter_with_ceiling(spec: &DivisibilitySpec, ceiling: u64) -> Result<ConstructionReport> {
    spec.validate()?;
    let slots = resolve_slots(spec, ceiling)?;
    let d = spec.d;

    let residues: Vec<BigUint> = slots
        .par_iter()
        .map(|s| {
            let lift = hensel_lift(d, s.n, &s.p, &BigInt::from(s.base.clone()), s.k + 2)
                .map_err(|e| match e {
                    Error::HenselHypothesis { .. } => Error::DiscObstruction {
                        p: s.p.clone(),
                        n: s.n as u32,
                    },
                    other => other,
                })?;
            if lift.v_df != 0 {
                return Err(Error::DiscObstruction {
                    p: s.p.clone(),
                    n: s.n as u32,
                });
            }
            let c_k = adjust_power(&lift, s.k)?;
            Ok(c_k % s.p.pow(s.k + 1))
        })
        .collect::<Result<_>>()?;

    let pairs: Vec<(BigInt, BigUint)> = slots
        .iter()
        .zip(&residues)
        .map(|(s, r)| (BigInt::from(r.clone()), s.p.pow(s.k + 1)))
        .collect();
    let c = crt(&pairs)?;
    let modulus = pairs.iter().fold(BigUint::from(1u32), |acc, (_, m)| acc * m);

    let resolved: Vec<PrimePowerConstraint> = slots
        .iter()
        .map(|s| PrimePowerConstraint {
            n: s.n,
            p: s.p.clone(),
            k: s.k,
        })
        .collect();
    let checks = verify_constraints(d, &BigInt::from(c.clone()), &resolved);

    let records: Vec<ConstraintRecord> = slots
        .into_iter()
        .zip(residues)
        .zip(&checks)
        .map(|((s, residue), check)| ConstraintRecord {
            lift_modulus: s.p.pow(s.k + 1),
            n: s.n,
            p: s.p,
            k: s.k,
            base_c0: s.base,
            residue,
            auto_selected: s.auto,
            verified: check.ok,
        })
        .collect();
    let verified = records.iter().all(|r| r.verified);
    if !verified {
        let bad: Vec<String> = records
            .iter()
            .filter(|r| !r.verified)
            .map(|r| format!("{}^{} at n = {}", r.p, r.k, r.n))
            .collect();
        return Err(Error::Inconsistency(format!(
            "constructed c = {c} fails {}",
            bad.join(", ")
        )));
    }
    Ok(ConstructionReport {
        d,
        c,
        modulus,
        records,
        verified,
    })
}

/// Outcome of checking one constraint against a given `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub n: u64,
    #[serde(with = "crate::decimal")]
    pub p: BigUint,
    pub k: u32,
    pub primitive: bool,
    /// `v_p(a_n)`; `None` if it could not be determined.
    pub valuation: Option<u32>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub d: u32,
    #[serde(with = "crate::decimal")]
    pub c: BigInt,
    pub checks: Vec<ConstraintCheck>,
    pub all_ok: bool,
}

/// Checks every pinned constraint of `spec` against `c` with modular orbits.
pub fn verify_spec(d: u32, c: &BigInt, spec: &DivisibilitySpec) -> Result<VerificationReport> {
    if d < 2 {
        return Err(Error::invalid(format!("degree must be at least 2, got {d}")));
    }
    let resolved = spec.resolved()?;
    let checks = verify_constraints(d, c, &resolved);
    let all_ok = checks.iter().all(|c| c.ok);
    Ok(VerificationReport {
        d,
        c: c.clone(),
        checks,
        all_ok,
    })
}

pub fn verify_constraints(d: u32, c: &BigInt, constraints: &[PrimePowerConstraint]) -> Vec<ConstraintCheck> {
    let param = RationalParam::integer(c.clone());
    constraints
        .par_iter()
        .map(|con| match is_primitive_divisor(d, &param, con.n, &con.p) {
            Ok((primitive, v)) => ConstraintCheck {
                n: con.n,
                p: con.p.clone(),
                k: con.k,
                primitive,
                valuation: Some(v),
                ok: primitive && v == con.k,
                error: None,
            },
            Err(e) => ConstraintCheck {
                n: con.n,
                p: con.p.clone(),
                k: con.k,
                primitive: false,
                valuation: None,
                ok: false,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

/// `c mod p^(k+1)` for every record, as used by the CRT step.
pub fn residues_agree(report: &ConstructionReport) -> bool {
    report
        .records
        .iter()
        .all(|r| (&report.c % &r.lift_modulus) == r.residue && !r.lift_modulus.is_zero())
}
