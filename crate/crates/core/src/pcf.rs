//! Post-critically finite parameters over `F_p`: the census of critical
//! period types, the simple-root conditions on `f^n(0) ∈ F_p[c]`, and the
//! lifts of periodic parameters to `Z/p^N`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::arith::modular::{add_mod, mul_mod, pow_mod};
use crate::cycle::find_cycle;
use crate::dynatomic::{gleason_disc_mod, disc_feasible};
use crate::lifting::hensel_lift;
use crate::orbit::{orbit_with_derivative, PeriodType};
use crate::{Error, Result};

/// Critical period type for every `c ∈ F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcfCensus {
    pub d: u32,
    pub p: u64,
    /// Indexed by `c`.
    pub entries: Vec<PeriodType>,
    /// `|A_n|`: parameters whose critical point has exact period `n`.
    pub periodic_count: BTreeMap<u64, u64>,
}

impl PcfCensus {
    pub fn periodic(&self) -> impl Iterator<Item = (u64, PeriodType)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_periodic())
            .map(|(c, t)| (c as u64, *t))
    }

    pub fn preperiodic(&self) -> impl Iterator<Item = (u64, PeriodType)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_periodic())
            .map(|(c, t)| (c as u64, *t))
    }

    pub fn periodic_total(&self) -> u64 {
        self.periodic_count.values().sum()
    }

    /// Exact periods that occur among periodic parameters.
    pub fn periods(&self) -> Vec<u64> {
        self.periodic_count.keys().copied().collect()
    }

    /// JSON document: periodic and preperiodic maps keyed by `c`, plus the
    /// (**) verdict.
    pub fn to_json(&self) -> serde_json::Value {
        let map = |it: &mut dyn Iterator<Item = (u64, PeriodType)>| {
            it.map(|(c, t)| (c.to_string(), serde_json::to_value(t).unwrap()))
                .collect::<serde_json::Map<_, _>>()
        };
        let star = check_condition_star_star_census(self);
        serde_json::json!({
            "p": self.p.to_string(),
            "d": self.d,
            "periodic": map(&mut self.periodic()),
            "preperiodic": map(&mut self.preperiodic()),
            "periodic_count": self.periodic_count.iter()
                .map(|(n, k)| (n.to_string(), serde_json::json!(k)))
                .collect::<serde_json::Map<_, _>>(),
            "condition_star_star": star.holds,
        })
    }
}

fn word_prime(p: &BigUint) -> Result<u64> {
    let pw = p
        .to_u64()
        .filter(|&w| w < (1 << 32) && is_prime_u64(w))
        .ok_or_else(|| Error::invalid(format!("{p} is not a prime below 2^32")))?;
    Ok(pw)
}

fn critical_type(d: u32, c: u64, p: u64) -> PeriodType {
    let cyc = find_cycle(0u64, |x: &u64| add_mod(pow_mod(*x, d as u64, p), c, p));
    PeriodType {
        tail: cyc.tail,
        period: cyc.period,
    }
}

/// Brute-force census over all `c ∈ F_p`, parallel over `c`.
pub fn enumerate_pcf(d: u32, p: &BigUint) -> Result<PcfCensus> {
    if d < 2 {
        return Err(Error::invalid(format!("degree must be at least 2, got {d}")));
    }
    let pw = word_prime(p)?;
    let entries: Vec<PeriodType> = (0..pw)
        .into_par_iter()
        .map(|c| critical_type(d, c, pw))
        .collect();
    let mut periodic_count = BTreeMap::new();
    for t in entries.iter().filter(|t| t.is_periodic()) {
        *periodic_count.entry(t.period).or_insert(0) += 1;
    }
    Ok(PcfCensus {
        d,
        p: pw,
        entries,
        periodic_count,
    })
}

/// `∂f^n(0)/∂c` at `c` over `F_p`.
fn derivative_word(d: u32, c: u64, n: u64, p: u64) -> u64 {
    let (mut v, mut w) = (0u64, 0u64);
    let dd = d as u64 % p;
    for _ in 0..n {
        let vpow = pow_mod(v, d as u64 - 1, p);
        w = add_mod(mul_mod(mul_mod(dd, vpow, p), w, p), 1, p);
        v = add_mod(mul_mod(vpow, v, p), c, p);
    }
    w
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarCheck {
    pub d: u32,
    pub p: u64,
    pub n: u64,
    pub holds: bool,
    /// Parameters with exact period `n`.
    pub checked: Vec<u64>,
    /// Those among them that are multiple roots of `f^n(0)` mod p.
    pub failures: Vec<u64>,
}

fn star_from_census(census: &PcfCensus, n: u64) -> StarCheck {
    let checked: Vec<u64> = census
        .periodic()
        .filter(|(_, t)| t.period == n)
        .map(|(c, _)| c)
        .collect();
    let failures: Vec<u64> = checked
        .iter()
        .copied()
        .filter(|&c| derivative_word(census.d, c, n, census.p) == 0)
        .collect();
    StarCheck {
        d: census.d,
        p: census.p,
        n,
        holds: failures.is_empty(),
        checked,
        failures,
    }
}

/// Condition (*): every `c ∈ F_p` with critical exact period `n` is a simple
/// root of `f^n(0) ∈ F_p[c]`.
pub fn check_condition_star(d: u32, p: &BigUint, n: u64) -> Result<StarCheck> {
    let pw = word_prime(p)?;
    if n == 0 || n > pw {
        return Err(Error::invalid(format!("need 1 ≤ n ≤ p, got n = {n}, p = {p}")));
    }
    let census = enumerate_pcf(d, p)?;
    Ok(star_from_census(&census, n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarStarCheck {
    pub d: u32,
    pub p: u64,
    pub holds: bool,
    pub per_period: Vec<StarCheck>,
}

impl StarStarCheck {
    /// `(n, c)` pairs violating (*).
    pub fn failures(&self) -> Vec<(u64, u64)> {
        self.per_period
            .iter()
            .flat_map(|s| s.failures.iter().map(move |&c| (s.n, c)))
            .collect()
    }
}

fn check_condition_star_star_census(census: &PcfCensus) -> StarStarCheck {
    let per_period: Vec<StarCheck> = census
        .periods()
        .into_iter()
        .map(|n| star_from_census(census, n))
        .collect();
    StarStarCheck {
        d: census.d,
        p: census.p,
        holds: per_period.iter().all(|s| s.holds),
        per_period,
    }
}

/// Condition (**): (*) for every exact period that occurs over `F_p`.
pub fn check_condition_star_star(d: u32, p: &BigUint) -> Result<StarStarCheck> {
    let census = enumerate_pcf(d, p)?;
    Ok(check_condition_star_star_census(&census))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftEntry {
    pub base: u64,
    pub n: u64,
    #[serde(with = "crate::decimal::opt", skip_serializing_if = "Option::is_none", default)]
    pub lifted: Option<BigUint>,
    /// `f^n(0) ≡ 0 (mod p^N)` at the lifted value and it reduces to `base`.
    pub checked: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub d: u32,
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    #[serde(with = "crate::decimal")]
    pub modulus: BigUint,
    pub condition_star_star: bool,
    /// `p ∤ disc(G_{d,n})` for every `n` whose Gleason polynomial is
    /// expandable; `None` if some `n` was out of reach.
    pub disc_clear: Option<bool>,
    pub guaranteed: bool,
    /// `|A_n|` over `F_p`, equal to the number of p-adic lifts when
    /// guaranteed.
    pub counts: BTreeMap<u64, u64>,
    /// Parameters strictly preperiodic mod p; none of them lifts to a
    /// p-adic PCF parameter with periodic critical point, and when `p > d`
    /// no p-adic parameter over a periodic class is strictly preperiodic.
    pub strictly_preperiodic_mod_p: u64,
    pub no_strictly_preperiodic_lifts: bool,
    pub lifts: Vec<LiftEntry>,
}

/// Lifts each `F_p` parameter with periodic critical orbit to the unique
/// `c̄ ∈ Z_p` with `f^n_{d,c̄}(0) = 0`, modulo `p^N`.
pub fn correspondence_report(d: u32, p: &BigUint, precision: u32) -> Result<CorrespondenceReport> {
    if precision == 0 {
        return Err(Error::invalid("precision must be at least 1"));
    }
    let census = enumerate_pcf(d, p)?;
    let pw = census.p;
    let star = check_condition_star_star_census(&census);
    let mut disc_clear = Some(true);
    for n in 1..=pw.min(64) {
        if !disc_feasible(d, n) {
            disc_clear = None;
            break;
        }
        if gleason_disc_mod(d, n, pw)? == 0 {
            disc_clear = Some(false);
            break;
        }
    }
    let guaranteed = pw > d as u64 && (star.holds || disc_clear == Some(true));
    let modulus = p.pow(precision);

    let periodic: Vec<(u64, PeriodType)> = census.periodic().collect();
    let lifts: Vec<LiftEntry> = periodic
        .par_iter()
        .map(|&(c, t)| {
            match hensel_lift(d, t.period, p, &BigInt::from(c), precision) {
                Ok(l) => {
                    let r = l.lifted_value();
                    let (f, _) = orbit_with_derivative(d, &r, t.period);
                    let reduces = (&l.value % pw) == BigUint::from(c);
                    LiftEntry {
                        base: c,
                        n: t.period,
                        lifted: Some(l.value),
                        checked: f.is_zero() && reduces,
                        error: None,
                    }
                }
                Err(e) => LiftEntry {
                    base: c,
                    n: t.period,
                    lifted: None,
                    checked: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let strictly = census.preperiodic().count() as u64;
    Ok(CorrespondenceReport {
        d,
        p: pw,
        precision,
        modulus,
        condition_star_star: star.holds,
        disc_clear,
        guaranteed,
        counts: census.periodic_count.clone(),
        strictly_preperiodic_mod_p: strictly,
        no_strictly_preperiodic_lifts: pw > d as u64,
        lifts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bu(x: u64) -> BigUint {
        BigUint::from(x)
    }
    fn pt(m: u64, n: u64) -> PeriodType {
        PeriodType { tail: m, period: n }
    }

    #[test]
    fn cubic_census_mod_five() {
        let c = enumerate_pcf(3, &bu(5)).unwrap();
        let periodic: Vec<_> = c.periodic().collect();
        assert_eq!(
            periodic,
            vec![(0, pt(0, 1)), (1, pt(0, 4)), (2, pt(0, 2)), (3, pt(0, 2)), (4, pt(0, 4))]
        );
        assert_eq!(c.periodic_total(), 5);
    }

    #[test]
    fn small_quadratic_censuses() {
        let c = enumerate_pcf(2, &bu(2)).unwrap();
        assert_eq!(c.entries, vec![pt(0, 1), pt(0, 2)]);
        // x^2 + c mod 3: c=0 fixed; c=1: 0,1,2,2; c=2: 0,2,0
        let c = enumerate_pcf(2, &bu(3)).unwrap();
        assert_eq!(c.entries, vec![pt(0, 1), pt(2, 1), pt(0, 2)]);
    }

    #[test]
    fn condition_star() {
        assert!(check_condition_star(2, &bu(5), 3).unwrap().holds);
        let s = check_condition_star(2, &bu(13), 5).unwrap();
        assert!(!s.holds);
        assert!(s.failures.contains(&3));
        // at p = 23, n = 3: c = 14 (≡ -9) is simple, c = 15 is the double root
        let s = check_condition_star(2, &bu(23), 3).unwrap();
        assert_eq!(s.failures, vec![15]);
        assert!(s.checked.contains(&14));
        assert!(check_condition_star(2, &bu(5), 9).is_err());
    }

    #[test]
    fn condition_star_star() {
        assert!(!check_condition_star_star(2, &bu(13)).unwrap().holds);
        assert!(check_condition_star_star(2, &bu(5)).unwrap().holds);
        assert!(check_condition_star_star(2, &bu(2)).unwrap().holds);
    }

    #[test]
    fn correspondences() {
        let r = correspondence_report(3, &bu(5), 4).unwrap();
        assert_eq!(r.lifts.len(), 5);
        assert!(r.lifts.iter().all(|l| l.checked));
        assert!(r.guaranteed);

        let r = correspondence_report(2, &bu(5), 3).unwrap();
        assert!(r
            .lifts
            .iter()
            .any(|l| l.base == 1 && l.lifted == Some(bu(16))));

        let r = correspondence_report(2, &bu(3), 2).unwrap();
        assert_eq!(r.lifts.len(), 2);
        assert!(r.lifts.iter().all(|l| l.checked));
    }

    #[test]
    fn census_json_shape() {
        let v = enumerate_pcf(3, &bu(5)).unwrap().to_json();
        assert_eq!(v["p"], "5");
        assert_eq!(v["periodic"]["1"]["n"], 4);
        assert_eq!(v["condition_star_star"], true);
    }
}
