//! Newton lifting of a parameter `c0` at a primitive prime `p` of
//! `f^n_{d,c0}(0)` to the unique p-adic `c̄` with `f^n_{d,c̄}(0) = 0`, and the
//! exact-power perturbation `c_r = c̄ + p^r`.

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, Residue};
use crate::orbit::{
    is_primitive_divisor, iterate_is_zero, orbit_prefix, orbit_with_derivative, RationalParam,
};
use crate::{Error, Result};

/// Precision cap when measuring `v_p(F')`.
const DERIVATIVE_CAP: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftResult {
    pub d: u32,
    #[serde(with = "crate::decimal")]
    pub p: BigUint,
    pub n: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    /// `c̄ mod p^N`, least nonnegative representative.
    #[serde(with = "crate::decimal")]
    pub value: BigUint,
    #[serde(with = "crate::decimal")]
    pub modulus: BigUint,
    /// `v_p(c̄ - c0)`; `None` when `c0` is already an exact root.
    pub shift_valuation: Option<u32>,
    #[serde(with = "crate::decimal")]
    pub base_c0: BigInt,
    /// `v_p(f^n_{d,c0}(0))`, `None` for an exact root.
    pub v_f: Option<u32>,
    /// `v_p(∂f^n(0)/∂c)` at `c0`.
    pub v_df: u32,
}

impl LiftResult {
    pub fn lifted_value(&self) -> Residue {
        Residue::new_unchecked(&self.p, self.precision, &BigInt::from(self.value.clone()))
    }
}

/// `v_p(F'(c0))`, doubling the working precision until it is visible.
fn derivative_valuation(d: u32, c0: &BigInt, n: u64, p: &BigUint, start: u32) -> Option<u32> {
    let mut t = start.max(2);
    loop {
        let c = Residue::new_unchecked(p, t, c0);
        let (_, df) = orbit_with_derivative(d, &c, n);
        if let Some(v) = df.valuation() {
            return Some(v);
        }
        if t >= DERIVATIVE_CAP {
            return None;
        }
        t = (t * 2).min(DERIVATIVE_CAP);
    }
}

/// Lifts `c0` to `c̄ mod p^N`.
///
/// Requires `p` primitive for `f^n_{d,c0}(0)` and `v(F) > 2 v(F')`. Works at
/// precision `N + 2 v(F') + 1` with the scaled Newton step
/// `c <- c - (F / p^v(F')) · (F' / p^v(F'))^-1`, stopping once
/// `v(F(c)) ≥ N + v(F')`, which pins `c ≡ c̄ (mod p^N)`.
pub fn hensel_lift(d: u32, n: u64, p: &BigUint, c0: &BigInt, precision: u32) -> Result<LiftResult> {
    if d < 2 || n == 0 || precision == 0 {
        return Err(Error::invalid("hensel_lift needs d ≥ 2, n ≥ 1, N ≥ 1"));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let not_primitive = || Error::NotPrimitive {
        p: p.clone(),
        n: n as u32,
        c0: c0.to_string(),
    };
    let modulus = p.pow(precision);
    let cparam = RationalParam::integer(c0.clone());

    if iterate_is_zero(d, &cparam, n) {
        // exact root already; only exact period needs checking
        let c1 = cparam.to_residue(p, 1)?;
        let prefix = orbit_prefix(d, c1.value(), n, c1.modulus());
        if prefix[..(n - 1) as usize].iter().any(|x| num_traits::Zero::is_zero(x)) {
            return Err(not_primitive());
        }
        let v_df = derivative_valuation(d, c0, n, p, 8).unwrap_or(DERIVATIVE_CAP);
        return Ok(LiftResult {
            d,
            p: p.clone(),
            n,
            precision,
            value: crate::arith::reduce(c0, &modulus),
            modulus,
            shift_valuation: None,
            base_c0: c0.clone(),
            v_f: None,
            v_df,
        });
    }

    let (primitive, v_f) = is_primitive_divisor(d, &cparam, n, p)?;
    if !primitive {
        return Err(not_primitive());
    }
    let v_df = match derivative_valuation(d, c0, n, p, v_f + 1) {
        Some(v) if v_f > 2 * v => v,
        other => return Err(Error::HenselHypothesis { v_f, v_df: other }),
    };

    let work = precision + 2 * v_df + 1;
    let target = precision + v_df;
    let pv = BigInt::from(p.pow(v_df));
    let max_iter = (target as f64).log2().ceil() as u32 + 6;
    let mut c = c0.clone();
    let mut converged = false;
    for _ in 0..=max_iter {
        let cr = Residue::new_unchecked(p, work, &c);
        let (f, df) = orbit_with_derivative(d, &cr, n);
        if f.valuation().is_none_or(|v| v >= target) {
            converged = true;
            break;
        }
        // both divisions are exact: v(F) > v(F') = v_df
        let reduced = work - v_df;
        let f_s = Residue::new_unchecked(p, reduced, &(f.to_bigint() / &pv));
        let df_s = Residue::new_unchecked(p, reduced, &(df.to_bigint() / &pv));
        let inv = df_s.inverse().ok_or_else(|| {
            Error::Inconsistency("scaled derivative lost its unit part during Newton".into())
        })?;
        c = cr.to_bigint() - f_s.mul(&inv).to_bigint();
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: max_iter,
        });
    }

    let value = crate::arith::reduce(&c, &modulus);
    // c̄ ≡ c0 (mod p), so the exact period is inherited; re-verify anyway.
    let check = Residue::new_unchecked(p, 1, &BigInt::from(value.clone()));
    let prefix = orbit_prefix(d, check.value(), n, check.modulus());
    if prefix[..(n - 1) as usize].iter().any(|x| num_traits::Zero::is_zero(x)) {
        return Err(Error::Inconsistency("lifted parameter lost exact period".into()));
    }
    Ok(LiftResult {
        d,
        p: p.clone(),
        n,
        precision,
        value,
        modulus,
        shift_valuation: Some(v_f - v_df),
        base_c0: c0.clone(),
        v_f: Some(v_f),
        v_df,
    })
}

/// `c_r = (c̄ mod p^(r+1)) + p^r`, for which `p^r ∥ f^n_{d,c_r}(0)` when
/// `F'(c̄)` is a unit. The result is checked with modular orbits.
pub fn adjust_power(lift: &LiftResult, r: u32) -> Result<BigUint> {
    if r == 0 {
        return Err(Error::invalid("target valuation must be at least 1"));
    }
    if lift.precision < r + 1 {
        return Err(Error::invalid(format!(
            "lift precision {} is below r + 1 = {}",
            lift.precision,
            r + 1
        )));
    }
    if lift.v_df != 0 {
        return Err(Error::invalid(format!(
            "adjust_power needs a unit derivative; v(F') = {}",
            lift.v_df
        )));
    }
    let p = &lift.p;
    let c_r = &lift.value % p.pow(r + 1) + p.pow(r);
    let param = RationalParam::integer(BigInt::from(c_r.clone()));
    match is_primitive_divisor(lift.d, &param, lift.n, p) {
        Ok((true, v)) if v == r => Ok(c_r),
        Ok((prim, v)) => Err(Error::Inconsistency(format!(
            "adjusted parameter {c_r}: primitive = {prim}, v = {v}, expected v = {r}"
        ))),
        Err(e) => Err(Error::Inconsistency(format!("adjusted parameter {c_r}: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn bu(x: u64) -> BigUint {
        BigUint::from(x)
    }
    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn five_adic_period_three() {
        let l = hensel_lift(2, 3, &bu(5), &bi(1), 3).unwrap();
        assert_eq!(l.value, bu(16));
        assert_eq!(l.modulus, bu(125));
        assert_eq!(l.shift_valuation, Some(1));
        let (f, _) = orbit_with_derivative(2, &l.lifted_value(), 3);
        assert!(f.is_zero());
    }

    #[test]
    fn thirteen_obstruction() {
        let e = hensel_lift(2, 5, &bu(13), &bi(3), 4).unwrap_err();
        assert_eq!(e, Error::HenselHypothesis { v_f: 1, v_df: Some(1) });
        for t in 0..13 {
            let c = Residue::new_unchecked(&bu(13), 2, &bi(3 + 13 * t));
            let (f, _) = orbit_with_derivative(2, &c, 5);
            assert!(!f.is_zero(), "shift {t}");
        }
    }

    #[test]
    fn fixed_critical_point() {
        let l = hensel_lift(2, 1, &bu(7), &bi(7), 4).unwrap();
        assert!(l.value.is_zero());
        assert_eq!(l.shift_valuation, Some(1));
        let exact = hensel_lift(2, 1, &bu(7), &bi(0), 4).unwrap();
        assert_eq!(exact.shift_valuation, None);
        assert!(exact.value.is_zero());
    }

    #[test]
    fn rejects_non_primitive() {
        // 5 ∤ f^4_{2,1}(0) = 26
        assert!(matches!(
            hensel_lift(2, 4, &bu(5), &bi(1), 3),
            Err(Error::NotPrimitive { .. })
        ));
        // 5 | f^3 and f^6 at c = 1: not primitive at 6
        assert!(matches!(
            hensel_lift(2, 6, &bu(5), &bi(1), 3),
            Err(Error::NotPrimitive { .. })
        ));
    }

    #[test]
    fn adjusted_powers() {
        let l = hensel_lift(2, 3, &bu(5), &bi(1), 4).unwrap();
        let c2 = adjust_power(&l, 2).unwrap();
        assert_eq!(c2, bu(16 % 125 + 25));
        let c1 = adjust_power(&l, 1).unwrap();
        assert_eq!(c1, bu(16 % 25 + 5));
        let param = RationalParam::integer(bi(-9));
        assert_eq!(is_primitive_divisor(2, &param, 3, &bu(5)).unwrap(), (true, 2));
        assert!(adjust_power(&l, 4).is_err());

        let l = hensel_lift(2, 2, &bu(3), &bi(2), 19).unwrap();
        let c17 = adjust_power(&l, 17).unwrap();
        let param = RationalParam::integer(BigInt::from(c17));
        assert_eq!(is_primitive_divisor(2, &param, 2, &bu(3)).unwrap(), (true, 17));
        let witness = RationalParam::integer(BigInt::from(3u64.pow(17) - 1));
        assert_eq!(is_primitive_divisor(2, &witness, 2, &bu(3)).unwrap(), (true, 17));
    }

    #[test]
    fn serializes_with_decimal_strings() {
        let l = hensel_lift(2, 3, &bu(5), &bi(1), 3).unwrap();
        let v = serde_json::to_value(&l).unwrap();
        assert_eq!(v["value"], "16");
        assert_eq!(v["modulus"], "125");
        assert_eq!(v["N"], 3);
        assert_eq!(v["shift_valuation"], 1);
    }
}
