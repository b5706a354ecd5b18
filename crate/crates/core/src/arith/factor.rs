use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::primes::{is_prime, small_primes};

/// Work limits for [`factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorBudget {
    /// Trial division runs over primes up to this bound (capped at 10^6).
    pub trial_limit: u64,
    /// Total Pollard-rho iterations across all composite cofactors.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: 1_000_000,
            rho_iterations: 2_000_000,
        }
    }
}

/// A possibly partial factorization: `Π p^e · cofactor = input`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub factors: Vec<PrimePower>,
    #[serde(with = "crate::decimal")]
    pub cofactor: BigUint,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "crate::decimal")]
    pub prime: BigUint,
    pub exponent: u32,
}

impl Factorization {
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(self.cofactor.clone(), |acc, f| acc * f.prime.pow(f.exponent))
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|f| &f.prime)
    }

    /// Number of distinct prime factors found.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }
}

/// Trial division to the budget's limit, then Brent's variant of Pollard rho
/// on whatever composite cofactors remain.
pub fn factorize(x: &BigUint, budget: FactorBudget) -> Factorization {
    let mut found: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut rest = x.clone();
    if rest <= BigUint::one() {
        return Factorization {
            factors: Vec::new(),
            cofactor: rest,
            complete: true,
        };
    }

    let limit = budget.trial_limit.min(1_000_000);
    for &p in small_primes() {
        if p > limit {
            break;
        }
        if let Some(r) = rest.to_u64() {
            if p.saturating_mul(p) > r {
                break;
            }
        }
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            found.insert(BigUint::from(p), e);
        }
    }

    let mut remaining_iters = budget.rho_iterations;
    let mut unsplit = BigUint::one();
    let mut stack = Vec::new();
    if !rest.is_one() {
        stack.push(rest);
    }
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            *found.entry(m).or_insert(0) += 1;
            continue;
        }
        if let Some(r) = perfect_power_root(&m) {
            let (root, k) = r;
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        match pollard_brent(&m, &mut remaining_iters) {
            Some(f) => {
                let g = &m / &f;
                stack.push(f);
                stack.push(g);
            }
            None => unsplit *= m,
        }
    }

    Factorization {
        factors: found
            .into_iter()
            .map(|(prime, exponent)| PrimePower { prime, exponent })
            .collect(),
        complete: unsplit.is_one(),
        cofactor: unsplit,
    }
}

/// Detects `m = r^k` for `k ≥ 2`; rho cycles poorly on prime powers.
fn perfect_power_root(m: &BigUint) -> Option<(BigUint, u32)> {
    let bits = m.bits() as u32;
    for k in (2..=bits).rev() {
        let r = m.nth_root(k);
        if r > BigUint::one() && &r.pow(k) == m {
            return Some((r, k));
        }
    }
    None
}

/// Brent's cycle-finding variant of Pollard rho with batched gcds. Tries
/// successive polynomial constants until a proper factor appears or the
/// shared iteration budget runs out.
fn pollard_brent(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    const BATCH: u64 = 128;
    for constant in 1u32.. {
        if *budget == 0 {
            return None;
        }
        let c = BigUint::from(constant);
        let step = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x;
        let mut ys;
        let mut q = BigUint::one();
        let mut g: BigUint;
        let mut r = 1u64;
        loop {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0u64;
            loop {
                ys = y.clone();
                let m = BATCH.min(r - k);
                for _ in 0..m {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                *budget = budget.saturating_sub(m);
                g = q.gcd(n);
                k += m;
                if k >= r || !g.is_one() || *budget == 0 {
                    break;
                }
            }
            r *= 2;
            if !g.is_one() || *budget == 0 {
                break;
            }
        }
        if g == *n {
            // The batch overshot; walk the last block one step at a time.
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && &g != n {
            return Some(g);
        }
    }
    None
}
