use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::modular::{mul_mod, pow_mod};

/// Seed used for the randomized Miller-Rabin rounds above 2^64 unless the
/// caller supplies one.
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

static SEED: AtomicU64 = AtomicU64::new(DEFAULT_SEED);

/// Replaces the seed used by [`is_prime`] for the rest of the process.
pub fn set_primality_seed(seed: u64) {
    SEED.store(seed, Ordering::Relaxed);
}

/// Rounds above 2^64: each round has error at most 1/4, so 64 rounds bound
/// the error by 2^-128.
const RANDOM_ROUNDS: usize = 64;

/// The first twelve primes form a deterministic witness set for n < 3.3e24,
/// in particular for every 64-bit n.
const WITNESSES_64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const TRIAL_PRIMES_LIMIT: u64 = 1_000_000;

pub(crate) fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_PRIMES_LIMIT))
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES_64 {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let (s, d) = split_pow2_u64(n - 1);
    WITNESSES_64.iter().all(|&a| strong_probable_prime_u64(n, a, s, d))
}

fn split_pow2_u64(m: u64) -> (u32, u64) {
    let s = m.trailing_zeros();
    (s, m >> s)
}

fn strong_probable_prime_u64(n: u64, a: u64, s: u32, d: u64) -> bool {
    let mut x = pow_mod(a % n, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

fn strong_probable_prime(n: &BigUint, n_minus_1: &BigUint, a: &BigUint, s: u64, d: &BigUint) -> bool {
    let mut x = a.modpow(d, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if &x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Primality test: deterministic below 2^64, Miller-Rabin with 64 seeded
/// random bases above.
pub fn is_prime(n: &BigUint) -> bool {
    is_prime_seeded(n, SEED.load(Ordering::Relaxed))
}

pub fn is_prime_seeded(n: &BigUint, seed: u64) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    for &a in &WITNESSES_64 {
        if !strong_probable_prime(n, &n_minus_1, &BigUint::from(a), s, &d) {
            return false;
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    (0..RANDOM_ROUNDS).all(|_| {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        strong_probable_prime(n, &n_minus_1, &a, s, &d)
    })
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime(x: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if x < &two {
        return two;
    }
    let mut c = x + 1u32;
    if c.is_even() && c != two {
        c += 1u32;
    }
    while !is_prime(&c) {
        c += 2u32;
    }
    c
}

pub fn next_prime_u64(x: u64) -> u64 {
    let mut c = x.saturating_add(1).max(2);
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}
