//! Tail/period detection for iterated maps on finite sets.

use std::collections::HashMap;
use std::hash::Hash;

/// Visited-state count above which the hash map is abandoned for Brent's
/// algorithm, which needs O(1) memory.
pub const HASH_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle<T> {
    /// Index of the first point on the cycle.
    pub tail: u64,
    pub period: u64,
    /// `f^tail(x0)`.
    pub entry: T,
}

/// Minimal tail and period of the orbit of `x0` under `f`. The orbit must be
/// eventually periodic (always true on a finite set).
pub fn find_cycle<T, F>(x0: T, f: F) -> Cycle<T>
where
    T: Clone + Eq + Hash,
    F: Fn(&T) -> T,
{
    find_cycle_with_limit(x0, f, HASH_LIMIT)
}

pub fn find_cycle_with_limit<T, F>(x0: T, f: F, hash_limit: usize) -> Cycle<T>
where
    T: Clone + Eq + Hash,
    F: Fn(&T) -> T,
{
    let mut seen: HashMap<T, u64> = HashMap::new();
    let mut x = x0.clone();
    let mut i = 0u64;
    while seen.len() < hash_limit {
        if let Some(&j) = seen.get(&x) {
            return Cycle {
                tail: j,
                period: i - j,
                entry: x,
            };
        }
        let next = f(&x);
        seen.insert(x, i);
        x = next;
        i += 1;
    }
    drop(seen);
    brent(x0, f)
}

/// Brent's algorithm: power-of-two search for the period, then a second pass
/// with a `period`-step head start to locate the tail.
pub fn brent<T, F>(x0: T, f: F) -> Cycle<T>
where
    T: Clone + Eq,
    F: Fn(&T) -> T,
{
    let mut power = 1u64;
    let mut period = 1u64;
    let mut tortoise = x0.clone();
    let mut hare = f(&x0);
    while tortoise != hare {
        if power == period {
            tortoise = hare.clone();
            power *= 2;
            period = 0;
        }
        hare = f(&hare);
        period += 1;
    }

    let mut tortoise = x0.clone();
    let mut hare = x0;
    for _ in 0..period {
        hare = f(&hare);
    }
    let mut tail = 0u64;
    while tortoise != hare {
        tortoise = f(&tortoise);
        hare = f(&hare);
        tail += 1;
    }
    Cycle {
        tail,
        period,
        entry: tortoise,
    }
}
