//! The parameter polynomials `f^n(0) ∈ Z[c]`, Gleason polynomials
//! `G_{d,n} = Π_{t|n} (f^t(0))^μ(n/t)`, their discriminants, and roots mod p.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use crate::arith::{divisors, is_prime_u64, moebius};
use crate::poly::{FpPoly, IntPoly};
use crate::{Error, Result};

/// Largest degree `d^(n-1)` for which `f^n(0)` is expanded.
pub const MAX_DEGREE: u64 = 4096;

/// Largest degree for which an exact discriminant is attempted.
pub const MAX_DISC_DEGREE: usize = 512;

type Cache = RwLock<HashMap<(u32, u64), Arc<IntPoly>>>;

fn iterate_cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn gleason_cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cached(cache: &Cache, key: (u32, u64)) -> Option<Arc<IntPoly>> {
    cache.read().expect("cache poisoned").get(&key).cloned()
}

fn store(cache: &Cache, key: (u32, u64), poly: IntPoly) -> Arc<IntPoly> {
    let mut w = cache.write().expect("cache poisoned");
    w.entry(key).or_insert_with(|| Arc::new(poly)).clone()
}

fn check_args(d: u32, n: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid(format!("degree must be at least 2, got {d}")));
    }
    if n == 0 {
        return Err(Error::invalid("iterate index must be at least 1"));
    }
    let deg = (d as u64).checked_pow((n - 1).min(64) as u32);
    match deg {
        Some(deg) if deg <= MAX_DEGREE && n <= 64 => Ok(()),
        _ => Err(Error::SizeGuard {
            what: format!("f^{n}(0) in Z[c] for d = {d}"),
            estimate_bits: (n - 1).saturating_mul((d as f64).log2().ceil() as u64),
            limit_bits: MAX_DEGREE.ilog2() as u64,
        }),
    }
}

/// Whether `iterate_poly(d, n)` is within the degree guard.
pub fn polynomial_feasible(d: u32, n: u64) -> bool {
    check_args(d, n).is_ok()
}

/// Whether `disc(G_{d,n})` (exact or mod p) is cheap enough to compute.
pub fn disc_feasible(d: u32, n: u64) -> bool {
    d >= 2
        && n >= 1
        && n <= 16
        && (d as u64)
            .checked_pow((n - 1) as u32)
            .is_some_and(|deg| deg <= MAX_DISC_DEGREE as u64)
}

/// `f^n_{d,c}(0)` as a polynomial in `c`, by `P_1 = c`, `P_{k+1} = P_k^d + c`.
pub fn iterate_poly(d: u32, n: u64) -> Result<IntPoly> {
    iterate_poly_shared(d, n).map(|p| (*p).clone())
}

pub(crate) fn iterate_poly_shared(d: u32, n: u64) -> Result<Arc<IntPoly>> {
    check_args(d, n)?;
    if let Some(p) = cached(iterate_cache(), (d, n)) {
        return Ok(p);
    }
    // start from the largest cached prefix
    let mut k = n - 1;
    let mut cur = loop {
        if k == 0 {
            break IntPoly::zero();
        }
        if let Some(p) = cached(iterate_cache(), (d, k)) {
            break (*p).clone();
        }
        k -= 1;
    };
    let c = IntPoly::var();
    let mut last = None;
    for i in k + 1..=n {
        cur = cur.pow(d).add(&c);
        last = Some(store(iterate_cache(), (d, i), cur.clone()));
    }
    Ok(last.expect("at least one step"))
}

/// `D_{d,n} = Σ_{m|n} μ(n/m) d^(m-1)`.
pub fn gleason_degree(d: u32, n: u64) -> Result<u64> {
    if d < 2 || n == 0 {
        return Err(Error::invalid("gleason_degree needs d ≥ 2 and n ≥ 1"));
    }
    let mut acc: i128 = 0;
    for m in divisors(n) {
        let term = (d as i128)
            .checked_pow((m - 1).try_into().unwrap_or(u32::MAX))
            .filter(|t| *t < (1i128 << 100))
            .ok_or_else(|| Error::invalid(format!("D_{{{d},{n}}} overflows")))?;
        acc += moebius(n / m) as i128 * term;
    }
    u64::try_from(acc).map_err(|_| Error::invalid(format!("D_{{{d},{n}}} overflows")))
}

/// `G_{d,n}(c)`: numerator over `μ = +1` divisors divided exactly by the
/// product over `μ = -1` divisors.
pub fn gleason_poly(d: u32, n: u64) -> Result<IntPoly> {
    gleason_poly_shared(d, n).map(|p| (*p).clone())
}

pub(crate) fn gleason_poly_shared(d: u32, n: u64) -> Result<Arc<IntPoly>> {
    check_args(d, n)?;
    if let Some(p) = cached(gleason_cache(), (d, n)) {
        return Ok(p);
    }
    let mut num = IntPoly::one();
    let mut den = IntPoly::one();
    for t in divisors(n) {
        match moebius(n / t) {
            1 => num = num.mul(&*iterate_poly_shared(d, t)?),
            -1 => den = den.mul(&*iterate_poly_shared(d, t)?),
            _ => {}
        }
    }
    let g = num.div_exact(&den)?;
    let expected = gleason_degree(d, n)?;
    if g.degree() != Some(expected as usize) {
        return Err(Error::Inconsistency(format!(
            "deg G_{{{d},{n}}} = {:?}, expected {expected}",
            g.degree()
        )));
    }
    Ok(store(gleason_cache(), (d, n), g))
}

/// Exact discriminant, sign `(-1)^(D(D-1)/2)·Res(f, f')/lc(f)`.
pub fn discriminant(poly: &IntPoly) -> Result<BigInt> {
    if let Some(deg) = poly.degree() {
        if deg > MAX_DISC_DEGREE {
            return Err(Error::SizeGuard {
                what: format!("discriminant of a degree-{deg} polynomial"),
                estimate_bits: (deg as u64).pow(2).saturating_mul(poly.height_bits().max(1)),
                limit_bits: (MAX_DISC_DEGREE as u64).pow(2),
            });
        }
    }
    poly.discriminant()
}

/// `disc(G_{d,n}) mod p` without the exact discriminant.
pub fn gleason_disc_mod(d: u32, n: u64, p: u64) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let g = gleason_poly_shared(d, n)?;
    g.disc_mod_prime(p)
        .ok_or_else(|| Error::Inconsistency("Gleason polynomial is not monic".into()))
}

fn word_prime(p: &BigUint) -> Result<u64> {
    let w = p
        .to_u64()
        .filter(|&w| w < (1 << 63))
        .ok_or_else(|| Error::invalid(format!("prime {p} exceeds the word-size root finder")))?;
    if !is_prime_u64(w) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(w)
}

fn reduce_nonzero(poly: &IntPoly, p: u64) -> Result<FpPoly> {
    let f = poly.to_fp(p);
    if f.is_zero() {
        return Err(Error::invalid(format!("polynomial vanishes identically mod {p}")));
    }
    Ok(f)
}

/// Whether `poly` has a root in `F_p`: `deg gcd(x^p - x, poly) ≥ 1`.
pub fn has_root_mod_p(poly: &IntPoly, p: &BigUint) -> Result<bool> {
    let p = word_prime(p)?;
    Ok(reduce_nonzero(poly, p)?.has_root())
}

/// All roots in `[0, p)` with multiplicities, increasing.
pub fn roots_mod_p(poly: &IntPoly, p: &BigUint) -> Result<Vec<(u64, u32)>> {
    let p = word_prime(p)?;
    Ok(reduce_nonzero(poly, p)?.roots())
}

/// Whether the root `c0` of `poly` mod `p` is simple.
pub fn is_simple_root(poly: &IntPoly, p: &BigUint, c0: &BigInt) -> Result<bool> {
    let pw = word_prime(p)?;
    let f = reduce_nonzero(poly, pw)?;
    let x = crate::arith::reduce(c0, p).to_u64().expect("reduced below p");
    if f.eval(x) != 0 {
        return Err(Error::invalid(format!("{c0} is not a root mod {p}")));
    }
    Ok(f.derivative().eval(x) != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use num_traits::Zero;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }
    fn bu(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn iterates() {
        assert_eq!(iterate_poly(2, 1).unwrap(), p(&[0, 1]));
        assert_eq!(iterate_poly(2, 2).unwrap(), p(&[0, 1, 1]));
        assert_eq!(iterate_poly(2, 3).unwrap(), p(&[0, 1, 1, 2, 1]));
        assert!(matches!(iterate_poly(2, 40), Err(Error::SizeGuard { .. })));
        assert!(iterate_poly(1, 3).is_err());
    }

    #[test]
    fn gleason_values() {
        assert_eq!(gleason_poly(2, 3).unwrap(), p(&[1, 1, 2, 1]));
        assert_eq!(gleason_poly(2, 1).unwrap(), p(&[0, 1]));
        assert_eq!(gleason_poly(4, 2).unwrap(), p(&[1, 0, 0, 1]));
        for d in 2..=6u32 {
            let mut expect = vec![0i64; d as usize];
            expect[0] = 1;
            expect[d as usize - 1] = 1;
            assert_eq!(gleason_poly(d, 2).unwrap(), p(&expect), "d = {d}");
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(gleason_degree(2, 3).unwrap(), 3);
        assert_eq!(gleason_degree(3, 3).unwrap(), 8);
        assert_eq!(gleason_degree(2, 6).unwrap(), 32 - 4 - 2 + 1);
        assert_eq!(gleason_degree(2, 4).unwrap(), 6);
        for d in 2..=3 {
            for n in 1..=7 {
                let g = gleason_poly(d, n).unwrap();
                assert_eq!(g.degree().unwrap() as u64, gleason_degree(d, n).unwrap());
            }
        }
    }

    #[test]
    fn discriminant_values() {
        assert_eq!(discriminant(&gleason_poly(2, 3).unwrap()).unwrap(), BigInt::from(-23));
        assert_eq!(discriminant(&p(&[0, 1])).unwrap(), BigInt::from(1));
        assert_eq!(discriminant(&p(&[0, 1, 1])).unwrap(), BigInt::from(1));
        let d4 = discriminant(&gleason_poly(2, 4).unwrap()).unwrap();
        assert!((&d4 % BigInt::from(2551)).is_zero(), "disc(G_2,4) = {d4}");
        for q in [3u64, 5, 7, 2551, 1_000_003] {
            let exact = d4.mod_floor(&BigInt::from(q)).to_u64().unwrap();
            assert_eq!(gleason_disc_mod(2, 4, q).unwrap(), exact);
        }
    }

    #[test]
    fn roots() {
        let g = gleason_poly(2, 3).unwrap();
        assert!(has_root_mod_p(&g, &bu(5)).unwrap());
        assert!(has_root_mod_p(&g, &bu(23)).unwrap());
        assert!(!has_root_mod_p(&p(&[1, 0, 1]), &bu(7)).unwrap());
        assert_eq!(roots_mod_p(&g, &bu(23)).unwrap(), vec![(14, 1), (15, 2)]);
        assert_eq!(roots_mod_p(&g, &bu(5)).unwrap(), vec![(1, 1)]);
        assert_eq!(roots_mod_p(&p(&[0, 1, 1]), &bu(7)).unwrap(), vec![(0, 1), (6, 1)]);
        assert!(has_root_mod_p(&p(&[7, 14]), &bu(7)).is_err());
        assert!(roots_mod_p(&g, &bu(9)).is_err());
    }

    #[test]
    fn simple_roots() {
        let f3 = iterate_poly(2, 3).unwrap();
        assert!(is_simple_root(&f3, &bu(5), &BigInt::from(1)).unwrap());
        let f5 = iterate_poly(2, 5).unwrap();
        assert!(!is_simple_root(&f5, &bu(13), &BigInt::from(3)).unwrap());
        let g = gleason_poly(2, 3).unwrap();
        assert!(!is_simple_root(&g, &bu(23), &BigInt::from(15)).unwrap());
        assert!(is_simple_root(&g, &bu(23), &BigInt::from(-9)).unwrap());
        assert!(is_simple_root(&g, &bu(23), &BigInt::from(3)).is_err());
    }
}
