use crate::arith::modular::{add_mod, inv_mod, mul_mod, pow_mod, sub_mod};

/// Polynomial over `F_p` for a prime `p < 2^63`, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

/// Below this prime, roots of the split part are found by evaluation.
const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    /// The monomial `x`.
    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lc(&self) -> u64 {
        *self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<u64>, i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(
            self.p,
            (0..n)
                .map(|i| sub_mod(get(&self.coeffs, i), get(&other.coeffs, i), self.p))
                .collect(),
        )
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        // accumulate in u128 and reduce lazily
        let mut acc = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        let limit = u128::MAX - (p as u128 - 1) * (p as u128 - 1);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let slot = &mut acc[i + j];
                if *slot > limit {
                    *slot %= p as u128;
                }
                *slot += a as u128 * b as u128;
            }
        }
        Self::new(p, acc.into_iter().map(|v| (v % p as u128) as u64).collect())
    }

    pub fn div_rem(&self, divisor: &FpPoly) -> (FpPoly, FpPoly) {
        let p = self.p;
        let dd = divisor.degree().expect("division by zero polynomial");
        if self.coeffs.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(divisor.lc(), p).expect("prime modulus");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = mul_mod(rem[k + dd], inv, p);
            if q == 0 {
                continue;
            }
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = sub_mod(rem[k + j], mul_mod(q, dc, p), p);
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(p, quot), Self::new(p, rem))
    }

    pub fn rem(&self, divisor: &FpPoly) -> FpPoly {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lc(), self.p).expect("prime modulus");
        Self::new(
            self.p,
            self.coeffs.iter().map(|&c| mul_mod(c, inv, self.p)).collect(),
        )
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `base^e mod self`.
    pub fn pow_mod(&self, base: &FpPoly, mut e: u64) -> FpPoly {
        let mut result = Self::new(self.p, vec![1]).rem(self);
        let mut b = base.rem(self);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&b).rem(self);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b).rem(self);
            }
        }
        result
    }

    pub fn derivative(&self) -> FpPoly {
        let p = self.p;
        Self::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
                .collect(),
        )
    }

    /// `gcd(x^p - x, self)`: the product of the distinct linear factors.
    pub fn split_part(&self) -> FpPoly {
        assert!(!self.is_zero(), "split part of the zero polynomial");
        if self.degree() == Some(0) {
            return Self::new(self.p, vec![1]);
        }
        let x = Self::x(self.p);
        let xp = self.pow_mod(&x, self.p);
        self.gcd(&xp.sub(&x))
    }

    pub fn has_root(&self) -> bool {
        self.split_part().degree().unwrap_or(0) >= 1
    }

    /// Distinct roots in increasing order.
    pub fn distinct_roots(&self) -> Vec<u64> {
        let g = self.split_part();
        let deg = g.degree().unwrap_or(0);
        if deg == 0 {
            return Vec::new();
        }
        let mut roots = if self.p < BRUTE_FORCE_LIMIT {
            (0..self.p).filter(|&x| g.eval(x) == 0).collect()
        } else {
            let mut out = Vec::with_capacity(deg);
            g.equal_degree_split(&mut out);
            out
        };
        roots.sort_unstable();
        roots
    }

    /// Roots of a monic squarefree product of linear factors, by
    /// Cantor-Zassenhaus with shifts `x + a`, `a = 0, 1, 2, ...`.
    fn equal_degree_split(&self, out: &mut Vec<u64>) {
        let p = self.p;
        match self.degree() {
            Some(0) | None => return,
            Some(1) => {
                let inv = inv_mod(self.coeffs[1], p).unwrap();
                out.push(mul_mod(p - self.coeffs[0] % p, inv, p) % p);
                return;
            }
            _ => {}
        }
        if p == 2 {
            for x in 0..2 {
                if self.eval(x) == 0 {
                    out.push(x);
                }
            }
            return;
        }
        for a in 0..p {
            let base = Self::new(p, vec![a, 1]);
            let h = self.pow_mod(&base, (p - 1) / 2).sub(&Self::new(p, vec![1]));
            let s = self.gcd(&h);
            let ds = s.degree().unwrap_or(0);
            if ds > 0 && Some(ds) < self.degree() {
                let (other, _) = self.div_rem(&s);
                s.equal_degree_split(out);
                other.monic().equal_degree_split(out);
                return;
            }
        }
    }

    /// Exact multiplicity of the root `r`.
    pub fn multiplicity(&self, r: u64) -> u32 {
        let p = self.p;
        let mut cur = self.coeffs.clone();
        let mut m = 0;
        while cur.len() > 1 {
            // synthetic division by (x - r)
            let n = cur.len();
            let mut q = vec![0u64; n - 1];
            let mut carry = 0u64;
            for i in (0..n).rev() {
                let v = add_mod(cur[i], mul_mod(carry, r, p), p);
                if i == 0 {
                    carry = v;
                } else {
                    q[i - 1] = v;
                    carry = v;
                }
            }
            if carry != 0 {
                break;
            }
            m += 1;
            cur = q;
        }
        m
    }

    /// Roots with multiplicity.
    pub fn roots(&self) -> Vec<(u64, u32)> {
        self.distinct_roots()
            .into_iter()
            .map(|r| (r, self.multiplicity(r)))
            .collect()
    }

    /// `Res_{m,n}(self, g)` where `self` has exact degree `m` and `g` is taken
    /// with formal degree `n ≥ deg g`.
    pub fn resultant_formal(&self, g: &FpPoly, n: usize) -> u64 {
        let p = self.p;
        let mut f = self.clone();
        let mut m = f.degree().expect("nonzero polynomial");
        let mut g = g.clone();
        let mut n = n;
        let mut acc = 1u64;
        loop {
            if m == 0 {
                return mul_mod(acc, pow_mod(f.lc(), n as u64, p), p);
            }
            let Some(k) = g.degree() else {
                return 0;
            };
            acc = mul_mod(acc, pow_mod(f.lc(), (n - k) as u64, p), p);
            if k == 0 {
                return mul_mod(acc, pow_mod(g.coeffs[0], m as u64, p), p);
            }
            if (m * k) % 2 == 1 {
                acc = (p - acc) % p;
            }
            let r = f.rem(&g);
            n = m;
            m = k;
            f = g;
            g = r;
        }
    }
}
