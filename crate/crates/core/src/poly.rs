//! Dense univariate polynomials in `t`: exact over `Z` and reduced over `F_p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor, mul_mod, pow_mod};

/// Integer polynomial, coefficients ascending, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<BigInt>);

impl Poly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `c * t^k`
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k];
        v.push(c.into());
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigInt> {
        self.0.last()
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(1), |acc, _| &acc * self)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// `self / content`, sign chosen so the leading coefficient is positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.lead().is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        Self::new(self.0.iter().map(|c| c / &g).collect())
    }

    /// `s^n f(1/s)`; `n` must be at least the degree.
    pub fn reversed(&self, n: usize) -> Self {
        debug_assert!(self.degree().is_none_or(|d| d <= n));
        let mut v = self.0.clone();
        v.resize(n + 1, BigInt::zero());
        v.reverse();
        Self::new(v)
    }

    /// Multiplicity of `t = 0` as a root, for nonzero polynomials.
    pub fn low_order(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    /// Pseudo-remainder `lc(b)^k a mod b` over `Z`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.degree().expect("division by zero polynomial");
        let lb = b.lead().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.lead().unwrap().clone();
            let shifted = &Self::monomial(lr, dr - db) * b;
            r = &r.scale(&lb) - &shifted;
        }
        r
    }

    /// Primitive gcd with positive leading coefficient; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    /// Exact quotient over `Z`, if `d` divides `self` there.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let ld = d.lead().unwrap();
        let mut r = self.clone();
        let mut q = vec![BigInt::zero(); self.0.len().saturating_sub(dd)];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return None;
            }
            let (c, rem) = r.lead().unwrap().div_rem(ld);
            if !rem.is_zero() {
                return None;
            }
            q[dr - dd] = c.clone();
            r = &r - &(&Self::monomial(c, dr - dd) * d);
        }
        Some(Self::new(q))
    }

    /// Largest `v` with `g^v | self` over `Q`; `None` for the zero polynomial.
    pub fn valuation_at(&self, g: &Self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let g = g.primitive_part();
        let mut f = self.clone();
        let mut v = 0;
        while let Some(q) = f.div_exact(&g) {
            f = q;
            v += 1;
        }
        Some(v)
    }

    /// Yun's algorithm: `(factor, multiplicity)` pairs of primitive squarefree, pairwise coprime factors.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, u32)> {
        let f = self.primitive_part();
        if f.is_constant() {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = df.div_exact(&a0).expect("gcd divides derivative");
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).expect("gcd divides");
            d = &c - &b.derivative();
            if !a.is_constant() {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// Rational roots, sorted. Candidates come from the leading and constant coefficients.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut out = Vec::new();
        if self.is_zero() {
            return out;
        }
        let k = self.low_order();
        if k > 0 {
            out.push(BigRational::zero());
        }
        let f = Self::new(self.0[k..].to_vec()).primitive_part();
        if f.is_constant() {
            return out;
        }
        let (Some(c0), Some(cn)) = (f.coeff(0).abs().to_u64(), f.lead().unwrap().abs().to_u64()) else {
            return out;
        };
        let nums = divisors(c0);
        let dens = divisors(cn);
        for u in &nums {
            for v in &dens {
                if u.gcd(v) != 1 {
                    continue;
                }
                for sign in [1i64, -1] {
                    let r = BigRational::new(BigInt::from(*u) * sign, BigInt::from(*v));
                    if f.eval_rational(&r).is_zero() {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn eval_rational(&self, r: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * r + BigRational::from_integer(c.clone()))
    }

    /// Coefficients reduced into `[0, p)`.
    pub fn reduce_mod(&self, p: u64) -> FpPoly {
        let pb = BigInt::from(p);
        FpPoly::new(self.0.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect(), p)
    }

    /// `true` when `p` divides every coefficient.
    pub fn vanishes_mod(&self, p: u64) -> bool {
        self.reduce_mod(p).is_zero()
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let snapshot = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(snapshot.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "t".to_string(),
                (1, false) => format!("{mag}*t"),
                (_, true) => format!("t^{k}"),
                (_, false) => format!("{mag}*t^{k}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

/// Polynomial over `F_p`, coefficients ascending in `[0, p)`, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    c: Vec<u64>,
    p: u64,
}

impl FpPoly {
    pub fn new(mut c: Vec<u64>, p: u64) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Self { c, p }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &k| (mul_mod(acc, x, self.p) + k) % self.p)
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, &k)| mul_mod(k, i as u64 % p, p)).collect(), p)
    }

    fn rem(&self, b: &Self) -> Self {
        let p = self.p;
        let db = b.degree().expect("division by zero polynomial");
        let inv = pow_mod(*b.c.last().unwrap(), p - 2, p);
        let mut r = self.c.clone();
        while r.len() > db && !r.is_empty() {
            let q = mul_mod(*r.last().unwrap(), inv, p);
            let off = r.len() - 1 - db;
            for (i, &bc) in b.c.iter().enumerate() {
                r[off + i] = (r[off + i] + p - mul_mod(q, bc, p)) % p;
            }
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        Self::new(r, p)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if let Some(&l) = a.c.last() {
            let inv = pow_mod(l, self.p - 2, self.p);
            a = Self::new(a.c.iter().map(|&k| mul_mod(k, inv, self.p)).collect(), self.p);
        }
        a
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.gcd(other).degree() == Some(0)
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree().is_some_and(|d| d == 0 || self.is_coprime(&self.derivative()))
    }

    /// Coefficient of `u^k` in `self(t0 + u)`.
    pub fn taylor_coeff(&self, t0: u64, k: usize) -> u64 {
        let p = self.p;
        // repeated synthetic division by (t - t0)
        let mut c = self.c.clone();
        for _ in 0..k {
            if c.is_empty() {
                return 0;
            }
            let mut q = vec![0u64; c.len() - 1];
            let mut acc = 0u64;
            for i in (1..c.len()).rev() {
                acc = (mul_mod(acc, t0, p) + c[i]) % p;
                q[i - 1] = acc;
            }
            c = q;
        }
        c.iter().rev().fold(0, |acc, &x| (mul_mod(acc, t0, p) + x) % p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64(c)
    }

    #[test]
    fn ring_ops() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(&a * &b, p(&[-1, 0, 1]));
        assert_eq!(&(&a + &b) - &a, b);
        assert_eq!(a.pow(3), p(&[1, 3, 3, 1]));
        assert_eq!(p(&[5, 0, 3]).derivative(), p(&[0, 6]));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn gcd_and_division() {
        let f = &p(&[-1, 1]).pow(3) * &p(&[2, 0, 3]);
        let g = &p(&[-1, 1]).pow(2) * &p(&[1, 1]);
        assert_eq!(f.gcd(&g), p(&[1, -2, 1]));
        assert_eq!(f.div_exact(&p(&[2, 0, 3])), Some(p(&[-1, 1]).pow(3)));
        assert_eq!(f.div_exact(&p(&[1, 1])), None);
        assert_eq!(f.valuation_at(&p(&[1, -1])), Some(3));
    }

    #[test]
    fn squarefree_parts() {
        let f = (&(&p(&[0, 1]).pow(3) * &p(&[1, 1]).pow(2)) * &p(&[1, 0, 1])).scale(&BigInt::from(-6));
        let mut sq = f.squarefree_decomposition();
        sq.sort_by_key(|(_, m)| *m);
        assert_eq!(sq, vec![(p(&[1, 0, 1]), 1), (p(&[1, 1]), 2), (p(&[0, 1]), 3)]);
    }

    #[test]
    fn rational_root_search() {
        let f = &(&p(&[1, -2]) * &p(&[3, 1])) * &p(&[0, 1, 0, 1]);
        let roots: Vec<String> = f.rational_roots().iter().map(|r| r.to_string()).collect();
        assert_eq!(roots, vec!["-3", "0", "1/2"]);
    }

    #[test]
    fn reversal_and_display() {
        assert_eq!(p(&[1, 2]).reversed(4), p(&[0, 0, 0, 2, 1]));
        assert_eq!(p(&[1, 5, -8, 1]).to_string(), "t^3-8*t^2+5*t+1");
    }

    #[test]
    fn finite_field_helpers() {
        let f = p(&[1, 1, 1]).reduce_mod(7);
        assert_eq!(f.eval(2), 0);
        assert!(f.is_squarefree());
        let sq = p(&[1, 2, 1]).reduce_mod(7);
        assert!(!sq.is_squarefree());
        // (t - 2)^2 (t + 1) around t0 = 2
        let g = (&p(&[-2, 1]).pow(2) * &p(&[1, 1])).reduce_mod(11);
        assert_eq!(g.taylor_coeff(2, 0), 0);
        assert_eq!(g.taylor_coeff(2, 1), 0);
        assert_eq!(g.taylor_coeff(2, 2), 3);
        assert_eq!(g.taylor_coeff(2, 3), 1);
    }
}
