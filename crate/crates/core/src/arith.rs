//! Exact integer and modular arithmetic kernels.
//!
//! Everything here works on machine integers with double-width (`u128`) intermediates;
//! nothing wraps silently.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed value into `[0, m)`.
#[inline]
pub fn reduce_signed(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exact square root when `n` is a perfect square.
pub fn exact_sqrt(n: u128) -> Option<u128> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

pub fn exact_sqrt_i64(n: i64) -> Option<u64> {
    if n < 0 {
        return None;
    }
    exact_sqrt(n as u128).map(|r| r as u64)
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin; the fixed base set is exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64, seed: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + seed) % n;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    let m = 64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let mut seed = 1;
    let d = loop {
        if let Some(d) = pollard_brent(n, seed) {
            break d;
        }
        seed += 1;
    };
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorization as sorted `(prime, exponent)` pairs; `factor(1)` is empty.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor(0)");
    let mut primes = Vec::new();
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(q) {
            primes.push(q);
            n /= q;
        }
    }
    factor_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

/// Kronecker symbol `(a/n)`. Total: `(a/1) = 1`, and `(a/0)` is 1 for `a = ±1`, else 0.
pub fn kronecker(a: i64, n: u64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    let twos = n.trailing_zeros();
    let mut n = n >> twos;
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    let mut a = reduce_signed(a as i128, n);
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Square root modulo an odd prime (Tonelli-Shanks). Returns the smaller of the two roots.
pub fn sqrt_mod(a: i64, p: u64) -> Option<u64> {
    debug_assert!(p > 2);
    let a = reduce_signed(a as i128, p);
    let r = sqrt_mod_reduced(a, p)?;
    Some(r.min(p - r))
}

fn sqrt_mod_reduced(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Roots of `r^2 = u (mod p^e)` for a unit `u`.
fn unit_roots_prime_power(u: u64, p: u64, e: u32) -> Vec<u64> {
    let pe = p.pow(e);
    if p == 2 {
        return match e {
            1 => vec![1],
            2 if u % 4 == 1 => vec![1, 3],
            2 => vec![],
            _ if u % 8 != 1 => vec![],
            _ => {
                let mut r: u64 = 1;
                for i in 3..e {
                    let m = 1u128 << (i + 1);
                    if !(r as u128 * r as u128 + m - (u as u128 % m)).is_multiple_of(m) {
                        r += 1 << (i - 1);
                    }
                }
                let half = pe / 2;
                let mut v = vec![r % pe, (pe - r) % pe, (r + half) % pe, (pe - r + half) % pe];
                v.sort_unstable();
                v.dedup();
                v
            }
        };
    }
    let Some(mut r) = sqrt_mod_reduced(u % p, p) else {
        return vec![];
    };
    let mut modulus = p;
    for _ in 1..e {
        modulus *= p;
        // Newton step: r <- r - (r^2 - u) / (2r)
        let inv = inv_mod(mul_mod(2, r, modulus), modulus).expect("unit");
        let f = (mul_mod(r, r, modulus) + modulus - u % modulus) % modulus;
        r = (r + modulus - mul_mod(f, inv, modulus)) % modulus;
    }
    let mut v = vec![r, (pe - r) % pe];
    v.sort_unstable();
    v.dedup();
    v
}

/// All roots of `r^2 = a (mod p^e)`.
fn roots_prime_power(a: u64, p: u64, e: u32) -> Vec<u64> {
    let pe = p.pow(e);
    let a = a % pe;
    if a == 0 {
        let step = p.pow(e.div_ceil(2));
        return (0..pe).step_by(step as usize).collect();
    }
    let mut k = 0;
    let mut u = a;
    while u.is_multiple_of(p) {
        u /= p;
        k += 1;
    }
    if k % 2 == 1 {
        return vec![];
    }
    let lift = p.pow(k / 2);
    let inner = p.pow(e - k);
    let mut out = Vec::new();
    for s0 in unit_roots_prime_power(u, p, e - k) {
        for j in 0..lift {
            let s = s0 as u128 + j as u128 * inner as u128;
            out.push(((lift as u128 * s) % pe as u128) as u64);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// All square roots of `a` modulo an arbitrary `m >= 1`, via factorization and CRT.
pub fn sqrt_mod_all(a: u64, m: u64) -> Vec<u64> {
    let mut acc: Vec<u64> = vec![0];
    let mut modulus: u64 = 1;
    for (p, e) in factor(m) {
        let pe = p.pow(e);
        let local = roots_prime_power(a % pe, p, e);
        if local.is_empty() {
            return vec![];
        }
        let inv = inv_mod(modulus % pe, pe).unwrap_or(0);
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for &x in &acc {
            for &y in &local {
                // z = x (mod modulus), z = y (mod pe)
                let diff = (y + pe - x % pe) % pe;
                let t = mul_mod(diff, inv, pe);
                next.push((x as u128 + modulus as u128 * t as u128) as u64);
            }
        }
        modulus *= pe;
        acc = next;
    }
    acc.sort_unstable();
    acc
}

fn primitive_representations(d: u64, m: u64) -> Vec<(u64, u64)> {
    if m == 1 {
        return if d == 1 { vec![(0, 1), (1, 0)] } else { vec![(1, 0)] };
    }
    let target = (m - d % m) % m;
    let mut out = Vec::new();
    for r in sqrt_mod_all(target, m) {
        if r > m / 2 {
            continue;
        }
        let (mut a, mut b) = (m as u128, r as u128);
        while b * b >= m as u128 {
            (a, b) = (b, a % b);
        }
        let rest = m as u128 - b * b;
        if !rest.is_multiple_of(d as u128) {
            continue;
        }
        if let Some(y) = exact_sqrt(rest / d as u128) {
            let (x, y) = (b as u64, y as u64);
            if x.gcd(&y) == 1 {
                out.push((x, y));
                if d == 1 {
                    // the descent only sees one of (x, y), (y, x)
                    out.push((y, x));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Every nonnegative solution of `x^2 + d*y^2 = m`, sorted.
pub fn representations(d: u64, m: u64) -> Vec<(u64, u64)> {
    if d == 0 || m == 0 {
        return vec![];
    }
    let fac = factor(m);
    let mut squares = vec![1u64];
    for &(p, e) in &fac {
        let mut next = Vec::new();
        for &s in &squares {
            let mut pk = 1u64;
            for _ in 0..=e / 2 {
                next.push(s * pk);
                pk *= p;
            }
        }
        squares = next;
    }
    let mut out = Vec::new();
    for g in squares {
        for (x, y) in primitive_representations(d, m / (g * g)) {
            out.push((x * g, y * g));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Solves `x^2 + d*y^2 = m` in nonnegative integers.
///
/// Primitive solutions come from Cornacchia's descent on each square root of `-d` mod `m`.
/// Among primitive solutions the one with largest `y` is returned; if only imprimitive
/// solutions exist, the one with largest `y` among those.
pub fn cornacchia(d: u64, m: u64) -> Option<(u64, u64)> {
    let sols = representations(d, m);
    let best = |it: &mut dyn Iterator<Item = &(u64, u64)>| it.max_by_key(|s| s.1).copied();
    best(&mut sols.iter().filter(|(x, y)| x.gcd(y) == 1)).or_else(|| best(&mut sols.iter()))
}

/// Sieve of Eratosthenes.
pub struct PrimeSieve {
    composite: Vec<bool>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize + 1;
        let mut composite = vec![false; n.max(2)];
        composite[0] = true;
        composite[1] = true;
        let mut i = 2;
        while i * i < n {
            if !composite[i] {
                for j in (i * i..n).step_by(i) {
                    composite[j] = true;
                }
            }
            i += 1;
        }
        Self { composite }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        (n as usize) < self.composite.len() && !self.composite[n as usize]
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.composite.iter().enumerate().filter(|(_, &c)| !c).map(|(i, _)| i as u64)
    }
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    PrimeSieve::new(limit).primes().collect()
}

/// An element of `(1/2) Z`, stored as its double.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(i64);

impl Half {
    pub const fn from_twice(twice: i64) -> Self {
        Half(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        Half(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `4 * self^2`, exact.
    pub fn four_times_square(self) -> i128 {
        self.0 as i128 * self.0 as i128
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for Half {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An element of `F_p` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    value: u64,
    modulus: u64,
}

impl ResidueClass {
    pub fn new(value: i64, p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::Precondition(format!("modulus {p} is not an odd prime")));
        }
        Ok(Self::new_unchecked(reduce_signed(value as i128, p), p))
    }

    #[inline]
    pub(crate) fn new_unchecked(value: u64, p: u64) -> Self {
        debug_assert!(value < p);
        Self { value, modulus: p }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Self {
        Self::new_unchecked(pow_mod(self.value, exp, self.modulus), self.modulus)
    }

    pub fn inverse(self) -> Option<Self> {
        inv_mod(self.value, self.modulus).map(|v| Self::new_unchecked(v, self.modulus))
    }

    pub fn legendre(self) -> i8 {
        kronecker(self.value as i64, self.modulus)
    }

    pub fn sqrt(self) -> Option<Self> {
        sqrt_mod(self.value as i64, self.modulus).map(|v| Self::new_unchecked(v, self.modulus))
    }
}

impl Add for ResidueClass {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        Self::new_unchecked((self.value + o.value) % self.modulus, self.modulus)
    }
}

impl Sub for ResidueClass {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        Self::new_unchecked((self.value + self.modulus - o.value) % self.modulus, self.modulus)
    }
}

impl Mul for ResidueClass {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        debug_assert_eq!(self.modulus, o.modulus);
        Self::new_unchecked(mul_mod(self.value, o.value, self.modulus), self.modulus)
    }
}

impl Neg for ResidueClass {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new_unchecked((self.modulus - self.value) % self.modulus, self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_squares(p: u64) -> Vec<bool> {
        let mut sq = vec![false; p as usize];
        for x in 1..p {
            sq[(x * x % p) as usize] = true;
        }
        sq
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-19, 5), 1);
        assert_eq!(kronecker(-19, 3), -1);
        assert_eq!(kronecker(12345, 1), 1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(5, 2), -1);
    }

    #[test]
    fn kronecker_matches_squares_for_odd_primes() {
        for p in primes_up_to(1000).into_iter().filter(|&p| p > 2) {
            let sq = brute_squares(p);
            for a in -(p as i64)..(2 * p as i64) {
                let r = a.rem_euclid(p as i64) as usize;
                let expect = if r == 0 { 0 } else if sq[r] { 1 } else { -1 };
                assert_eq!(kronecker(a, p), expect, "({a}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative_in_n() {
        for a in -30i64..30 {
            for m in 1u64..40 {
                for n in 1u64..40 {
                    assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
                }
            }
        }
    }

    #[test]
    fn sqrt_mod_examples() {
        assert_eq!(sqrt_mod(2, 7), Some(3));
        assert_eq!(sqrt_mod(0, 13), Some(0));
        assert_eq!(sqrt_mod(3, 5), None);
        // p = 1 mod 8 exercises the full Tonelli-Shanks loop
        let p = 7681;
        for a in 1..200 {
            if let Some(r) = sqrt_mod(a, p) {
                assert_eq!(r * r % p, a as u64);
                assert!(r <= p - r);
            } else {
                assert_eq!(kronecker(a, p), -1);
            }
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(163));
        assert!(!is_prime(1));
        assert!(!is_prime(7392));
        assert!(is_prime(2));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557));
        let sieve = PrimeSieve::new(5000);
        for n in 0..5000 {
            assert_eq!(is_prime(n), sieve.is_prime(n), "{n}");
        }
    }

    #[test]
    fn factorization_roundtrip() {
        for n in [1u64, 2, 12, 7392, 600_851_475_143, 18_446_744_073_709_551_557, 4_611_686_014_132_420_609] {
            let f = factor(n);
            assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn roots_modulo_composites() {
        for m in 1u64..600 {
            for a in 0..m {
                let mut brute: Vec<u64> = (0..m).filter(|r| r * r % m == a).collect();
                brute.sort_unstable();
                assert_eq!(sqrt_mod_all(a, m), brute, "sqrt({a}) mod {m}");
            }
        }
    }

    #[test]
    fn cornacchia_examples() {
        assert_eq!(cornacchia(7, 8), Some((1, 1)));
        assert_eq!(cornacchia(19, 20), Some((1, 1)));
        assert_eq!(cornacchia(1, 2), Some((1, 1)));
        assert_eq!(cornacchia(7, 44), Some((4, 2)));
        assert_eq!(cornacchia(3, 28), Some((1, 3)));
        assert_eq!(cornacchia(5, 3), None);
    }

    #[test]
    fn cornacchia_agrees_with_exhaustive_search() {
        for d in 1u64..=50 {
            for m in 1u64..=10_000 {
                let r = isqrt(m as u128) as u64;
                let mut brute = Vec::new();
                for y in 0..=r {
                    let rest = m as i64 - (d * y * y) as i64;
                    if rest < 0 {
                        break;
                    }
                    if let Some(x) = exact_sqrt_i64(rest) {
                        brute.push((x, y));
                    }
                }
                brute.sort_unstable();
                assert_eq!(representations(d, m), brute, "x^2 + {d} y^2 = {m}");
                assert_eq!(cornacchia(d, m).is_none(), brute.is_empty());
            }
        }
    }

    #[test]
    fn half_display() {
        assert_eq!(Half::from_twice(3).to_string(), "3/2");
        assert_eq!(Half::from_twice(-4).to_string(), "-2");
        assert_eq!(Half::from_int(1).to_string(), "1");
    }

    #[test]
    fn residue_class_field_ops() {
        let p = 101;
        let a = ResidueClass::new(-3, p).unwrap();
        assert_eq!(a.value(), 98);
        assert_eq!((a * a.inverse().unwrap()).value(), 1);
        assert_eq!((a + (-a)).value(), 0);
        assert_eq!(a.pow(p - 1).value(), 1);
        let s = ResidueClass::new(4, p).unwrap().sqrt().unwrap();
        assert_eq!((s * s).value(), 4);
        assert!(ResidueClass::new(1, 9).is_err());
        assert!(ResidueClass::new(1, 2).is_err());
    }

    proptest::proptest! {
        #[test]
        fn sqrt_mod_squares_back(a in -10_000i64..10_000, idx in 0usize..100) {
            let p = primes_up_to(600)[idx + 1];
            if let Some(r) = sqrt_mod(a, p) {
                proptest::prop_assert_eq!(mul_mod(r, r, p), reduce_signed(a as i128, p));
            }
        }
    }
}
