//! Positive-definite binary quadratic forms and their class groups.
//!
//! A form `(a, b, c)` stands for `a x^2 + b x y + c y^2` of discriminant `b^2 - 4ac`.
//! Class groups are built from reduced *primitive* forms under proper equivalence.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{factor, isqrt, PrimeSieve};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Rejects `d >= 0` and `d = 2, 3 (mod 4)`.
pub fn check_discriminant(d: i64) -> Result<()> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    Ok(())
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// The principal form `(1, d mod 2, (d mod 2 - d) / 4)`.
    pub fn principal(d: i64) -> Result<Self> {
        check_discriminant(d)?;
        let b = d.rem_euclid(2);
        Ok(Self::new(1, b, (b - d) / 4))
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && (self.b as i128).pow(2) < 4 * self.a as i128 * self.c as i128
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && !(self.b < 0 && (-self.b == self.a || self.a == self.c))
    }

    /// `b = 0`, `a = b` or `a = c`: the reduced forms that are their own inverse.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.a == self.b || self.a == self.c
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.a, -self.b, self.c)
            .reduce()
            .expect("inverse of a positive definite form")
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// Gauss reduction to the unique reduced form in the proper equivalence class.
    pub fn reduce(&self) -> Result<Self> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite { a: self.a, b: self.b, c: self.c });
        }
        let d = self.discriminant() as i128;
        let (mut a, mut b) = (self.a as i128, self.b as i128);
        let mut c;
        loop {
            // bring b into (-a, a]
            let k = (a - b).div_euclid(2 * a);
            b += 2 * a * k;
            c = (b * b - d) / (4 * a);
            if a > c {
                (a, b) = (c, -b);
            } else {
                break;
            }
        }
        if a == c && b < 0 {
            b = -b;
        }
        Ok(Self::new(a as i64, b as i64, c as i64))
    }

    /// Dirichlet composition followed by reduction.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let d = self.discriminant();
        if d != other.discriminant() {
            return Err(Error::DiscriminantMismatch(d, other.discriminant()));
        }
        let (a1, b1) = (self.a as i128, self.b as i128);
        let (a2, b2, c2) = (other.a as i128, other.b as i128, other.c as i128);
        let s = (b1 + b2) / 2;
        let n = (b1 - b2) / 2;
        let g1 = a1.extended_gcd(&a2);
        let g = g1.gcd.extended_gcd(&s);
        let e = g.gcd;
        let (u, v, w) = (g1.x * g.x, g1.y * g.x, g.y);
        debug_assert_eq!(u * a1 + v * a2 + w * s, e);
        let a = a1 * a2 / (e * e);
        let b = (b2 + 2 * (a2 / e) * (v * n - w * c2)).rem_euclid(2 * a);
        let c = (b * b - d as i128) / (4 * a);
        let narrow = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("form composition"));
        Self::new(narrow(a)?, narrow(b)?, narrow(c)?).reduce()
    }

    /// `(-b, 2a, d)`, meaning the CM point `(-b + sqrt(d)) / (2a)`.
    pub fn to_tau(&self) -> (i64, i64, i64) {
        (-self.b, 2 * self.a, self.discriminant())
    }
}

pub fn reduce(f: QuadForm) -> Result<QuadForm> {
    f.reduce()
}

pub fn compose(f: QuadForm, g: QuadForm) -> Result<QuadForm> {
    f.compose(&g)
}

pub fn form_to_tau(f: QuadForm) -> (i64, i64, i64) {
    f.to_tau()
}

/// Reduced primitive forms of discriminant `d`, sorted by `(a, b)`.
pub fn enumerate_reduced(d: i64) -> Result<Vec<QuadForm>> {
    check_discriminant(d)?;
    let amax = isqrt((-d) as u128 / 3) as i64;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in (1 - a)..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// The class group of a negative discriminant, with forms in `(a, b)` order.
#[derive(Debug)]
pub struct FormClassGroup {
    d: i64,
    forms: Vec<QuadForm>,
    index: HashMap<QuadForm, usize>,
    elementary_divisors: Vec<u64>,
    table: OnceLock<Vec<Vec<usize>>>,
}

impl FormClassGroup {
    pub fn new(d: i64) -> Result<Self> {
        let forms = enumerate_reduced(d)?;
        let index = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut g = Self { d, forms, index, elementary_divisors: Vec::new(), table: OnceLock::new() };
        g.elementary_divisors = g.compute_structure()?;
        Ok(g)
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn forms(&self) -> &[QuadForm] {
        &self.forms
    }

    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    /// Invariant factors `d_1 | d_2 | ...`; empty for the trivial group.
    pub fn elementary_divisors(&self) -> &[u64] {
        &self.elementary_divisors
    }

    pub fn principal(&self) -> QuadForm {
        self.forms[0]
    }

    pub fn index_of(&self, f: &QuadForm) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Full multiplication table on form indices, built on first use.
    pub fn table(&self) -> &[Vec<usize>] {
        self.table.get_or_init(|| {
            self.forms
                .iter()
                .map(|f| {
                    self.forms
                        .iter()
                        .map(|g| self.index[&f.compose(g).expect("same discriminant")])
                        .collect()
                })
                .collect()
        })
    }

    pub fn is_two_torsion(&self) -> bool {
        self.elementary_divisors.iter().all(|&e| e == 2)
    }

    pub fn pow(&self, f: &QuadForm, mut k: u64) -> Result<QuadForm> {
        let mut acc = self.principal();
        let mut base = *f;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            base = base.compose(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    fn compute_structure(&self) -> Result<Vec<u64>> {
        let h = self.forms.len() as u64;
        let principal = self.principal();
        // multiplicities of each cyclic factor Z/l^k, per prime l
        let mut factors: Vec<u64> = Vec::new();
        for (l, e) in factor(h) {
            let mut counts = vec![1u64];
            let mut lk = 1u64;
            for _ in 0..e {
                lk *= l;
                let mut n = 0u64;
                for f in &self.forms {
                    if self.pow(f, lk)? == principal {
                        n += 1;
                    }
                }
                counts.push(n);
                if n == l.pow(e) {
                    break;
                }
            }
            // r_k = #{i : e_i >= k} = log_l(|G[l^k]| / |G[l^(k-1)]|)
            let ranks: Vec<u32> = counts.windows(2).map(|w| (w[1] / w[0]).ilog(l)).collect();
            let mut local: Vec<u64> = Vec::new();
            for (k, &r) in ranks.iter().enumerate() {
                let next = ranks.get(k + 1).copied().unwrap_or(0);
                for _ in 0..(r - next) {
                    local.push(l.pow(k as u32 + 1));
                }
            }
            local.sort_unstable_by(|x, y| y.cmp(x));
            // merge the largest l-parts together
            for (i, q) in local.into_iter().enumerate() {
                if i < factors.len() {
                    factors[i] *= q;
                } else {
                    factors.push(q);
                }
            }
        }
        factors.sort_unstable_by(|x, y| y.cmp(x));
        // factors[i] was built from the i-th largest l-parts: reverse gives d_1 | d_2 | ...
        factors.reverse();
        Ok(factors)
    }
}

pub fn class_number(d: i64) -> Result<usize> {
    Ok(enumerate_reduced(d)?.len())
}

pub fn class_group_structure(d: i64) -> Result<Vec<u64>> {
    Ok(FormClassGroup::new(d)?.elementary_divisors().to_vec())
}

/// Every class squares to the principal class.
pub fn is_two_torsion(d: i64) -> Result<bool> {
    let principal = QuadForm::principal(d)?;
    for f in enumerate_reduced(d)? {
        if f.compose(&f)? != principal {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Primes `p <= bound` with `p = f(u, v)` for some `(u, v) != (0, 0)`.
pub fn represented_primes(f: &QuadForm, bound: u64) -> Result<Vec<u64>> {
    if !f.is_positive_definite() {
        return Err(Error::NotPositiveDefinite { a: f.a, b: f.b, c: f.c });
    }
    let sieve = PrimeSieve::new(bound);
    let mut hit = vec![false; bound as usize + 1];
    let (a, b) = (f.a as i128, f.b as i128);
    let nd = -(f.discriminant() as i128);
    let big = bound as i128;
    // a f(x, y) = (a x + b y / 2)^2 + |d| y^2 / 4, so |d| y^2 <= 4 a B
    let ymax = isqrt((4 * a * big / nd) as u128) as i64;
    for y in -ymax..=ymax {
        let y128 = y as i128;
        let disc = 4 * a * big - nd * y128 * y128;
        if disc < 0 {
            continue;
        }
        let r = isqrt(disc as u128) as i128;
        let lo = (-b * y128 - r).div_euclid(2 * a) - 1;
        let hi = (-b * y128 + r).div_euclid(2 * a) + 2;
        for x in lo..=hi {
            if x == 0 && y == 0 {
                continue;
            }
            let v = f.eval(x as i64, y);
            if v >= 0 && v <= big && sieve.is_prime(v as u64) {
                hit[v as usize] = true;
            }
        }
    }
    Ok(hit.iter().enumerate().filter(|(_, &h)| h).map(|(p, _)| p as u64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(q(1, 0, 1).reduce().unwrap(), q(1, 0, 1));
        assert_eq!(q(3, 4, 2).reduce().unwrap(), q(1, 0, 2));
        assert_eq!(q(2, 1, 3).reduce().unwrap(), q(2, 1, 3));
        assert_eq!(q(3, -3, 3).reduce().unwrap(), q(3, 3, 3));
        assert_eq!(q(5, 5, 2).reduce().unwrap(), q(2, 1, 2));
        assert!(q(1, 3, 1).reduce().is_err());
        assert!(q(-1, 0, -1).reduce().is_err());
    }

    #[test]
    fn reduced_lists() {
        assert_eq!(enumerate_reduced(-4).unwrap(), vec![q(1, 0, 1)]);
        assert_eq!(enumerate_reduced(-23).unwrap(), vec![q(1, 1, 6), q(2, -1, 3), q(2, 1, 3)]);
        assert_eq!(enumerate_reduced(-15).unwrap(), vec![q(1, 1, 4), q(2, 1, 2)]);
        assert_eq!(enumerate_reduced(-12).unwrap(), vec![q(1, 0, 3)]);
        assert!(enumerate_reduced(-5).is_err());
        assert!(enumerate_reduced(4).is_err());
    }

    #[test]
    fn composition_examples() {
        assert_eq!(q(2, 1, 3).compose(&q(2, 1, 3)).unwrap(), q(2, -1, 3));
        assert_eq!(q(2, 1, 2).compose(&q(2, 1, 2)).unwrap(), q(1, 1, 4));
        let p = QuadForm::principal(-20).unwrap();
        assert_eq!(p.compose(&q(3, 4, 3)).unwrap(), q(3, 4, 3).reduce().unwrap());
        assert!(q(1, 0, 1).compose(&q(1, 1, 1)).is_err());
    }

    #[test]
    fn structures() {
        assert_eq!(class_number(-163).unwrap(), 1);
        assert_eq!(class_group_structure(-163).unwrap(), Vec::<u64>::new());
        assert_eq!(class_group_structure(-15).unwrap(), vec![2]);
        assert!(is_two_torsion(-15).unwrap());
        assert_eq!(class_group_structure(-23).unwrap(), vec![3]);
        assert!(!is_two_torsion(-23).unwrap());
        assert_eq!(class_group_structure(-420).unwrap(), vec![2, 2, 2]);
        assert_eq!(class_group_structure(-7392).unwrap(), vec![2, 2, 2, 2]);
        // h(-56) = 4, cyclic
        assert_eq!(class_group_structure(-56).unwrap(), vec![4]);
    }

    #[test]
    fn table_is_a_latin_square() {
        let g = FormClassGroup::new(-260).unwrap();
        let t = g.table();
        let h = g.class_number();
        for row in t {
            let mut seen = vec![false; h];
            for &k in row {
                seen[k] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn represented_prime_examples() {
        assert_eq!(represented_primes(&q(1, 0, 1), 20).unwrap(), vec![2, 5, 13, 17]);
        assert_eq!(represented_primes(&q(1, 0, 4), 20).unwrap(), vec![5, 13, 17]);
        assert_eq!(represented_primes(&q(1, 0, 9), 40).unwrap(), vec![13, 37]);
    }

    #[test]
    fn tau_examples() {
        assert_eq!(q(1, 0, 1).to_tau(), (0, 2, -4));
        assert_eq!(q(1, 1, 1).to_tau(), (-1, 2, -3));
        assert_eq!(q(1, 1, 5).to_tau(), (-1, 2, -19));
    }
}
