//! Prime-index coefficients of weight-3 CM newforms and twist matching.

use serde::Serialize;

use crate::arith::{cornacchia, factor, is_prime, kronecker, representations, Half};
use crate::error::{Error, Result};
use crate::qforms::{class_number, is_two_torsion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

pub fn split_type(d_k: i64, p: u64) -> SplitType {
    match kronecker(d_k, p) {
        1 => SplitType::Split,
        -1 => SplitType::Inert,
        _ => SplitType::Ramified,
    }
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factor(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

pub fn is_fundamental(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Discriminant of `Q(sqrt(delta))` for squarefree `delta`.
pub fn delta_star(delta: i64) -> i64 {
    if delta.rem_euclid(4) == 1 {
        delta
    } else {
        4 * delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "delta", rename_all = "snake_case")]
pub enum Twist {
    None,
    Quadratic(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CMRule {
    pub d_k: i64,
    #[serde(rename = "D")]
    pub big_d: u64,
    #[serde(rename = "D_prime")]
    pub d_prime: u64,
    pub twist: Twist,
    class_number: usize,
}

impl CMRule {
    pub fn new(d_k: i64) -> Result<Self> {
        if d_k >= 0 {
            return Err(Error::InvalidDiscriminant(d_k));
        }
        if !is_fundamental(d_k) {
            return Err(Error::NotFundamental(d_k));
        }
        let big_d = if d_k % 4 == 0 { (-d_k / 4) as u64 } else { (-d_k) as u64 };
        let d_prime = match d_k {
            -3 => 27,
            -4 => 4,
            _ => big_d,
        };
        Ok(Self { d_k, big_d, d_prime, twist: Twist::None, class_number: class_number(d_k)? })
    }

    pub fn with_twist(mut self, twist: Twist) -> Result<Self> {
        if let Twist::Quadratic(delta) = twist {
            if !is_squarefree(delta) {
                return Err(Error::Precondition(format!("twist parameter {delta} is not squarefree")));
            }
        }
        self.twist = twist;
        Ok(self)
    }

    pub fn class_number(&self) -> usize {
        self.class_number
    }

    /// `ap_h1` followed by the selected twist.
    pub fn ap(&self, p: u64) -> Result<i64> {
        let a = ap_h1(self, p)?;
        Ok(match self.twist {
            Twist::None => a,
            Twist::Quadratic(delta) => a * kronecker(delta_star(delta), p) as i64,
        })
    }
}

/// `a_p` of the untwisted newform for a class-number-one field.
///
/// Split `p` is written as `4p = X^2 + D' Y^2` (or `p = x^2 + D' y^2` when `D'` is even) and
/// `a_p = (X^2 - D' Y^2) / 2`.
pub fn ap_h1(rule: &CMRule, p: u64) -> Result<i64> {
    if rule.class_number != 1 {
        return Err(Error::Precondition(format!("h({}) = {} != 1", rule.d_k, rule.class_number)));
    }
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    match split_type(rule.d_k, p) {
        SplitType::Inert => return Ok(0),
        SplitType::Ramified => return Err(Error::Precondition(format!("{p} ramifies in Q(sqrt({}))", rule.d_k))),
        SplitType::Split => {}
    }
    if rule.d_prime.is_multiple_of(p) {
        return Err(Error::Precondition(format!("{p} divides D' = {}", rule.d_prime)));
    }
    let dp = rule.d_prime as i128;
    let (x2, y2) = if rule.d_prime % 4 == 3 {
        let (x, y) = cornacchia(rule.d_prime, 4 * p).ok_or_else(|| no_rep(rule.d_prime, 4 * p))?;
        (x as i128, y as i128)
    } else {
        let (x, y) = cornacchia(rule.d_prime, p).ok_or_else(|| no_rep(rule.d_prime, p))?;
        (2 * x as i128, 2 * y as i128)
    };
    Ok(((x2 * x2 - dp * y2 * y2) / 2) as i64)
}

fn no_rep(d: u64, m: u64) -> Error {
    Error::NoRepresentation(format!("x^2 + {d} y^2 = {m}"))
}

/// Magnitude data `(2x, y)` with `p^2 = x^2 + D y^2`, `y != 0`, `x, y` in `(1/2) N`.
pub fn ap_two_torsion(d_k: i64, p: u64) -> Result<(i64, Half)> {
    if d_k == -3 || d_k == -4 {
        return Err(Error::Precondition("d_K = -3, -4 carry extra units".into()));
    }
    let rule = CMRule::new(d_k)?;
    if !is_two_torsion(d_k)? {
        return Err(Error::Precondition(format!("Cl({d_k}) is not 2-torsion")));
    }
    if split_type(d_k, p) != SplitType::Split || !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not a split prime for {d_k}")));
    }
    let even = d_k % 4 == 0;
    let m = if even { p * p } else { 4 * p * p };
    let sols: Vec<(u64, u64)> = representations(rule.big_d, m).into_iter().filter(|s| s.1 > 0).collect();
    let pick = sols
        .iter()
        .filter(|(x, y)| num_integer::Integer::gcd(x, y) == 1)
        .max_by_key(|s| s.1)
        .or_else(|| sols.iter().max_by_key(|s| s.1))
        .copied()
        .ok_or_else(|| no_rep(rule.big_d, m))?;
    Ok(if even {
        (2 * pick.0 as i64, Half::from_int(pick.1 as i64))
    } else {
        (pick.0 as i64, Half::from_twice(pick.1 as i64))
    })
}

/// `a_p -> a_p * (delta* / p)`.
pub fn twist_quadratic(seq: &[(u64, i64)], delta: i64) -> Vec<(u64, i64)> {
    let ds = delta_star(delta);
    seq.iter().map(|&(p, a)| (p, a * kronecker(ds, p) as i64)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TwistVerdict {
    #[serde(rename = "MATCHES_fK")]
    MatchesFk,
    QuadraticTwist { delta: i64 },
    CubicTwist,
    NoMatch { p: u64, expected: Option<i64>, observed: i64 },
}

const MIN_MATCH_PRIMES: usize = 5;
const MAX_TWIST_SEARCH: i64 = 10_000;

/// Decides which twist of the CM newform (if any) the coefficients belong to.
///
/// Only split primes with nonzero coefficient are used. For `d_K = -4` the smallest
/// positive squarefree `delta` is reported; `delta` and `-delta` agree at split primes.
pub fn match_twist(geometric: &[(u64, i64)], rule: &CMRule) -> Result<TwistVerdict> {
    let usable: Vec<(u64, i64)> = geometric
        .iter()
        .copied()
        .filter(|&(p, a)| a != 0 && split_type(rule.d_k, p) == SplitType::Split && !rule.d_prime.is_multiple_of(p))
        .collect();
    if usable.len() < MIN_MATCH_PRIMES {
        return Err(Error::InsufficientData(format!(
            "{} usable split primes, need {MIN_MATCH_PRIMES}",
            usable.len()
        )));
    }
    let expected: Vec<i64> = usable.iter().map(|&(p, _)| ap_h1(rule, p)).collect::<Result<_>>()?;
    match rule.d_k {
        -4 => match_biquadratic(&usable, &expected),
        -3 => Ok(match_cubic(&usable, &expected)),
        _ => Ok(usable
            .iter()
            .zip(&expected)
            .find(|((_, a), e)| a != *e)
            .map_or(TwistVerdict::MatchesFk, |(&(p, a), &e)| TwistVerdict::NoMatch {
                p,
                expected: Some(e),
                observed: a,
            })),
    }
}

fn match_biquadratic(usable: &[(u64, i64)], expected: &[i64]) -> Result<TwistVerdict> {
    let mut signs = Vec::with_capacity(usable.len());
    for (&(p, a), &e) in usable.iter().zip(expected) {
        if a.abs() != e.abs() {
            return Ok(TwistVerdict::NoMatch { p, expected: Some(e), observed: a });
        }
        signs.push((p, if a == e { 1 } else { -1 }));
    }
    let found = (1..=MAX_TWIST_SEARCH)
        .filter(|&d| is_squarefree(d))
        .find(|&d| signs.iter().all(|&(p, s)| kronecker(delta_star(d), p) == s));
    Ok(match found {
        Some(1) => TwistVerdict::MatchesFk,
        Some(delta) => TwistVerdict::QuadraticTwist { delta },
        None => TwistVerdict::NoMatch { p: usable[0].0, expected: None, observed: usable[0].1 },
    })
}

fn match_cubic(usable: &[(u64, i64)], expected: &[i64]) -> TwistVerdict {
    if usable.iter().zip(expected).all(|((_, a), e)| a == e) {
        return TwistVerdict::MatchesFk;
    }
    for &(p, a) in usable {
        let branch = representations(3, 4 * p)
            .into_iter()
            .any(|(x, y)| (x as i64 * x as i64 - 3 * y as i64 * y as i64) / 2 == a);
        if !branch || (2 * p as i64 - a) % 3 != 0 {
            return TwistVerdict::NoMatch { p, expected: None, observed: a };
        }
    }
    TwistVerdict::CubicTwist
}
