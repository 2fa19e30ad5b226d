use p20_core::arith::{
    cornacchia, factor, inv_mod, is_prime, kronecker, pow_mod, primes_up_to, representations, sqrt_mod, sqrt_mod_all,
    Half, ResidueClass,
};
use proptest::prelude::*;

fn trial_division_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Euler's criterion with a repeated-squaring-free power, for odd primes.
fn legendre_naive(a: i64, p: u64) -> i8 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let mut r = 1u64;
    for _ in 0..(p - 1) / 2 {
        r = r * a % p;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

#[test]
fn primality_matches_trial_division() {
    for n in 0..20_000u64 {
        assert_eq!(is_prime(n), trial_division_prime(n), "{n}");
    }
    assert_eq!(primes_up_to(100).len(), 25);
    // strong pseudoprimes to several small bases
    for n in [3_215_031_751u64, 2_152_302_898_747, 3_474_749_660_383, 341_550_071_728_321] {
        assert!(!is_prime(n), "{n}");
    }
    assert!(is_prime(18_446_744_073_709_551_557));
}

#[test]
fn legendre_symbol_by_euler_criterion() {
    for p in primes_up_to(400).into_iter().filter(|&p| p > 2) {
        for a in -50i64..50 {
            assert_eq!(kronecker(a, p), legendre_naive(a, p), "({a}/{p})");
        }
    }
}

#[test]
fn square_roots_modulo_composites() {
    for m in 2..400u64 {
        for a in 0..m {
            let got = sqrt_mod_all(a, m);
            let want: Vec<u64> = (0..m).filter(|x| x * x % m == a).collect();
            assert_eq!(got, want, "sqrt({a}) mod {m}");
        }
    }
}

#[test]
fn cornacchia_against_search() {
    for d in [1u64, 2, 3, 7, 11, 19, 27, 43] {
        for m in 1..3000u64 {
            let brute: Vec<(u64, u64)> = (0..=m)
                .take_while(|x| x * x <= m)
                .flat_map(|x| {
                    let r = m - x * x;
                    (0..=r).take_while(move |y| d * y * y <= r).filter(move |y| d * y * y == r).map(move |y| (x, y))
                })
                .collect();
            assert_eq!(representations(d, m), brute, "x^2 + {d} y^2 = {m}");
            match cornacchia(d, m) {
                Some((x, y)) => assert!(brute.contains(&(x, y))),
                None => assert!(brute.is_empty(), "x^2 + {d} y^2 = {m}"),
            }
        }
    }
}

#[test]
fn half_integers() {
    let h = Half::from_twice(7);
    assert_eq!(h.to_string(), "7/2");
    assert!(!h.is_integer());
    assert_eq!(Half::from_int(3).to_string(), "3");
    assert_eq!(h.four_times_square(), 49);
    assert_eq!(serde_json::to_string(&Half::from_twice(-1)).unwrap(), "\"-1/2\"");
}

proptest! {
    #[test]
    fn factorization_is_exact(n in 1u64..u64::MAX / 2) {
        let f = factor(n);
        let prod = f.iter().fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e));
        prop_assert_eq!(prod, n as u128);
        prop_assert!(f.iter().all(|&(p, _)| is_prime(p)));
        prop_assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn kronecker_is_multiplicative(a in -500i64..500, b in -500i64..500, n in 1u64..2000) {
        prop_assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
    }

    #[test]
    fn kronecker_in_the_modulus(a in -500i64..500, m in 1u64..2000, n in 1u64..2000) {
        prop_assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
    }

    #[test]
    fn prime_square_roots(i in 0usize..150, a in -10_000i64..10_000) {
        let p = primes_up_to(1000)[i + 1];
        match sqrt_mod(a, p) {
            Some(r) => {
                prop_assert_eq!((r as i64 * r as i64 - a).rem_euclid(p as i64), 0);
                prop_assert!(r <= p - r || r == 0);
            }
            None => prop_assert_eq!(kronecker(a, p), -1),
        }
    }

    #[test]
    fn residue_field_axioms(i in 1usize..100, x in -1000i64..1000, y in -1000i64..1000) {
        let p = primes_up_to(600)[i];
        let (a, b) = (ResidueClass::new(x, p).unwrap(), ResidueClass::new(y, p).unwrap());
        prop_assert_eq!((a + b) * a, a * a + b * a);
        prop_assert_eq!((a - b) + b, a);
        prop_assert_eq!(a.pow(p - 1).value(), if a.is_zero() { 0 } else { 1 });
        if let Some(inv) = a.inverse() {
            prop_assert_eq!((a * inv).value(), 1);
            prop_assert_eq!(inv_mod(a.value(), p), Some(inv.value()));
        }
        prop_assert_eq!(pow_mod(a.value(), (p - 1) / 2, p) == 1, a.legendre() == 1);
    }
}
