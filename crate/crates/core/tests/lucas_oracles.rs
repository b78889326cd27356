use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use lnagell_core::lucas::{
    class_number_by_forms, defective_lookup, primitive_prime_test, NonPrimitive, Primitivity,
    QuadField, QuadraticInteger,
};

/// (eta^m - conj^m) / (eta - conj), read off the sqrt(-d) coordinate.
fn term(eta: &QuadraticInteger, m: u32) -> BigInt {
    eta.pow(m).twice_v() / eta.twice_v()
}

fn small_primes(limit: u64) -> Vec<u64> {
    (3..=limit)
        .step_by(2)
        .filter(|&q| {
            (3..)
                .step_by(2)
                .take_while(|k| k * k <= q)
                .all(|k| q % k != 0)
        })
        .collect()
}

fn euler_criterion(a: i64, q: u64) -> i8 {
    let r = BigInt::from(a)
        .mod_floor(&BigInt::from(q))
        .modpow(&BigInt::from((q - 1) / 2), &BigInt::from(q));
    if r.is_zero() {
        0
    } else if r.is_one() {
        1
    } else {
        -1
    }
}

fn strip(mut g: BigInt, m: &BigInt) -> BigInt {
    loop {
        let c = g.gcd(m);
        if c.is_one() || g.is_zero() {
            return g;
        }
        g /= c;
    }
}

#[test]
fn brute_force_finds_one_defective_pair() {
    let mut found = Vec::new();
    for field in QuadField::all() {
        let d = BigInt::from(field.d());
        for tu in -16i64..=16 {
            for tv in 1i64..=16 {
                let Ok(eta) = QuadraticInteger::new(field, tu, tv) else {
                    continue;
                };
                let (p2, q) = (eta.trace() * eta.trace(), eta.norm());
                if !p2.gcd(&q).is_one() || (1..=12).any(|k| term(&eta, k).is_zero()) {
                    continue;
                }
                for p in [5u32, 7] {
                    let mut m = &d * eta.twice_v() * eta.twice_v();
                    for k in 1..p {
                        m *= term(&eta, k);
                    }
                    if strip(term(&eta, p).abs(), &m).is_one() {
                        found.push((field.d(), tu, tv, p));
                    }
                }
            }
        }
    }
    assert_eq!(found, vec![(11, -1, 1, 5), (11, 1, 1, 5)]);
    for field in QuadField::all() {
        for p in [5, 7] {
            let listed = defective_lookup(field, p).unwrap();
            assert_eq!(listed.is_empty(), field.d() != 11 || p != 5);
        }
    }
}

fn eta_strategy() -> impl Strategy<Value = QuadraticInteger> {
    (0usize..8, -8i64..=8, 1i64..=8).prop_filter_map("integral", |(i, tu, tv)| {
        let field = QuadField::all().nth(i).unwrap();
        QuadraticInteger::new(field, tu, tv).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn primitive_divisors_obey_the_congruence(eta in eta_strategy(), m in 2u32..=13) {
        let l = term(&eta, m);
        prop_assume!(!l.is_zero());
        let d = eta.field().d() as i64;
        for q in small_primes(400) {
            let big_q = BigInt::from(q);
            if !l.is_multiple_of(&big_q) {
                continue;
            }
            let expected = if (BigInt::from(d) * eta.twice_v() * eta.twice_v()).is_multiple_of(&big_q) {
                Primitivity::NotPrimitive(NonPrimitive::DividesDiscriminant)
            } else if let Some(k) = (1..m).find(|&k| term(&eta, k).is_multiple_of(&big_q)) {
                Primitivity::NotPrimitive(NonPrimitive::EarlierTerm(k))
            } else {
                let epsilon = euler_criterion(-d, q);
                prop_assert_eq!((q as i64 - epsilon as i64).rem_euclid(m as i64), 0, "q = {}, m = {}", q, m);
                Primitivity::Primitive { epsilon }
            };
            prop_assert_eq!(primitive_prime_test(q, &eta, m).unwrap(), expected);
        }
    }
}

fn kronecker(disc: i64, mut n: u64) -> i8 {
    let mut acc = 1i8;
    while n % 2 == 0 {
        n /= 2;
        acc *= match disc.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let mut p = 3;
    while n > 1 {
        if p * p > n {
            p = n;
        }
        while n % p == 0 {
            n /= p;
            acc *= euler_criterion(disc, p);
        }
        p += 2;
    }
    acc
}

fn squarefree(m: i64) -> bool {
    (2..).take_while(|k| k * k <= m).all(|k| m % (k * k) != 0)
}

fn is_fundamental(disc: i64) -> bool {
    let m = -disc;
    if disc.rem_euclid(4) == 1 {
        squarefree(m)
    } else {
        disc % 4 == 0 && matches!((m / 4) % 4, 1 | 2) && squarefree(m / 4)
    }
}

/// h(D) = -(w / 2|D|) * sum_{a < |D|} (D/a) a.
fn analytic_class_number(disc: i64) -> u32 {
    let w = match disc {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let sum: i64 = (1..-disc)
        .map(|a| kronecker(disc, a as u64) as i64 * a)
        .sum();
    (-(w * sum) / (2 * -disc)).to_u32().unwrap()
}

#[test]
fn class_numbers_match_the_analytic_formula() {
    let mut checked = 0;
    for disc in (-600..=-3).filter(|&d| is_fundamental(d)) {
        assert_eq!(
            class_number_by_forms(disc).unwrap(),
            analytic_class_number(disc),
            "D = {disc}"
        );
        checked += 1;
    }
    assert!(checked > 150);
    for f in QuadField::all() {
        assert_eq!(f.class_number(), analytic_class_number(f.discriminant()));
    }
}
