use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{QuadField, QuadraticInteger};
use super::LucasError;
use crate::arith::{is_prime_u64, legendre_symbol, non_s_prime_witness, SUnitExponents};
use crate::model::Solution;

/// L_m by L_0 = 0, L_1 = 1, L_{k+1} = P L_k - Q L_{k-1} with P = eta + conj
/// eta and Q = eta conj eta.
pub fn lucas_term(eta: &QuadraticInteger, m: u32) -> Result<BigInt, LucasError> {
    if eta.is_real() {
        return Err(LucasError::RealRoot);
    }
    let p = eta.trace();
    let q = eta.norm();
    let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
    if m == 0 {
        return Ok(prev);
    }
    for _ in 1..m {
        let next = &p * &cur - &q * &prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// L_m as (eta^m - conj eta^m) / (eta - conj eta), straight from the power.
pub fn lucas_term_direct(eta: &QuadraticInteger, m: u32) -> Result<BigInt, LucasError> {
    if eta.is_real() {
        return Err(LucasError::RealRoot);
    }
    let power = eta.pow(m);
    let (quot, rem) = power.twice_v().div_rem(eta.twice_v());
    debug_assert!(rem.is_zero());
    Ok(quot)
}

/// Closed form of L_5 for eta = u + v sqrt(-d): 5u^4 - 10d u^2 v^2 + d^2 v^4.
pub fn lucas_l5_quartic(d: u32, u: &BigRational, v: &BigRational) -> BigRational {
    let d = BigRational::from_integer(BigInt::from(d));
    let (u2, v2) = (u * u, v * v);
    BigRational::from_integer(BigInt::from(5)) * &u2 * &u2
        - BigRational::from_integer(BigInt::from(10)) * &d * &u2 * &v2
        + &d * &d * &v2 * &v2
}

/// Integer-coordinate version used by the box search.
pub(crate) fn l5_i128(d: i128, u: i128, v: i128) -> i128 {
    let (u2, v2) = (u * u, v * v);
    5 * u2 * u2 - 10 * d * u2 * v2 + d * d * v2 * v2
}

/// C = d z^2 split by parities: d = 2^(a%2) 3^(b%2) 11^(c%2) and
/// z = 2^(a/2) 3^(b/2) 11^(c/2).
pub fn d_from_parities(exp: SUnitExponents) -> (QuadField, SUnitExponents, BigUint) {
    let d = 2u32.pow(exp.a % 2) * 3u32.pow(exp.b % 2) * 11u32.pow(exp.c % 2);
    let half = SUnitExponents::new(exp.a / 2, exp.b / 2, exp.c / 2);
    (
        QuadField::new(d).expect("parity products lie in the d-list"),
        half,
        half.value(),
    )
}

/// x + z sqrt(-d) = eta^p, read back as a tuple (x, y = norm eta, C = d z^2, p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedCandidate {
    pub eta: QuadraticInteger,
    pub p: u32,
    pub x: BigUint,
    pub z: BigUint,
    pub y: BigUint,
    pub solution: Solution,
}

pub fn lift_eta_power(eta: &QuadraticInteger, p: u32) -> Result<LiftedCandidate, LucasError> {
    if p < 3 || !is_prime_u64(p as u64) {
        return Err(LucasError::NotOddPrime(p as u64));
    }
    let power = eta.pow(p);
    let (Some(x), Some(z)) = (half_exact(power.twice_u()), half_exact(power.twice_v())) else {
        return Err(LucasError::NonIntegralLift(eta.to_string()));
    };
    let y = eta.norm().magnitude().clone();
    let c = BigUint::from(eta.field().d()) * &z * &z;
    let exp = SUnitExponents::from_value(&c).ok_or_else(|| LucasError::NotSUnit {
        z: z.clone(),
        witness: non_s_prime_witness(&z),
    })?;
    let solution = Solution::new(x.clone(), y.clone(), exp, p)
        .map_err(|_| LucasError::DegenerateLift(eta.to_string()))?;
    Ok(LiftedCandidate {
        eta: eta.clone(),
        p,
        x,
        z,
        y,
        solution,
    })
}

fn half_exact(twice: &BigInt) -> Option<BigUint> {
    twice.is_even().then(|| (twice.magnitude() / 2u32).clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonPrimitive {
    /// q divides (eta - conj eta)^2 = -d (2v)^2.
    DividesDiscriminant,
    /// q already divides L_k for this k < m.
    EarlierTerm(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitivity {
    /// Primitive, with the Legendre symbol (-d/q) that fixes q mod m.
    Primitive {
        epsilon: i8,
    },
    NotPrimitive(NonPrimitive),
}

/// Decides whether the odd prime q | L_m is a primitive divisor. A primitive
/// q must satisfy q = (-d/q) mod m; a violation is reported as an error.
pub fn primitive_prime_test(
    q: u64,
    eta: &QuadraticInteger,
    m: u32,
) -> Result<Primitivity, LucasError> {
    if q % 2 == 0 || !is_prime_u64(q) {
        return Err(LucasError::NotOddPrime(q));
    }
    if m < 2 {
        return Err(LucasError::IndexTooSmall(m));
    }
    let big_q = BigInt::from(q);
    if !lucas_term(eta, m)?.is_multiple_of(&big_q) {
        return Err(LucasError::NotADivisor { q, m });
    }
    let d = BigInt::from(eta.field().d());
    if (&d * eta.twice_v() * eta.twice_v()).is_multiple_of(&big_q) {
        return Ok(Primitivity::NotPrimitive(NonPrimitive::DividesDiscriminant));
    }
    for k in 1..m {
        if lucas_term(eta, k)?.is_multiple_of(&big_q) {
            return Ok(Primitivity::NotPrimitive(NonPrimitive::EarlierTerm(k)));
        }
    }
    let epsilon = legendre_symbol(&-d, q).expect("q checked prime");
    let residue = (q as i64 - epsilon as i64).rem_euclid(m as i64);
    if residue != 0 {
        return Err(LucasError::CongruenceViolated { q, m, epsilon });
    }
    Ok(Primitivity::Primitive { epsilon })
}

/// Defective pairs (no primitive divisor of L_p) with roots in one of the
/// eight fields. There is one: (1 +- sqrt(-11))/2 at p = 5, where L_5 = 1.
pub fn defective_lookup(field: QuadField, p: u32) -> Result<Vec<QuadraticInteger>, LucasError> {
    if p < 5 || !is_prime_u64(p as u64) {
        return Err(LucasError::NotOddPrime(p as u64));
    }
    if field.d() != 11 || p != 5 {
        return Ok(Vec::new());
    }
    let pair = vec![
        QuadraticInteger::new(field, 1, 1).expect("half coordinates allowed for d = 11"),
        QuadraticInteger::new(field, 1, -1).expect("half coordinates allowed for d = 11"),
    ];
    for eta in &pair {
        let l = lucas_term(eta, p)?;
        assert!(l.abs().is_one(), "defective entry {eta} has L_{p} = {l}");
    }
    Ok(pair)
}

/// Odd primes q for which 11 can be a primitive divisor of L_q in a field
/// with (-d/11) defined and nonzero: q | 11 - (-d/11).
pub fn eleven_primitive_exponents(field: QuadField, p_max: u32) -> Vec<u32> {
    let Ok(eps) = legendre_symbol(&-BigInt::from(field.d()), 11) else {
        unreachable!("11 is an odd prime")
    };
    if eps == 0 {
        return Vec::new();
    }
    let target = (11 - eps as i64).to_u32().expect("positive");
    (5..=p_max)
        .filter(|&p| is_prime_u64(p as u64) && target % p == 0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(d: u32) -> QuadField {
        QuadField::new(d).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lucas_examples() {
        let half = QuadraticInteger::new(field(11), 1, 1).unwrap();
        assert_eq!(lucas_term(&half, 5).unwrap(), BigInt::from(1));
        let eta = QuadraticInteger::from_coords(field(2), 1, 1);
        assert_eq!(lucas_term(&eta, 5).unwrap(), BigInt::from(-11));
        assert_eq!(lucas_term(&eta, 4).unwrap(), BigInt::from(-4));
        assert_eq!(lucas_term(&eta, 1).unwrap(), BigInt::from(1));
        assert_eq!(lucas_term(&eta, 0).unwrap(), BigInt::from(0));
        let real = QuadraticInteger::from_coords(field(2), 3, 0);
        assert_eq!(lucas_term(&real, 3), Err(LucasError::RealRoot));
        assert_eq!(lucas_term_direct(&real, 3), Err(LucasError::RealRoot));
    }

    #[test]
    fn recurrence_matches_power_quotient() {
        for f in QuadField::all() {
            for (tu, tv) in [(2, 2), (1, 1), (-3, 5), (6, -4), (0, 2)] {
                let Ok(eta) = QuadraticInteger::new(f, tu, tv) else {
                    continue;
                };
                for m in 0..=30 {
                    assert_eq!(
                        lucas_term(&eta, m).unwrap(),
                        lucas_term_direct(&eta, m).unwrap(),
                        "{eta}, m = {m}"
                    );
                }
            }
        }
    }

    #[test]
    fn quartic_closed_form_examples() {
        assert_eq!(lucas_l5_quartic(2, &q(1, 1), &q(1, 1)), q(-11, 1));
        assert_eq!(lucas_l5_quartic(2, &q(1, 1), &q(2, 1)), q(-11, 1));
        assert_eq!(lucas_l5_quartic(6, &q(3, 1), &q(1, 1)), q(-99, 1));
        assert_eq!(lucas_l5_quartic(6, &q(9, 1), &q(4, 1)), q(-35739, 1));
        assert_eq!(lucas_l5_quartic(11, &q(1, 2), &q(1, 2)), q(1, 1));
        assert_eq!(l5_i128(6, 9, 4), -35739);
    }

    #[test]
    fn parities() {
        let (f, _, z) = d_from_parities(SUnitExponents::new(1, 0, 2));
        assert_eq!((f.d(), z), (2, BigUint::from(11u32)));
        let (f, _, z) = d_from_parities(SUnitExponents::new(3, 0, 2));
        assert_eq!((f.d(), z), (2, BigUint::from(22u32)));
        let (f, half, z) = d_from_parities(SUnitExponents::new(1, 5, 2));
        assert_eq!(
            (f.d(), half, z),
            (6, SUnitExponents::new(0, 2, 1), BigUint::from(99u32))
        );
        let (f, _, z) = d_from_parities(SUnitExponents::new(0, 0, 0));
        assert_eq!((f.d(), z), (1, BigUint::one()));
    }

    #[test]
    fn lifts() {
        let lift = |d, u, v| lift_eta_power(&QuadraticInteger::from_coords(field(d), u, v), 5);
        let l = lift(2, 1, 1).unwrap();
        assert_eq!(
            (l.x.clone(), l.z.clone(), l.y.clone()),
            (1u32.into(), 11u32.into(), 3u32.into())
        );
        assert_eq!(l.solution, Solution::from_parts(1, 3, (1, 0, 2), 5));
        assert_eq!(
            lift(2, 1, 2).unwrap().solution,
            Solution::from_parts(241, 9, (3, 0, 2), 5)
        );
        let l = lift(6, 3, 1).unwrap();
        assert_eq!(l.solution, Solution::from_parts(837, 15, (1, 5, 2), 5));
        assert_eq!(l.z, BigUint::from(99u32));
        // 15 + 8 sqrt(-2) gives z = 8 * 18491 = 8 * 11 * 41^2
        match lift(2, 15, 8) {
            Err(LucasError::NotSUnit { witness, .. }) => assert_eq!(witness, Some(41)),
            other => panic!("{other:?}"),
        }
        let half = QuadraticInteger::new(field(11), 1, 1).unwrap();
        assert!(matches!(
            lift_eta_power(&half, 5),
            Err(LucasError::NonIntegralLift(_))
        ));
        let eta = QuadraticInteger::from_coords(field(2), 1, 1);
        assert_eq!(lift_eta_power(&eta, 4), Err(LucasError::NotOddPrime(4)));
    }

    #[test]
    fn primitive_examples() {
        let eta = QuadraticInteger::from_coords(field(2), 1, 1);
        assert_eq!(
            primitive_prime_test(11, &eta, 5),
            Ok(Primitivity::Primitive { epsilon: 1 })
        );
        let half = QuadraticInteger::new(field(11), 1, 1).unwrap();
        // 11 divides the discriminant, hence L_11
        let l11 = lucas_term(&half, 11).unwrap();
        assert!(l11.is_multiple_of(&BigInt::from(11)));
        assert_eq!(
            primitive_prime_test(11, &half, 11),
            Ok(Primitivity::NotPrimitive(NonPrimitive::DividesDiscriminant))
        );
        assert_eq!(
            primitive_prime_test(2, &eta, 4),
            Err(LucasError::NotOddPrime(2))
        );
        assert_eq!(
            primitive_prime_test(7, &eta, 5),
            Err(LucasError::NotADivisor { q: 7, m: 5 })
        );
        // L_1..L_6 = 1, 2, 1, -4, -11, -10; 5 = -1 mod 6 and (-2/5) = -1
        assert_eq!(lucas_term(&eta, 6).unwrap(), BigInt::from(-10));
        assert_eq!(
            primitive_prime_test(5, &eta, 6),
            Ok(Primitivity::Primitive { epsilon: -1 })
        );
        // for 3 + sqrt(-2), 5 already divides L_3 = 25
        let eta = QuadraticInteger::from_coords(field(2), 3, 1);
        let l3 = lucas_term(&eta, 3).unwrap();
        assert_eq!(l3, BigInt::from(25));
        assert_eq!(
            primitive_prime_test(5, &eta, 6),
            Ok(Primitivity::NotPrimitive(NonPrimitive::EarlierTerm(3)))
        );
    }

    #[test]
    fn defective_table() {
        let pair = defective_lookup(field(11), 5).unwrap();
        assert_eq!(pair.len(), 2);
        assert_eq!(pair[0].norm(), BigInt::from(3));
        assert!(defective_lookup(field(2), 5).unwrap().is_empty());
        assert!(defective_lookup(field(11), 7).unwrap().is_empty());
        assert_eq!(
            defective_lookup(field(11), 3),
            Err(LucasError::NotOddPrime(3))
        );
    }

    #[test]
    fn eleven_forces_five() {
        for f in QuadField::all() {
            let ps = eleven_primitive_exponents(f, 1000);
            match f.d() {
                2 | 6 => assert_eq!(ps, vec![5]),
                _ => assert!(ps.is_empty(), "d = {}: {ps:?}", f.d()),
            }
        }
    }
}
