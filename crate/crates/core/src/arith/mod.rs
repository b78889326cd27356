//! Exact integer and S-unit arithmetic shared by every other module.
//!
//! Everything here is arbitrary precision or checked fixed width; nothing
//! touches floating point.

mod prime;
mod residue;

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use prime::pow_mod;
pub use prime::{factor_u64, is_prime_u64, largest_prime_factor_u64, odd_primes_up_to};
pub use residue::SquareFilter;

/// The prime set S = {2, 3, 11}.
pub const S_PRIMES: [u64; 3] = [2, 3, 11];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("largest prime factor undefined for zero")]
    Zero,
    #[error("residue {0} exceeds the 64-bit factoring budget")]
    UnfactoredResidue(BigUint),
}

/// Exponents (a, b, c) of the S-unit 2^a * 3^b * 11^c.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct SUnitExponents {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl SUnitExponents {
    pub const fn new(a: u32, b: u32, c: u32) -> Self {
        Self { a, b, c }
    }

    pub fn value(&self) -> BigUint {
        s_unit_value(*self)
    }

    /// The value when it fits in a `u128`.
    pub fn value_u128(&self) -> Option<u128> {
        2u128
            .checked_pow(self.a)?
            .checked_mul(3u128.checked_pow(self.b)?)?
            .checked_mul(11u128.checked_pow(self.c)?)
    }

    /// Recognizes `m` as 2^a 3^b 11^c, or `None` if another prime divides it.
    pub fn from_value(m: &BigUint) -> Option<Self> {
        let e = factor_as_s_unit(m, &S_PRIMES)?;
        Some(Self::new(e[0], e[1], e[2]))
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.a, self.b, self.c]
    }

    /// True when both b and c are positive.
    pub fn bc_positive(&self) -> bool {
        self.b > 0 && self.c > 0
    }
}

impl fmt::Display for SUnitExponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

pub fn s_unit_value(e: SUnitExponents) -> BigUint {
    BigUint::from(2u32).pow(e.a) * BigUint::from(3u32).pow(e.b) * BigUint::from(11u32).pow(e.c)
}

/// Exponent vector of `m` over `primes`, or `None` when `m` has a prime
/// factor outside the list (zero is never an S-unit).
///
/// Panics if `primes` is empty or not strictly increasing.
pub fn factor_as_s_unit(m: &BigUint, primes: &[u64]) -> Option<Vec<u32>> {
    assert!(!primes.is_empty(), "prime list must be non-empty");
    assert!(
        primes.windows(2).all(|w| w[0] < w[1]),
        "prime list must be strictly increasing"
    );
    if m.is_zero() {
        return None;
    }
    let mut rest = m.clone();
    let mut exps = Vec::with_capacity(primes.len());
    for &p in primes {
        let p = BigUint::from(p);
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        exps.push(e);
    }
    rest.is_one().then_some(exps)
}

pub fn integer_sqrt_exact(m: &BigUint) -> Option<BigUint> {
    let r = m.sqrt();
    (&r * &r == *m).then_some(r)
}

pub fn isqrt_exact_u128(m: u128) -> Option<u128> {
    let r = m.isqrt();
    (r * r == m).then_some(r)
}

/// The exact `n`-th root of `m` if `m` is a perfect `n`-th power.
pub fn nth_root_exact(m: &BigUint, n: u32) -> Option<BigUint> {
    assert!(n >= 2, "root index must be at least 2");
    let r = m.nth_root(n);
    (r.pow(n) == *m).then_some(r)
}

/// Legendre symbol (a / q) by Euler's criterion.
pub fn legendre_symbol(a: &BigInt, q: u64) -> Result<i8, ArithError> {
    if q % 2 == 0 || !is_prime_u64(q) {
        return Err(ArithError::NotOddPrime(q));
    }
    let residue = a
        .mod_floor(&BigInt::from(q))
        .to_u64()
        .expect("residue is reduced mod q");
    if residue == 0 {
        return Ok(0);
    }
    match pow_mod(residue, (q - 1) / 2, q) {
        1 => Ok(1),
        e if e == q - 1 => Ok(-1),
        e => unreachable!("Euler criterion gave {e} mod prime {q}"),
    }
}

/// P(k): the largest prime factor of |k|, with P(1) = 1.
///
/// The S-primes are stripped first; the remaining cofactor must fit in 64
/// bits or the call fails with [`ArithError::UnfactoredResidue`].
pub fn largest_prime_factor(k: &BigInt) -> Result<BigUint, ArithError> {
    if k.sign() == Sign::NoSign {
        return Err(ArithError::Zero);
    }
    let mut rest = k.magnitude().clone();
    let mut largest = 1u64;
    for p in S_PRIMES {
        let big_p = BigUint::from(p);
        while (&rest % &big_p).is_zero() {
            rest /= &big_p;
            largest = p;
        }
    }
    let residue = rest.to_u64().ok_or(ArithError::UnfactoredResidue(rest))?;
    Ok(BigUint::from(
        largest.max(largest_prime_factor_u64(residue)),
    ))
}

/// First prime factor of `m` outside S, when the cofactor fits in 64 bits.
pub(crate) fn non_s_prime_witness(m: &BigUint) -> Option<u64> {
    let mut rest = m.clone();
    for p in S_PRIMES {
        let big_p = BigUint::from(p);
        while !rest.is_zero() && (&rest % &big_p).is_zero() {
            rest /= &big_p;
        }
    }
    let small = rest.to_u64()?;
    (small > 1).then(|| factor_u64(small)[0])
}
