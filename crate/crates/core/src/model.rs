//! Solutions of x^2 + 2^a 3^b 11^c = y^n, their exact verification, descent
//! of the exponent n, and the mod-8 parity constraint.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::arith::{s_unit_value, SUnitExponents};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("y must be at least 2, got {0}")]
    DegenerateBase(BigUint),
    #[error("exponent n must be at least 3, got {0}")]
    ExponentTooSmall(u32),
    #[error("{d} is not a canonical exponent of n = {n}")]
    NotCanonical { n: u32, d: u32 },
}

/// A tuple (x, y, a, b, c, n). Construction only enforces y >= 2 and n >= 3;
/// whether the tuple actually solves the equation is [`check_solution`]'s job.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub x: BigUint,
    pub y: BigUint,
    pub exp: SUnitExponents,
    pub n: u32,
}

impl Solution {
    pub fn new(
        x: impl Into<BigUint>,
        y: impl Into<BigUint>,
        exp: SUnitExponents,
        n: u32,
    ) -> Result<Self, ModelError> {
        let y = y.into();
        if y < BigUint::from(2u32) {
            return Err(ModelError::DegenerateBase(y));
        }
        if n < 3 {
            return Err(ModelError::ExponentTooSmall(n));
        }
        Ok(Self {
            x: x.into(),
            y,
            exp,
            n,
        })
    }

    /// Shorthand for literals; panics on a degenerate tuple.
    pub fn from_parts(x: u64, y: u64, (a, b, c): (u32, u32, u32), n: u32) -> Self {
        Self::new(x, y, SUnitExponents::new(a, b, c), n).expect("literal solution is well formed")
    }

    pub fn x_parity(&self) -> Parity {
        if self.x.is_even() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Sort key used by every list of solutions: (y, a, b, c), then x and n.
    pub fn sort_key(&self) -> (&BigUint, SUnitExponents, &BigUint, u32) {
        (&self.y, self.exp, &self.x, self.n)
    }
}

impl Ord for Solution {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Solution {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(x,y,a,b,c,n)=({},{},{},{},{},{})",
            self.x, self.y, self.exp.a, self.exp.b, self.exp.c, self.n
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// y^n - x^2 - C is nonzero.
    EquationFails {
        residual: BigInt,
    },
    NotCoprime {
        gcd: BigUint,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

pub fn check_solution(s: &Solution) -> Verdict {
    let lhs = &s.x * &s.x + s_unit_value(s.exp);
    let rhs = s.y.pow(s.n);
    if lhs != rhs {
        return Verdict::EquationFails {
            residual: BigInt::from(rhs) - BigInt::from(lhs),
        };
    }
    let g = s.x.gcd(&s.y);
    if !g.is_one() {
        return Verdict::NotCoprime { gcd: g };
    }
    Verdict::Valid
}

/// The exponents d | n with d = 4 or d an odd prime.
pub fn canonical_exponents(n: u32) -> Result<BTreeSet<u32>, ModelError> {
    if n < 3 {
        return Err(ModelError::ExponentTooSmall(n));
    }
    let mut out = BTreeSet::new();
    if n % 4 == 0 {
        out.insert(4);
    }
    let mut rest = n;
    while rest % 2 == 0 {
        rest /= 2;
    }
    let mut p = 3;
    while p * p <= rest {
        if rest % p == 0 {
            out.insert(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 2;
    }
    if rest > 1 {
        out.insert(rest);
    }
    Ok(out)
}

/// Replaces (y, n) by (y^(n/d), d).
pub fn descend_solution(s: &Solution, d: u32) -> Result<Solution, ModelError> {
    if !canonical_exponents(s.n)?.contains(&d) {
        return Err(ModelError::NotCanonical { n: s.n, d });
    }
    Ok(Solution {
        x: s.x.clone(),
        y: s.y.pow(s.n / d),
        exp: s.exp,
        n: d,
    })
}

/// False exactly when a = 0 and x is odd.
///
/// With a = 0 and x odd, x^2 + 3^b 11^c is 1 + (1 or 3) mod 8, i.e. 2 or 4,
/// which is never an n-th power for n >= 3 (an even y^n is 0 mod 8).
pub fn mod8_admissible(exp: SUnitExponents, x_parity: Parity) -> bool {
    !(exp.a == 0 && x_parity == Parity::Odd)
}

/// Residue of 3^b 11^c mod 8; 1 when b + c is even, 3 when odd.
pub fn odd_part_mod8(exp: SUnitExponents) -> u32 {
    let v = s_unit_value(SUnitExponents::new(0, exp.b, exp.c)) % 8u32;
    v.to_u32().expect("reduced mod 8")
}
