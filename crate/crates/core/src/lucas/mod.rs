//! Imaginary quadratic fields Q(sqrt(-d)) for d | 66, Lucas sequences of
//! their integers, primitive divisors, and the p = 5 case analysis.

mod cases;
mod field;
mod sequence;

use num_bigint::BigUint;
use thiserror::Error;

pub use cases::{
    candidate_solutions, case_analysis_p5, mod8_branches, BranchHit, Candidate, CandidateVerdict,
    CaseReport, CaseShape, ExponentClass, Mod8Branch, QuarticPoint,
};
pub use field::{class_number_by_forms, QuadField, QuadraticInteger, D_LIST};
pub use sequence::{
    d_from_parities, defective_lookup, eleven_primitive_exponents, lift_eta_power,
    lucas_l5_quartic, lucas_term, lucas_term_direct, primitive_prime_test, LiftedCandidate,
    NonPrimitive, Primitivity,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LucasError {
    #[error("d = {0} is not one of 1, 2, 3, 6, 11, 22, 33, 66")]
    UnsupportedField(u32),
    #[error("({twice_u} + {twice_v}*sqrt(-{d}))/2 is not an algebraic integer")]
    NotIntegral {
        d: u32,
        twice_u: num_bigint::BigInt,
        twice_v: num_bigint::BigInt,
    },
    #[error("operands from Q(sqrt(-{0})) and Q(sqrt(-{1}))")]
    MixedFields(u32, u32),
    #[error("{0} is not a negative discriminant (0 or 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("eta is real, so eta - conj(eta) = 0")]
    RealRoot,
    #[error("{0} is not an odd prime in the allowed range")]
    NotOddPrime(u64),
    #[error("index m = {0} must be at least 2")]
    IndexTooSmall(u32),
    #[error("{q} does not divide L_{m}")]
    NotADivisor { q: u64, m: u32 },
    #[error("primitive divisor {q} of L_{m} breaks q = {epsilon} (mod {m})")]
    CongruenceViolated { q: u64, m: u32, epsilon: i8 },
    #[error("eta^p for eta = {0} has half-integer coordinates")]
    NonIntegralLift(String),
    #[error("z = {z} is not an S-unit (prime factor {witness:?})")]
    NotSUnit { z: BigUint, witness: Option<u64> },
    #[error("eta = {0} has norm below 2")]
    DegenerateLift(String),
    #[error("d = {0} is not 2 or 6; no p = 5 branch exists there")]
    NotAnAdmissibleField(u32),
}

/// For each field, the primes 5 <= p <= `p_max` at which 11 could be a
/// primitive divisor of L_p, plus the class number, which must be prime to
/// every such p.
pub fn prime_gate(p_max: u32) -> Vec<(QuadField, u32, Vec<u32>)> {
    QuadField::all()
        .map(|f| {
            let ps = eleven_primitive_exponents(f, p_max);
            let h = f.class_number();
            debug_assert!(ps.iter().all(|&p| h % p != 0));
            (f, h, ps)
        })
        .collect()
}
