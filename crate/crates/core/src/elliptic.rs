//! Cubic and quartic reductions.
//!
//! Writing C = A z^6 with A sixth-power-free turns x^2 + C = y^3 into the
//! Mordell curve V^2 = U^3 - A at (U, V) = (y/z^2, x/z^3). Writing C = A z^4
//! with A fourth-power-free turns x^2 + C = y^4 into U^2 + A = V^4 at
//! (U, V) = (x/z^2, y/z). Both directions are exact and the denominators of
//! the points are S-units.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{integer_sqrt_exact, s_unit_value, SUnitExponents};
use crate::model::{check_solution, Solution, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EllipticError {
    #[error("no elliptic model for exponent n = {0}; only 3 and 4 reduce")]
    UnsupportedExponent(u32),
    #[error("{kind:?} exponents {exps:?} out of range")]
    ExponentOutOfRange { kind: ModelKind, exps: [u32; 3] },
    #[error("{0} is not a valid solution")]
    InvalidSolution(Solution),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// V^2 = U^3 - A, exponents in 0..=5.
    Cubic,
    /// U^2 + A = V^4, exponents in 0..=3.
    Quartic,
}

impl ModelKind {
    /// The power of z pulled out of C.
    pub fn z_power(self) -> u32 {
        match self {
            ModelKind::Cubic => 6,
            ModelKind::Quartic => 4,
        }
    }

    /// The exponent n of the equation this model reduces.
    pub fn equation_exponent(self) -> u32 {
        match self {
            ModelKind::Cubic => 3,
            ModelKind::Quartic => 4,
        }
    }

    pub fn for_exponent(n: u32) -> Result<Self, EllipticError> {
        match n {
            3 => Ok(ModelKind::Cubic),
            4 => Ok(ModelKind::Quartic),
            _ => Err(EllipticError::UnsupportedExponent(n)),
        }
    }
}

/// A = 2^alpha 3^beta 11^gamma together with the model shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveModel {
    pub kind: ModelKind,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
}

impl CurveModel {
    pub fn new(kind: ModelKind, alpha: u32, beta: u32, gamma: u32) -> Result<Self, EllipticError> {
        let limit = kind.z_power();
        if alpha >= limit || beta >= limit || gamma >= limit {
            return Err(EllipticError::ExponentOutOfRange {
                kind,
                exps: [alpha, beta, gamma],
            });
        }
        Ok(Self {
            kind,
            alpha,
            beta,
            gamma,
        })
    }

    pub fn coefficient(&self) -> BigUint {
        s_unit_value(SUnitExponents::new(self.alpha, self.beta, self.gamma))
    }

    pub fn contains(&self, u: &BigRational, v: &BigRational) -> bool {
        let a = BigRational::from_integer(BigInt::from(self.coefficient()));
        match self.kind {
            ModelKind::Cubic => v * v == u * u * u - a,
            ModelKind::Quartic => u * u + a == (v * v) * (v * v),
        }
    }

    pub fn contains_point(&self, p: &SPoint) -> bool {
        self.contains(&p.u, &p.v)
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.coefficient();
        match self.kind {
            ModelKind::Cubic => write!(f, "V^2 = U^3 - {a}"),
            ModelKind::Quartic => write!(f, "U^2 + {a} = V^4"),
        }
    }
}

/// A rational point with the S-unit scale z that lifts it to integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SPoint {
    pub u: BigRational,
    pub v: BigRational,
    pub z: BigUint,
}

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Splits C = 2^a 3^b 11^c as A z^k with k = 6 (cubic) or 4 (quartic).
pub fn decompose(exp: SUnitExponents, kind: ModelKind) -> (CurveModel, BigUint) {
    let k = kind.z_power();
    let model = CurveModel {
        kind,
        alpha: exp.a % k,
        beta: exp.b % k,
        gamma: exp.c % k,
    };
    let z = s_unit_value(SUnitExponents::new(exp.a / k, exp.b / k, exp.c / k));
    (model, z)
}

/// All 216 cubic or 64 quartic models.
pub fn curve_family(kind: ModelKind) -> Vec<CurveModel> {
    let k = kind.z_power();
    let mut out = Vec::with_capacity((k * k * k) as usize);
    for alpha in 0..k {
        for beta in 0..k {
            for gamma in 0..k {
                out.push(CurveModel {
                    kind,
                    alpha,
                    beta,
                    gamma,
                });
            }
        }
    }
    out
}

/// Maps a verified solution with n = 3 or 4 onto its model.
pub fn solution_to_point(s: &Solution) -> Result<(CurveModel, SPoint), EllipticError> {
    let kind = ModelKind::for_exponent(s.n)?;
    if check_solution(s) != Verdict::Valid {
        return Err(EllipticError::InvalidSolution(s.clone()));
    }
    let (model, z) = decompose(s.exp, kind);
    let zi = BigInt::from(z.clone());
    let (x, y) = (BigInt::from(s.x.clone()), BigInt::from(s.y.clone()));
    let (u, v) = match kind {
        ModelKind::Cubic => (ratio(y, zi.pow(2)), ratio(x, zi.pow(3))),
        ModelKind::Quartic => (ratio(x, zi.pow(2)), ratio(y, zi)),
    };
    let point = SPoint { u, v, z };
    debug_assert!(model.contains_point(&point));
    Ok((model, point))
}

fn integral(r: BigRational) -> Option<BigUint> {
    if !r.is_integer() || r.is_negative() {
        return None;
    }
    r.to_integer().to_biguint()
}

/// Lifts a model point back to (x, y, a, b, c, n). Returns `None` when the
/// point is off the model, the lift is not a nonnegative integer pair with
/// y >= 2, or gcd(x, y) > 1.
pub fn point_to_solution(m: &CurveModel, p: &SPoint, n: u32) -> Option<Solution> {
    if n != m.kind.equation_exponent() || p.z.is_zero() || !m.contains_point(p) {
        return None;
    }
    let z = BigRational::from_integer(BigInt::from(p.z.clone()));
    let (x, y) = match m.kind {
        ModelKind::Cubic => (integral(&p.v * z.pow(3))?, integral(&p.u * z.pow(2))?),
        ModelKind::Quartic => (integral(&p.u * z.pow(2))?, integral(&p.v * &z)?),
    };
    let c = m.coefficient() * p.z.pow(m.kind.z_power());
    // z is meant to be an S-unit; anything else fails here
    let exp = SUnitExponents::from_value(&c)?;
    let s = Solution::new(x, y, exp, n).ok()?;
    check_solution(&s).is_valid().then_some(s)
}

/// S-units 2^i 3^j 11^k up to `bound`, ascending.
pub fn s_units_up_to(bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p2 = 1u64;
    while p2 <= bound {
        let mut p3 = p2;
        while p3 <= bound {
            let mut p11 = p3;
            while p11 <= bound {
                out.push(p11);
                match p11.checked_mul(11) {
                    Some(v) => p11 = v,
                    None => break,
                }
            }
            match p3.checked_mul(3) {
                Some(v) => p3 = v,
                None => break,
            }
        }
        match p2.checked_mul(2) {
            Some(v) => p2 = v,
            None => break,
        }
    }
    out.sort_unstable();
    out
}

/// Every point with V >= 0 whose S-unit scale is at most `z_max` and whose
/// lifted integer coordinate (y for both models) is at most `num_max`.
///
/// Sound but complete only inside that box. A point reachable from several
/// scales is reported once, with the smallest z.
pub fn bounded_point_search(m: &CurveModel, z_max: u64, num_max: u64) -> Vec<SPoint> {
    let a = BigInt::from(m.coefficient());
    let k = m.kind.z_power();
    let per_scale: Vec<Vec<SPoint>> = s_units_up_to(z_max)
        .into_par_iter()
        .map(|z| {
            let zi = BigInt::from(z);
            let scaled = &a * zi.pow(k);
            let mut pts = Vec::new();
            for y in 1..=num_max {
                let yi = BigInt::from(y);
                let d = yi.pow(m.kind.equation_exponent()) - &scaled;
                if d.is_negative() {
                    continue;
                }
                let Some(x) = integer_sqrt_exact(d.magnitude()) else {
                    continue;
                };
                let x = BigInt::from(x);
                let (u, v) = match m.kind {
                    ModelKind::Cubic => (ratio(yi, zi.pow(2)), ratio(x, zi.pow(3))),
                    ModelKind::Quartic => (ratio(x, zi.pow(2)), ratio(yi, zi.clone())),
                };
                pts.push(SPoint {
                    u,
                    v,
                    z: BigUint::from(z),
                });
            }
            pts
        })
        .collect();
    let mut best: BTreeMap<(BigRational, BigRational), SPoint> = BTreeMap::new();
    for p in per_scale.into_iter().flatten() {
        debug_assert!(m.contains_point(&p));
        best.entry((p.u.clone(), p.v.clone())).or_insert(p);
    }
    best.into_values().collect()
}

/// Checks that `z` is S-unit scale for `p`'s denominators: the reduced
/// denominators of U and V both divide a power of z.
pub fn denominators_are_s_units(p: &SPoint) -> bool {
    let s_unit =
        |d: &BigInt| d.magnitude().is_one() || SUnitExponents::from_value(d.magnitude()).is_some();
    s_unit(p.u.denom()) && s_unit(p.v.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        ratio(n, d)
    }

    fn cubic(a: u32, b: u32, c: u32) -> CurveModel {
        CurveModel::new(ModelKind::Cubic, a, b, c).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let (m, z) = decompose(SUnitExponents::new(18, 0, 1), ModelKind::Cubic);
        assert_eq!(
            (m.alpha, m.beta, m.gamma, z),
            (0, 0, 1, BigUint::from(8u32))
        );
        let (m, z) = decompose(SUnitExponents::new(6, 0, 1), ModelKind::Cubic);
        assert_eq!(
            (m.alpha, m.beta, m.gamma, z),
            (0, 0, 1, BigUint::from(2u32))
        );
        let (m, z) = decompose(SUnitExponents::new(8, 3, 1), ModelKind::Quartic);
        assert_eq!(
            (m.alpha, m.beta, m.gamma, z),
            (0, 3, 1, BigUint::from(4u32))
        );
        // the row the printed table gives z = 2 for
        let (_, z) = decompose(SUnitExponents::new(0, 6, 1), ModelKind::Cubic);
        assert_eq!(z, BigUint::from(3u32));
    }

    #[test]
    fn decompose_round_trip() {
        for a in 0..20 {
            for b in 0..14 {
                for c in 0..9 {
                    let e = SUnitExponents::new(a, b, c);
                    for kind in [ModelKind::Cubic, ModelKind::Quartic] {
                        let (m, z) = decompose(e, kind);
                        assert_eq!(m.coefficient() * z.pow(kind.z_power()), s_unit_value(e));
                    }
                }
            }
        }
    }

    #[test]
    fn families() {
        let cubic_family = curve_family(ModelKind::Cubic);
        let quartic_family = curve_family(ModelKind::Quartic);
        assert_eq!(cubic_family.len(), 216);
        assert_eq!(quartic_family.len(), 64);
        let distinct: std::collections::BTreeSet<_> = cubic_family.iter().collect();
        assert_eq!(distinct.len(), 216);
        assert!(cubic_family.contains(&cubic(0, 0, 0)));
        assert_eq!(cubic(0, 0, 0).to_string(), "V^2 = U^3 - 1");
        assert!(CurveModel::new(ModelKind::Quartic, 4, 0, 0).is_err());
    }

    #[test]
    fn solution_to_point_examples() {
        let (m, p) = solution_to_point(&Solution::from_parts(5, 9, (6, 0, 1), 3)).unwrap();
        assert_eq!(m, cubic(0, 0, 1));
        assert_eq!(
            (p.u.clone(), p.v.clone(), p.z.clone()),
            (q(9, 4), q(5, 8), BigUint::from(2u32))
        );
        assert!(denominators_are_s_units(&p));

        let (m, p) = solution_to_point(&Solution::from_parts(19, 5, (3, 1, 1), 4)).unwrap();
        assert_eq!(m, CurveModel::new(ModelKind::Quartic, 3, 1, 1).unwrap());
        assert_eq!((p.u, p.v, p.z), (q(19, 1), q(5, 1), BigUint::one()));

        let (m, p) = solution_to_point(&Solution::from_parts(4, 3, (0, 0, 1), 3)).unwrap();
        assert_eq!(m, cubic(0, 0, 1));
        assert_eq!((p.u, p.v), (q(3, 1), q(4, 1)));

        assert_eq!(
            solution_to_point(&Solution::from_parts(1, 3, (1, 0, 2), 5)).unwrap_err(),
            EllipticError::UnsupportedExponent(5)
        );
        assert!(matches!(
            solution_to_point(&Solution::from_parts(5, 3, (1, 0, 0), 4)),
            Err(EllipticError::InvalidSolution(_))
        ));
    }

    #[test]
    fn point_to_solution_examples() {
        let p = SPoint {
            u: q(9, 4),
            v: q(5, 8),
            z: BigUint::from(2u32),
        };
        assert_eq!(
            point_to_solution(&cubic(0, 0, 1), &p, 3),
            Some(Solution::from_parts(5, 9, (6, 0, 1), 3))
        );
        // (3, 4) at scale 2 lifts to x = 32, y = 12: on the curve, not coprime
        let p = SPoint {
            u: q(3, 1),
            v: q(4, 1),
            z: BigUint::from(2u32),
        };
        assert!(cubic(0, 0, 1).contains_point(&p));
        assert_eq!(point_to_solution(&cubic(0, 0, 1), &p, 3), None);
        // wrong exponent, off-curve, negative V
        let p = SPoint {
            u: q(3, 1),
            v: q(4, 1),
            z: BigUint::one(),
        };
        assert_eq!(point_to_solution(&cubic(0, 0, 1), &p, 4), None);
        assert_eq!(point_to_solution(&cubic(0, 0, 2), &p, 3), None);
        let neg = SPoint {
            u: q(3, 1),
            v: q(-4, 1),
            z: BigUint::one(),
        };
        assert_eq!(point_to_solution(&cubic(0, 0, 1), &neg, 3), None);
        // scale too small to clear the denominator
        let p = SPoint {
            u: q(9, 4),
            v: q(5, 8),
            z: BigUint::one(),
        };
        assert_eq!(point_to_solution(&cubic(0, 0, 1), &p, 3), None);
    }

    #[test]
    fn bounded_search_examples() {
        let pts = bounded_point_search(&cubic(0, 0, 1), 10, 10_000);
        for (u, v) in [(q(3, 1), q(4, 1)), (q(15, 1), q(58, 1)), (q(9, 4), q(5, 8))] {
            assert!(
                pts.iter().any(|p| p.u == u && p.v == v),
                "missing ({u}, {v})"
            );
        }
        assert!(pts.iter().all(|p| cubic(0, 0, 1).contains_point(p)));

        let pts = bounded_point_search(&cubic(0, 0, 0), 4, 50);
        assert!(pts.iter().any(|p| p.u == q(1, 1) && p.v.is_zero()));

        let quartic = CurveModel::new(ModelKind::Quartic, 3, 1, 1).unwrap();
        let pts = bounded_point_search(&quartic, 1, 100);
        assert!(pts.iter().any(|p| p.u == q(19, 1) && p.v == q(5, 1)));
    }

    #[test]
    fn bounded_search_keeps_smallest_scale() {
        let pts = bounded_point_search(&cubic(0, 0, 1), 2, 100);
        let three_four: Vec<_> = pts.iter().filter(|p| p.u == q(3, 1)).collect();
        assert_eq!(three_four.len(), 1);
        assert_eq!(three_four[0].z, BigUint::one());
    }

    #[test]
    fn s_unit_scales() {
        assert_eq!(s_units_up_to(12), vec![1, 2, 3, 4, 6, 8, 9, 11, 12]);
        assert_eq!(s_units_up_to(1), vec![1]);
    }
}
