//! The p = 5 case analysis for d in {2, 6}.
//!
//! With eta = u + v sqrt(-d) and z = 2^i 3^j 11^k, the identity z / v = L_5
//! splits the primes 2 and 3 between v and L_5: a prime dividing both would
//! divide u. Each case fixes which of them v takes; L_5 keeps the rest
//! together with 11. Since u is odd, L_5 = 5 (mod 8), which prunes the sign
//! and exponent parities of the L_5 side before any search runs.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;

use super::field::{QuadField, QuadraticInteger};
use super::sequence::{l5_i128, lift_eta_power, LiftedCandidate};
use super::LucasError;
use crate::arith::isqrt_exact_u128;
use crate::model::{check_solution, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseShape {
    /// v = +-2^i, i >= 0.
    PowerOfTwo,
    /// v = +-3^j, j >= 0.
    PowerOfThree,
    /// v = +-2^i 3^j, i, j >= 1.
    Mixed,
}

impl CaseShape {
    pub const ALL: [CaseShape; 3] = [
        CaseShape::PowerOfTwo,
        CaseShape::PowerOfThree,
        CaseShape::Mixed,
    ];

    pub fn number(self) -> u8 {
        match self {
            CaseShape::PowerOfTwo => 1,
            CaseShape::PowerOfThree => 2,
            CaseShape::Mixed => 3,
        }
    }

    /// Primes allowed in L_5.
    pub fn l5_primes(self) -> &'static [u64] {
        match self {
            CaseShape::PowerOfTwo => &[3, 11],
            CaseShape::PowerOfThree => &[2, 11],
            CaseShape::Mixed => &[11],
        }
    }

    /// The values v > 0 of this shape up to `bound`.
    pub fn v_values(self, bound: u64) -> Vec<u64> {
        let powers = |p: u64| {
            std::iter::successors(Some(1u64), move |&x| x.checked_mul(p))
                .take_while(move |&x| x <= bound)
        };
        let mut out: Vec<u64> = match self {
            CaseShape::PowerOfTwo => powers(2).collect(),
            CaseShape::PowerOfThree => powers(3).collect(),
            CaseShape::Mixed => powers(2)
                .skip(1)
                .flat_map(|t| powers(3).skip(1).map(move |h| t.checked_mul(h)))
                .flatten()
                .filter(|&v| v <= bound)
                .collect(),
        };
        out.sort_unstable();
        out
    }
}

impl fmt::Display for CaseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseShape::PowerOfTwo => write!(f, "case 1 (v = 2^i)"),
            CaseShape::PowerOfThree => write!(f, "case 2 (v = 3^j)"),
            CaseShape::Mixed => write!(f, "case 3 (v = 2^i 3^j)"),
        }
    }
}

/// What an exponent can be, as far as residues mod 8 go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExponentClass {
    Zero,
    Odd,
    EvenPositive,
    /// Only used for 2, where every positive exponent gives an even residue.
    Positive,
}

impl ExponentClass {
    fn of(p: u64, e: u32) -> Self {
        match (p, e) {
            (_, 0) => ExponentClass::Zero,
            (2, _) => ExponentClass::Positive,
            (_, e) if e % 2 == 1 => ExponentClass::Odd,
            _ => ExponentClass::EvenPositive,
        }
    }

    fn classes_for(p: u64) -> &'static [ExponentClass] {
        if p == 2 {
            &[ExponentClass::Zero, ExponentClass::Positive]
        } else {
            &[
                ExponentClass::Zero,
                ExponentClass::Odd,
                ExponentClass::EvenPositive,
            ]
        }
    }

    fn residues(self, p: u64) -> BTreeSet<u64> {
        let r = p % 8;
        match self {
            ExponentClass::Zero => [1].into(),
            ExponentClass::Odd => [r].into(),
            ExponentClass::EvenPositive => [r * r % 8].into(),
            ExponentClass::Positive => (1..=3).map(|e| r.pow(e) % 8).collect(),
        }
    }
}

/// A sign and exponent classes for the L_5 side of one case.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mod8Branch {
    pub case: CaseShape,
    pub negative: bool,
    pub classes: Vec<(u64, ExponentClass)>,
}

impl Mod8Branch {
    /// The residues mod 8 that +-prod p^e can take inside this branch.
    pub fn residues(&self) -> BTreeSet<u64> {
        let mut acc: BTreeSet<u64> = [if self.negative { 7 } else { 1 }].into();
        for &(p, class) in &self.classes {
            let rs = class.residues(p);
            acc = acc
                .iter()
                .flat_map(|a| rs.iter().map(move |r| a * r % 8))
                .collect();
        }
        acc
    }

    pub fn survives(&self) -> bool {
        self.residues().contains(&5)
    }
}

impl fmt::Display for Mod8Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} sign {}",
            self.case,
            if self.negative { '-' } else { '+' }
        )?;
        for (p, class) in &self.classes {
            write!(f, ", exponent of {p} {class:?}")?;
        }
        Ok(())
    }
}

pub fn mod8_branches(case: CaseShape) -> Vec<Mod8Branch> {
    let mut partial: Vec<Vec<(u64, ExponentClass)>> = vec![Vec::new()];
    for &p in case.l5_primes() {
        partial = partial
            .into_iter()
            .flat_map(|prefix| {
                ExponentClass::classes_for(p).iter().map(move |&c| {
                    let mut next = prefix.clone();
                    next.push((p, c));
                    next
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for negative in [false, true] {
        for classes in &partial {
            out.push(Mod8Branch {
                case,
                negative,
                classes: classes.clone(),
            });
        }
    }
    out
}

/// A point of -k V^2 = 5U^4 - 10d U^2 + d^2 at U = u/v, V = w/v^2 with u, v > 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuarticPoint {
    pub case: CaseShape,
    pub k: u64,
    pub u: u64,
    pub v: u64,
    pub w: u64,
    /// Whether L_5 = -k w^2 uses only the primes the case allows.
    pub shape_ok: bool,
}

impl QuarticPoint {
    pub fn coordinates(&self) -> (BigRational, BigRational) {
        let v = BigInt::from(self.v);
        (
            BigRational::new(self.u.into(), v.clone()),
            BigRational::new(self.w.into(), &v * &v),
        )
    }

    pub fn on_curve(&self, d: u32) -> bool {
        let (u, v) = self.coordinates();
        let q = |n: u64| BigRational::from_integer(BigInt::from(n));
        let lhs = -(q(self.k) * &v * &v);
        let rhs =
            q(5) * &u * &u * &u * &u - q(10) * q(d as u64) * &u * &u + q(d as u64) * q(d as u64);
        lhs == rhs
    }
}

/// A pair (u, v) whose L_5 passes the S-unit shape test of its case.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchHit {
    pub branch: Mod8Branch,
    pub u: u64,
    pub v: u64,
    pub l5: i128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CandidateVerdict {
    Accepted,
    /// b = 0, outside the bc > 0 hypothesis.
    RejectedBZero,
    RejectedCoprimality,
}

impl CandidateVerdict {
    pub fn label(self) -> &'static str {
        match self {
            CandidateVerdict::Accepted => "accepted",
            CandidateVerdict::RejectedBZero => "rejected-b-zero",
            CandidateVerdict::RejectedCoprimality => "rejected-coprimality",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub cases: BTreeSet<CaseShape>,
    pub lifted: LiftedCandidate,
    pub verdict: CandidateVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub field: QuadField,
    pub bound: u64,
    pub branches: Vec<Mod8Branch>,
    pub pairs_examined: u64,
    /// Pairs with L_5 not 5 mod 8; zero whenever u is odd.
    pub mod8_rejected: u64,
    pub points: Vec<QuarticPoint>,
    pub hits: Vec<BranchHit>,
    pub candidates: Vec<Candidate>,
}

impl CaseReport {
    /// Hits landing in a branch the mod-8 argument removes.
    pub fn eliminated_hits(&self) -> Vec<&BranchHit> {
        self.hits.iter().filter(|h| !h.branch.survives()).collect()
    }

    pub fn accepted(&self) -> Vec<&Solution> {
        self.candidates
            .iter()
            .filter(|c| c.verdict == CandidateVerdict::Accepted)
            .map(|c| &c.lifted.solution)
            .collect()
    }
}

fn classify(s: &Solution) -> CandidateVerdict {
    if !check_solution(s).is_valid() {
        CandidateVerdict::RejectedCoprimality
    } else if s.exp.b == 0 {
        CandidateVerdict::RejectedBZero
    } else {
        CandidateVerdict::Accepted
    }
}

/// Exponents of m over `primes`, or `None` if another prime divides it.
fn exponents_over(mut m: u128, primes: &[u64]) -> Option<Vec<(u64, u32)>> {
    let mut out = Vec::with_capacity(primes.len());
    for &p in primes {
        let mut e = 0;
        while m % p as u128 == 0 {
            m /= p as u128;
            e += 1;
        }
        out.push((p, e));
    }
    (m == 1).then_some(out)
}

struct Scan {
    pairs: u64,
    mod8_rejected: u64,
    points: Vec<QuarticPoint>,
    hits: Vec<BranchHit>,
}

fn scan_v(d: u32, case: CaseShape, v: u64, bound: u64) -> Scan {
    let mut out = Scan {
        pairs: 0,
        mod8_rejected: 0,
        points: Vec::new(),
        hits: Vec::new(),
    };
    for u in (1..=bound).step_by(2) {
        if u.gcd(&v) != 1 {
            continue;
        }
        out.pairs += 1;
        let l5 = l5_i128(d as i128, u as i128, v as i128);
        if l5.rem_euclid(8) != 5 {
            out.mod8_rejected += 1;
            continue;
        }
        let shape = exponents_over(l5.unsigned_abs(), case.l5_primes());
        if let Some(exps) = &shape {
            let classes = exps
                .iter()
                .map(|&(p, e)| (p, ExponentClass::of(p, e)))
                .collect();
            let branch = Mod8Branch {
                case,
                negative: l5 < 0,
                classes,
            };
            out.hits.push(BranchHit { branch, u, v, l5 });
        }
        if l5 < 0 {
            let m = l5.unsigned_abs();
            for k in [3u64, 11] {
                if m % k as u128 != 0 {
                    continue;
                }
                if let Some(w) = isqrt_exact_u128(m / k as u128) {
                    let w = u64::try_from(w).expect("box keeps w below 2^64");
                    out.points.push(QuarticPoint {
                        case,
                        k,
                        u,
                        v,
                        w,
                        shape_ok: shape.is_some(),
                    });
                }
            }
        }
    }
    out
}

/// Runs the three cases for d in {2, 6} over 0 < u, v <= `bound` (signs of u
/// and v do not change L_5), lifts every shape-compatible pair through
/// eta^5 and classifies the resulting tuples.
pub fn case_analysis_p5(d: u32, bound: u64) -> Result<CaseReport, LucasError> {
    if d != 2 && d != 6 {
        return Err(LucasError::NotAnAdmissibleField(d));
    }
    let field = QuadField::new(d)?;
    let work: Vec<(CaseShape, u64)> = CaseShape::ALL
        .iter()
        .flat_map(|&c| c.v_values(bound).into_iter().map(move |v| (c, v)))
        .collect();
    let scans: Vec<Scan> = work
        .par_iter()
        .map(|&(case, v)| scan_v(d, case, v, bound))
        .collect();

    let mut report = CaseReport {
        field,
        bound,
        branches: CaseShape::ALL
            .iter()
            .flat_map(|&c| mod8_branches(c))
            .collect(),
        pairs_examined: 0,
        mod8_rejected: 0,
        points: Vec::new(),
        hits: Vec::new(),
        candidates: Vec::new(),
    };
    for s in scans {
        report.pairs_examined += s.pairs;
        report.mod8_rejected += s.mod8_rejected;
        report.points.extend(s.points);
        report.hits.extend(s.hits);
    }
    report.points.sort();
    report.hits.sort();

    for hit in report.hits.iter().filter(|h| h.branch.survives()) {
        let eta = QuadraticInteger::from_coords(field, hit.u, hit.v);
        let lifted = lift_eta_power(&eta, 5)?;
        match report
            .candidates
            .iter_mut()
            .find(|c| c.lifted.solution == lifted.solution)
        {
            Some(existing) => {
                existing.cases.insert(hit.branch.case);
            }
            None => {
                let verdict = classify(&lifted.solution);
                report.candidates.push(Candidate {
                    cases: [hit.branch.case].into(),
                    lifted,
                    verdict,
                });
            }
        }
    }
    report
        .candidates
        .sort_by(|a, b| a.lifted.solution.cmp(&b.lifted.solution));
    Ok(report)
}

/// Solution tuples reachable from the candidate list.
pub fn candidate_solutions(report: &CaseReport) -> Vec<(Solution, CandidateVerdict)> {
    report
        .candidates
        .iter()
        .map(|c| (c.lifted.solution.clone(), c.verdict))
        .collect()
}
