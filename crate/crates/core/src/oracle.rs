//! Exhaustive search for solutions with bounded y.
//!
//! The outer loop runs over y, the inner loop over every S-unit C below y^n.
//! Each difference y^n - C goes through two residue filters before the exact
//! square root. Triples whose C shares a prime with y are dropped up front:
//! for x^2 + C = y^n, gcd(x, y) = 1 holds exactly when gcd(C, y) = 1.
//!
//! Work is split into disjoint y-ranges and the merged output is sorted, so
//! the result does not depend on the worker count.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    integer_sqrt_exact, isqrt_exact_u128, pow_mod, SUnitExponents, SquareFilter, S_PRIMES,
};
use crate::model::{check_solution, Solution, Verdict};

/// y^n must stay below this for the 128-bit kernel.
const FAST_PATH_LIMIT: u128 = 1 << 126;

/// Number of y-chunks handed out per worker.
const CHUNKS_PER_WORKER: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exponent n must be at least 3, got {0}")]
    ExponentTooSmall(u32),
    #[error("y_max must be at least 2, got {0}")]
    BoundTooSmall(u64),
    #[error("worker count must be positive")]
    NoWorkers,
    #[error("prime list must be a non-empty increasing subset of [2, 3, 11], got {0:?}")]
    UnsupportedPrimes(Vec<u64>),
    #[error("claimed rows mix exponents: run has n = {run}, row has n = {row}")]
    MixedExponent { run: u32, row: u32 },
    #[error("oracle bound y_max = {y_max} does not dominate claimed y = {claimed}")]
    BoundNotDominating { y_max: u64, claimed: BigUint },
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: u32,
    pub y_max: u64,
    pub primes: Vec<u64>,
    pub require_bc_positive: bool,
    pub workers: usize,
}

impl SearchConfig {
    pub fn new(n: u32, y_max: u64) -> Self {
        Self {
            n,
            y_max,
            primes: S_PRIMES.to_vec(),
            require_bc_positive: false,
            workers: default_workers(),
        }
    }

    pub fn bc_positive(mut self, on: bool) -> Self {
        self.require_bc_positive = on;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn primes(mut self, primes: &[u64]) -> Self {
        self.primes = primes.to_vec();
        self
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n < 3 {
            return Err(OracleError::ExponentTooSmall(self.n));
        }
        if self.y_max < 2 {
            return Err(OracleError::BoundTooSmall(self.y_max));
        }
        if self.workers == 0 {
            return Err(OracleError::NoWorkers);
        }
        let subset = !self.primes.is_empty()
            && self.primes.windows(2).all(|w| w[0] < w[1])
            && self.primes.iter().all(|p| S_PRIMES.contains(p));
        if !subset {
            return Err(OracleError::UnsupportedPrimes(self.primes.clone()));
        }
        Ok(())
    }

    /// y_max^n, the exclusive upper bound on C.
    pub fn power_bound(&self) -> BigUint {
        BigUint::from(self.y_max).pow(self.n)
    }

    /// Whether every y^n in range fits the 128-bit kernel.
    pub fn uses_fast_path(&self) -> bool {
        (self.y_max as u128)
            .checked_pow(self.n)
            .is_some_and(|v| v < FAST_PATH_LIMIT)
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// (y, C) pairs examined.
    pub candidates: u64,
    /// Pairs that reached the exact square root.
    pub exact_tests: u64,
}

impl std::ops::Add for SearchStats {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            candidates: self.candidates + rhs.candidates,
            exact_tests: self.exact_tests + rhs.exact_tests,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRun {
    pub config: SearchConfig,
    /// Sorted by (y, a, b, c).
    pub solutions: Vec<Solution>,
    pub stats: SearchStats,
    pub fast_path: bool,
}

/// Every S-unit C = 2^a 3^b 11^c below a bound, ascending.
fn s_units_below(
    bound: &BigUint,
    primes: &[u64],
    bc_positive: bool,
) -> Vec<(BigUint, SUnitExponents)> {
    let max_exp = |p: u64| if primes.contains(&p) { u32::MAX } else { 0 };
    let mut out = Vec::new();
    let mut pa = BigUint::one();
    for a in 0..=max_exp(2) {
        if &pa >= bound {
            break;
        }
        let mut pab = pa.clone();
        for b in 0..=max_exp(3) {
            if &pab >= bound {
                break;
            }
            let mut pabc = pab.clone();
            for c in 0..=max_exp(11) {
                if &pabc >= bound {
                    break;
                }
                let e = SUnitExponents::new(a, b, c);
                if !bc_positive || e.bc_positive() {
                    out.push((pabc.clone(), e));
                }
                pabc *= 11u32;
            }
            pab *= 3u32;
        }
        pa *= 2u32;
    }
    out.sort();
    out
}

/// Index 0..8 recording which of 2, 3, 11 divide y.
#[inline]
fn divisibility_class(y: u64) -> usize {
    (y % 2 == 0) as usize | ((y % 3 == 0) as usize) << 1 | ((y % 11 == 0) as usize) << 2
}

fn coprime_to_class(e: SUnitExponents, class: usize) -> bool {
    !((class & 1 != 0 && e.a > 0) || (class & 2 != 0 && e.b > 0) || (class & 4 != 0 && e.c > 0))
}

/// One list of candidate C values in struct-of-arrays layout.
struct Triples<V> {
    values: Vec<V>,
    primary: Vec<u32>,
    secondary: Vec<u32>,
    exps: Vec<SUnitExponents>,
}

struct Filters {
    primary: SquareFilter,
    secondary: SquareFilter,
}

impl Filters {
    fn new() -> Self {
        Self {
            primary: SquareFilter::new(SquareFilter::PRIMARY_MODULUS),
            secondary: SquareFilter::new(SquareFilter::SECONDARY_MODULUS),
        }
    }

    fn y_residues(&self, y: u64, n: u32) -> (u32, u32) {
        let r = |m: u32| pow_mod(y, n as u64, m as u64) as u32;
        (r(self.primary.modulus()), r(self.secondary.modulus()))
    }
}

fn build_classes<V: Clone>(
    units: &[(BigUint, SUnitExponents)],
    filters: &Filters,
    convert: impl Fn(&BigUint) -> V,
) -> Vec<Triples<V>> {
    (0..8)
        .map(|class| {
            let mut t = Triples {
                values: Vec::new(),
                primary: Vec::new(),
                secondary: Vec::new(),
                exps: Vec::new(),
            };
            for (value, e) in units.iter().filter(|(_, e)| coprime_to_class(*e, class)) {
                t.values.push(convert(value));
                t.primary.push(filters.primary.reduce_big(value));
                t.secondary.push(filters.secondary.reduce_big(value));
                t.exps.push(*e);
            }
            t
        })
        .collect()
}

/// Shared residue-filter loop; `exact` is called on survivors with the index.
#[inline(always)]
fn scan<V>(
    t: &Triples<V>,
    end: usize,
    (ry1, ry2): (u32, u32),
    filters: &Filters,
    mut exact: impl FnMut(usize),
) -> u64 {
    let mut survivors = 0;
    for i in 0..end {
        if filters
            .primary
            .contains(filters.primary.sub_mod(ry1, t.primary[i]))
            && filters
                .secondary
                .contains(filters.secondary.sub_mod(ry2, t.secondary[i]))
        {
            survivors += 1;
            exact(i);
        }
    }
    survivors
}

fn search_fast(
    cfg: &SearchConfig,
    ys: (u64, u64),
    classes: &[Triples<u128>],
    filters: &Filters,
) -> (Vec<Solution>, SearchStats) {
    let mut found = Vec::new();
    let mut stats = SearchStats::default();
    for y in ys.0..=ys.1 {
        let t = &classes[divisibility_class(y)];
        let yn = (y as u128).pow(cfg.n);
        let end = t.values.partition_point(|&c| c < yn);
        stats.candidates += end as u64;
        stats.exact_tests += scan(t, end, filters.y_residues(y, cfg.n), filters, |i| {
            if let Some(x) = isqrt_exact_u128(yn - t.values[i]) {
                found.push(Solution {
                    x: BigUint::from(x),
                    y: BigUint::from(y),
                    exp: t.exps[i],
                    n: cfg.n,
                });
            }
        });
    }
    (found, stats)
}

fn search_big(
    cfg: &SearchConfig,
    ys: (u64, u64),
    classes: &[Triples<BigUint>],
    filters: &Filters,
) -> (Vec<Solution>, SearchStats) {
    let mut found = Vec::new();
    let mut stats = SearchStats::default();
    for y in ys.0..=ys.1 {
        let t = &classes[divisibility_class(y)];
        let yn = BigUint::from(y).pow(cfg.n);
        let end = t.values.partition_point(|c| c < &yn);
        stats.candidates += end as u64;
        stats.exact_tests += scan(t, end, filters.y_residues(y, cfg.n), filters, |i| {
            if let Some(x) = integer_sqrt_exact(&(&yn - &t.values[i])) {
                found.push(Solution {
                    x,
                    y: BigUint::from(y),
                    exp: t.exps[i],
                    n: cfg.n,
                });
            }
        });
    }
    (found, stats)
}

fn y_chunks(y_max: u64, pieces: u64) -> Vec<(u64, u64)> {
    let span = y_max - 1;
    let step = span.div_ceil(pieces.max(1)).max(1);
    (0..)
        .map(|k| 2 + k * step)
        .take_while(|&lo| lo <= y_max)
        .map(|lo| (lo, (lo + step - 1).min(y_max)))
        .collect()
}

/// All solutions with 2 <= y <= y_max for the configured n, sorted by
/// (y, a, b, c).
pub fn enumerate_solutions(cfg: &SearchConfig) -> Result<OracleRun, OracleError> {
    run_search(cfg, cfg.uses_fast_path())
}

fn run_search(cfg: &SearchConfig, fast_path: bool) -> Result<OracleRun, OracleError> {
    cfg.validate()?;
    assert!(
        !fast_path || cfg.uses_fast_path(),
        "fast path requested beyond 2^126"
    );
    let units = s_units_below(&cfg.power_bound(), &cfg.primes, cfg.require_bc_positive);
    let filters = Filters::new();
    let chunks = y_chunks(cfg.y_max, cfg.workers as u64 * CHUNKS_PER_WORKER);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| OracleError::Pool(e.to_string()))?;

    let parts: Vec<(Vec<Solution>, SearchStats)> = if fast_path {
        let classes = build_classes(&units, &filters, |v| v.to_u128().expect("below 2^126"));
        pool.install(|| {
            chunks
                .par_iter()
                .map(|&ys| search_fast(cfg, ys, &classes, &filters))
                .collect()
        })
    } else {
        let classes = build_classes(&units, &filters, Clone::clone);
        pool.install(|| {
            chunks
                .par_iter()
                .map(|&ys| search_big(cfg, ys, &classes, &filters))
                .collect()
        })
    };

    let mut stats = SearchStats::default();
    let mut solutions = Vec::new();
    for (found, s) in parts {
        stats = stats + s;
        solutions.extend(found);
    }
    for s in &solutions {
        let verdict = check_solution(s);
        assert_eq!(verdict, Verdict::Valid, "oracle emitted {s}");
    }
    solutions.sort();
    Ok(OracleRun {
        config: cfg.clone(),
        solutions,
        stats,
        fast_path,
    })
}

/// True when every prime factor of n is 2 or 3.
pub fn is_23_smooth(mut n: u32) -> bool {
    if n == 0 {
        return false;
    }
    while n % 2 == 0 {
        n /= 2;
    }
    while n % 3 == 0 {
        n /= 3;
    }
    n == 1
}

/// Solution counts for every {2,3}-smooth n in [3, n_max].
pub fn smooth_exponent_scan(
    n_max: u32,
    y_max: u64,
    workers: usize,
) -> Result<BTreeMap<u32, OracleRun>, OracleError> {
    if n_max < 3 {
        return Err(OracleError::ExponentTooSmall(n_max));
    }
    (3..=n_max)
        .filter(|&n| is_23_smooth(n))
        .map(|n| {
            Ok((
                n,
                enumerate_solutions(&SearchConfig::new(n, y_max).workers(workers))?,
            ))
        })
        .collect()
}

/// Differences between a claimed solution list and an oracle run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableDiff {
    pub claimed_not_found: Vec<Solution>,
    pub found_not_claimed: Vec<Solution>,
    pub duplicate_claims: Vec<Solution>,
}

impl TableDiff {
    pub fn is_empty(&self) -> bool {
        self.claimed_not_found.is_empty()
            && self.found_not_claimed.is_empty()
            && self.duplicate_claims.is_empty()
    }
}

/// Compares claimed rows against an oracle run whose bound covers them.
pub fn verify_table(claimed: &[Solution], run: &OracleRun) -> Result<TableDiff, OracleError> {
    let n = run.config.n;
    if let Some(row) = claimed.iter().find(|s| s.n != n) {
        return Err(OracleError::MixedExponent { run: n, row: row.n });
    }
    if let Some(max_y) = claimed.iter().map(|s| &s.y).max() {
        if *max_y > BigUint::from(run.config.y_max) {
            return Err(OracleError::BoundNotDominating {
                y_max: run.config.y_max,
                claimed: max_y.clone(),
            });
        }
    }
    let mut seen = BTreeSet::new();
    let mut duplicates = BTreeSet::new();
    for s in claimed {
        if !seen.insert(s.clone()) {
            duplicates.insert(s.clone());
        }
    }
    let found: BTreeSet<Solution> = run.solutions.iter().cloned().collect();
    Ok(TableDiff {
        claimed_not_found: seen.difference(&found).cloned().collect(),
        found_not_claimed: found.difference(&seen).cloned().collect(),
        duplicate_claims: duplicates.into_iter().collect(),
    })
}
