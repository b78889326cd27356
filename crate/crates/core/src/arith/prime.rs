//! Deterministic primality and factorization for 64-bit integers.
//!
//! Miller-Rabin with the first twelve prime bases is exact for every `u64`.
//! Factorization is trial division by small primes followed by Brent's
//! variant of Pollard rho on whatever remains.

use std::cmp::max;

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Cutoff for the trial-division stage of [`factor_u64`].
const TRIAL_BOUND: u64 = 1 << 12;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact primality test for any 64-bit input.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Finds a nontrivial factor of an odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    // Constants c = 1, 2, ... are tried in turn; some c always succeeds.
    for c in 1..n {
        let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..std::cmp::min(128, r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("no factor found for composite {n}")
}

fn push_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let f = pollard_brent(n);
    push_factors(f, out);
    push_factors(n / f, out);
}

/// Prime factorization with multiplicity, ascending. `factor_u64(1)` is empty.
pub fn factor_u64(mut n: u64) -> Vec<u64> {
    assert!(n > 0, "cannot factor zero");
    let mut out = Vec::new();
    while n % 2 == 0 {
        out.push(2);
        n /= 2;
    }
    let mut p = 3;
    while p < TRIAL_BOUND && p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 2;
    }
    if n > 1 {
        if p * p > n {
            out.push(n);
        } else {
            push_factors(n, &mut out);
        }
    }
    out.sort_unstable();
    out
}

pub fn largest_prime_factor_u64(n: u64) -> u64 {
    factor_u64(n).into_iter().fold(1, max)
}

/// Odd primes up to and including `bound`, by sieve.
pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let bound = bound as usize;
    let mut composite = vec![false; bound + 1];
    let mut primes = Vec::new();
    for i in 2..=bound {
        if composite[i] {
            continue;
        }
        if i > 2 {
            primes.push(i as u64);
        }
        let mut j = i * i;
        while j <= bound {
            composite[j] = true;
            j += i;
        }
    }
    primes
}
