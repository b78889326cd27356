use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Bitset of the quadratic residues modulo a fixed modulus.
///
/// A value whose residue is not in the set cannot be a perfect square. The
/// filter never rejects a square, so it is safe to put in front of any exact
/// root extraction.
#[derive(Debug, Clone)]
pub struct SquareFilter {
    modulus: u32,
    bits: Vec<u64>,
}

impl SquareFilter {
    /// 5760 * 7 * 11: squares mod 2^7, 9, 5, 7 and 11 at once.
    pub const PRIMARY_MODULUS: u32 = 443_520;
    /// 13 * 17 * 19 * 23, coprime to the primary modulus.
    pub const SECONDARY_MODULUS: u32 = 96_577;

    pub fn new(modulus: u32) -> Self {
        assert!(modulus >= 2);
        let mut bits = vec![0u64; (modulus as usize).div_ceil(64)];
        let m = modulus as u64;
        for r in 0..m {
            let s = (r * r % m) as usize;
            bits[s >> 6] |= 1 << (s & 63);
        }
        Self { modulus, bits }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Whether `r` (already reduced) is a square modulo the modulus.
    #[inline(always)]
    pub fn contains(&self, r: u32) -> bool {
        debug_assert!(r < self.modulus);
        (self.bits[(r >> 6) as usize] >> (r & 63)) & 1 == 1
    }

    /// `lhs - rhs` reduced, for residues already below the modulus.
    #[inline(always)]
    pub fn sub_mod(&self, lhs: u32, rhs: u32) -> u32 {
        let d = lhs + self.modulus - rhs;
        if d >= self.modulus {
            d - self.modulus
        } else {
            d
        }
    }

    pub fn reduce_u128(&self, v: u128) -> u32 {
        (v % self.modulus as u128) as u32
    }

    pub fn reduce_big(&self, v: &BigUint) -> u32 {
        (v % self.modulus).to_u32().expect("reduced below modulus")
    }

    /// Fraction of residues that pass.
    pub fn density(&self) -> f64 {
        let count: u32 = self.bits.iter().map(|w| w.count_ones()).sum();
        count as f64 / self.modulus as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn never_rejects_a_square() {
        let f = SquareFilter::new(SquareFilter::PRIMARY_MODULUS);
        for k in 0u128..200_000 {
            assert!(f.contains(f.reduce_u128(k * k)));
        }
    }

    #[test]
    fn contains_exactly_the_residues_of_5760() {
        let f = SquareFilter::new(5760);
        let mut seen = [false; 5760];
        for r in 0..5760u32 {
            seen[(r * r % 5760) as usize] = true;
        }
        for r in 0..5760u32 {
            assert_eq!(f.contains(r), seen[r as usize]);
        }
    }

    #[test]
    fn primary_filter_is_selective() {
        let f = SquareFilter::new(SquareFilter::PRIMARY_MODULUS);
        let g = SquareFilter::new(SquareFilter::SECONDARY_MODULUS);
        assert!(f.density() < 0.02, "{}", f.density());
        assert!(g.density() < 0.09, "{}", g.density());
    }

    #[test]
    fn subtraction_wraps() {
        let f = SquareFilter::new(11);
        assert_eq!(f.sub_mod(3, 5), 9);
        assert_eq!(f.sub_mod(5, 3), 2);
        assert_eq!(f.sub_mod(0, 0), 0);
    }
}
