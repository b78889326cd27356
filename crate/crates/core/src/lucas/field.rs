use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::LucasError;

/// The eight values d = 2^i 3^j 11^k (i, j, k in {0, 1}), in field order.
pub const D_LIST: [u32; 8] = [1, 2, 3, 6, 11, 22, 33, 66];

/// The imaginary quadratic field Q(sqrt(-d)) for d in [`D_LIST`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadField {
    d: u32,
}

impl QuadField {
    pub fn new(d: u32) -> Result<Self, LucasError> {
        if D_LIST.contains(&d) {
            Ok(Self { d })
        } else {
            Err(LucasError::UnsupportedField(d))
        }
    }

    pub fn all() -> impl Iterator<Item = QuadField> {
        D_LIST.into_iter().map(|d| QuadField { d })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Whether (u + v sqrt(-d))/2 with u, v odd is integral: d = 3 mod 4.
    pub fn allows_half_coordinates(&self) -> bool {
        self.d % 4 == 3
    }

    pub fn discriminant(&self) -> i64 {
        if self.allows_half_coordinates() {
            -(self.d as i64)
        } else {
            -4 * self.d as i64
        }
    }

    pub fn class_number(&self) -> u32 {
        class_number_by_forms(self.discriminant()).expect("field discriminants are valid")
    }

    pub fn unit_group_order(&self) -> u32 {
        match self.d {
            1 => 4,
            3 => 6,
            _ => 2,
        }
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt(-{}))", self.d)
    }
}

/// (twice_u + twice_v sqrt(-d)) / 2 in the ring of integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticInteger {
    field: QuadField,
    twice_u: BigInt,
    twice_v: BigInt,
}

impl QuadraticInteger {
    pub fn new(
        field: QuadField,
        twice_u: impl Into<BigInt>,
        twice_v: impl Into<BigInt>,
    ) -> Result<Self, LucasError> {
        let (twice_u, twice_v) = (twice_u.into(), twice_v.into());
        let odd = twice_u.is_odd();
        if odd != twice_v.is_odd() || (odd && !field.allows_half_coordinates()) {
            return Err(LucasError::NotIntegral {
                d: field.d,
                twice_u,
                twice_v,
            });
        }
        Ok(Self {
            field,
            twice_u,
            twice_v,
        })
    }

    /// u + v sqrt(-d) with integer coordinates.
    pub fn from_coords(field: QuadField, u: impl Into<BigInt>, v: impl Into<BigInt>) -> Self {
        let two = BigInt::from(2);
        Self {
            field,
            twice_u: u.into() * &two,
            twice_v: v.into() * two,
        }
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn twice_u(&self) -> &BigInt {
        &self.twice_u
    }

    pub fn twice_v(&self) -> &BigInt {
        &self.twice_v
    }

    /// (u, v) when both are integers.
    pub fn integer_coords(&self) -> Option<(BigInt, BigInt)> {
        if self.twice_u.is_odd() {
            return None;
        }
        Some((&self.twice_u / 2, &self.twice_v / 2))
    }

    /// eta + conj(eta) = 2u.
    pub fn trace(&self) -> BigInt {
        self.twice_u.clone()
    }

    /// eta * conj(eta) = u^2 + d v^2.
    pub fn norm(&self) -> BigInt {
        let d = BigInt::from(self.field.d);
        (&self.twice_u * &self.twice_u + d * &self.twice_v * &self.twice_v) / 4
    }

    pub fn conjugate(&self) -> Self {
        Self {
            field: self.field,
            twice_u: self.twice_u.clone(),
            twice_v: -&self.twice_v,
        }
    }

    pub fn is_real(&self) -> bool {
        self.twice_v.is_zero()
    }

    pub fn one(field: QuadField) -> Self {
        Self {
            field,
            twice_u: BigInt::from(2),
            twice_v: BigInt::zero(),
        }
    }

    fn same_field(&self, other: &Self) -> Result<(), LucasError> {
        if self.field != other.field {
            return Err(LucasError::MixedFields(self.field.d, other.field.d));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LucasError> {
        self.same_field(other)?;
        Ok(Self {
            field: self.field,
            twice_u: &self.twice_u + &other.twice_u,
            twice_v: &self.twice_v + &other.twice_v,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LucasError> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = BigInt::from(self.field.d);
        let (a, b) = (&self.twice_u, &self.twice_v);
        let (c, e) = (&other.twice_u, &other.twice_v);
        let re = a * c - d * b * e;
        let im = a * e + b * c;
        // integrality keeps both halvings exact
        debug_assert!(re.is_even() && im.is_even());
        Self {
            field: self.field,
            twice_u: re / 2,
            twice_v: im / 2,
        }
    }

    pub fn pow(&self, mut m: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field);
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            m >>= 1;
        }
        acc
    }

    /// Normalizes (eta, conj eta) up to sign and conjugation: u >= 0, v > 0.
    pub fn pair_representative(&self) -> Self {
        let mut e = self.clone();
        if e.twice_v.is_negative() {
            e = e.conjugate();
        }
        if e.twice_u.is_negative() || (e.twice_u.is_zero() && e.twice_v.is_negative()) {
            e = Self {
                field: e.field,
                twice_u: -e.twice_u,
                twice_v: -e.twice_v,
            };
            e = e.conjugate();
        }
        e
    }
}

impl fmt::Display for QuadraticInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.field.d;
        match self.integer_coords() {
            Some((u, v)) => write!(f, "{u} + {v}*sqrt(-{d})"),
            None => write!(f, "({} + {}*sqrt(-{d}))/2", self.twice_u, self.twice_v),
        }
    }
}

/// Counts reduced primitive forms (a, b, c) with b^2 - 4ac = `disc`.
///
/// Reduced means |b| <= a <= c, with b >= 0 whenever |b| = a or a = c.
pub fn class_number_by_forms(disc: i64) -> Result<u32, LucasError> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(LucasError::InvalidDiscriminant(disc));
    }
    let abs = -disc;
    let mut count = 0;
    let mut a = 1i64;
    while 3 * a * a <= abs {
        for b in -a..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && (-b == a || a == c)) {
                continue;
            }
            if a.gcd(&b).gcd(&c).is_one() {
                count += 1;
            }
        }
        a += 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(d: u32) -> QuadField {
        QuadField::new(d).unwrap()
    }

    #[test]
    fn field_facts() {
        let discs: Vec<i64> = QuadField::all().map(|f| f.discriminant()).collect();
        assert_eq!(discs, vec![-4, -8, -3, -24, -11, -88, -132, -264]);
        let h: Vec<u32> = QuadField::all().map(|f| f.class_number()).collect();
        assert_eq!(h, vec![1, 1, 1, 2, 1, 2, 4, 8]);
        let w: Vec<u32> = QuadField::all().map(|f| f.unit_group_order()).collect();
        assert_eq!(w, vec![4, 2, 6, 2, 2, 2, 2, 2]);
        let half: Vec<u32> = QuadField::all()
            .filter(|f| f.allows_half_coordinates())
            .map(|f| f.d())
            .collect();
        assert_eq!(half, vec![3, 11]);
        assert_eq!(QuadField::new(5), Err(LucasError::UnsupportedField(5)));
    }

    #[test]
    fn class_numbers_of_other_discriminants() {
        // h(-23) = 3, h(-20) = 2, h(-47) = 5, h(-163) = 1
        assert_eq!(class_number_by_forms(-23).unwrap(), 3);
        assert_eq!(class_number_by_forms(-20).unwrap(), 2);
        assert_eq!(class_number_by_forms(-47).unwrap(), 5);
        assert_eq!(class_number_by_forms(-163).unwrap(), 1);
        assert!(class_number_by_forms(-6).is_err());
        assert!(class_number_by_forms(8).is_err());
    }

    #[test]
    fn integrality() {
        assert!(QuadraticInteger::new(field(11), 1, 1).is_ok());
        assert!(QuadraticInteger::new(field(3), 1, -3).is_ok());
        assert!(matches!(
            QuadraticInteger::new(field(2), 1, 1),
            Err(LucasError::NotIntegral { .. })
        ));
        assert!(matches!(
            QuadraticInteger::new(field(11), 2, 1),
            Err(LucasError::NotIntegral { .. })
        ));
    }

    #[test]
    fn arithmetic_examples() {
        let eta = QuadraticInteger::from_coords(field(2), 1, 1);
        assert_eq!(eta.norm(), BigInt::from(3));
        assert_eq!(
            eta.pow(5).integer_coords(),
            Some((BigInt::from(1), BigInt::from(-11)))
        );
        let eta = QuadraticInteger::from_coords(field(2), 1, 2);
        assert_eq!(
            eta.pow(5).integer_coords(),
            Some((BigInt::from(241), BigInt::from(-22)))
        );
        let eta = QuadraticInteger::from_coords(field(6), 3, 1);
        assert_eq!(
            eta.pow(5).integer_coords(),
            Some((BigInt::from(-837), BigInt::from(-99)))
        );

        let half = QuadraticInteger::new(field(11), 1, 1).unwrap();
        assert_eq!(half.norm(), BigInt::from(3));
        // ((1 + sqrt(-11))/2)^2 = (-5 + sqrt(-11))/2
        assert_eq!(
            half.pow(2),
            QuadraticInteger::new(field(11), -5, 1).unwrap()
        );
        assert_eq!(
            half.mul(&half.conjugate()).unwrap(),
            QuadraticInteger::from_coords(field(11), 3, 0)
        );
        assert_eq!(half.pow(0), QuadraticInteger::one(field(11)));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = QuadraticInteger::from_coords(field(2), 1, 1);
        let b = QuadraticInteger::from_coords(field(6), 1, 1);
        assert_eq!(a.mul(&b), Err(LucasError::MixedFields(2, 6)));
        assert_eq!(a.add(&b), Err(LucasError::MixedFields(2, 6)));
    }

    #[test]
    fn representatives() {
        let f = field(2);
        let rep = QuadraticInteger::from_coords(f, 1, 2);
        for (u, v) in [(1, 2), (1, -2), (-1, 2), (-1, -2)] {
            assert_eq!(
                QuadraticInteger::from_coords(f, u, v).pair_representative(),
                rep
            );
        }
    }

    #[test]
    fn display() {
        assert_eq!(
            QuadraticInteger::from_coords(field(2), 1, -2).to_string(),
            "1 + -2*sqrt(-2)"
        );
        assert_eq!(
            QuadraticInteger::new(field(11), 1, 1).unwrap().to_string(),
            "(1 + 1*sqrt(-11))/2"
        );
    }
}
