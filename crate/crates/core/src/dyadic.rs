//! Exact non-negative dyadic rationals `p / 2^k`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `numerator / 2^exponent`, kept in lowest terms: the numerator is odd, or
/// the value is zero with exponent zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigUint,
    exponent: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            numerator: BigUint::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            numerator: BigUint::one(),
            exponent: 0,
        }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic {
            numerator: BigUint::one(),
            exponent: k,
        }
    }

    pub fn new(numerator: BigUint, exponent: u32) -> Self {
        let mut d = Dyadic {
            numerator,
            exponent,
        };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        match self.numerator.trailing_zeros() {
            None => self.exponent = 0,
            Some(tz) => {
                let shift = tz.min(u64::from(self.exponent));
                self.numerator >>= shift;
                self.exponent -= shift as u32;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    /// The power of two in the reduced denominator.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::one() << self.exponent
    }

    fn scaled_to(&self, exponent: u32) -> BigUint {
        &self.numerator << (exponent - self.exponent)
    }

    /// The first `k` bits after the binary point. Exact, since the
    /// expansion terminates after `exponent` bits.
    pub fn binary_expansion(&self, k: usize) -> String {
        (1..=k)
            .map(|i| {
                let bit = i <= self.exponent as usize
                    && self.numerator.bit(u64::from(self.exponent) - i as u64);
                if bit {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(self.denominator()),
        )
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exponent.max(rhs.exponent);
        Dyadic::new(self.scaled_to(e) + rhs.scaled_to(e), e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.scaled_to(e).cmp(&other.scaled_to(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Written as `p/q` in lowest terms (`0/1` for zero).
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_reduce() {
        let half = Dyadic::pow2_neg(1);
        let v = &half + &Dyadic::pow2_neg(1);
        assert_eq!(v, Dyadic::one());
        assert_eq!(v.to_string(), "1/1");
        let v = &Dyadic::pow2_neg(1) + &Dyadic::pow2_neg(5);
        assert_eq!(v.to_string(), "17/32");
        assert_eq!(Dyadic::zero().to_string(), "0/1");
        assert_eq!(Dyadic::new(BigUint::from(12u32), 4).to_string(), "3/4");
    }

    #[test]
    fn expansion() {
        let v = Dyadic::new(BigUint::from(19u32), 5);
        assert_eq!(v.binary_expansion(5), "10011");
        assert_eq!(v.binary_expansion(7), "1001100");
        assert_eq!(Dyadic::pow2_neg(1).binary_expansion(5), "10000");
        assert_eq!(Dyadic::zero().binary_expansion(3), "000");
    }

    #[test]
    fn ordering() {
        assert!(Dyadic::pow2_neg(3) < Dyadic::pow2_neg(2));
        assert!(Dyadic::zero() < Dyadic::pow2_neg(60));
        assert_eq!(
            Dyadic::new(BigUint::from(2u32), 2).cmp(&Dyadic::pow2_neg(1)),
            Ordering::Equal
        );
    }
}
