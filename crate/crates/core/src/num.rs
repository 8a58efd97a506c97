//! Integer scalar abstraction shared by the digit, valuation and constraint code.
//!
//! Everything that only needs ring arithmetic on non-negative integers is
//! written against [`Natural`], so it runs on machine words (`u64`, `u128`)
//! as well as on [`BigUint`]. The factorization and order machinery works on
//! [`Nat`] directly.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{FromPrimitive, ToPrimitive};

/// Arbitrary-precision natural number used wherever values can outgrow a word.
pub type Nat = BigUint;

/// A non-negative integer scalar.
pub trait Natural:
    Integer + Clone + Ord + Hash + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync
{
    fn from_u64_lossless(v: u64) -> Self {
        Self::from_u64(v).expect("u64 value does not fit the scalar type")
    }

    fn ten() -> Self {
        Self::from_u64_lossless(10)
    }
}

impl<T> Natural for T where
    T: Integer + Clone + Ord + Hash + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync
{
}

/// `base^exp` by repeated squaring.
pub fn pow<T: Natural>(base: &T, mut exp: u64) -> T {
    let mut acc = T::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

/// Least common multiple of an iterator of values; the empty lcm is 1.
pub fn lcm_all<'a, T: Natural + 'a, I: IntoIterator<Item = &'a T>>(values: I) -> T {
    values.into_iter().fold(T::one(), |acc, v| acc.lcm(v))
}

pub(crate) fn nat(v: u64) -> Nat {
    Nat::from(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_matches_across_scalars() {
        assert_eq!(pow(&10u64, 6), 1_000_000);
        assert_eq!(pow(&10u128, 30), 10u128.pow(30));
        assert_eq!(pow(&nat(7), 0), nat(1));
        assert_eq!(pow(&nat(10), 40).to_string().len(), 41);
    }

    #[test]
    fn lcm_of_nothing_is_one() {
        let empty: Vec<u64> = vec![];
        assert_eq!(lcm_all(&empty), 1);
        assert_eq!(lcm_all(&[4u64, 6, 10]), 60);
    }
}
