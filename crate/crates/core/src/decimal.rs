//! Base-10 digit views, the reversal `r(n)`, the numbers `rho(k, L)` and
//! repeated concatenation `n(k) = n * rho(k, L)`.

use crate::error::{Error, Result};
use crate::num::{pow, Natural};

/// Decimal digits of a positive integer, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digits(Vec<u8>);

impl Digits {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn value<T: Natural>(&self) -> T {
        let ten = T::ten();
        self.0.iter().rev().fold(T::zero(), |acc, &d| {
            acc * ten.clone() + T::from_u8(d).unwrap()
        })
    }
}

fn require_positive<T: Natural>(n: &T) -> Result<()> {
    if n.is_zero() {
        return Err(Error::invalid("expected a positive integer, got 0"));
    }
    Ok(())
}

pub fn digits_of<T: Natural>(n: &T) -> Result<Digits> {
    require_positive(n)?;
    let ten = T::ten();
    let mut out = Vec::new();
    let mut rest = n.clone();
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(&ten);
        out.push(r.to_u8().unwrap());
        rest = q;
    }
    Ok(Digits(out))
}

/// Number of decimal digits `L` of `n >= 1`.
pub fn digit_len<T: Natural>(n: &T) -> Result<u64> {
    Ok(digits_of(n)?.len() as u64)
}

pub fn reverse_r<T: Natural>(n: &T) -> Result<T> {
    let d = digits_of(n)?;
    let ten = T::ten();
    Ok(d.as_slice().iter().fold(T::zero(), |acc, &x| {
        acc * ten.clone() + T::from_u8(x).unwrap()
    }))
}

/// `rho(k, L) = (10^(Lk) - 1) / (10^L - 1)`: `k` ones separated by `L - 1` zeros.
pub fn rho<T: Natural>(k: u64, digit_len: u64) -> Result<T> {
    if k == 0 || digit_len == 0 {
        return Err(Error::invalid("rho needs k >= 1 and L >= 1"));
    }
    let ten = T::ten();
    let block = pow(&ten, digit_len);
    let full = pow(&block, k);
    Ok((full - T::one()) / (block - T::one()))
}

/// `n(k)`: the decimal string of `n` written `k` times.
pub fn concat_nk<T: Natural>(n: &T, k: u64) -> Result<T> {
    let len = digit_len(n)?;
    Ok(n.clone() * rho::<T>(k, len)?)
}
