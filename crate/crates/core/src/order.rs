//! Multiplicative orders and the quantities `h(p^alpha, L)`: the order of `10^L`
//! in the unit group modulo `p^(alpha + ord_p(10^L - 1))`, for primes `p` other
//! than 2 and 5.

use std::collections::HashMap;
use std::sync::RwLock;

use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::decimal::rho;
use crate::error::{Error, Result};
use crate::factor::{factorize, is_prime, ord_p, Budget, Factorization};
use crate::num::{nat, pow, Nat};

/// Above this digit length `ord_p(10^L - 1)` is found by lifting the exponent
/// instead of materializing `10^L - 1`.
const EXPLICIT_VALUATION_MAX_L: u64 = 64;

/// Order of `g` modulo `modulus`, given the factorization of a multiple of it.
fn order_dividing(g: &Nat, modulus: &Nat, multiple: &Factorization) -> Nat {
    let mut order = multiple.product();
    for (q, e) in multiple.entries() {
        for _ in 0..*e {
            let candidate = &order / q;
            if g.modpow(&candidate, modulus).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    order
}

/// Euler's totient of `n`, factored, from the factorization of `n`.
fn totient_factorization(n: &Factorization, budget: Budget) -> Result<Factorization> {
    let mut acc = Factorization::default();
    for (p, e) in n.entries() {
        acc = acc.mul(&Factorization::from_pairs([(p.clone(), e - 1)]));
        acc = acc.mul(&factorize(&(p - 1u8), budget)?);
    }
    Ok(acc)
}

/// Least `e >= 1` with `g^e = 1 (mod modulus)`, by descending from the group
/// exponent over its prime divisors.
pub fn mult_order(g: &Nat, modulus: &Nat, budget: Budget) -> Result<Nat> {
    if modulus < &nat(2) {
        return Err(Error::invalid("modulus must be at least 2"));
    }
    let g = g % modulus;
    if !g.gcd(modulus).is_one() {
        return Err(Error::NotCoprime {
            g,
            modulus: modulus.clone(),
        });
    }
    let group = totient_factorization(&factorize(modulus, budget)?, budget)?;
    Ok(order_dividing(&g, modulus, &group))
}

/// Validated arguments of `h(p^alpha, L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HQuery {
    p: Nat,
    alpha: u32,
    digit_len: u64,
}

impl HQuery {
    pub fn new(p: Nat, alpha: u32, digit_len: u64) -> Result<Self> {
        if alpha == 0 || digit_len == 0 {
            return Err(Error::invalid("h needs alpha >= 1 and L >= 1"));
        }
        if p == nat(2) || p == nat(5) || !is_prime(&p) {
            return Err(Error::invalid(format!(
                "h is defined for primes other than 2 and 5, got {p}"
            )));
        }
        Ok(HQuery {
            p,
            alpha,
            digit_len,
        })
    }

    pub fn p(&self) -> &Nat {
        &self.p
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn digit_len(&self) -> u64 {
        self.digit_len
    }
}

/// `ord_p(10^L - 1)`.
pub fn val_ten_pow_minus_one(p: &Nat, digit_len: u64, budget: Budget) -> Result<u32> {
    if digit_len <= EXPLICIT_VALUATION_MAX_L {
        let value = pow(&nat(10), digit_len) - 1u8;
        return ord_p(p, &value);
    }
    lifted_valuation(p, digit_len, budget)
}

/// `ord_p(10^L - 1)` without forming `10^L - 1`: zero unless the order `d` of
/// 10 mod `p` divides `L`, and then `ord_p(10^d - 1) + ord_p(L / d)` for odd `p`.
fn lifted_valuation(p: &Nat, digit_len: u64, budget: Budget) -> Result<u32> {
    if p == &nat(2) || p == &nat(5) {
        return Ok(0);
    }
    let d = mult_order(&nat(10), p, budget)?;
    let d = match d.to_u64() {
        Some(d) if digit_len.is_multiple_of(d) => d,
        _ => return Ok(0),
    };
    let ten_d = nat(10).modpow(&nat(d), &pow(p, 2));
    let mut base = 1u32;
    if ten_d.is_one() {
        // rare: p^2 | 10^d - 1
        base = 2;
        while nat(10)
            .modpow(&nat(d), &pow(p, u64::from(base) + 1))
            .is_one()
        {
            base += 1;
        }
    }
    Ok(base + ord_p(p, &nat(digit_len / d))?)
}

pub fn h_value(q: &HQuery, budget: Budget) -> Result<Nat> {
    let v = val_ten_pow_minus_one(&q.p, q.digit_len, budget)?;
    let exponent = q.alpha + v;
    let modulus = pow(&q.p, u64::from(exponent));
    let g = nat(10).modpow(&nat(q.digit_len), &modulus);
    let mut group = factorize(&(&q.p - 1u8), budget)?;
    group = group.mul(&Factorization::from_pairs([(q.p.clone(), exponent - 1)]));
    Ok(order_dividing(&g, &modulus, &group))
}

/// Right-hand side of the change-of-length identity
/// `h(p^alpha, Lk) = h(p^(alpha + x), L) / gcd(k, h(p^(alpha + x), L))`
/// with `x = ord_p(rho(k, L))`.
pub fn h_via_lemma2(p: &Nat, alpha: u32, k: u64, digit_len: u64, budget: Budget) -> Result<Nat> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    HQuery::new(p.clone(), alpha, digit_len)?;
    let x = rho_valuation(p, k, digit_len, budget)?;
    let h = h_value(&HQuery::new(p.clone(), alpha + x, digit_len)?, budget)?;
    let g = h.gcd(&nat(k));
    Ok(h / g)
}

/// `ord_p(rho(k, L))`: explicit for small `Lk`, otherwise
/// `ord_p(10^(Lk) - 1) - ord_p(10^L - 1)`.
pub fn rho_valuation(p: &Nat, k: u64, digit_len: u64, budget: Budget) -> Result<u32> {
    if k == 0 || digit_len == 0 {
        return Err(Error::invalid("rho needs k >= 1 and L >= 1"));
    }
    if digit_len * k <= EXPLICIT_VALUATION_MAX_L {
        return ord_p(p, &rho::<Nat>(k, digit_len)?);
    }
    Ok(val_ten_pow_minus_one(p, digit_len * k, budget)?
        - val_ten_pow_minus_one(p, digit_len, budget)?)
}

/// Memo table for `h` values, shared across threads.
#[derive(Debug, Default)]
pub struct OrderCache {
    table: RwLock<HashMap<HQuery, Nat>>,
}

impl OrderCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn h(&self, q: &HQuery, budget: Budget) -> Result<Nat> {
        if let Some(hit) = self.table.read().unwrap().get(q) {
            return Ok(hit.clone());
        }
        let h = h_value(q, budget)?;
        // racing writers store the same value
        self.table.write().unwrap().insert(q.clone(), h.clone());
        Ok(h)
    }

    pub fn len(&self) -> usize {
        self.table.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
