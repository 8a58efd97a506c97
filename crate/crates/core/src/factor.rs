//! Prime factorization, p-adic valuation and the arithmetic function `v(n)`.
//!
//! Pipeline: trial division by the primes below 10^6, Miller-Rabin (deterministic
//! on 64-bit values, fixed-base strong probable-prime test above), then
//! Pollard-Brent rho with a fresh polynomial on each failure. Every composite
//! split runs under a [`Budget`]; running out yields
//! [`Error::BudgetExhausted`] naming the unsplit cofactor.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::decimal::rho;
use crate::error::{Error, Result};
use crate::num::{nat, pow, Nat, Natural};

const TRIAL_LIMIT: u32 = 1_000_000;
/// Below this, primality is decided by the sieve alone.
const EARLY_PRIME_CHECK: u32 = 1_000;
const MR_BASES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Work allowance for splitting one composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub wall: Duration,
    pub max_iterations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            wall: Duration::from_secs(10),
            max_iterations: 400_000_000,
        }
    }
}

impl Budget {
    pub fn with_seconds(secs: f64) -> Self {
        Budget {
            wall: Duration::from_secs_f64(secs),
            ..Budget::default()
        }
    }
}

struct Meter {
    start: Instant,
    budget: Budget,
    used: u64,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter {
            start: Instant::now(),
            budget,
            used: 0,
        }
    }

    fn tick(&mut self, n: u64) -> bool {
        self.used += n;
        self.used <= self.budget.max_iterations && self.start.elapsed() <= self.budget.wall
    }
}

/// Sorted `(prime, exponent)` pairs. The empty factorization is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Factorization<T = Nat> {
    entries: Vec<(T, u32)>,
}

impl<T: Natural> Factorization<T> {
    /// Collects prime powers, merging repeated primes. Zero exponents are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (T, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<T, u32> = BTreeMap::new();
        for (p, e) in pairs {
            if e > 0 {
                *map.entry(p).or_insert(0) += e;
            }
        }
        Factorization {
            entries: map.into_iter().collect(),
        }
    }

    pub fn entries(&self) -> &[(T, u32)] {
        &self.entries
    }

    pub fn primes(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(p, _)| p)
    }

    pub fn exponent_of(&self, p: &T) -> u32 {
        self.entries
            .binary_search_by(|(q, _)| q.cmp(p))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn product(&self) -> T {
        self.entries
            .iter()
            .fold(T::one(), |acc, (p, e)| acc * pow(p, u64::from(*e)))
    }

    /// Factorization of the product of `self` and `other`.
    pub fn mul(&self, other: &Self) -> Self {
        Self::from_pairs(self.entries.iter().chain(other.entries.iter()).cloned())
    }

    /// `v` of the integer this factorization represents.
    pub fn v(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, (p, e)| {
            if *e >= 2 {
                acc + p.clone() + T::from_u32(*e).unwrap()
            } else {
                acc + p.clone()
            }
        })
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut out = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                out.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

fn strong_probable_prime_big(n: &Nat, a: u64) -> bool {
    let one = Nat::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let a = nat(a) % n;
    if a.is_zero() {
        return true;
    }
    let mut x = a.modpow(&d, n);
    if x == one || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES[..12] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n <= u64::from(TRIAL_LIMIT) {
        return small_primes().binary_search(&(n as u32)).is_ok();
    }
    // The first twelve prime bases are deterministic below 3.3e24.
    MR_BASES[..12]
        .iter()
        .all(|&a| strong_probable_prime_u64(n, a))
}

/// Primality: exact for 64-bit inputs (and, with these bases, below 3.3e24);
/// a 20-base strong probable-prime test beyond.
pub fn is_prime(n: &Nat) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    MR_BASES.iter().all(|&a| strong_probable_prime_big(n, a))
}

fn brent_u64(n: u64, c: u64, meter: &mut Meter) -> Option<Option<u64>> {
    const BATCH: u64 = 128;
    let f = |x: u64| ((mul_mod_u64(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, mut q, mut g) = (2u64 % n, 1u64, 1u64, 1u64);
    let (mut x, mut ys) = (0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        if !meter.tick(r) {
            return None;
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += steps;
            if !meter.tick(steps) {
                return None;
            }
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
            if !meter.tick(1) {
                return None;
            }
        }
    }
    Some(if g == n { None } else { Some(g) })
}

fn brent_big(n: &Nat, c: u64, meter: &mut Meter) -> Option<Option<Nat>> {
    const BATCH: u64 = 128;
    let c = nat(c);
    let f = |x: &Nat| (x * x + &c) % n;
    let diff = |a: &Nat, b: &Nat| if a > b { a - b } else { b - a };
    let (mut y, mut r, mut q, mut g) = (nat(2), 1u64, Nat::one(), Nat::one());
    let (mut x, mut ys) = (Nat::zero(), Nat::zero());
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        if !meter.tick(r) {
            return None;
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += steps;
            if !meter.tick(steps) {
                return None;
            }
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
            if !meter.tick(1) {
                return None;
            }
        }
    }
    Some(if &g == n { None } else { Some(g) })
}

/// A nontrivial divisor of the composite `n`, or `BudgetExhausted`.
fn split_composite(n: &Nat, budget: Budget) -> Result<Nat> {
    let mut meter = Meter::new(budget);
    for c in 1u64.. {
        let found = match n.to_u64() {
            Some(small) => brent_u64(small, c, &mut meter).map(|g| g.map(nat)),
            None => brent_big(n, c, &mut meter),
        };
        match found {
            None => {
                return Err(Error::BudgetExhausted {
                    cofactor: n.clone(),
                })
            }
            Some(Some(d)) => return Ok(d),
            Some(None) => continue,
        }
    }
    unreachable!()
}

fn factor_large(n: Nat, budget: Budget, out: &mut Vec<(Nat, u32)>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(&n) {
        out.push((n, 1));
        return Ok(());
    }
    let d = split_composite(&n, budget)?;
    let rest = &n / &d;
    factor_large(d, budget, out)?;
    factor_large(rest, budget, out)
}

/// Divides out the sieve primes, stopping early once the cofactor is 1, prime,
/// or has no room for another factor below its square root.
fn trial_divide(mut rest: Nat, out: &mut Vec<(Nat, u32)>) -> Nat {
    let mut primality_checked = false;
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        let pp = u64::from(p);
        if let Some(small) = rest.to_u64() {
            if pp * pp > small {
                break;
            }
        }
        if p > EARLY_PRIME_CHECK && !primality_checked {
            primality_checked = true;
            if is_prime(&rest) {
                break;
            }
        }
        if !(&rest % p).is_zero() {
            continue;
        }
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        out.push((nat(pp), e));
        primality_checked = false;
    }
    rest
}

/// Complete factorization of `n >= 1`.
pub fn factorize(n: &Nat, budget: Budget) -> Result<Factorization> {
    factorize_with_hints(n, &[], budget)
}

/// Like [`factorize`], but first divides out the given candidate primes.
///
/// Hints only speed the search up: candidates that are not prime are ignored and
/// the result is a complete factorization whatever the hints were.
pub fn factorize_with_hints(n: &Nat, hints: &[Nat], budget: Budget) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::invalid("cannot factor 0"));
    }
    let mut out = Vec::new();
    let mut rest = n.clone();
    for h in hints {
        if h <= &Nat::one() || !is_prime(h) {
            continue;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(h);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((h.clone(), e));
        }
    }
    let rest = trial_divide(rest, &mut out);
    factor_large(rest, budget, &mut out)?;
    let f = Factorization::from_pairs(out);
    debug_assert_eq!(&f.product(), n);
    Ok(f)
}

fn mobius(n: u64) -> i8 {
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `Phi_d(10)`, evaluated through `prod_{e | d} (10^e - 1)^mu(d/e)`.
pub fn cyclotomic_at_ten(d: u64) -> Nat {
    let ten = nat(10);
    let (mut num, mut den) = (Nat::one(), Nat::one());
    for e in divisors(d) {
        let term = pow(&ten, e) - 1u8;
        match mobius(d / e) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    num / den
}

/// Factorization of `rho(k, L)` through `10^(Lk) - 1 = (10^L - 1) rho(k, L)`:
/// `rho(k, L)` is the product of `Phi_d(10)` over the divisors `d` of `Lk` that
/// do not divide `L`, and each of those pieces is factored on its own.
pub fn factor_rho(k: u64, digit_len: u64, budget: Budget) -> Result<Factorization> {
    if k == 0 || digit_len == 0 {
        return Err(Error::invalid("factor_rho needs k >= 1 and L >= 1"));
    }
    let total = digit_len * k;
    let mut acc = Factorization::default();
    for d in divisors(total) {
        if digit_len.is_multiple_of(d) {
            continue;
        }
        let piece = factorize(&cyclotomic_at_ten(d), budget)?;
        acc = acc.mul(&piece);
    }
    debug_assert_eq!(acc.product(), rho::<Nat>(k, digit_len).unwrap());
    Ok(acc)
}

/// The exponent of the prime `p` in `n != 0`.
pub fn ord_p<T: Natural>(p: &T, n: &T) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::invalid("ord_p is undefined at 0"));
    }
    if *p <= T::one() {
        return Err(Error::invalid(format!("{p} is not a prime")));
    }
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return Ok(e);
        }
        rest = q;
        e += 1;
    }
}

/// `v(n)`: each `p^e` with `e >= 2` contributes `p + e`, each simple prime `p`.
pub fn v_value(n: &Nat, budget: Budget) -> Result<Nat> {
    Ok(factorize(n, budget)?.v())
}
