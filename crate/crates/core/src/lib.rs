//! v-palindromes and repeated decimal concatenation.
//!
//! `v(n)` sums `p + e` over the prime powers `p^e` (`e >= 2`) exactly dividing
//! `n`, and `p` over the primes dividing `n` exactly once. `n` is a
//! v-palindrome when `10 ∤ n`, `n` differs from its digit reversal `r(n)`, and
//! `v(n) = v(r(n))`. For the repeated concatenations `n(k)` the
//! [`procedure`] module decides v-palindromicity from a finite table of
//! divisibility constraints on `k` and assigns each v-palindrome its type;
//! [`oracle`] re-derives the same facts by factoring.

pub mod decimal;
pub mod error;
pub mod factor;
pub mod num;
pub mod oracle;
pub mod order;
pub mod procedure;

pub use error::{Error, Result};
pub use factor::Budget;
pub use num::{Nat, Natural};

/// Factorization of an arbitrary-precision integer.
pub type Factorization = factor::Factorization<Nat>;
/// Factorization over machine words.
pub type WordFactorization = factor::Factorization<u64>;
/// Constraint pair `(A, B)` over arbitrary-precision moduli.
pub type ConstraintPair = procedure::ConstraintPair<Nat>;
/// Constraint pair over machine words.
pub type WordConstraintPair = procedure::ConstraintPair<u64>;
