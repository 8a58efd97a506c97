use thiserror::Error;

use crate::num::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The factorization budget ran out before this composite could be split.
    #[error("factorization budget exhausted on composite cofactor {cofactor}")]
    BudgetExhausted { cofactor: Nat },

    #[error("{g} is not a unit modulo {modulus}")]
    NotCoprime { g: Nat, modulus: Nat },

    #[error("{0} is not in the value set R_(p,delta)")]
    NotInRSet(Nat),

    #[error("concatenation count {k} is not in S; n(k) is not a v-palindrome")]
    NotAVPalindrome { k: u64 },

    /// Two solution columns accepted the same concatenation count.
    #[error("concatenation count {k} is accepted by more than one solution column")]
    AmbiguousType { k: u64 },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
