//! The classification procedure: crucial primes, characteristic solutions,
//! the case table, the constraint table, and the type of a v-palindrome.
//!
//! A run analyzes either `n` itself or, with a concatenation count `k`, the
//! repeated concatenation `n(k)` without factoring it: the crucial primes and
//! the exponent differences carry over from `n`, each `mu` grows by
//! `ord_p(rho(k, L))`, and the `h` values are taken at digit length `Lk`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::decimal::{digit_len, reverse_r};
use crate::error::{Error, Result};
use crate::factor::{factorize, factorize_with_hints, Budget, Factorization};
use crate::num::{lcm_all, nat, Nat, Natural};
use crate::order::{HQuery, OrderCache};

/// Value of `phi(p, delta)` at `alpha`.
pub fn phi(p: &Nat, delta: u64, alpha: u64) -> Result<Nat> {
    if delta == 0 {
        return Err(Error::invalid("phi needs delta >= 1"));
    }
    let delta_n = nat(delta);
    Ok(if delta >= 2 {
        match alpha {
            0 => p + &delta_n,
            1 => delta_n + 1u8,
            _ => delta_n,
        }
    } else if p == &nat(2) {
        if alpha <= 1 {
            nat(2)
        } else {
            nat(1)
        }
    } else {
        match alpha {
            0 => p.clone(),
            1 => nat(2),
            _ => nat(1),
        }
    })
}

/// The image `R(p, delta)` of `phi(p, delta)`.
pub fn r_set(p: &Nat, delta: u64) -> Result<BTreeSet<Nat>> {
    (0..=2).map(|alpha| phi(p, delta, alpha)).collect()
}

/// A preimage `phi^-1(u)`, always one of four shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preimage {
    Zero,
    One,
    ZeroOrOne,
    /// `{2, 3, 4, ...}`
    AtLeastTwo,
}

pub fn phi_preimage(p: &Nat, delta: u64, u: &Nat) -> Result<Preimage> {
    let at = |alpha| phi(p, delta, alpha);
    let (v0, v1, v2) = (at(0)?, at(1)?, at(2)?);
    if u == &v2 {
        Ok(Preimage::AtLeastTwo)
    } else if u == &v0 && u == &v1 {
        Ok(Preimage::ZeroOrOne)
    } else if u == &v0 {
        Ok(Preimage::Zero)
    } else if u == &v1 {
        Ok(Preimage::One)
    } else {
        Err(Error::NotInRSet(u.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    Ii,
    #[serde(rename = "iii")]
    Iii,
    #[serde(rename = "iv")]
    Iv,
    #[serde(rename = "v")]
    V,
    #[serde(rename = "vi")]
    Vi,
    #[serde(rename = "vii")]
    Vii,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::I => "i",
            CaseLabel::Ii => "ii",
            CaseLabel::Iii => "iii",
            CaseLabel::Iv => "iv",
            CaseLabel::V => "v",
            CaseLabel::Vi => "vi",
            CaseLabel::Vii => "vii",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.as_str())
    }
}

/// Which of the seven cases holds for `(p, delta, u, mu)`.
pub fn classify_case(p: &Nat, delta_abs: u64, u: &Nat, mu: u64) -> Result<CaseLabel> {
    use CaseLabel::*;
    use Preimage::*;
    Ok(match (phi_preimage(p, delta_abs, u)?, mu) {
        (Zero, 0) | (One, 1) | (ZeroOrOne, 1) => I,
        (One, 0) => Ii,
        (ZeroOrOne, 0) => Iii,
        (AtLeastTwo, 1) => Iv,
        (AtLeastTwo, 0) => V,
        (AtLeastTwo, _) => Vi,
        _ => Vii,
    })
}

/// `S(A, B)`: the integers divisible by every element of `A` and by none of `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintPair<T = Nat> {
    pub a: BTreeSet<T>,
    pub b: BTreeSet<T>,
}

impl<T: Natural> Default for ConstraintPair<T> {
    fn default() -> Self {
        ConstraintPair {
            a: BTreeSet::new(),
            b: BTreeSet::new(),
        }
    }
}

impl<T: Natural> ConstraintPair<T> {
    pub fn new<A, B>(a: A, b: B) -> Self
    where
        A: IntoIterator<Item = T>,
        B: IntoIterator<Item = T>,
    {
        ConstraintPair {
            a: a.into_iter().collect(),
            b: b.into_iter().collect(),
        }
    }

    pub fn contains(&self, x: &T) -> bool {
        self.a.iter().all(|a| x.is_multiple_of(a)) && self.b.iter().all(|b| !x.is_multiple_of(b))
    }

    /// Coordinatewise union; `S` of the union is the intersection of the two `S` sets.
    pub fn union(&self, other: &Self) -> Self {
        ConstraintPair {
            a: self.a.union(&other.a).cloned().collect(),
            b: self.b.union(&other.b).cloned().collect(),
        }
    }

    /// Least positive member. Every member is a multiple of `lcm(A)`, so the set
    /// is nonempty exactly when `lcm(A)` itself is a member.
    pub fn least_member(&self) -> Option<T> {
        let base = lcm_all(&self.a);
        self.contains(&base).then_some(base)
    }

    pub fn is_empty(&self) -> bool {
        self.least_member().is_none()
    }

    pub fn elements(&self) -> impl Iterator<Item = &T> {
        self.a.iter().chain(self.b.iter())
    }
}

pub fn s_membership<T: Natural>(pair: &ConstraintPair<T>, x: &T) -> bool {
    pair.contains(x)
}

/// Second-table entry for a prime with the given case, `h` supplied by `h(alpha)`.
pub fn second_table_entry_with<F>(p: &Nat, label: CaseLabel, mut h: F) -> Result<ConstraintPair>
where
    F: FnMut(u32) -> Result<Nat>,
{
    use CaseLabel::*;
    let none = || BTreeSet::new();
    let one = |v: Nat| BTreeSet::from([v]);
    let pair = |a, b| ConstraintPair { a, b };
    Ok(match label {
        Vi => pair(none(), none()),
        Vii => pair(none(), one(nat(1))),
        _ if p == &nat(2) || p == &nat(5) => match label {
            I | Iii => pair(none(), none()),
            _ => pair(none(), one(nat(1))),
        },
        I => pair(none(), one(h(1)?)),
        Ii => pair(one(h(1)?), one(h(2)?)),
        Iii => pair(none(), one(h(2)?)),
        Iv => pair(one(h(1)?), none()),
        V => pair(one(h(2)?), none()),
    })
}

pub fn second_table_entry(
    p: &Nat,
    label: CaseLabel,
    digit_len: u64,
    budget: Budget,
) -> Result<ConstraintPair> {
    second_table_entry_with(p, label, |alpha| {
        crate::order::h_value(&HQuery::new(p.clone(), alpha, digit_len)?, budget)
    })
}

/// A prime whose exponents in `n` and `r(n)` differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrucialPrime {
    pub p: Nat,
    pub a: u32,
    pub b: u32,
    pub delta: i64,
    pub mu: u32,
}

impl CrucialPrime {
    pub fn new(p: Nat, a: u32, b: u32) -> Self {
        CrucialPrime {
            p,
            a,
            b,
            delta: i64::from(a) - i64::from(b),
            mu: a.min(b),
        }
    }

    pub fn delta_abs(&self) -> u64 {
        self.delta.unsigned_abs()
    }

    /// The same prime after both exponents grew by `x`.
    pub fn shifted(&self, x: u32) -> Self {
        CrucialPrime::new(self.p.clone(), self.a + x, self.b + x)
    }
}

/// Crucial primes from the factorizations of `n` and `r(n)`.
pub fn crucial_from_factorizations(n: &Factorization, r: &Factorization) -> Vec<CrucialPrime> {
    let primes: BTreeSet<&Nat> = n.primes().chain(r.primes()).collect();
    primes
        .into_iter()
        .map(|p| CrucialPrime::new(p.clone(), n.exponent_of(p), r.exponent_of(p)))
        .filter(|c| c.delta != 0)
        .collect()
}

fn check_procedure_input(n: &Nat) -> Result<Nat> {
    if n.is_zero() {
        return Err(Error::invalid("n must be positive"));
    }
    if n.is_multiple_of(&nat(10)) {
        return Err(Error::invalid(format!("{n} is divisible by 10")));
    }
    let r = reverse_r(n)?;
    if &r == n {
        return Err(Error::invalid(format!("{n} equals its reversal")));
    }
    Ok(r)
}

pub fn crucial_primes(n: &Nat, budget: Budget) -> Result<Vec<CrucialPrime>> {
    let r = check_procedure_input(n)?;
    Ok(crucial_from_factorizations(
        &factorize(n, budget)?,
        &factorize(&r, budget)?,
    ))
}

/// A characteristic solution: one value per crucial prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharSolution(pub Vec<Nat>);

impl CharSolution {
    pub fn values(&self) -> &[Nat] {
        &self.0
    }
}

impl fmt::Display for CharSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, u) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, ")")
    }
}

/// All solutions of `sum sgn(delta_i) u_i = 0` with `u_i` in `R(p_i, |delta_i|)`,
/// in lexicographic order.
pub fn solve_characteristic(crucial: &[CrucialPrime]) -> Result<Vec<CharSolution>> {
    if crucial.is_empty() {
        return Ok(Vec::new());
    }
    let choices: Vec<Vec<Nat>> = crucial
        .iter()
        .map(|c| Ok(r_set(&c.p, c.delta_abs())?.into_iter().collect()))
        .collect::<Result<_>>()?;
    let signs: Vec<bool> = crucial.iter().map(|c| c.delta > 0).collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(crucial.len());
    enumerate(&choices, &signs, &mut current, &BigInt::zero(), &mut out);
    out.sort();
    Ok(out)
}

fn enumerate(
    choices: &[Vec<Nat>],
    positive: &[bool],
    current: &mut Vec<Nat>,
    partial: &BigInt,
    out: &mut Vec<CharSolution>,
) {
    let i = current.len();
    if i == choices.len() {
        if partial.is_zero() {
            out.push(CharSolution(current.clone()));
        }
        return;
    }
    for u in &choices[i] {
        let signed = BigInt::from(u.clone());
        let next = if positive[i] {
            partial + signed
        } else {
            partial - signed
        };
        current.push(u.clone());
        enumerate(choices, positive, current, &next, out);
        current.pop();
    }
}

/// Everything the procedure produces for one analyzed number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcedureResult {
    n: Nat,
    concatenations: u64,
    digit_len: u64,
    crucial: Vec<CrucialPrime>,
    solutions: Vec<CharSolution>,
    first_table: Vec<Vec<CaseLabel>>,
    second_table: Vec<Vec<ConstraintPair>>,
    columns: Vec<ConstraintPair>,
    omega: Nat,
}

impl ProcedureResult {
    /// The base number the run started from.
    pub fn n(&self) -> &Nat {
        &self.n
    }

    /// `k` when this run describes `n(k)`; 1 for `n` itself.
    pub fn concatenations(&self) -> u64 {
        self.concatenations
    }

    /// Digit length of the analyzed number, `L * k`.
    pub fn digit_len(&self) -> u64 {
        self.digit_len
    }

    pub fn crucial(&self) -> &[CrucialPrime] {
        &self.crucial
    }

    pub fn solutions(&self) -> &[CharSolution] {
        &self.solutions
    }

    /// Rows follow the crucial primes, columns the solutions.
    pub fn first_table(&self) -> &[Vec<CaseLabel>] {
        &self.first_table
    }

    pub fn second_table(&self) -> &[Vec<ConstraintPair>] {
        &self.second_table
    }

    /// Per-solution `(A_u, B_u)`, unions down each column of the second table.
    pub fn columns(&self) -> &[ConstraintPair] {
        &self.columns
    }

    /// `lcm` of every constraint element; membership in `S` is periodic with this period.
    pub fn omega(&self) -> &Nat {
        &self.omega
    }

    pub fn case_vii_count(&self) -> usize {
        self.first_table
            .iter()
            .flatten()
            .filter(|&&c| c == CaseLabel::Vii)
            .count()
    }

    /// Indices of the solution columns whose `S` contains `k`.
    pub fn matching_columns(&self, k: &Nat) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(k))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn contains(&self, k: &Nat) -> bool {
        self.columns.iter().any(|c| c.contains(k))
    }

    pub fn is_vpal(&self, k: u64) -> bool {
        self.contains(&nat(k))
    }

    /// The unique solution whose `S` contains `k`.
    pub fn type_of(&self, k: u64) -> Result<&CharSolution> {
        match self.matching_columns(&nat(k)).as_slice() {
            [] => Err(Error::NotAVPalindrome { k }),
            [only] => Ok(&self.solutions[*only]),
            _ => Err(Error::AmbiguousType { k }),
        }
    }

    /// Solutions with a member of `S_u` in `[1, horizon]`. Exact for `horizon >= omega`.
    pub fn nondegenerate_solutions(&self, horizon: &Nat) -> Vec<&CharSolution> {
        self.columns
            .iter()
            .zip(&self.solutions)
            .filter(|(c, _)| c.least_member().is_some_and(|m| &m <= horizon))
            .map(|(_, u)| u)
            .collect()
    }

    pub fn nondegenerate(&self) -> Vec<&CharSolution> {
        self.nondegenerate_solutions(&self.omega)
    }

    /// Least `k` in `S`, `None` when `S` is empty.
    pub fn c(&self) -> Option<Nat> {
        self.columns.iter().filter_map(|c| c.least_member()).min()
    }

    /// Least period of the membership pattern.
    ///
    /// Membership of `k` depends only on `gcd(k, omega)`, and a divisor `d` of
    /// `omega` is a period exactly when `f(g) = f(gcd(g, d))` for every divisor
    /// `g` of `omega`; the least period is found by stripping primes from `omega`.
    pub fn omega0(&self, budget: Budget) -> Result<Nat> {
        if self.omega.is_one() {
            return Ok(Nat::one());
        }
        let hints: Vec<Nat> = self.crucial.iter().map(|c| c.p.clone()).collect();
        let omega_f = factorize_with_hints(&self.omega, &hints, budget)?;
        let divisors = all_divisors(&omega_f);
        let member: BTreeMap<&Nat, bool> = divisors.iter().map(|g| (g, self.contains(g))).collect();
        let is_period = |d: &Nat| divisors.iter().all(|g| member[g] == member[&g.gcd(d)]);
        let mut d = self.omega.clone();
        for (q, e) in omega_f.entries() {
            for _ in 0..*e {
                let smaller = &d / q;
                if is_period(&smaller) {
                    d = smaller;
                } else {
                    break;
                }
            }
        }
        Ok(d)
    }

    pub fn omega_and_c(&self, budget: Budget) -> Result<(Nat, Option<Nat>)> {
        Ok((self.omega0(budget)?, self.c()))
    }
}

fn all_divisors(f: &Factorization) -> Vec<Nat> {
    let mut out = vec![Nat::one()];
    for (p, e) in f.entries() {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        for d in &out {
            let mut m = d.clone();
            for _ in 0..=*e {
                next.push(m.clone());
                m *= p;
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Runs the procedure, sharing an `h` memo table across runs.
#[derive(Debug, Clone, Default)]
pub struct Procedure {
    budget: Budget,
    cache: Arc<OrderCache>,
}

impl Procedure {
    pub fn new(budget: Budget) -> Self {
        Procedure {
            budget,
            cache: Arc::new(OrderCache::new()),
        }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    fn h(&self, p: &Nat, alpha: u32, digit_len: u64) -> Result<Nat> {
        self.cache
            .h(&HQuery::new(p.clone(), alpha, digit_len)?, self.budget)
    }

    /// `ord_p(rho(k, L))` read off the `h` values: the largest `alpha` with
    /// `h(p^alpha, L) | k`. Zero for 2 and 5, which never divide `rho`.
    pub fn concat_shift(&self, p: &Nat, k: u64, digit_len: u64) -> Result<u32> {
        if p == &nat(2) || p == &nat(5) {
            return Ok(0);
        }
        let k = nat(k);
        let mut alpha = 0;
        while k.is_multiple_of(&self.h(p, alpha + 1, digit_len)?) {
            alpha += 1;
        }
        Ok(alpha)
    }

    pub fn run(&self, n: &Nat) -> Result<ProcedureResult> {
        self.run_concat(n, 1)
    }

    /// The procedure for `n(k)`, built from the factorizations of `n` and `r(n)`.
    pub fn run_concat(&self, n: &Nat, k: u64) -> Result<ProcedureResult> {
        if k == 0 {
            return Err(Error::invalid("concatenation count must be positive"));
        }
        let r = check_procedure_input(n)?;
        let base =
            crucial_from_factorizations(&factorize(n, self.budget)?, &factorize(&r, self.budget)?);
        let base_len = digit_len(n)?;
        let crucial = if k == 1 {
            base
        } else {
            base.iter()
                .map(|c| Ok(c.shifted(self.concat_shift(&c.p, k, base_len)?)))
                .collect::<Result<Vec<_>>>()?
        };
        self.tables(n.clone(), k, base_len * k, crucial)
    }

    fn tables(
        &self,
        n: Nat,
        concatenations: u64,
        len: u64,
        crucial: Vec<CrucialPrime>,
    ) -> Result<ProcedureResult> {
        let solutions = solve_characteristic(&crucial)?;
        let mut first_table = Vec::with_capacity(crucial.len());
        let mut second_table = Vec::with_capacity(crucial.len());
        for (i, c) in crucial.iter().enumerate() {
            let mut first_row = Vec::with_capacity(solutions.len());
            let mut second_row = Vec::with_capacity(solutions.len());
            for u in &solutions {
                let label = classify_case(&c.p, c.delta_abs(), &u.0[i], u64::from(c.mu))?;
                first_row.push(label);
                second_row.push(second_table_entry_with(&c.p, label, |alpha| {
                    self.h(&c.p, alpha, len)
                })?);
            }
            first_table.push(first_row);
            second_table.push(second_row);
        }
        let columns: Vec<ConstraintPair> = (0..solutions.len())
            .map(|l| {
                second_table
                    .iter()
                    .fold(ConstraintPair::default(), |acc, row| acc.union(&row[l]))
            })
            .collect();
        let omega = lcm_all(columns.iter().flat_map(|c| c.elements()));
        Ok(ProcedureResult {
            n,
            concatenations,
            digit_len: len,
            crucial,
            solutions,
            first_table,
            second_table,
            columns,
            omega,
        })
    }
}

/// One-shot procedure for `n(k)` (`k = 1` for `n` itself).
pub fn run_procedure(n: &Nat, k: u64, budget: Budget) -> Result<ProcedureResult> {
    Procedure::new(budget).run_concat(n, k)
}

pub fn is_vpal_by_procedure(result: &ProcedureResult, k: u64) -> bool {
    result.is_vpal(k)
}

pub fn type_of(result: &ProcedureResult, k: u64) -> Result<&CharSolution> {
    result.type_of(k)
}

/// Wire form of a [`ProcedureResult`]. Arbitrary-precision integers are decimal
/// strings; sets are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcedureJson {
    pub n: String,
    pub concatenations: u64,
    pub digit_len: u64,
    pub crucial_primes: Vec<CrucialPrimeJson>,
    pub solutions: Vec<Vec<String>>,
    pub first_table: Vec<Vec<CaseLabel>>,
    pub second_table: Vec<Vec<PairJson>>,
    pub columns: Vec<ColumnJson>,
    pub omega: String,
    pub omega0: String,
    pub c: Option<String>,
    pub nondegenerate: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrucialPrimeJson {
    pub p: String,
    pub a: u32,
    pub b: u32,
    pub delta: i64,
    pub mu: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    #[serde(rename = "A")]
    pub a: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnJson {
    pub solution: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<String>,
    pub least_member: Option<String>,
}

fn strings<'a>(it: impl IntoIterator<Item = &'a Nat>) -> Vec<String> {
    it.into_iter().map(|v| v.to_str_radix(10)).collect()
}

fn parse_nat(s: &str) -> Result<Nat> {
    Nat::parse_bytes(s.as_bytes(), 10)
        .filter(|_| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| Error::invalid(format!("not a decimal integer: {s:?}")))
}

fn parse_set(v: &[String]) -> Result<BTreeSet<Nat>> {
    v.iter().map(|s| parse_nat(s)).collect()
}

impl PairJson {
    fn from_pair(p: &ConstraintPair) -> Self {
        PairJson {
            a: strings(&p.a),
            b: strings(&p.b),
        }
    }
}

impl ProcedureJson {
    pub fn from_result(r: &ProcedureResult, budget: Budget) -> Result<Self> {
        let (omega0, c) = r.omega_and_c(budget)?;
        Ok(ProcedureJson {
            n: r.n.to_str_radix(10),
            concatenations: r.concatenations,
            digit_len: r.digit_len,
            crucial_primes: r
                .crucial
                .iter()
                .map(|c| CrucialPrimeJson {
                    p: c.p.to_str_radix(10),
                    a: c.a,
                    b: c.b,
                    delta: c.delta,
                    mu: c.mu,
                })
                .collect(),
            solutions: r.solutions.iter().map(|u| strings(&u.0)).collect(),
            first_table: r.first_table.clone(),
            second_table: r
                .second_table
                .iter()
                .map(|row| row.iter().map(PairJson::from_pair).collect())
                .collect(),
            columns: r
                .columns
                .iter()
                .zip(&r.solutions)
                .map(|(c, u)| ColumnJson {
                    solution: strings(&u.0),
                    a: strings(&c.a),
                    b: strings(&c.b),
                    least_member: c.least_member().map(|m| m.to_str_radix(10)),
                })
                .collect(),
            omega: r.omega.to_str_radix(10),
            omega0: omega0.to_str_radix(10),
            c: c.map(|v| v.to_str_radix(10)),
            nondegenerate: r
                .nondegenerate()
                .into_iter()
                .map(|u| strings(&u.0))
                .collect(),
        })
    }

    /// Rebuilds the result this document was produced from.
    pub fn to_result(&self) -> Result<ProcedureResult> {
        let crucial = self
            .crucial_primes
            .iter()
            .map(|c| {
                let cp = CrucialPrime::new(parse_nat(&c.p)?, c.a, c.b);
                if cp.delta != c.delta || cp.mu != c.mu {
                    return Err(Error::invalid("inconsistent crucial prime record"));
                }
                Ok(cp)
            })
            .collect::<Result<Vec<_>>>()?;
        let solutions = self
            .solutions
            .iter()
            .map(|u| {
                Ok(CharSolution(
                    u.iter().map(|s| parse_nat(s)).collect::<Result<_>>()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let second_table = self
            .second_table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| {
                        Ok(ConstraintPair {
                            a: parse_set(&p.a)?,
                            b: parse_set(&p.b)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let columns = self
            .columns
            .iter()
            .map(|c| {
                Ok(ConstraintPair {
                    a: parse_set(&c.a)?,
                    b: parse_set(&c.b)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProcedureResult {
            n: parse_nat(&self.n)?,
            concatenations: self.concatenations,
            digit_len: self.digit_len,
            crucial,
            solutions,
            first_table: self.first_table.clone(),
            second_table,
            columns,
            omega: parse_nat(&self.omega)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn b() -> Budget {
        Budget::default()
    }

    fn set(v: &[u64]) -> BTreeSet<Nat> {
        v.iter().map(|&x| nat(x)).collect()
    }

    fn sol(v: &[u64]) -> CharSolution {
        CharSolution(v.iter().map(|&x| nat(x)).collect())
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&nat(2), 1, 0).unwrap(), nat(2));
        assert_eq!(phi(&nat(2), 1, 1).unwrap(), nat(2));
        assert_eq!(phi(&nat(2), 1, 7).unwrap(), nat(1));
        assert_eq!(phi(&nat(3), 1, 1).unwrap(), nat(2));
        assert_eq!(phi(&nat(3), 1, 0).unwrap(), nat(3));
        assert_eq!(phi(&nat(3), 2, 5).unwrap(), nat(2));
        assert_eq!(phi(&nat(3), 2, 0).unwrap(), nat(5));
        assert_eq!(phi(&nat(3), 2, 1).unwrap(), nat(3));
        assert!(phi(&nat(3), 0, 1).is_err());
    }

    /// `phi(p, delta)(mu) = v(p^(mu + delta)) - v(p^mu)`, the quantity it stands for.
    #[test]
    fn phi_is_the_v_difference_of_prime_powers() {
        let v_pp = |p: u64, e: u64| match e {
            0 => 0,
            1 => p,
            _ => p + e,
        };
        for p in [2u64, 3, 5, 7, 11, 97] {
            for delta in 1..6 {
                for mu in 0..6 {
                    assert_eq!(
                        phi(&nat(p), delta, mu).unwrap(),
                        nat(v_pp(p, mu + delta) - v_pp(p, mu)),
                        "p={p} delta={delta} mu={mu}"
                    );
                }
            }
        }
    }

    #[test]
    fn r_set_examples() {
        assert_eq!(r_set(&nat(2), 1).unwrap(), set(&[2, 1]));
        assert_eq!(r_set(&nat(7), 1).unwrap(), set(&[7, 2, 1]));
        assert_eq!(r_set(&nat(3), 2).unwrap(), set(&[5, 3, 2]));
        assert_eq!(r_set(&nat(2), 3).unwrap().len(), 3);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_case(&nat(2), 1, &nat(2), 0).unwrap(),
            CaseLabel::Iii
        );
        assert_eq!(
            classify_case(&nat(3), 2, &nat(2), 2).unwrap(),
            CaseLabel::Vi
        );
        assert_eq!(
            classify_case(&nat(13), 1, &nat(2), 0).unwrap(),
            CaseLabel::Ii
        );
        assert_eq!(
            classify_case(&nat(13), 1, &nat(13), 1).unwrap(),
            CaseLabel::Vii
        );
        assert_eq!(classify_case(&nat(2), 1, &nat(2), 1).unwrap(), CaseLabel::I);
        assert!(matches!(
            classify_case(&nat(13), 1, &nat(4), 0),
            Err(Error::NotInRSet(_))
        ));
    }

    /// Brute-force the case from sampled preimages `alpha <= 40` and `mu`.
    #[test]
    fn classification_matches_sampled_preimages() {
        for p in [2u64, 3, 5, 7, 13] {
            for delta in 1..4u64 {
                for u in r_set(&nat(p), delta).unwrap() {
                    let pre: Vec<u64> = (0..40)
                        .filter(|&a| phi(&nat(p), delta, a).unwrap() == u)
                        .collect();
                    for mu in 0..5u64 {
                        let expected = match (pre.as_slice(), mu) {
                            ([0], 0) | ([1], 1) | ([0, 1], 1) => CaseLabel::I,
                            ([1], 0) => CaseLabel::Ii,
                            ([0, 1], 0) => CaseLabel::Iii,
                            ([2, ..], 1) => CaseLabel::Iv,
                            ([2, ..], 0) => CaseLabel::V,
                            ([2, ..], _) => CaseLabel::Vi,
                            _ => CaseLabel::Vii,
                        };
                        assert_eq!(classify_case(&nat(p), delta, &u, mu).unwrap(), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn second_table_examples() {
        let e = second_table_entry(&nat(13), CaseLabel::Ii, 2, b()).unwrap();
        assert_eq!((e.a, e.b), (set(&[3]), set(&[39])));
        let e = second_table_entry(&nat(2), CaseLabel::V, 1, b()).unwrap();
        assert_eq!((e.a, e.b), (set(&[]), set(&[1])));
        for p in [2u64, 3, 5, 7] {
            let e = second_table_entry(&nat(p), CaseLabel::Vi, 1, b()).unwrap();
            assert!(e.a.is_empty() && e.b.is_empty());
            let e = second_table_entry(&nat(p), CaseLabel::Vii, 1, b()).unwrap();
            assert_eq!((e.a, e.b), (set(&[]), set(&[1])));
        }
    }

    #[test]
    fn membership_examples() {
        let pair = ConstraintPair::new(set(&[3, 15]), set(&[39]));
        assert!(s_membership(&pair, &nat(15)));
        assert!(!s_membership(&pair, &nat(39 * 5)));
        let never = ConstraintPair::<u64>::new([], [1]);
        assert!((1..50).all(|x| !never.contains(&x)));
        let always = ConstraintPair::<u64>::default();
        assert!((1..50).all(|x| always.contains(&x)));
        assert_eq!(pair.least_member(), Some(nat(15)));
        assert_eq!(never.least_member(), None);
        let blocked = ConstraintPair::<u64>::new([6], [3]);
        assert!(blocked.is_empty());
    }

    #[test]
    fn crucial_prime_examples() {
        let cp = |p, a, b| CrucialPrime::new(nat(p), a, b);
        assert_eq!(
            crucial_primes(&nat(18), b()).unwrap(),
            vec![cp(2, 1, 0), cp(3, 2, 4)]
        );
        let c = crucial_primes(&nat(18), b()).unwrap();
        assert_eq!((c[1].delta, c[1].mu), (-2, 2));
        assert_eq!(
            crucial_primes(&nat(12), b()).unwrap(),
            vec![cp(2, 2, 0), cp(7, 0, 1)]
        );
        assert_eq!(
            crucial_primes(&nat(13), b()).unwrap(),
            vec![cp(13, 1, 0), cp(31, 0, 1)]
        );
        assert!(crucial_primes(&nat(20), b()).is_err());
        assert!(crucial_primes(&nat(121), b()).is_err());
    }

    #[test]
    fn characteristic_examples() {
        let c18 = crucial_primes(&nat(18), b()).unwrap();
        assert_eq!(solve_characteristic(&c18).unwrap(), vec![sol(&[2, 2])]);
        let c13 = crucial_primes(&nat(13), b()).unwrap();
        assert_eq!(
            solve_characteristic(&c13).unwrap(),
            vec![sol(&[1, 1]), sol(&[2, 2])]
        );
        let lone = [CrucialPrime::new(nat(7), 1, 0)];
        assert!(solve_characteristic(&lone).unwrap().is_empty());
    }

    #[test]
    fn procedure_on_18() {
        let r = run_procedure(&nat(18), 1, b()).unwrap();
        assert_eq!(r.solutions(), &[sol(&[2, 2])]);
        assert_eq!(
            r.first_table(),
            &[vec![CaseLabel::Iii], vec![CaseLabel::Vi]]
        );
        assert!(r
            .second_table()
            .iter()
            .all(|row| row[0] == ConstraintPair::default()));
        assert_eq!(r.omega(), &nat(1));
        assert!((1..30).all(|k| r.is_vpal(k)));
        assert_eq!(r.type_of(1).unwrap(), &sol(&[2, 2]));
        assert_eq!(r.type_of(7).unwrap(), &sol(&[2, 2]));
        assert_eq!(r.omega_and_c(b()).unwrap(), (nat(1), Some(nat(1))));
        assert_eq!(r.nondegenerate(), vec![&sol(&[2, 2])]);
    }

    #[test]
    fn procedure_on_12() {
        let r = run_procedure(&nat(12), 1, b()).unwrap();
        assert_eq!(r.solutions(), &[sol(&[2, 2])]);
        assert_eq!(r.first_table(), &[vec![CaseLabel::V], vec![CaseLabel::Ii]]);
        assert_eq!(r.second_table()[0][0], ConstraintPair::new([], [nat(1)]));
        assert!((1..30).all(|k| !r.is_vpal(k)));
        assert!(matches!(r.type_of(3), Err(Error::NotAVPalindrome { k: 3 })));
        assert!(r.nondegenerate().is_empty());
        assert_eq!(r.omega_and_c(b()).unwrap(), (nat(1), None));
    }

    #[test]
    fn procedure_on_13() {
        let r = run_procedure(&nat(13), 1, b()).unwrap();
        assert_eq!(r.solutions(), &[sol(&[1, 1]), sol(&[2, 2])]);
        let col = &r.columns()[1];
        assert_eq!(col.a, set(&[3, 15]));
        assert_eq!(col.b, set(&[39, 465]));
        assert!(r.is_vpal(15));
        assert_eq!(r.type_of(15).unwrap(), &sol(&[2, 2]));
        assert_eq!(r.c(), Some(nat(15)));
        assert!(r.nondegenerate().contains(&&sol(&[2, 2])));
        assert_eq!(r.columns()[0].a, set(&[39, 465]));
    }

    #[test]
    fn empty_solution_set_gives_trivial_period() {
        // 19 = 19, 91 = 7 * 13: R values {19,2,1} vs {7,2,1}+{13,2,1} still solve;
        // pick a number with a single crucial prime instead: 1 -> none exist with n != r(n).
        let lone = [CrucialPrime::new(nat(7), 1, 0)];
        let r = Procedure::new(b())
            .tables(nat(7), 1, 1, lone.to_vec())
            .unwrap();
        assert!(r.solutions().is_empty());
        assert_eq!(r.omega(), &nat(1));
        assert_eq!(r.omega_and_c(b()).unwrap(), (nat(1), None));
    }

    #[test]
    fn omega0_matches_scan_of_two_periods() {
        let proc = Procedure::new(b());
        let mut checked = 0;
        for n in 10u64..400 {
            let Ok(r) = proc.run(&nat(n)) else { continue };
            let omega = r.omega().to_u64().unwrap();
            if omega > 2_000 {
                continue;
            }
            let pattern: Vec<bool> = (1..=2 * omega).map(|k| r.is_vpal(k)).collect();
            let scanned = (1..=omega)
                .filter(|d| omega % d == 0)
                .find(|&d| {
                    (0..pattern.len() - d as usize).all(|i| pattern[i] == pattern[i + d as usize])
                })
                .unwrap();
            assert_eq!(r.omega0(b()).unwrap(), nat(scanned), "n={n}");
            let first = pattern.iter().position(|&x| x).map(|i| nat(i as u64 + 1));
            assert_eq!(r.c(), first, "n={n}");
            checked += 1;
        }
        assert!(checked > 50, "only {checked} numbers had a small omega");
    }

    #[test]
    fn json_round_trip() {
        for n in [18u64, 12, 13, 4513, 1298] {
            let r = run_procedure(&nat(n), 1, b()).unwrap();
            let doc = ProcedureJson::from_result(&r, b()).unwrap();
            let text = serde_json::to_string(&doc).unwrap();
            let back: ProcedureJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_result().unwrap(), r);
        }
    }
}
