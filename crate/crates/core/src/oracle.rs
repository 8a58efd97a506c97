//! Brute-force verification by factoring.
//!
//! Nothing here reads the constraint tables to reach a verdict: membership is
//! decided from `v` of the actual numbers, and the procedure's answers are only
//! compared against it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;
use std::time::Instant;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimal::{concat_nk, digit_len, reverse_r, rho};
use crate::error::{Error, Result};
use crate::factor::{factor_rho, factorize, factorize_with_hints, ord_p, Budget, Factorization};
use crate::num::{nat, pow, Nat};
use crate::order::{h_value, h_via_lemma2, HQuery};
use crate::procedure::{ConstraintPair, Procedure, ProcedureResult};

/// Digit length up to which `n(k)` and its reversal are factored outright.
pub const DEFAULT_FULL_DIGIT_CAP: u64 = 48;

/// The v-palindrome predicate evaluated literally: `10 ∤ n`, `n != r(n)` and
/// `v(n) = v(r(n))`.
pub fn oracle_is_vpal(n: &Nat, budget: Budget) -> Result<bool> {
    if n.is_zero() {
        return Err(Error::invalid("n must be positive"));
    }
    if n.is_multiple_of(&nat(10)) {
        return Ok(false);
    }
    let r = reverse_r(n)?;
    if &r == n {
        return Ok(false);
    }
    Ok(factorize(n, budget)?.v() == factorize(&r, budget)?.v())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// Both numbers factored completely.
    Full,
    /// Only the primes of `n` and `r(n)` are tracked; the cofactor shared by
    /// `n(k) = n rho` and `r(n(k)) = r(n) rho` adds the same amount to both sides.
    SharedCofactor,
}

/// `v` on both sides of `n(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcatVerdict {
    pub is_vpal: bool,
    pub route: Route,
    /// `v(n(k))`, or with [`Route::SharedCofactor`] the part of it carried by the
    /// primes of `n` and `r(n)`.
    pub v_left: Nat,
    pub v_right: Nat,
}

/// `ord_p(10^exp - 1)` by modular exponentiation alone.
fn val_ten_pow_minus_one(p: &Nat, exp: &Nat) -> u32 {
    let mut e = 0u32;
    loop {
        let modulus = pow(p, u64::from(e) + 1);
        if !nat(10).modpow(exp, &modulus).is_one() {
            return e;
        }
        e += 1;
    }
}

/// Evaluates the predicate on repeated concatenations, caching `rho` factorizations.
#[derive(Debug)]
pub struct ConcatOracle {
    budget: Budget,
    full_digit_cap: u64,
    rho_factors: Mutex<HashMap<(u64, u64), Option<Factorization>>>,
}

impl ConcatOracle {
    pub fn new(budget: Budget) -> Self {
        Self::with_digit_cap(budget, DEFAULT_FULL_DIGIT_CAP)
    }

    pub fn with_digit_cap(budget: Budget, full_digit_cap: u64) -> Self {
        ConcatOracle {
            budget,
            full_digit_cap,
            rho_factors: Mutex::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn full_digit_cap(&self) -> u64 {
        self.full_digit_cap
    }

    fn rho_primes(&self, k: u64, len: u64) -> Vec<Nat> {
        if let Some(hit) = self.rho_factors.lock().unwrap().get(&(k, len)) {
            return hit.iter().flat_map(|f| f.primes().cloned()).collect();
        }
        let f = factor_rho(k, len, self.budget).ok();
        let primes = f.iter().flat_map(|f| f.primes().cloned()).collect();
        self.rho_factors.lock().unwrap().insert((k, len), f);
        primes
    }

    pub fn is_vpal(&self, n: &Nat, k: u64) -> Result<bool> {
        Ok(self.verdict(n, k)?.is_vpal)
    }

    pub fn verdict(&self, n: &Nat, k: u64) -> Result<ConcatVerdict> {
        let len = digit_len(n)?;
        if len.saturating_mul(k) <= self.full_digit_cap {
            self.full(n, k)
        } else {
            self.shared_cofactor(n, &nat(k))
        }
    }

    /// Factors `n(k)` and its digit reversal completely.
    pub fn full(&self, n: &Nat, k: u64) -> Result<ConcatVerdict> {
        let m = concat_nk(n, k)?;
        let mr = reverse_r(&m)?;
        let len = digit_len(n)?;
        let mut hints: BTreeSet<Nat> = BTreeSet::new();
        hints.extend(factorize(n, self.budget)?.primes().cloned());
        if !n.is_multiple_of(&nat(10)) {
            hints.extend(factorize(&reverse_r(n)?, self.budget)?.primes().cloned());
        }
        hints.extend(self.rho_primes(k, len));
        let hints: Vec<Nat> = hints.into_iter().collect();
        let v_left = factorize_with_hints(&m, &hints, self.budget)?.v();
        let v_right = factorize_with_hints(&mr, &hints, self.budget)?.v();
        let is_vpal = !m.is_multiple_of(&nat(10)) && m != mr && v_left == v_right;
        Ok(ConcatVerdict {
            is_vpal,
            route: Route::Full,
            v_left,
            v_right,
        })
    }

    /// Decides `n(k)` for `k` of any size: the valuations of `rho(k, L)` at the
    /// primes of `n` and `r(n)` come from `10^(Lk)` modulo prime powers.
    pub fn shared_cofactor(&self, n: &Nat, k: &Nat) -> Result<ConcatVerdict> {
        if k.is_zero() {
            return Err(Error::invalid("concatenation count must be positive"));
        }
        let len = digit_len(n)?;
        let r = reverse_r(n)?;
        // n(k) ends in the last digit of n and reverses to r(n)(k)
        if n.is_multiple_of(&nat(10)) || &r == n {
            return Ok(ConcatVerdict {
                is_vpal: false,
                route: Route::SharedCofactor,
                v_left: Nat::zero(),
                v_right: Nat::zero(),
            });
        }
        let fn_ = factorize(n, self.budget)?;
        let fr = factorize(&r, self.budget)?;
        let primes: BTreeSet<&Nat> = fn_.primes().chain(fr.primes()).collect();
        let total = k * nat(len);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for p in primes {
            let x = val_ten_pow_minus_one(p, &total) - val_ten_pow_minus_one(p, &nat(len));
            left.push((p.clone(), fn_.exponent_of(p) + x));
            right.push((p.clone(), fr.exponent_of(p) + x));
        }
        let v_left = Factorization::from_pairs(left).v();
        let v_right = Factorization::from_pairs(right).v();
        Ok(ConcatVerdict {
            is_vpal: v_left == v_right,
            route: Route::SharedCofactor,
            v_left,
            v_right,
        })
    }
}

/// One recorded mismatch, with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub input: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub corpus: String,
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    pub failures: Vec<Failure>,
    pub skips: Vec<Failure>,
    pub wall_seconds: f64,
    pub slowest_item_seconds: f64,
}

impl VerificationReport {
    pub fn new(corpus: impl Into<String>) -> Self {
        VerificationReport {
            corpus: corpus.into(),
            ..Self::default()
        }
    }

    pub fn pass(&mut self) {
        self.checked += 1;
        self.passed += 1;
    }

    pub fn fail(&mut self, input: impl Into<String>, detail: impl Into<String>) {
        self.checked += 1;
        self.failed += 1;
        self.failures.push(Failure {
            input: input.into(),
            detail: detail.into(),
        });
    }

    pub fn skip(&mut self, input: impl Into<String>, detail: impl Into<String>) {
        self.checked += 1;
        self.skipped += 1;
        self.skips.push(Failure {
            input: input.into(),
            detail: detail.into(),
        });
    }

    pub fn check(&mut self, ok: bool, input: impl Into<String>, detail: impl Into<String>) {
        if ok {
            self.pass();
        } else {
            self.fail(input, detail);
        }
    }

    /// Records an error: budget exhaustion is a skip, anything else a failure.
    pub fn error(&mut self, input: impl Into<String>, err: &Error) {
        match err {
            Error::BudgetExhausted { .. } => self.skip(input, err.to_string()),
            _ => self.fail(input, err.to_string()),
        }
    }

    /// Associative merge; the corpus label of `self` is kept.
    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.checked += other.checked;
        self.passed += other.passed;
        self.failed += other.failed;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
        self.skips.extend(other.skips);
        self.slowest_item_seconds = self.slowest_item_seconds.max(other.slowest_item_seconds);
        self
    }

    pub fn is_success(&self) -> bool {
        self.failed == 0
    }

    pub fn skip_fraction(&self) -> f64 {
        if self.checked == 0 {
            0.0
        } else {
            self.skipped as f64 / self.checked as f64
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.checked == self.passed + self.failed + self.skipped
            && self.failures.len() as u64 == self.failed
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "corpus:  {}", self.corpus)?;
        writeln!(
            f,
            "checked: {}  passed: {}  failed: {}  skipped: {}",
            self.checked, self.passed, self.failed, self.skipped
        )?;
        writeln!(
            f,
            "wall:    {:.3}s (slowest item {:.3}s)",
            self.wall_seconds, self.slowest_item_seconds
        )?;
        for x in &self.failures {
            writeln!(f, "FAIL {}: {}", x.input, x.detail)?;
        }
        for x in self.skips.iter().take(20) {
            writeln!(f, "skip {}: {}", x.input, x.detail)?;
        }
        Ok(())
    }
}

/// Numbers the procedure applies to: `1 <= n <= nmax`, `10 ∤ n`, `n != r(n)`.
pub fn corpus(nmax: u64) -> Vec<u64> {
    (1..=nmax)
        .filter(|&n| n % 10 != 0 && reverse_r(&n).unwrap() != n)
        .collect()
}

/// Runs `item` over the corpus in parallel and merges the reports in corpus order.
pub fn run_corpus<F>(label: String, items: &[u64], item: F) -> VerificationReport
where
    F: Fn(u64) -> VerificationReport + Sync,
{
    let start = Instant::now();
    let parts: Vec<VerificationReport> = items
        .par_iter()
        .map(|&n| {
            let t = Instant::now();
            let mut r = item(n);
            r.slowest_item_seconds = r.slowest_item_seconds.max(t.elapsed().as_secs_f64());
            r
        })
        .collect();
    let mut out = parts
        .into_iter()
        .fold(VerificationReport::new(label), VerificationReport::merge);
    out.wall_seconds = start.elapsed().as_secs_f64();
    out
}

/// Shared state for the harnesses: one procedure runner and one oracle.
#[derive(Debug)]
pub struct Harness {
    pub procedure: Procedure,
    pub oracle: ConcatOracle,
}

impl Harness {
    pub fn new(budget: Budget) -> Self {
        Harness {
            procedure: Procedure::new(budget),
            oracle: ConcatOracle::new(budget),
        }
    }

    pub fn with_digit_cap(budget: Budget, cap: u64) -> Self {
        Harness {
            procedure: Procedure::new(budget),
            oracle: ConcatOracle::with_digit_cap(budget, cap),
        }
    }

    /// For `k = 1..=kmax`, the oracle on `n(k)` against membership of `k` in `S`.
    /// Concatenations longer than the oracle's full-factorization cap are left out.
    pub fn compare_procedure_oracle(&self, n: u64, kmax: u64) -> VerificationReport {
        let mut rep = VerificationReport::new(format!("procedure vs oracle, n={n}, k<={kmax}"));
        let nn = nat(n);
        let result = match self.procedure.run(&nn) {
            Ok(r) => r,
            Err(e) => {
                rep.error(format!("n={n}"), &e);
                return rep;
            }
        };
        let len = digit_len(&n).unwrap();
        for k in (1..=kmax).take_while(|k| len * k <= self.oracle.full_digit_cap) {
            let input = format!("n={n} k={k}");
            match self.oracle.full(&nn, k) {
                Ok(v) => {
                    let predicted = result.is_vpal(k);
                    rep.check(
                        v.is_vpal == predicted,
                        input,
                        format!(
                            "oracle says {} (v={} vs {}), procedure says {predicted}",
                            v.is_vpal, v.v_left, v.v_right
                        ),
                    )
                }
                Err(e) => rep.error(input, &e),
            }
        }
        rep
    }

    /// Type of `n(kj)` relative to `n`, relative to `n(k)` through the shifted
    /// run, and relative to `n(k)` recomputed by factoring `n(k)` itself.
    pub fn verify_invariance(&self, n: u64, kmax: u64, jmax: u64) -> VerificationReport {
        let mut rep = VerificationReport::new(format!("type invariance, n={n}"));
        let nn = nat(n);
        let base = match self.procedure.run(&nn) {
            Ok(r) => r,
            Err(e) => {
                rep.error(format!("n={n}"), &e);
                return rep;
            }
        };
        for k in 1..=kmax {
            let runs = concat_from_scratch(&self.procedure, &nn, k)
                .and_then(|scratch| Ok((self.procedure.run_concat(&nn, k)?, scratch)));
            let (shifted, scratch) = match runs {
                Ok(pair) => pair,
                Err(e) => {
                    rep.error(format!("n={n} k={k}"), &e);
                    continue;
                }
            };
            for j in 1..=jmax {
                let input = format!("n={n} k={k} j={j}");
                let member = [base.is_vpal(k * j), shifted.is_vpal(j), scratch.is_vpal(j)];
                if !member[0] {
                    rep.check(
                        member == [false; 3],
                        input,
                        format!("membership disagrees: {member:?}"),
                    );
                    continue;
                }
                let types = (base.type_of(k * j), shifted.type_of(j), scratch.type_of(j));
                match types {
                    (Ok(a), Ok(b), Ok(c)) => rep.check(
                        a == b && b == c,
                        input,
                        format!("types differ: {a} / {b} / {c}"),
                    ),
                    (a, b, c) => {
                        rep.fail(input, format!("type lookup failed: {a:?} / {b:?} / {c:?}"))
                    }
                }
            }
        }
        rep
    }

    /// Crucial primes, solutions, `delta` and `mu` of `n(k)` computed by factoring
    /// `n(k)`, against those of `n` and the shifted run.
    pub fn verify_concat_structure(&self, n: u64, kmax: u64) -> VerificationReport {
        let mut rep = VerificationReport::new(format!("concatenation structure, n={n}"));
        let nn = nat(n);
        let base = match self.procedure.run(&nn) {
            Ok(r) => r,
            Err(e) => {
                rep.error(format!("n={n}"), &e);
                return rep;
            }
        };
        let len = digit_len(&n).unwrap();
        for k in 1..=kmax {
            let input = format!("n={n} k={k}");
            let runs = concat_from_scratch(&self.procedure, &nn, k)
                .and_then(|s| Ok((self.procedure.run_concat(&nn, k)?, s)));
            let (shifted, scratch) = match runs {
                Ok(pair) => pair,
                Err(e) => {
                    rep.error(input, &e);
                    continue;
                }
            };
            let rho_k = rho::<Nat>(k, len).unwrap();
            let primes =
                |r: &ProcedureResult| r.crucial().iter().map(|c| c.p.clone()).collect::<Vec<_>>();
            rep.check(
                primes(&scratch) == primes(&base),
                input.clone(),
                "crucial primes differ",
            );
            rep.check(
                scratch.solutions() == base.solutions(),
                input.clone(),
                "characteristic solutions differ",
            );
            let deltas_ok = scratch
                .crucial()
                .iter()
                .zip(base.crucial())
                .all(|(s, b)| s.delta == b.delta);
            rep.check(deltas_ok, input.clone(), "delta changed");
            let mu_ok = scratch.crucial().iter().zip(base.crucial()).all(|(s, b)| {
                u64::from(s.mu) == u64::from(b.mu) + u64::from(ord_p(&b.p, &rho_k).unwrap())
            });
            rep.check(mu_ok, input.clone(), "mu is not shifted by ord_p(rho_k)");
            rep.check(
                shifted.crucial() == scratch.crucial(),
                input.clone(),
                "shifted run disagrees with the run on n(k)",
            );
            rep.check(
                shifted.columns() == scratch.columns(),
                input,
                "second tables of the shifted run and of n(k) differ",
            );
        }
        rep
    }

    /// Oracle membership on `[1, periods * omega]` repeats with period `omega`.
    /// When `omega` exceeds `window`, only `k <= window` is compared with `k + omega`.
    pub fn verify_periodicity(&self, n: u64, periods: u64, window: u64) -> VerificationReport {
        let mut rep = VerificationReport::new(format!("periodicity, n={n}"));
        let nn = nat(n);
        let result = match self.procedure.run(&nn) {
            Ok(r) => r,
            Err(e) => {
                rep.error(format!("n={n}"), &e);
                return rep;
            }
        };
        let omega = result.omega().clone();
        let span = match omega.to_u64() {
            Some(w) if w <= window => w * (periods.max(2) - 1),
            _ => window,
        };
        let mut memo: BTreeMap<Nat, Result<bool>> = BTreeMap::new();
        let mut member = |k: &Nat| -> Result<bool> {
            memo.entry(k.clone())
                .or_insert_with(|| self.oracle.shared_cofactor(&nn, k).map(|v| v.is_vpal))
                .clone()
        };
        for k in 1..=span {
            let k = nat(k);
            let shifted = &k + &omega;
            let input = format!("n={n} k={k} omega={omega}");
            match (member(&k), member(&shifted)) {
                (Ok(a), Ok(b)) => rep.check(a == b, input, format!("n(k) {a}, n(k+omega) {b}")),
                (Err(e), _) | (_, Err(e)) => rep.error(input, &e),
            }
        }
        rep
    }

    /// No `k` lies in two solution columns. Checked exactly through
    /// `S(A1 ∪ A2, B1 ∪ B2) = ∅`, and by scanning `[1, omega]` when `omega <= scan_limit`.
    pub fn verify_disjointness(&self, n: u64, scan_limit: u64) -> VerificationReport {
        let mut rep = VerificationReport::new(format!("disjointness, n={n}"));
        let result = match self.procedure.run(&nat(n)) {
            Ok(r) => r,
            Err(e) => {
                rep.error(format!("n={n}"), &e);
                return rep;
            }
        };
        rep.merge_from(check_disjoint(&result, scan_limit));
        rep
    }
}

impl VerificationReport {
    fn merge_from(&mut self, other: VerificationReport) {
        let me = std::mem::take(self);
        let label = me.corpus.clone();
        *self = me.merge(other);
        self.corpus = label;
    }
}

/// The procedure applied to the integer `n(k)` from its own factorization.
pub fn concat_from_scratch(procedure: &Procedure, n: &Nat, k: u64) -> Result<ProcedureResult> {
    procedure.run(&concat_nk(n, k)?)
}

pub fn check_disjoint(result: &ProcedureResult, scan_limit: u64) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("disjointness, n={}", result.n()));
    let cols = result.columns();
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let both: ConstraintPair = cols[i].union(&cols[j]);
            rep.check(
                both.is_empty(),
                format!("n={} columns {i},{j}", result.n()),
                format!("both accept {:?}", both.least_member()),
            );
        }
    }
    if let Some(omega) = result.omega().to_u64().filter(|&w| w <= scan_limit) {
        let overlaps: Vec<u64> = (1..=omega)
            .filter(|&k| result.matching_columns(&nat(k)).len() > 1)
            .collect();
        rep.check(
            overlaps.is_empty(),
            format!("n={} scan to {omega}", result.n()),
            format!("accepted twice: {overlaps:?}"),
        );
    }
    rep
}

/// Lemma checks over a grid, `p` running over primes other than 2 and 5:
/// `h(p^alpha, L) >= 2`; `p^alpha | rho(k, L)` exactly when `h(p^alpha, L) | k`;
/// and the change-of-length identity against `h(p^alpha, Lk)` computed directly.
pub fn verify_lemmas(
    p_max: u64,
    alpha_max: u32,
    k_max: u64,
    l_max: u64,
    budget: Budget,
) -> VerificationReport {
    let start = Instant::now();
    let label = format!("lemmas, p<={p_max} alpha<={alpha_max} k<={k_max} L<={l_max}");
    let mut rep = verify_lemma1(p_max, alpha_max, k_max, l_max, budget)
        .merge(verify_lemma2(p_max, alpha_max, k_max, l_max, budget))
        .relabel(label);
    rep.wall_seconds = start.elapsed().as_secs_f64();
    rep
}

impl VerificationReport {
    fn relabel(mut self, label: String) -> Self {
        self.corpus = label;
        self
    }
}

fn odd_primes_not_five(p_max: u64) -> Vec<u64> {
    (3..=p_max)
        .filter(|&p| p != 5 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .collect()
}

pub fn verify_lemma1(
    p_max: u64,
    alpha_max: u32,
    k_max: u64,
    l_max: u64,
    budget: Budget,
) -> VerificationReport {
    let start = Instant::now();
    let mut rep = VerificationReport::new(format!(
        "divisibility of rho by prime powers, p<={p_max} alpha<={alpha_max} k<={k_max} L<={l_max}"
    ));
    let rhos: BTreeMap<(u64, u64), Nat> = (1..=l_max)
        .flat_map(|l| (1..=k_max).map(move |k| ((k, l), rho::<Nat>(k, l).unwrap())))
        .collect();
    for p in odd_primes_not_five(p_max) {
        for alpha in 1..=alpha_max {
            let pa = pow(&nat(p), u64::from(alpha));
            for l in 1..=l_max {
                let input = format!("p={p} alpha={alpha} L={l}");
                let h = match HQuery::new(nat(p), alpha, l).and_then(|q| h_value(&q, budget)) {
                    Ok(h) => h,
                    Err(e) => {
                        rep.error(input, &e);
                        continue;
                    }
                };
                rep.check(h >= nat(2), input.clone(), format!("h = {h} < 2"));
                for k in 1..=k_max {
                    let divides = rhos[&(k, l)].is_multiple_of(&pa);
                    let h_divides = nat(k).is_multiple_of(&h);
                    rep.check(
                        divides == h_divides,
                        format!("{input} k={k}"),
                        format!("p^alpha | rho: {divides}, h={h} | k: {h_divides}"),
                    );
                }
            }
        }
    }
    rep.wall_seconds = start.elapsed().as_secs_f64();
    rep
}

pub fn verify_lemma2(
    p_max: u64,
    alpha_max: u32,
    k_max: u64,
    l_max: u64,
    budget: Budget,
) -> VerificationReport {
    let start = Instant::now();
    let mut rep = VerificationReport::new(format!(
        "change of digit length for h, p<={p_max} alpha<={alpha_max} k<={k_max} L<={l_max}"
    ));
    for p in odd_primes_not_five(p_max) {
        for alpha in 1..=alpha_max {
            for l in 1..=l_max {
                for k in 1..=k_max {
                    let input = format!("p={p} alpha={alpha} k={k} L={l}");
                    let lhs = HQuery::new(nat(p), alpha, l * k).and_then(|q| h_value(&q, budget));
                    let rhs = h_via_lemma2(&nat(p), alpha, k, l, budget);
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) => {
                            rep.check(a == b, input, format!("direct {a}, via identity {b}"))
                        }
                        (Err(e), _) | (_, Err(e)) => rep.error(input, &e),
                    }
                }
            }
        }
    }
    rep.wall_seconds = start.elapsed().as_secs_f64();
    rep
}

/// All v-palindromes `<= limit` by the literal predicate, with the values that
/// could not be decided within budget.
pub fn enumerate_vpals(limit: u64, budget: Budget) -> (Vec<u64>, Vec<u64>) {
    let verdicts: Vec<(u64, Result<bool>)> = (1..=limit)
        .into_par_iter()
        .map(|n| (n, oracle_is_vpal(&nat(n), budget)))
        .collect();
    let mut found = Vec::new();
    let mut skipped = Vec::new();
    for (n, v) in verdicts {
        match v {
            Ok(true) => found.push(n),
            Ok(false) => {}
            Err(_) => skipped.push(n),
        }
    }
    (found, skipped)
}

/// Parses one integer per line; blank lines and `#` comments are ignored.
pub fn parse_number_list(text: &str) -> Result<Vec<u64>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<u64>()
                .map_err(|_| Error::invalid(format!("not an integer: {l:?}")))
        })
        .collect()
}

/// The v-palindromes up to 1000, frozen from an exhaustive run of [`enumerate_vpals`].
pub fn golden_vpals_up_to_1000() -> Vec<u64> {
    parse_number_list(include_str!("../golden/vpals_up_to_1000.txt")).expect("bundled list parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn predicate_examples() {
        assert!(oracle_is_vpal(&nat(18), b()).unwrap());
        assert!(!oracle_is_vpal(&nat(12), b()).unwrap());
        assert!(!oracle_is_vpal(&nat(20), b()).unwrap());
        assert!(!oracle_is_vpal(&nat(22), b()).unwrap());
        assert!(oracle_is_vpal(&nat(0), b()).is_err());
    }

    #[test]
    fn enumerate_small_limits() {
        assert!(enumerate_vpals(17, b()).0.is_empty());
        assert_eq!(enumerate_vpals(18, b()).0, vec![18]);
    }

    #[test]
    fn both_routes_agree_where_both_apply() {
        let oracle = ConcatOracle::new(b());
        for n in [12u64, 13, 18, 19, 26, 33, 117, 198, 576, 1298, 4513] {
            for k in 1..=8 {
                let full = oracle.full(&nat(n), k).unwrap();
                let shared = oracle.shared_cofactor(&nat(n), &nat(k)).unwrap();
                assert_eq!(full.is_vpal, shared.is_vpal, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn thirteen_first_becomes_a_vpal_at_fifteen_copies() {
        let oracle = ConcatOracle::with_digit_cap(b(), 30);
        let hits: Vec<u64> = (1..=15)
            .filter(|&k| oracle.is_vpal(&nat(13), k).unwrap())
            .collect();
        assert_eq!(hits, vec![15]);
        let v = oracle.full(&nat(13), 15).unwrap();
        assert!(v.is_vpal && v.route == Route::Full);
    }

    #[test]
    fn report_bookkeeping() {
        let mut a = VerificationReport::new("a");
        a.pass();
        a.fail("x", "bad");
        let mut b = VerificationReport::new("b");
        b.skip("y", "budget");
        b.pass();
        let m = a.merge(b);
        assert_eq!((m.checked, m.passed, m.failed, m.skipped), (4, 2, 1, 1));
        assert!(m.is_consistent());
        assert!(!m.is_success());
        assert_eq!(m.corpus, "a");
    }

    #[test]
    fn small_harness_runs() {
        let h = Harness::new(b());
        let r = h.compare_procedure_oracle(18, 6);
        assert_eq!((r.checked, r.passed), (6, 6));
        let r = h.compare_procedure_oracle(12, 6);
        assert_eq!((r.checked, r.passed), (6, 6));
        let r = h.verify_invariance(18, 2, 3);
        assert!(r.is_success() && r.checked == 6);
        assert!(h.verify_periodicity(13, 2, 60).is_success());
        assert!(h.verify_disjointness(13, 100_000).is_success());
        assert!(h.verify_concat_structure(18, 4).is_success());
    }
}
