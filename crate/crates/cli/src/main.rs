//! `vpal`: command-line front end for v-palindromes and the type procedure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;
use vpal::decimal::reverse_r;
use vpal::factor::{factorize, Budget};
use vpal::oracle::{self, corpus, run_corpus, Harness, VerificationReport};
use vpal::procedure::{Procedure, ProcedureJson};
use vpal::{Error, Nat};

const EXIT_FAILURE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "vpal",
    version,
    about = "v-palindromes, repeated concatenations and their types"
)]
struct Cli {
    /// Seconds allowed per composite while factoring.
    #[arg(long, global = true, env = "VPAL_BUDGET", default_value_t = 10.0, value_parser = positive_f64)]
    budget: f64,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for `verify`.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print v(n).
    V {
        #[arg(value_parser = parse_nat)]
        n: Nat,
    },
    /// Decide whether n is a v-palindrome.
    Check {
        #[arg(value_parser = parse_nat)]
        n: Nat,
    },
    /// Run the classification procedure on n (or on n(k) with --k).
    Procedure {
        #[arg(value_parser = parse_nat)]
        n: Nat,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Print the type of n(k) with respect to n.
    Type {
        #[arg(value_parser = parse_nat)]
        n: Nat,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Run one of the verification harnesses.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Procedure membership against factoring n(k).
    Oracle {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 8)]
        kmax: u64,
        /// Longest n(k), in digits, handed to the oracle.
        #[arg(long, default_value_t = oracle::DEFAULT_FULL_DIGIT_CAP)]
        digit_cap: u64,
    },
    /// Type of n(kj) with respect to n against n(k).
    Invariance {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 6)]
        kmax: u64,
        #[arg(long, default_value_t = 6)]
        jmax: u64,
    },
    /// Crucial primes, solutions, delta and mu of n(k) against n.
    Structure {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 6)]
        kmax: u64,
    },
    /// Oracle membership repeats with the procedure's period.
    Periodicity {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 2)]
        periods: u64,
        /// Periods above this are only checked on the first `window` offsets.
        #[arg(long, default_value_t = 60)]
        window: u64,
    },
    /// No concatenation count lies in two solution columns.
    Disjointness {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 100_000)]
        scan_limit: u64,
    },
    /// The h-divisibility and change-of-length identities over a grid.
    Lemmas {
        #[arg(long, default_value_t = 50)]
        pmax: u64,
        #[arg(long, default_value_t = 2)]
        alpha_max: u32,
        #[arg(long, default_value_t = 12)]
        kmax: u64,
        #[arg(long, default_value_t = 4)]
        lmax: u64,
    },
    /// List v-palindromes up to a limit and compare with a golden list.
    Enumerate {
        #[arg(long, default_value_t = 1000)]
        limit: u64,
        /// File with one number per line; defaults to the bundled list up to 1000.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 500)]
    nmax: u64,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number of seconds, got {s:?}")),
    }
}

fn parse_nat(s: &str) -> Result<Nat, String> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a decimal integer, got {s:?}"));
    }
    let n = BigUint::parse_bytes(s.as_bytes(), 10).unwrap();
    if n == BigUint::from(0u8) {
        return Err("expected a positive integer".into());
    }
    Ok(n)
}

fn error_exit(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::BudgetExhausted { .. } => ExitCode::from(EXIT_BUDGET),
        Error::InvalidInput(_) => ExitCode::from(EXIT_USAGE),
        _ => ExitCode::from(EXIT_FAILURE),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .expect("thread pool configured twice");
    }
    let budget = Budget::with_seconds(cli.budget);
    match run(&cli, budget) {
        Ok(code) => code,
        Err(e) => error_exit(&e),
    }
}

fn run(cli: &Cli, budget: Budget) -> vpal::Result<ExitCode> {
    match &cli.command {
        Command::V { n } => {
            let v = factorize(n, budget)?.v();
            if cli.json {
                println!("{}", json!({ "n": n.to_string(), "v": v.to_string() }));
            } else {
                println!("{v}");
            }
        }
        Command::Check { n } => check(cli, n, budget)?,
        Command::Procedure { n, k } => {
            let result = Procedure::new(budget).run_concat(n, *k)?;
            let doc = ProcedureJson::from_result(&result, budget)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                print_procedure(&doc);
            }
        }
        Command::Type { n, k } => {
            let result = Procedure::new(budget).run(n)?;
            let t = match result.type_of(*k) {
                Ok(u) => Some(u.to_string()),
                Err(Error::NotAVPalindrome { .. }) => None,
                Err(e) => return Err(e),
            };
            if cli.json {
                println!(
                    "{}",
                    json!({ "n": n.to_string(), "k": k, "is_vpal": t.is_some(), "type": t })
                );
            } else {
                println!("{}", t.as_deref().unwrap_or("not a v-palindrome"));
            }
        }
        Command::Verify(v) => return Ok(verify(cli, v, budget)),
    }
    Ok(ExitCode::SUCCESS)
}

fn check(cli: &Cli, n: &Nat, budget: Budget) -> vpal::Result<()> {
    let ten = Nat::from(10u8);
    let r = if n % &ten == Nat::from(0u8) {
        None
    } else {
        Some(reverse_r(n)?)
    };
    let (verdict, reason, v_n, v_r) = match &r {
        None => (false, "10 divides n".to_string(), None, None),
        Some(r) if r == n => (false, "n = r(n)".to_string(), None, None),
        Some(r) => {
            let v_n = factorize(n, budget)?.v();
            let v_r = factorize(r, budget)?.v();
            let eq = v_n == v_r;
            let reason = format!("{v_n}{}{v_r}", if eq { "=" } else { "≠" });
            (eq, reason, Some(v_n), Some(v_r))
        }
    };
    if cli.json {
        println!(
            "{}",
            json!({
                "n": n.to_string(),
                "r": r.map(|r| r.to_string()),
                "is_vpal": verdict,
                "v_n": v_n.map(|v| v.to_string()),
                "v_r": v_r.map(|v| v.to_string()),
                "reason": reason,
            })
        );
    } else {
        println!("{} ({reason})", if verdict { "yes" } else { "no" });
    }
    Ok(())
}

fn print_procedure(doc: &ProcedureJson) {
    let set = |v: &[String]| format!("{{{}}}", v.join(","));
    let tuple = |v: &[String]| format!("({})", v.join(","));
    println!(
        "n = {}  (k = {}, L = {})",
        doc.n, doc.concatenations, doc.digit_len
    );
    println!("crucial primes:");
    for c in &doc.crucial_primes {
        println!(
            "  p={} a={} b={} delta={} mu={}",
            c.p, c.a, c.b, c.delta, c.mu
        );
    }
    if doc.solutions.is_empty() {
        println!("no characteristic solutions: S is empty");
    } else {
        let heads: Vec<String> = doc.solutions.iter().map(|u| tuple(u)).collect();
        println!("first table:");
        println!(
            "  {:>8} {}",
            "",
            heads.iter().map(|h| format!("{h:>16}")).collect::<String>()
        );
        for (c, row) in doc.crucial_primes.iter().zip(&doc.first_table) {
            let cells: String = row
                .iter()
                .map(|l| format!("{:>16}", format!("[{}]", l.as_str())))
                .collect();
            println!("  {:>8} {cells}", c.p);
        }
        println!("second table:");
        for (c, row) in doc.crucial_primes.iter().zip(&doc.second_table) {
            let cells: Vec<String> = row
                .iter()
                .map(|e| format!("({},{})", set(&e.a), set(&e.b)))
                .collect();
            println!("  {:>8} {}", c.p, cells.join("  "));
        }
        println!("columns:");
        for col in &doc.columns {
            let members = match &col.least_member {
                Some(m) if col.a.is_empty() && col.b.is_empty() => format!("S = all k (least {m})"),
                Some(m) => format!("least member {m}"),
                None => "S = ∅".to_string(),
            };
            println!(
                "  {}: A={} B={}  {members}",
                tuple(&col.solution),
                set(&col.a),
                set(&col.b)
            );
        }
    }
    println!(
        "omega = {}  omega0 = {}  c = {}",
        doc.omega,
        doc.omega0,
        doc.c.as_deref().unwrap_or("∞")
    );
    let nondeg: Vec<String> = doc.nondegenerate.iter().map(|u| tuple(u)).collect();
    println!("nondegenerate: {{{}}}", nondeg.join(", "));
}

fn emit(cli: &Cli, report: &VerificationReport) -> ExitCode {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(report).unwrap());
    } else {
        print!("{report}");
    }
    if report.is_success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn verify(cli: &Cli, v: &Verify, budget: Budget) -> ExitCode {
    let report = match v {
        Verify::Oracle {
            corpus: c,
            kmax,
            digit_cap,
        } => {
            let h = Harness::with_digit_cap(budget, *digit_cap);
            run_corpus(
                format!(
                    "procedure vs oracle, n<={} k<={kmax}, <= {digit_cap} digits",
                    c.nmax
                ),
                &corpus(c.nmax),
                |n| h.compare_procedure_oracle(n, *kmax),
            )
        }
        Verify::Invariance {
            corpus: c,
            kmax,
            jmax,
        } => {
            let h = Harness::new(budget);
            run_corpus(
                format!("type invariance, n<={} k<={kmax} j<={jmax}", c.nmax),
                &corpus(c.nmax),
                |n| h.verify_invariance(n, *kmax, *jmax),
            )
        }
        Verify::Structure { corpus: c, kmax } => {
            let h = Harness::new(budget);
            run_corpus(
                format!("concatenation structure, n<={} k<={kmax}", c.nmax),
                &corpus(c.nmax),
                |n| h.verify_concat_structure(n, *kmax),
            )
        }
        Verify::Periodicity {
            corpus: c,
            periods,
            window,
        } => {
            let h = Harness::new(budget);
            run_corpus(
                format!(
                    "periodicity, n<={} periods={periods} window={window}",
                    c.nmax
                ),
                &corpus(c.nmax),
                |n| h.verify_periodicity(n, *periods, *window),
            )
        }
        Verify::Disjointness {
            corpus: c,
            scan_limit,
        } => {
            let h = Harness::new(budget);
            run_corpus(
                format!("disjointness, n<={}", c.nmax),
                &corpus(c.nmax),
                |n| h.verify_disjointness(n, *scan_limit),
            )
        }
        Verify::Lemmas {
            pmax,
            alpha_max,
            kmax,
            lmax,
        } => oracle::verify_lemmas(*pmax, *alpha_max, *kmax, *lmax, budget),
        Verify::Enumerate { limit, golden } => {
            return enumerate(cli, *limit, golden.as_ref(), budget)
        }
    };
    emit(cli, &report)
}

fn enumerate(cli: &Cli, limit: u64, golden: Option<&PathBuf>, budget: Budget) -> ExitCode {
    let (found, skipped) = oracle::enumerate_vpals(limit, budget);
    let expected: Vec<u64> = match golden {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match oracle::parse_number_list(&text) {
                Ok(v) => v.into_iter().filter(|&n| n <= limit).collect(),
                Err(e) => return error_exit(&e),
            },
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => oracle::golden_vpals_up_to_1000()
            .into_iter()
            .filter(|&n| n <= limit)
            .collect(),
    };
    // the bundled list only speaks for n <= 1000
    let compared: Vec<u64> = if golden.is_none() {
        found.iter().copied().filter(|&n| n <= 1000).collect()
    } else {
        found.clone()
    };
    let matches = compared == expected;
    if cli.json {
        println!(
            "{}",
            json!({
                "limit": limit,
                "count": found.len(),
                "vpals": found,
                "skipped": skipped,
                "golden_match": matches,
            })
        );
    } else {
        for n in &found {
            println!("{n}");
        }
        eprintln!(
            "{} v-palindromes <= {limit}; golden list {}",
            found.len(),
            if matches { "matches" } else { "DIFFERS" }
        );
        if !skipped.is_empty() {
            eprintln!("skipped on budget: {skipped:?}");
        }
    }
    if !matches {
        ExitCode::from(EXIT_FAILURE)
    } else if !skipped.is_empty() {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    }
}
