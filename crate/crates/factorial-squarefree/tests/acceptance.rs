//! Acceptance gate: one test per headline target, each printing a PASS line
//! with the measured numbers (run with `-- --nocapture` to see them on
//! success; they appear automatically on failure).
//!
//! The tests are serialized through a lock because several assert wall-clock
//! bounds and must not compete for cores.

mod common;

use common::{parse_validated, run_bin, Run};
use factorial_squarefree::arith::{self, Natural};
use factorial_squarefree::cli::REFERENCE_ROWS;
use factorial_squarefree::divisor::{self, SquarefreeStatus};
use factorial_squarefree::factorization::{Budget, FactorEntry, Factorization};
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

static LOCK: Mutex<()> = Mutex::new(());

fn lock() -> MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

/// Verified (σ₀, 2^ω) for n = 1..=40. Identical to the published reference
/// except for its three misprinted rows, whose values are forced by
/// elementary arithmetic: 16!+1 = 17·61·137·139·1059511, 17!+1 =
/// 661·537913·1000357, and 18!+1 = 19·23·29·61·67·123610951.
fn verified_pair(n: u64) -> (u64, u64) {
    match n {
        16 => (32, 32),
        17 => (8, 8),
        18 => (64, 64),
        _ => REFERENCE_ROWS[(n - 1) as usize],
    }
}

const MISPRINTED_ROWS: [u64; 3] = [16, 17, 18];

fn timed(args: &[&str]) -> (Run, Duration) {
    let t0 = Instant::now();
    let r = run_bin(args);
    (r, t0.elapsed())
}

fn table_rows(r: &Run) -> Vec<Value> {
    let v = parse_validated(&r.stdout, "table.schema.json");
    v["rows"].as_array().expect("rows array").clone()
}

fn row_pair(row: &Value) -> Option<(u64, u64)> {
    let s = row["sigma0"].as_str()?;
    let t = row["two_pow_omega"].as_str()?;
    Some((s.parse().expect("σ₀ fits u64 here"), t.parse().expect("2^ω fits u64 here")))
}

fn scan_pairs(r: &Run) -> Vec<(u64, u64)> {
    let v = parse_validated(&r.stdout, "scan.schema.json");
    v["hits"]
        .as_array()
        .expect("hits array")
        .iter()
        .map(|h| (h["n"].as_u64().expect("n"), h["p"].as_u64().expect("p")))
        .collect()
}

/// Rows 1–20 complete in ≤ 60 s and match the verified table, with the
/// published reference's three misprinted rows (and only those) flagged.
/// Rows 21–40 under a bounded per-row budget: whatever completes matches,
/// whatever exhausts the budget is Partial, never a wrong value.
#[test]
fn criterion_1_table_reproduction() {
    let _g = lock();

    let (r, elapsed) = timed(&["table", "--max-n", "20"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert!(elapsed <= Duration::from_secs(60), "took {elapsed:?}, budget 60 s");
    let rows = table_rows(&r);
    assert_eq!(rows.len(), 20);
    let mut flagged = Vec::new();
    for row in &rows {
        let n = row["n"].as_u64().unwrap();
        assert_eq!(row["status"], "complete", "row {n}");
        assert_eq!(row_pair(row).unwrap(), verified_pair(n), "row {n}");
        if row["reference_mismatch"] == Value::Bool(true) {
            flagged.push(n);
        }
    }
    assert_eq!(flagged, MISPRINTED_ROWS, "exactly the misprinted rows are flagged");
    println!(
        "PASS criterion 1a: table --max-n 20 complete and correct in {elapsed:.2?} (≤ 60 s), \
         flagged rows {flagged:?}"
    );

    // n ≤ 40: row 38 is a product of two 23-digit primes, beyond any
    // desk-scale rho budget; 30 s/row gives ~3x headroom over the slowest
    // row that does complete (39, ~10 s here) while staying well inside the
    // documented 120 s default.
    let (r, elapsed) = timed(&["table", "--max-n", "40", "--budget-ms", "30000"]);
    assert_eq!(r.code, 2, "partial rows present ⇒ exit 2; stderr: {}", r.stderr);
    let rows = table_rows(&r);
    assert_eq!(rows.len(), 40);
    let mut partial = Vec::new();
    for row in &rows {
        let n = row["n"].as_u64().unwrap();
        if row["status"] == "partial" {
            assert_eq!(row_pair(row), None, "partial row {n} must carry no values");
            partial.push(n);
        } else {
            assert_eq!(row_pair(row).unwrap(), verified_pair(n), "completed row {n} must match");
        }
    }
    assert_eq!(partial, [38], "only the infeasible row may time out");
    println!(
        "PASS criterion 1b: table --max-n 40 in {elapsed:.2?}; every completed row matches, \
         Partial = {partial:?}"
    );
}

/// The seven square-divisor pairs, in ≤ 10 s, exit 0.
#[test]
fn criterion_2_square_divisor_scan() {
    let _g = lock();
    let (r, elapsed) = timed(&["scan", "square-divisors", "--max-n", "600", "--max-p", "10000"]);
    assert_eq!(r.code, 0, "all hits lie in the excluded set; stderr: {}", r.stderr);
    assert!(elapsed <= Duration::from_secs(10), "took {elapsed:?}, budget 10 s");
    assert_eq!(
        scan_pairs(&r),
        [(4, 5), (5, 11), (7, 71), (12, 13), (23, 47), (229, 613), (562, 563)]
    );
    println!("PASS criterion 2: seven square-divisor pairs in {elapsed:.2?} (≤ 10 s)");
}

/// Wilson primes 5, 13, 563 below 10⁵ in ≤ 5 min single-threaded, with
/// ≥ 2.5× speedup at 4 workers where the hardware can express it.
#[test]
fn criterion_3_wilson_scan() {
    let _g = lock();
    let (r, single) = timed(&["scan", "wilson", "--max-p", "100000", "--workers", "1"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert!(single <= Duration::from_secs(300), "took {single:?}, budget 5 min");
    assert_eq!(scan_pairs(&r), [(4, 5), (12, 13), (562, 563)]);
    println!("PASS criterion 3a: wilson --max-p 100000 in {single:.2?} (≤ 5 min), primes 5/13/563");

    let cores = std::thread::available_parallelism().map(|c| c.get()).unwrap_or(1);
    if cores < 4 {
        println!(
            "SKIP criterion 3b: speedup ratio needs ≥ 4 hardware threads, host has {cores} — \
             determinism across worker counts is still asserted in criterion 8"
        );
        return;
    }
    let (r4, quad) = timed(&["scan", "wilson", "--max-p", "100000", "--workers", "4"]);
    assert_eq!(r4.stdout, r.stdout, "worker count must not change output");
    let ratio = single.as_secs_f64() / quad.as_secs_f64();
    assert!(ratio >= 2.5, "speedup {ratio:.2}x at 4 workers, need ≥ 2.5x");
    println!("PASS criterion 3b: {ratio:.2}x speedup at 4 workers (≥ 2.5x)");
}

/// Brocard roots 5, 11, 71 below 10⁴ in ≤ 10 min.
#[test]
fn criterion_4_brocard_scan() {
    let _g = lock();
    let (r, elapsed) = timed(&["scan", "brocard", "--max-n", "10000"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert!(elapsed <= Duration::from_secs(600), "took {elapsed:?}, budget 10 min");
    let v = parse_validated(&r.stdout, "scan.schema.json");
    let hits: Vec<(u64, &str)> = v["hits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| (h["n"].as_u64().unwrap(), h["root"].as_str().unwrap()))
        .collect();
    assert_eq!(hits, [(4, "5"), (5, "11"), (7, "71")]);
    println!("PASS criterion 4: brocard --max-n 10000 in {elapsed:.2?} (≤ 10 min), roots 5/11/71");
}

/// Exhaustively for n ≤ 10⁶: the sieve's σ₀(n) is odd ⟺ n is a perfect
/// square; zero violations, ≤ 60 s.
#[test]
fn criterion_5_sigma0_parity_suite() {
    let _g = lock();
    let t0 = Instant::now();
    let counts = divisor::divisor_count_sieve(1_000_000).expect("within the sieve ceiling");
    let mut squares = 0u64;
    for (n, &count) in counts.iter().enumerate().skip(1) {
        let odd = count % 2 == 1;
        let square = arith::is_perfect_square(&BigUint::from(n)).is_some();
        assert_eq!(odd, square, "σ₀({n}) = {count}");
        squares += square as u64;
    }
    let elapsed = t0.elapsed();
    assert_eq!(squares, 1000, "exactly ⌊√10⁶⌋ squares below the bound");
    assert!(elapsed <= Duration::from_secs(60), "took {elapsed:?}, budget 60 s");
    println!("PASS criterion 5: σ₀ parity ⟺ squareness for n ≤ 10⁶ in {elapsed:.2?} (≤ 60 s)");
}

/// 10⁴ randomly constructed complete factorizations: square-free ⟺
/// σ₀ = 2^ω, in both directions, zero violations.
#[test]
fn criterion_6_identity_property_suite() {
    let _g = lock();
    let primes = arith::sieve_primes(10_000).unwrap();
    let mut rng = StdRng::seed_from_u64(6);
    let (mut squarefree_cases, mut squared_cases) = (0u32, 0u32);

    for _ in 0..10_000 {
        let k = rng.gen_range(1..=6usize);
        let mut chosen: Vec<u64> = primes.choose_multiple(&mut rng, k).copied().collect();
        chosen.sort_unstable();
        let force_squarefree = rng.gen_bool(0.5);
        let entries: Vec<FactorEntry> = chosen
            .iter()
            .map(|&p| FactorEntry {
                prime: BigUint::from(p),
                multiplicity: if force_squarefree { 1 } else { rng.gen_range(1..=4u32) },
            })
            .collect();
        let value: Natural = entries
            .iter()
            .fold(BigUint::from(1u32), |acc, e| acc * e.prime.pow(e.multiplicity));
        let f = Factorization::new(value, entries.clone(), None, false).expect("canonical");

        let squarefree = entries.iter().all(|e| e.multiplicity == 1);
        assert_eq!(divisor::identity_holds(&f).unwrap(), squarefree);
        match divisor::squarefree_status(&f) {
            SquarefreeStatus::SquareFree => {
                assert!(squarefree);
                squarefree_cases += 1;
            }
            SquarefreeStatus::NotSquareFree(p) => {
                let first = entries.iter().find(|e| e.multiplicity >= 2).expect("a squared prime");
                assert_eq!(p, first.prime, "witness is the smallest squared prime");
                squared_cases += 1;
            }
            SquarefreeStatus::Unknown => panic!("complete factorizations always classify"),
        }
    }
    assert!(squarefree_cases >= 1_000 && squared_cases >= 1_000, "both directions exercised");
    println!(
        "PASS criterion 6: 10⁴ constructed factorizations, identity ⟺ square-free \
         ({squarefree_cases} square-free / {squared_cases} with a square), zero violations"
    );
}

/// factorize agrees with naive trial division for every 2 ≤ x ≤ 10⁵, and
/// every result reconstructs its input.
#[test]
fn criterion_7_factorization_oracle_equivalence() {
    let _g = lock();

    fn naive(mut x: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2u64;
        while d * d <= x {
            if x.is_multiple_of(d) {
                let mut m = 0;
                while x.is_multiple_of(d) {
                    x /= d;
                    m += 1;
                }
                out.push((d, m));
            }
            d += 1;
        }
        if x > 1 {
            out.push((x, 1));
        }
        out
    }

    let t0 = Instant::now();
    let budget = Budget::new(10_000, 1 << 22);
    for x in 2u64..=100_000 {
        let f = factorial_squarefree::factorization::factorize(&BigUint::from(x), &budget);
        assert!(f.is_complete(), "x={x}");
        assert!(!f.probabilistic(), "x={x} is far below the deterministic range");
        let got: Vec<(u64, u32)> = f
            .entries()
            .iter()
            .map(|e| (u64::try_from(&e.prime).expect("small prime"), e.multiplicity))
            .collect();
        assert_eq!(got, naive(x), "x={x}");
        assert_eq!(f.reconstruct(), BigUint::from(x), "x={x}");
    }
    println!(
        "PASS criterion 7: factorize ≡ naive factorization on 2..=10⁵ with reconstruction, \
         in {:.2?}",
        t0.elapsed()
    );
}

/// The four headline commands emit byte-identical stdout at --workers 1 and
/// --workers 8 with the default seed.
#[test]
fn criterion_8_worker_count_determinism() {
    let _g = lock();
    let commands: [&[&str]; 4] = [
        &["table", "--max-n", "20"],
        &["scan", "square-divisors", "--max-n", "600", "--max-p", "10000"],
        &["scan", "wilson", "--max-p", "100000"],
        &["scan", "brocard", "--max-n", "10000"],
    ];
    for base in commands {
        let one = run_bin(&[base, &["--workers", "1"]].concat());
        let eight = run_bin(&[base, &["--workers", "8"]].concat());
        assert_eq!(one.code, eight.code, "{base:?}");
        assert_eq!(one.stdout, eight.stdout, "{base:?} must not depend on worker count");
        assert!(!one.stdout.is_empty());
    }
    println!("PASS criterion 8: byte-identical stdout at --workers 1 vs 8 for all four commands");
}
