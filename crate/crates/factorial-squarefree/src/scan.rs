//! Search engines over n!+1: the square-divisor scan on (n, p), the Wilson
//! scan (p² | (p−1)!+1), the Brocard scan (n!+1 = m²), the σ₀/2^ω table
//! builder, and a per-n verdict combining all routes.
//!
//! Every scan partitions its range into fixed-width work items, so output is
//! identical for any worker count, and every reported hit is re-verified
//! with full big-integer arithmetic before being returned.

use crate::arith::{
    factorial, factorial_bounded, is_perfect_square, sieve_primes, ArithError, Natural,
    ResidueStream, FACTORIAL_LIMIT,
};
use crate::checkpoint::{CheckpointLog, CheckpointRecord, RecordedHit, CHECKPOINT_SCHEMA};
use crate::divisor::{self, squarefree_status, SquarefreeStatus};
use crate::factorization::{factorize_seeded, Budget, Status, DEFAULT_RHO_SEED};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

/// The seven n for which n!+1 is known to have a repeated prime factor.
pub const EXCLUDED_SET: [u64; 7] = [4, 5, 7, 12, 23, 229, 562];

pub fn in_excluded_set(n: u64) -> bool {
    EXCLUDED_SET.contains(&n)
}

/// Work-item widths. Fixed constants keep the chunking — and therefore both
/// checkpoint identities and merged output — independent of worker count.
const PRIME_CHUNK: u64 = 1024;
const BROCARD_CHUNK: u64 = 256;

const KIND_SQUARE_DIVISORS: &str = "square-divisors";
const KIND_WILSON: &str = "wilson";
const KIND_BROCARD: &str = "brocard";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitKind {
    SquareDivisor,
    Wilson,
    Brocard,
}

/// A scan discovery: p² | n!+1 (SquareDivisor; Wilson additionally has
/// n = p−1), or n!+1 = root² (Brocard, which carries no p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanHit {
    pub n: u64,
    pub p: Option<u64>,
    pub kind: HitKind,
    pub root: Option<Natural>,
}

/// One row of the σ₀/2^ω table. Partial rows carry no values — budget
/// exhaustion never fabricates numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub n: u64,
    pub sigma0: Option<Natural>,
    pub two_pow_omega: Option<Natural>,
    pub probabilistic: bool,
    pub status: Status,
    pub in_excluded_set: bool,
}

/// Outcome of verifying a single n against the conjecture that n!+1 is
/// square-free exactly when n is outside the excluded set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub n: u64,
    pub outcome: SquarefreeStatus,
    pub consistent_with_conjecture: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScanError {
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Half-open fixed-width chunks covering [min, max_inclusive].
fn value_chunks(min: u64, max_inclusive: u64, width: u64) -> Vec<(u64, u64)> {
    let mut chunks = Vec::new();
    let mut lo = min;
    while lo <= max_inclusive {
        let hi = lo.saturating_add(width).min(max_inclusive + 1);
        chunks.push((lo, hi));
        lo = hi;
    }
    chunks
}

/// All n ≤ n_limit with n! ≡ −1 (mod p²), by one residue-stream walk.
fn factorial_plus_one_roots_mod_p2(p: u64, n_limit: u64) -> Vec<u64> {
    let modulus = BigUint::from(p) * p;
    let mut stream = ResidueStream::new(modulus.clone());
    let mut hits = Vec::new();
    if stream.is_word() {
        let target = p * p - 1;
        while stream.current_n() < n_limit {
            let (n, r) = stream.advance_word().expect("word-path stream");
            if r == target {
                hits.push(n);
            }
        }
    } else {
        let target = &modulus - 1u32;
        while stream.current_n() < n_limit {
            let (n, r) = stream.advance();
            if r == target {
                hits.push(n);
            }
        }
    }
    hits
}

/// (p−1)! ≡ −1 (mod p²): one pass of modular multiplication, word-sized for
/// every desk-scale p.
fn is_wilson_prime(p: u64) -> bool {
    let modulus = BigUint::from(p) * p;
    let mut stream = ResidueStream::new(modulus.clone());
    if stream.is_word() {
        let mut r = 1u64 % (p * p);
        while stream.current_n() < p - 1 {
            r = stream.advance_word().expect("word-path stream").1;
        }
        r == p * p - 1
    } else {
        let mut r = BigUint::from(1u32) % &modulus;
        while stream.current_n() < p - 1 {
            r = stream.advance().1;
        }
        r == &modulus - 1u32
    }
}

fn to_recorded(hit: &ScanHit) -> RecordedHit {
    RecordedHit { n: hit.n, p: hit.p, root: hit.root.as_ref().map(|r| r.to_string()) }
}

fn from_recorded(hit: &RecordedHit, kind: HitKind) -> ScanHit {
    ScanHit {
        n: hit.n,
        p: hit.p,
        kind,
        root: hit.root.as_ref().map(|s| {
            BigUint::parse_bytes(s.as_bytes(), 10).expect("checkpoint root is decimal")
        }),
    }
}

/// Recompute p² | n!+1 with full big-integer arithmetic. Runs on every
/// reported hit, including ones loaded from a checkpoint.
fn assert_square_divisor_hit(hit: &ScanHit) {
    let p = hit.p.expect("hit carries its prime");
    let value = factorial_bounded(hit.n, hit.n.max(1)).expect("bounded by its own n") + 1u32;
    let pp = BigUint::from(p) * p;
    assert!((value % pp).is_zero(), "unsound hit: {}!+1 not divisible by {p}²", hit.n);
}

fn assert_brocard_hit(hit: &ScanHit) {
    let root = hit.root.as_ref().expect("hit carries its root");
    let value = factorial_bounded(hit.n, hit.n.max(1)).expect("bounded by its own n") + 1u32;
    assert!(root * root == value, "unsound hit: root² ≠ {}!+1", hit.n);
}

/// All (n, p) with n ≤ n_max, p prime ≤ p_max, and p² | n!+1, sorted by
/// (n, p). Per prime the residue stream walks only n < p: for n ≥ p, p | n!
/// so n!+1 ≡ 1 (mod p) and no hit is possible.
pub fn scan_square_divisors(n_max: u64, p_max: u64) -> Vec<ScanHit> {
    scan_square_divisors_logged(n_max, p_max, None)
}

pub fn scan_square_divisors_logged(
    n_max: u64,
    p_max: u64,
    log: Option<&CheckpointLog>,
) -> Vec<ScanHit> {
    assert!(n_max >= 1, "n_max must be ≥ 1");
    assert!(p_max >= 2, "p_max must be ≥ 2");
    let primes = sieve_primes(p_max).expect("p_max beyond the sieve ceiling");

    let per_chunk: Vec<Vec<ScanHit>> = value_chunks(2, p_max, PRIME_CHUNK)
        .par_iter()
        .map(|&(lo, hi)| {
            if let Some(done) = log.and_then(|l| {
                l.lookup(KIND_SQUARE_DIVISORS, Some(n_max), Some(p_max), lo, hi)
            }) {
                return done.iter().map(|h| from_recorded(h, HitKind::SquareDivisor)).collect();
            }
            let a = primes.partition_point(|&q| q < lo);
            let b = primes.partition_point(|&q| q < hi);
            let mut found = Vec::new();
            for &p in &primes[a..b] {
                for n in factorial_plus_one_roots_mod_p2(p, n_max.min(p - 1)) {
                    found.push(ScanHit { n, p: Some(p), kind: HitKind::SquareDivisor, root: None });
                }
            }
            if let Some(l) = log {
                l.record(CheckpointRecord {
                    schema: CHECKPOINT_SCHEMA,
                    kind: KIND_SQUARE_DIVISORS.into(),
                    n_max: Some(n_max),
                    p_max: Some(p_max),
                    lo,
                    hi,
                    hits: found.iter().map(to_recorded).collect(),
                    checksum: String::new(),
                })
                .expect("checkpoint write failed");
            }
            found
        })
        .collect();

    let mut hits: Vec<ScanHit> = per_chunk.into_iter().flatten().collect();
    hits.sort_by_key(|h| (h.n, h.p));
    hits.iter().for_each(assert_square_divisor_hit);
    hits
}

/// All Wilson primes p ≤ p_max — p² | (p−1)!+1 — as hits with n = p−1,
/// sorted by (n, p).
pub fn scan_wilson(p_max: u64) -> Vec<ScanHit> {
    scan_wilson_logged(p_max, None)
}

pub fn scan_wilson_logged(p_max: u64, log: Option<&CheckpointLog>) -> Vec<ScanHit> {
    assert!(p_max >= 2, "p_max must be ≥ 2");
    let primes = sieve_primes(p_max).expect("p_max beyond the sieve ceiling");

    let per_chunk: Vec<Vec<ScanHit>> = value_chunks(2, p_max, PRIME_CHUNK)
        .par_iter()
        .map(|&(lo, hi)| {
            if let Some(done) =
                log.and_then(|l| l.lookup(KIND_WILSON, None, Some(p_max), lo, hi))
            {
                return done.iter().map(|h| from_recorded(h, HitKind::Wilson)).collect();
            }
            let a = primes.partition_point(|&q| q < lo);
            let b = primes.partition_point(|&q| q < hi);
            let mut found = Vec::new();
            for &p in &primes[a..b] {
                if is_wilson_prime(p) {
                    found.push(ScanHit { n: p - 1, p: Some(p), kind: HitKind::Wilson, root: None });
                }
            }
            if let Some(l) = log {
                l.record(CheckpointRecord {
                    schema: CHECKPOINT_SCHEMA,
                    kind: KIND_WILSON.into(),
                    n_max: None,
                    p_max: Some(p_max),
                    lo,
                    hi,
                    hits: found.iter().map(to_recorded).collect(),
                    checksum: String::new(),
                })
                .expect("checkpoint write failed");
            }
            found
        })
        .collect();

    let mut hits: Vec<ScanHit> = per_chunk.into_iter().flatten().collect();
    hits.sort_by_key(|h| (h.n, h.p));
    hits.iter().for_each(assert_square_divisor_hit);
    hits
}

/// Quadratic-residue prefilter for the Brocard scan: n!+1 can only be a
/// square if it is a residue mod every q, and q > n_max keeps q ∤ n!.
struct ResidueFilter {
    q: u64,
    squares: Vec<u64>,
}

impl ResidueFilter {
    fn new(q: u64) -> ResidueFilter {
        let mut squares = vec![0u64; (q as usize).div_ceil(64)];
        for r in 0..q {
            let s = r * r % q;
            squares[(s / 64) as usize] |= 1 << (s % 64);
        }
        ResidueFilter { q, squares }
    }

    fn is_residue(&self, s: u64) -> bool {
        self.squares[(s / 64) as usize] & (1 << (s % 64)) != 0
    }
}

fn residue_filters(n_max: u64) -> Vec<ResidueFilter> {
    let mut bound = n_max + 200;
    loop {
        let primes = sieve_primes(bound).expect("filter bound within the sieve ceiling");
        let above: Vec<u64> = primes.into_iter().filter(|&q| q > n_max).take(8).collect();
        if above.len() == 8 {
            return above.into_iter().map(ResidueFilter::new).collect();
        }
        bound *= 2;
    }
}

/// All n ≤ n_max with n!+1 a perfect square, each with its root, sorted by
/// n. A running factorial accumulator walks each chunk; candidates surviving
/// the eight-prime residue prefilter get the exact square test.
pub fn scan_brocard(n_max: u64) -> Result<Vec<ScanHit>, ScanError> {
    scan_brocard_logged(n_max, None)
}

pub fn scan_brocard_logged(
    n_max: u64,
    log: Option<&CheckpointLog>,
) -> Result<Vec<ScanHit>, ScanError> {
    assert!(n_max >= 1, "n_max must be ≥ 1");
    if n_max > FACTORIAL_LIMIT {
        return Err(ArithError::FactorialLimit { n: n_max, limit: FACTORIAL_LIMIT }.into());
    }
    let filters = residue_filters(n_max);

    let per_chunk: Vec<Vec<ScanHit>> = value_chunks(1, n_max, BROCARD_CHUNK)
        .par_iter()
        .map(|&(lo, hi)| {
            if let Some(done) =
                log.and_then(|l| l.lookup(KIND_BROCARD, Some(n_max), None, lo, hi))
            {
                return done.iter().map(|h| from_recorded(h, HitKind::Brocard)).collect();
            }
            let mut acc = factorial(lo - 1).expect("below the factorial limit");
            let mut residues: Vec<u64> =
                filters.iter().map(|f| (&acc % f.q).to_u64().expect("q is word-size")).collect();
            let mut found = Vec::new();
            for n in lo..hi {
                acc *= n;
                for (r, f) in residues.iter_mut().zip(&filters) {
                    *r = *r * n % f.q; // r < q and n ≤ n_max < q keep this in u64
                }
                let candidate = residues
                    .iter()
                    .zip(&filters)
                    .all(|(r, f)| f.is_residue((*r + 1) % f.q));
                if candidate {
                    if let Some(root) = is_perfect_square(&(&acc + 1u32)) {
                        found.push(ScanHit {
                            n,
                            p: None,
                            kind: HitKind::Brocard,
                            root: Some(root),
                        });
                    }
                }
            }
            if let Some(l) = log {
                l.record(CheckpointRecord {
                    schema: CHECKPOINT_SCHEMA,
                    kind: KIND_BROCARD.into(),
                    n_max: Some(n_max),
                    p_max: None,
                    lo,
                    hi,
                    hits: found.iter().map(to_recorded).collect(),
                    checksum: String::new(),
                })
                .expect("checkpoint write failed");
            }
            found
        })
        .collect();

    let mut hits: Vec<ScanHit> = per_chunk.into_iter().flatten().collect();
    hits.sort_by_key(|h| h.n);
    hits.iter().for_each(assert_brocard_hit);
    Ok(hits)
}

/// One σ₀/2^ω row per n ≤ n_max, factoring n!+1 under the per-n budget.
pub fn build_table(n_max: u64, budget: &Budget) -> Result<Vec<TableRow>, ScanError> {
    build_table_seeded(n_max, budget, DEFAULT_RHO_SEED)
}

pub fn build_table_seeded(
    n_max: u64,
    budget: &Budget,
    seed: u64,
) -> Result<Vec<TableRow>, ScanError> {
    assert!(n_max >= 1, "n_max must be ≥ 1");
    if n_max > FACTORIAL_LIMIT {
        return Err(ArithError::FactorialLimit { n: n_max, limit: FACTORIAL_LIMIT }.into());
    }
    let rows = (1..=n_max)
        .collect::<Vec<u64>>()
        .into_par_iter()
        .map(|n| {
            let value = factorial(n).expect("below the factorial limit") + 1u32;
            let f = factorize_seeded(&value, budget, seed);
            let (sigma0, two_pow_omega) = match f.status() {
                Status::Complete => (
                    Some(divisor::sigma0(&f).expect("complete factorization")),
                    Some(divisor::two_pow_omega(&f).expect("complete factorization")),
                ),
                Status::Partial => (None, None),
            };
            TableRow {
                n,
                sigma0,
                two_pow_omega,
                probabilistic: f.probabilistic(),
                status: f.status(),
                in_excluded_set: in_excluded_set(n),
            }
        })
        .collect();
    Ok(rows)
}

/// Verdict for one n: first seek a small squared divisor by the residue
/// route (primes p ≤ p_max, pruned to p > n), then factorize for a
/// definitive answer. SquareFree is only ever concluded from a Complete
/// factorization — absence of small squared factors proves nothing.
pub fn verify_conjecture(n: u64, p_max: u64, budget: &Budget) -> Result<Verdict, ScanError> {
    verify_conjecture_seeded(n, p_max, budget, DEFAULT_RHO_SEED)
}

pub fn verify_conjecture_seeded(
    n: u64,
    p_max: u64,
    budget: &Budget,
    seed: u64,
) -> Result<Verdict, ScanError> {
    assert!(n >= 1, "n must be ≥ 1");
    assert!(p_max >= 2, "p_max must be ≥ 2");
    if n > FACTORIAL_LIMIT {
        return Err(ArithError::FactorialLimit { n, limit: FACTORIAL_LIMIT }.into());
    }

    for &p in sieve_primes(p_max)?.iter().filter(|&&p| p > n) {
        if factorial_plus_one_roots_mod_p2(p, n).contains(&n) {
            let hit = ScanHit { n, p: Some(p), kind: HitKind::SquareDivisor, root: None };
            assert_square_divisor_hit(&hit);
            return Ok(verdict_from(n, SquarefreeStatus::NotSquareFree(BigUint::from(p))));
        }
    }

    let value = factorial(n)? + 1u32;
    let f = factorize_seeded(&value, budget, seed);
    Ok(verdict_from(n, squarefree_status(&f)))
}

fn verdict_from(n: u64, outcome: SquarefreeStatus) -> Verdict {
    let consistent_with_conjecture = match &outcome {
        SquarefreeStatus::SquareFree => !in_excluded_set(n),
        SquarefreeStatus::NotSquareFree(_) => in_excluded_set(n),
        SquarefreeStatus::Unknown => true,
    };
    Verdict { n, outcome, consistent_with_conjecture }
}

// ============================================================================
// Tests
// ============================================================================
