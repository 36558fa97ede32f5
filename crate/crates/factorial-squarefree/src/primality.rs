//! Primality testing on two tiers: a deterministic Miller-Rabin for word-size
//! inputs (fixed 12-base set, sound for all x < 2^64) and a reproducible
//! probabilistic Miller-Rabin for big integers whose extra bases are derived
//! from a hash of the tested value, so repeated runs agree without any
//! global seed.

use crate::arith::Natural;
use crate::util::{mulmod, powmod, splitmix64};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Primes below 64: the trial-division prefix and the lookup table for tiny
/// inputs.
const SMALL_PRIMES: [u64; 18] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];

/// Fixed Miller-Rabin base set; deterministic for every x < 2^64.
const WORD_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Default round count for [`is_probable_prime`].
pub const DEFAULT_MR_ROUNDS: u32 = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimalityVerdict {
    /// Issued only by the deterministic word-size path.
    Prime,
    /// Issued only by the big-integer path: every tested base passed.
    ProbablePrime,
    /// Definitive, with evidence.
    Composite(CompositeWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompositeWitness {
    /// A divisor d of x with 1 < d < x.
    Divisor(Natural),
    /// A Miller-Rabin base that demonstrates compositeness when replayed.
    StrongBase(Natural),
    /// 0 and 1 are not prime by definition; no witness exists for them.
    Trivial,
}

impl PrimalityVerdict {
    /// Whether downstream code may treat the value as prime.
    pub fn is_prime_or_probable(&self) -> bool {
        matches!(self, PrimalityVerdict::Prime | PrimalityVerdict::ProbablePrime)
    }

    /// True exactly for [`PrimalityVerdict::ProbablePrime`]: primality was
    /// not proven, only tested.
    pub fn is_probabilistic(&self) -> bool {
        matches!(self, PrimalityVerdict::ProbablePrime)
    }
}

/// Deterministic word-size primality: trial division by the primes below 64,
/// then Miller-Rabin with [`WORD_BASES`]. Never returns `ProbablePrime`.
pub fn is_prime_small(x: u64) -> PrimalityVerdict {
    if x < 64 {
        if x < 2 {
            return PrimalityVerdict::Composite(CompositeWitness::Trivial);
        }
        if SMALL_PRIMES.contains(&x) {
            return PrimalityVerdict::Prime;
        }
        // Composites below 64 have a prime factor below 8.
        let d = SMALL_PRIMES.iter().copied().find(|p| x.is_multiple_of(*p)).unwrap();
        return PrimalityVerdict::Composite(CompositeWitness::Divisor(BigUint::from(d)));
    }
    for p in SMALL_PRIMES {
        if x.is_multiple_of(p) {
            return PrimalityVerdict::Composite(CompositeWitness::Divisor(BigUint::from(p)));
        }
    }
    let (d, s) = decompose_word(x - 1);
    for a in WORD_BASES {
        if word_strong_witness(x, a, d, s) {
            return PrimalityVerdict::Composite(CompositeWitness::StrongBase(BigUint::from(a)));
        }
    }
    PrimalityVerdict::Prime
}

/// Probabilistic primality for big integers. `Composite` is definitive and
/// carries replayable evidence; `ProbablePrime` means the base-2 strong test
/// plus `rounds` hash-derived bases all passed. Never returns `Prime`.
pub fn is_probable_prime(x: &Natural, rounds: u32) -> PrimalityVerdict {
    assert!(*x >= BigUint::from(2u32), "x must be ≥ 2");
    let rounds = rounds.max(1);
    if let Some(w) = x.to_u64() {
        if w < 64 {
            return match is_prime_small(w) {
                PrimalityVerdict::Prime => PrimalityVerdict::ProbablePrime,
                c => c,
            };
        }
    }
    for p in SMALL_PRIMES {
        if (x % p).is_zero() {
            return if x.to_u64() == Some(p) {
                PrimalityVerdict::ProbablePrime
            } else {
                PrimalityVerdict::Composite(CompositeWitness::Divisor(BigUint::from(p)))
            };
        }
    }

    let minus_one = x - 1u32;
    let s = minus_one.trailing_zeros().expect("x is odd and > 2");
    let d = &minus_one >> s as usize;

    let two = BigUint::from(2u32);
    if big_strong_witness(x, &two, &d, s, &minus_one) {
        return PrimalityVerdict::Composite(CompositeWitness::StrongBase(two));
    }

    // Extra bases in [2, x-2], derived from a hash of x: reproducible runs
    // with no global RNG.
    let span = x - 3u32;
    let mut state = hash_value(x);
    for _ in 0..rounds {
        state = splitmix64(state);
        let base = BigUint::from(state) % &span + 2u32;
        if big_strong_witness(x, &base, &d, s, &minus_one) {
            return PrimalityVerdict::Composite(CompositeWitness::StrongBase(base));
        }
    }
    PrimalityVerdict::ProbablePrime
}

/// x - 1 = d · 2^s with d odd.
fn decompose_word(minus_one: u64) -> (u64, u32) {
    let s = minus_one.trailing_zeros();
    (minus_one >> s, s)
}

/// True iff `a` proves x composite in the strong test. x odd, ≥ 3, a ≥ 2.
fn word_strong_witness(x: u64, a: u64, d: u64, s: u32) -> bool {
    let mut t = powmod(a, d, x);
    if t == 1 || t == x - 1 {
        return false;
    }
    for _ in 1..s {
        t = mulmod(t, t, x);
        if t == x - 1 {
            return false;
        }
    }
    true
}

fn big_strong_witness(x: &Natural, a: &Natural, d: &Natural, s: u64, minus_one: &Natural) -> bool {
    let mut t = a.modpow(d, x);
    if t.is_one() || t == *minus_one {
        return false;
    }
    for _ in 1..s {
        t = (&t * &t) % x;
        if t == *minus_one {
            return false;
        }
    }
    true
}

fn hash_value(x: &Natural) -> u64 {
    let mut h = 0x6A09_E667_F3BC_C909u64;
    for byte in x.to_bytes_le() {
        h = splitmix64(h ^ byte as u64);
    }
    h
}

// ============================================================================
// Tests
// ============================================================================
