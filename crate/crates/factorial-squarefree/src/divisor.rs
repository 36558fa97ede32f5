//! Divisor-count arithmetic on factorizations: σ₀, ω, and the square-free
//! identity σ₀ = 2^ω, plus an increment sieve that computes σ₀ without any
//! factorization at all — the two routes cross-check each other.

use crate::arith::Natural;
use crate::factorization::{Factorization, Status};
use num_bigint::BigUint;
use num_traits::One;

/// The increment sieve allocates a u32 per index; 10^7 keeps it well under a
/// hundred megabytes and a few seconds of work.
pub const DIVISOR_SIEVE_CEILING: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DivisorError {
    #[error("σ₀ and ω need every prime factor; the factorization is partial")]
    IncompleteFactorization,
    #[error("divisor sieve limit {limit} exceeds the ceiling {ceiling}")]
    SieveBudget { limit: u64, ceiling: u64 },
}

/// Verdict on square-freeness, possibly from a partial factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquarefreeStatus {
    SquareFree,
    /// Carries a witness prime whose square divides the value.
    NotSquareFree(Natural),
    /// Partial factorization with every known multiplicity 1: the cofactor
    /// could still hide a square.
    Unknown,
}

fn require_complete(f: &Factorization) -> Result<(), DivisorError> {
    match f.status() {
        Status::Complete => Ok(()),
        Status::Partial => Err(DivisorError::IncompleteFactorization),
    }
}

/// σ₀ = Π (aᵢ + 1), the divisor count. Natural-valued: highly composite
/// inputs overflow any fixed width.
pub fn sigma0(f: &Factorization) -> Result<Natural, DivisorError> {
    require_complete(f)?;
    Ok(f.entries()
        .iter()
        .map(|e| BigUint::from(e.multiplicity + 1))
        .product::<BigUint>()
        .max(BigUint::one()))
}

/// ω, the number of distinct prime factors.
pub fn omega(f: &Factorization) -> Result<u64, DivisorError> {
    require_complete(f)?;
    Ok(f.entries().len() as u64)
}

pub fn two_pow_omega(f: &Factorization) -> Result<Natural, DivisorError> {
    Ok(BigUint::one() << omega(f)? as usize)
}

/// σ₀ = 2^ω holds exactly for square-free numbers: every multiplicity must
/// be 1 for (aᵢ+1) to stay at 2.
pub fn identity_holds(f: &Factorization) -> Result<bool, DivisorError> {
    Ok(sigma0(f)? == two_pow_omega(f)?)
}

/// Square-freeness tolerates partial factorizations: one multiplicity ≥ 2
/// settles the question regardless of the cofactor, while an all-ones
/// partial result stays Unknown.
pub fn squarefree_status(f: &Factorization) -> SquarefreeStatus {
    for e in f.entries() {
        if e.multiplicity >= 2 {
            return SquarefreeStatus::NotSquareFree(e.prime.clone());
        }
    }
    match f.status() {
        Status::Complete => SquarefreeStatus::SquareFree,
        Status::Partial => SquarefreeStatus::Unknown,
    }
}

/// σ₀ for every n ≤ limit by the increment sieve: each d bumps all its
/// multiples. No factorization, no primality — an independent oracle for the
/// identity-based route. Index 0 is unused.
pub fn divisor_count_sieve(limit: u64) -> Result<Vec<u32>, DivisorError> {
    if limit > DIVISOR_SIEVE_CEILING {
        return Err(DivisorError::SieveBudget { limit, ceiling: DIVISOR_SIEVE_CEILING });
    }
    let n = limit as usize;
    let mut counts = vec![0u32; n + 1];
    for d in 1..=n {
        for multiple in (d..=n).step_by(d) {
            counts[multiple] += 1;
        }
    }
    Ok(counts)
}

// ============================================================================
// Tests
// ============================================================================
