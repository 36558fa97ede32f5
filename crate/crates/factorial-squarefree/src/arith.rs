//! Arbitrary-precision and word-size arithmetic primitives: factorials,
//! modular-factorial residue streams, integer square roots, perfect-square
//! testing, and a plain Eratosthenes prime sieve.
//!
//! Everything here is pure; `ResidueStream` is the one stateful type and is
//! meant to be owned by a single scan worker at a time.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary-precision nonnegative integer. `BigUint` already keeps a
/// canonical representation (equal values compare equal), so it is used
/// directly rather than wrapped.
pub type Natural = BigUint;

/// Default refusal bound for [`factorial`]: 20000! has on the order of
/// 77000 digits, comfortably above every scan range this crate runs while
/// still catching runaway inputs.
pub const FACTORIAL_LIMIT: u64 = 20_000;

/// [`sieve_primes`] allocates one bit per candidate; refuse limits whose bit
/// array would pass ~12.5 MB.
pub const SIEVE_LIMIT: u64 = 100_000_000;

/// Moduli below 2^63 run the residue stream on plain words (products fit in
/// u128); larger moduli fall back to big-integer arithmetic.
const WORD_MODULUS_BOUND: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("factorial({n}) exceeds the configured bound {limit}")]
    FactorialLimit { n: u64, limit: u64 },
    #[error("sieve limit {limit} exceeds the memory ceiling {ceiling}")]
    SieveBudget { limit: u64, ceiling: u64 },
}

/// Exact n! under the default bound [`FACTORIAL_LIMIT`].
pub fn factorial(n: u64) -> Result<Natural, ArithError> {
    factorial_bounded(n, FACTORIAL_LIMIT)
}

/// Exact n! = 1·2·…·n, refusing n above `limit`. factorial(0) = 1.
pub fn factorial_bounded(n: u64, limit: u64) -> Result<Natural, ArithError> {
    if n > limit {
        return Err(ArithError::FactorialLimit { n, limit });
    }
    let mut acc = Natural::one();
    for k in 2..=n {
        acc *= k;
    }
    Ok(acc)
}

enum Repr {
    Word { modulus: u64, residue: u64 },
    Big { modulus: BigUint, residue: BigUint },
}

/// Incremental n! mod m: holds (n, n! mod m) and advances by one modular
/// multiplication per step. Word-size arithmetic when m < 2^63.
pub struct ResidueStream {
    n: u64,
    repr: Repr,
}

impl ResidueStream {
    /// Starts at n = 0 with residue 0! mod m = 1 mod m. Modulus must be ≥ 2.
    pub fn new(modulus: Natural) -> ResidueStream {
        assert!(modulus >= BigUint::from(2u32), "modulus must be ≥ 2");
        let repr = match modulus.to_u64() {
            Some(m) if m < WORD_MODULUS_BOUND => Repr::Word { modulus: m, residue: 1 },
            _ => Repr::Big { residue: BigUint::one(), modulus },
        };
        ResidueStream { n: 0, repr }
    }

    pub fn current_n(&self) -> u64 {
        self.n
    }

    pub fn current_residue(&self) -> Natural {
        match &self.repr {
            Repr::Word { residue, .. } => BigUint::from(*residue),
            Repr::Big { residue, .. } => residue.clone(),
        }
    }

    pub fn is_word(&self) -> bool {
        matches!(self.repr, Repr::Word { .. })
    }

    /// Steps to (n+1)! and returns the new (n, n! mod m).
    pub fn advance(&mut self) -> (u64, Natural) {
        self.step();
        (self.n, self.current_residue())
    }

    /// Allocation-free variant of [`advance`](Self::advance) for word-size
    /// moduli; `None` when the modulus needed big-integer arithmetic.
    pub fn advance_word(&mut self) -> Option<(u64, u64)> {
        if !self.is_word() {
            return None;
        }
        self.step();
        match &self.repr {
            Repr::Word { residue, .. } => Some((self.n, *residue)),
            Repr::Big { .. } => unreachable!(),
        }
    }

    fn step(&mut self) {
        self.n += 1;
        let k = self.n;
        match &mut self.repr {
            Repr::Word { modulus, residue } => {
                // residue < 2^63 and k ≤ 2^64: the product fits in u128.
                *residue = ((*residue as u128 * k as u128) % *modulus as u128) as u64;
            }
            Repr::Big { modulus, residue } => {
                *residue *= k;
                *residue %= &*modulus;
            }
        }
    }
}

/// The sequence (n, n! mod modulus) for n = 1..=n_max.
pub fn factorial_residues(modulus: &Natural, n_max: u64) -> FactorialResidues {
    assert!(n_max >= 1, "n_max must be ≥ 1");
    FactorialResidues { stream: ResidueStream::new(modulus.clone()), n_max }
}

pub struct FactorialResidues {
    stream: ResidueStream,
    n_max: u64,
}

impl Iterator for FactorialResidues {
    type Item = (u64, Natural);

    fn next(&mut self) -> Option<(u64, Natural)> {
        if self.stream.current_n() >= self.n_max {
            return None;
        }
        Some(self.stream.advance())
    }
}

/// Floor square root by Newton iteration. The initial guess 2^⌈bits/2⌉ is
/// strictly above √x, so the iteration decreases monotonically onto the
/// floor; the first non-decreasing step ends it (taking the smaller value).
pub fn isqrt(x: &Natural) -> Natural {
    if x.is_zero() {
        return Natural::zero();
    }
    let mut r: Natural = Natural::one() << x.bits().div_ceil(2) as usize;
    loop {
        let next: Natural = (&r + x / &r) >> 1;
        if next >= r {
            return r;
        }
        r = next;
    }
}

/// Returns the root r with r·r = x, if one exists. 0 and 1 are squares.
pub fn is_perfect_square(x: &Natural) -> Option<Natural> {
    let r = isqrt(x);
    if &r * &r == *x {
        Some(r)
    } else {
        None
    }
}

/// All primes ≤ limit, ascending, by a plain Eratosthenes bit array.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>, ArithError> {
    if limit > SIEVE_LIMIT {
        return Err(ArithError::SieveBudget { limit, ceiling: SIEVE_LIMIT });
    }
    if limit < 2 {
        return Ok(Vec::new());
    }
    let n = limit as usize;
    let mut words = vec![u64::MAX; n / 64 + 1];
    let clear = |words: &mut [u64], i: usize| words[i / 64] &= !(1 << (i % 64));
    let test = |words: &[u64], i: usize| words[i / 64] >> (i % 64) & 1 == 1;
    clear(&mut words, 0);
    clear(&mut words, 1);
    let mut p = 2usize;
    while p * p <= n {
        if test(&words, p) {
            let mut m = p * p;
            while m <= n {
                clear(&mut words, m);
                m += p;
            }
        }
        p += 1;
    }
    Ok((2..=n).filter(|&i| test(&words, i)).map(|i| i as u64).collect())
}

// ============================================================================
// Tests
// ============================================================================
