//! Integer factorization into canonical prime-power form: trial division for
//! small primes, perfect-power detection, and Brent's variant of Pollard rho
//! with batched gcds, orchestrated under a wall-clock/iteration budget.
//!
//! Hard inputs degrade to a `Partial` result carrying the unfactored
//! composite cofactor; they never produce wrong entries.

use crate::arith::{isqrt, sieve_primes, Natural};
use crate::primality::{is_prime_small, is_probable_prime, PrimalityVerdict, DEFAULT_MR_ROUNDS};
use crate::util::{gcd_u64, mulmod, splitmix64};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

/// Trial division runs to 10^5 by default: removes every small prime cheaply
/// and keeps rho inputs free of easy factors.
pub const DEFAULT_TRIAL_BOUND: u64 = 100_000;

/// Documented default seed: rho attempt k on a cofactor uses seed + k, so the
/// polynomial offset escalates 1, 2, 3, … from a fresh run.
pub const DEFAULT_RHO_SEED: u64 = 0;

/// Iteration cap per rho attempt (per polynomial offset).
pub const DEFAULT_RHO_ITERATION_CAP: u64 = 1 << 26;

/// Default wall-clock budget, sized for the hardest rows the table builder
/// meets at desk scale.
pub const DEFAULT_WALL_CLOCK_MS: u64 = 120_000;

/// Batched-gcd stride inside rho.
const GCD_BATCH: u64 = 128;

/// Rho polynomial offsets cycle within this span as the seed escalates.
const RHO_C_SPAN: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactorizationError {
    #[error("entries must be strictly ascending by prime")]
    UnorderedEntries,
    #[error("multiplicities must be ≥ 1")]
    ZeroMultiplicity,
    #[error("cofactor must be ≥ 2")]
    InvalidCofactor,
    #[error("entries and cofactor do not reconstruct the value")]
    ReconstructionMismatch,
}

/// One prime power p^a of the canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorEntry {
    pub prime: Natural,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    Partial,
}

/// A (possibly partial) factorization: `value = Π prime^multiplicity ×
/// cofactor`, entries strictly ascending. `factorize` guarantees any cofactor
/// it returns is composite; `trial_division` may return a cofactor it could
/// not classify from the bound alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: Natural,
    entries: Vec<FactorEntry>,
    cofactor: Option<Natural>,
    probabilistic: bool,
}

impl Factorization {
    /// Validates ordering, multiplicities, and the reconstruction identity.
    pub fn new(
        value: Natural,
        entries: Vec<FactorEntry>,
        cofactor: Option<Natural>,
        probabilistic: bool,
    ) -> Result<Factorization, FactorizationError> {
        if entries.iter().any(|e| e.multiplicity == 0) {
            return Err(FactorizationError::ZeroMultiplicity);
        }
        if entries.windows(2).any(|w| w[0].prime >= w[1].prime) {
            return Err(FactorizationError::UnorderedEntries);
        }
        if let Some(c) = &cofactor {
            if *c < BigUint::from(2u32) {
                return Err(FactorizationError::InvalidCofactor);
            }
        }
        let f = Factorization { value, entries, cofactor, probabilistic };
        if f.reconstruct() != f.value {
            return Err(FactorizationError::ReconstructionMismatch);
        }
        Ok(f)
    }

    /// Complete factorization built from entries alone; the value is their
    /// product. Entries must be ascending with positive multiplicities.
    pub fn from_entries(entries: Vec<FactorEntry>) -> Result<Factorization, FactorizationError> {
        let value = entries
            .iter()
            .map(|e| e.prime.pow(e.multiplicity))
            .product::<BigUint>()
            .max(BigUint::one());
        Factorization::new(value, entries, None, false)
    }

    /// The empty factorization of 1.
    pub fn one() -> Factorization {
        Factorization {
            value: BigUint::one(),
            entries: Vec::new(),
            cofactor: None,
            probabilistic: false,
        }
    }

    pub fn value(&self) -> &Natural {
        &self.value
    }

    pub fn entries(&self) -> &[FactorEntry] {
        &self.entries
    }

    pub fn cofactor(&self) -> Option<&Natural> {
        self.cofactor.as_ref()
    }

    pub fn status(&self) -> Status {
        if self.cofactor.is_none() {
            Status::Complete
        } else {
            Status::Partial
        }
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }

    /// True when at least one entry is certified only ProbablePrime.
    pub fn probabilistic(&self) -> bool {
        self.probabilistic
    }

    /// Π prime^multiplicity × cofactor — must equal the value.
    pub fn reconstruct(&self) -> Natural {
        let mut acc: Natural = self
            .entries
            .iter()
            .map(|e| e.prime.pow(e.multiplicity))
            .product();
        if acc.is_zero() {
            acc = BigUint::one(); // empty product
        }
        match &self.cofactor {
            Some(c) => acc * c,
            None => acc,
        }
    }
}

/// Wall-clock plus per-attempt iteration budget for `factorize`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    wall_clock: Duration,
    rho_iteration_cap: u64,
}

impl Budget {
    pub fn new(wall_clock_ms: u64, rho_iteration_cap: u64) -> Budget {
        assert!(wall_clock_ms > 0, "wall-clock budget must be positive");
        assert!(rho_iteration_cap > 0, "iteration cap must be positive");
        Budget { wall_clock: Duration::from_millis(wall_clock_ms), rho_iteration_cap }
    }

    pub fn wall_clock(&self) -> Duration {
        self.wall_clock
    }

    pub fn iteration_cap(&self) -> u64 {
        self.rho_iteration_cap
    }
}

impl Default for Budget {
    fn default() -> Budget {
        Budget::new(DEFAULT_WALL_CLOCK_MS, DEFAULT_RHO_ITERATION_CAP)
    }
}

/// Extracts every prime factor ≤ bound with exact multiplicity. The remainder
/// is classified from the bound alone: with no factor ≤ d it must be prime
/// whenever it is < d², so such remainders become the final entry; anything
/// larger is returned as an unclassified cofactor for the caller to resolve.
pub fn trial_division(x: &Natural, bound: u64) -> Factorization {
    assert!(*x >= BigUint::from(2u32), "x must be ≥ 2");
    let mut rem = x.clone();
    let mut entries: Vec<FactorEntry> = Vec::new();
    let mut remainder_is_prime = false;

    let mut d: u64 = 2;
    while d <= bound {
        if let Some(r) = rem.to_u128() {
            if (d as u128) * (d as u128) > r {
                remainder_is_prime = r > 1;
                break;
            }
        }
        if (&rem % d).is_zero() {
            let mut multiplicity = 0u32;
            loop {
                rem /= d;
                multiplicity += 1;
                if !(&rem % d).is_zero() {
                    break;
                }
            }
            entries.push(FactorEntry { prime: BigUint::from(d), multiplicity });
        }
        // 2, 3, then the 6k±1 wheel.
        d = match d {
            2 => 3,
            3 => 5,
            _ if d % 6 == 5 => d + 2,
            _ => d + 4,
        };
    }

    // The wheel may exhaust the bound before its square passes the remainder;
    // the first untried candidate still certifies a small remainder as prime.
    if !remainder_is_prime {
        if let Some(r) = rem.to_u128() {
            remainder_is_prime = r > 1 && (d as u128) * (d as u128) > r;
        }
    }

    let cofactor = if rem.is_one() {
        None
    } else if remainder_is_prime {
        entries.push(FactorEntry { prime: rem, multiplicity: 1 });
        None
    } else {
        Some(rem)
    };
    Factorization::new(x.clone(), entries, cofactor, false)
        .expect("trial division output is canonical by construction")
}

/// Returns (b, e) with b^e = x and e maximal, or None when x is not a perfect
/// power. x ≥ 2.
pub fn perfect_power(x: &Natural) -> Option<(Natural, u32)> {
    assert!(*x >= BigUint::from(2u32), "x must be ≥ 2");
    let bits = x.bits();
    // Candidate exponents are primes: composite exponents decompose through
    // them, and the recursion below restores maximality.
    let exponents = sieve_primes(bits).expect("bit length is far below the sieve ceiling");
    for e in exponents {
        let e = e as u32;
        let root = if e == 2 { isqrt(x) } else { kth_root_floor(x, e) };
        if root.pow(e) == *x {
            return match perfect_power(&root) {
                Some((base, inner)) => Some((base, inner * e)),
                None => Some((root, e)),
            };
        }
    }
    None
}

/// Floor of x^(1/k) by binary search on the root's bit range.
fn kth_root_floor(x: &Natural, k: u32) -> Natural {
    let mut lo = BigUint::zero();
    let mut hi: Natural = BigUint::one() << (x.bits() / k as u64 + 1) as usize;
    // Invariant: lo^k ≤ x < hi^k.
    while &lo + 1u32 < hi {
        let mid: Natural = (&lo + &hi) >> 1;
        if mid.pow(k) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// One Brent-cycle attempt on an odd composite x ≥ 9 with f(t) = t² + c.
/// Both the offset c = 1 + (seed mod 2^16) and the starting point derive from
/// `seed`, so consecutive seeds escalate the polynomial. Gcds are batched
/// every 128 steps; a collapsed batch (gcd = x) is replayed stepwise. None
/// means the iteration cap ran out — a budget signal, not an error.
pub fn pollard_rho(x: &Natural, seed: u64, cap: u64) -> Option<Natural> {
    rho_attempt(x, seed, cap, None)
}

fn rho_attempt(x: &Natural, seed: u64, cap: u64, deadline: Option<Instant>) -> Option<Natural> {
    debug_assert!(x.is_odd() && *x >= BigUint::from(9u32));
    if let Some(w) = x.to_u64() {
        return rho_word(w, seed, cap, deadline).map(BigUint::from);
    }

    let c = BigUint::from(1 + seed % RHO_C_SPAN);
    let start = BigUint::from(splitmix64(seed)) % (x - 3u32) + 2u32;
    let f = |t: &Natural| (t * t + &c) % x;

    let mut y = start;
    let mut q = BigUint::one();
    let mut r: u64 = 1;
    let mut iterations: u64 = 0;
    loop {
        let anchor = y.clone();
        if iterations.saturating_add(r) > cap {
            return None;
        }
        for _ in 0..r {
            y = f(&y);
        }
        iterations += r;

        let mut k = 0u64;
        while k < r {
            let batch_start = y.clone();
            let m = GCD_BATCH.min(r - k);
            for _ in 0..m {
                y = f(&y);
                let diff = if anchor > y { &anchor - &y } else { &y - &anchor };
                q = q * diff % x;
            }
            iterations += m;
            k += m;

            let g = q.gcd(x);
            if !g.is_one() {
                if g != *x {
                    return Some(g);
                }
                // The factor appeared somewhere inside this batch: replay it
                // one step at a time. A zero difference means the cycle
                // closed without exposing a factor; the attempt fails.
                let mut ys = batch_start;
                for _ in 0..m {
                    ys = f(&ys);
                    let diff = if anchor > ys { &anchor - &ys } else { &ys - &anchor };
                    let g = diff.gcd(x);
                    if !g.is_one() {
                        return (g != *x).then_some(g);
                    }
                }
                return None;
            }
            if iterations >= cap {
                return None;
            }
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    return None;
                }
            }
        }
        r *= 2;
    }
}

/// Word-size mirror of the big-integer attempt.
fn rho_word(x: u64, seed: u64, cap: u64, deadline: Option<Instant>) -> Option<u64> {
    let c = 1 + seed % RHO_C_SPAN;
    let start = splitmix64(seed) % (x - 3) + 2;
    let f = |t: u64| mulmod(t, t, x).wrapping_add(c) % x;

    let mut y = start;
    let mut q: u64 = 1;
    let mut r: u64 = 1;
    let mut iterations: u64 = 0;
    loop {
        let anchor = y;
        if iterations.saturating_add(r) > cap {
            return None;
        }
        for _ in 0..r {
            y = f(y);
        }
        iterations += r;

        let mut k = 0u64;
        while k < r {
            let batch_start = y;
            let m = GCD_BATCH.min(r - k);
            for _ in 0..m {
                y = f(y);
                q = mulmod(q, anchor.abs_diff(y), x);
            }
            iterations += m;
            k += m;

            let g = gcd_u64(q, x);
            if g != 1 {
                if g != x {
                    return Some(g);
                }
                let mut ys = batch_start;
                for _ in 0..m {
                    ys = f(ys);
                    let g = gcd_u64(anchor.abs_diff(ys), x);
                    if g != 1 {
                        return (g != x).then_some(g);
                    }
                }
                return None;
            }
            if iterations >= cap {
                return None;
            }
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    return None;
                }
            }
        }
        r *= 2;
    }
}

/// Full factorization pipeline under the default rho seed. See
/// [`factorize_seeded`].
pub fn factorize(x: &Natural, budget: &Budget) -> Factorization {
    factorize_seeded(x, budget, DEFAULT_RHO_SEED)
}

/// Trial division to [`DEFAULT_TRIAL_BOUND`], then per composite cofactor:
/// primality check, perfect-power extraction, and rho with escalating
/// polynomial offsets, recursing on splits. Runs that exhaust the wall clock
/// return `Partial` with the product of everything still unfactored as the
/// (composite) cofactor. The wall clock is consulted between rho batches, so
/// a run may overshoot the budget by at most one pipeline step.
pub fn factorize_seeded(x: &Natural, budget: &Budget, seed: u64) -> Factorization {
    assert!(!x.is_zero(), "x must be ≥ 1");
    let deadline = Instant::now() + budget.wall_clock();
    if x.is_one() {
        return Factorization::one();
    }

    let sieved = trial_division(x, DEFAULT_TRIAL_BOUND);
    let mut found: BTreeMap<Natural, u32> = BTreeMap::new();
    for e in sieved.entries() {
        found.insert(e.prime.clone(), e.multiplicity);
    }
    let mut probabilistic = false;
    let mut unresolved: Vec<(Natural, u32)> = Vec::new();
    // (component, exponent scale): a perfect-power split b^e contributes its
    // factors with e times the scale.
    let mut pending: Vec<(Natural, u32)> = match sieved.cofactor() {
        Some(c) => vec![(c.clone(), 1)],
        None => Vec::new(),
    };

    while let Some((component, scale)) = pending.pop() {
        let verdict = match component.to_u64() {
            Some(w) => is_prime_small(w),
            None => is_probable_prime(&component, DEFAULT_MR_ROUNDS),
        };
        match verdict {
            PrimalityVerdict::Prime => {
                *found.entry(component).or_insert(0) += scale;
                continue;
            }
            PrimalityVerdict::ProbablePrime => {
                probabilistic = true;
                *found.entry(component).or_insert(0) += scale;
                continue;
            }
            PrimalityVerdict::Composite(_) => {}
        }

        if let Some((base, exp)) = perfect_power(&component) {
            pending.push((base, scale * exp));
            continue;
        }

        // Composite, not a perfect power: rho with escalating offsets until a
        // split lands or the budget runs out.
        let mut split = None;
        let mut attempt = 0u64;
        while Instant::now() < deadline {
            if let Some(d) =
                rho_attempt(&component, seed.wrapping_add(attempt), budget.iteration_cap(), Some(deadline))
            {
                split = Some(d);
                break;
            }
            attempt += 1;
        }
        match split {
            Some(d) => {
                let other = &component / &d;
                pending.push((d, scale));
                pending.push((other, scale));
            }
            None => unresolved.push((component, scale)),
        }
    }

    let cofactor = if unresolved.is_empty() {
        None
    } else {
        Some(unresolved.iter().map(|(c, s)| c.pow(*s)).product::<BigUint>())
    };
    let entries = found
        .into_iter()
        .map(|(prime, multiplicity)| FactorEntry { prime, multiplicity })
        .collect();
    Factorization::new(x.clone(), entries, cofactor, probabilistic)
        .expect("pipeline output reconstructs its input")
}

// ============================================================================
// Tests
// ============================================================================
