//! Verification toolkit for the square-freeness of n!+1.
//!
//! For n outside a small excluded set S = {4, 5, 7, 12, 23, 229, 562}, every
//! value n!+1 examined to date is square-free. This crate factors n!+1,
//! checks the divisor-count identity σ₀ = 2^ω (which holds exactly for
//! square-free numbers), and runs the three searches that probe the
//! conjecture from different angles: squared prime divisors p² | n!+1,
//! Wilson primes p² | (p−1)!+1, and Brocard squares n!+1 = m².
//!
//! ```
//! use factorial_squarefree::{arith, divisor, factorization};
//! use num_bigint::BigUint;
//!
//! // 12!+1 = 13^2 * 2834329, so the square-free identity fails for n = 12.
//! let value = arith::factorial(12).unwrap() + 1u32;
//! let f = factorization::factorize(&value, &factorization::Budget::default());
//! assert!(f.is_complete());
//! assert_eq!(divisor::sigma0(&f).unwrap(), BigUint::from(6u32));
//! assert_eq!(divisor::two_pow_omega(&f).unwrap(), BigUint::from(4u32));
//! assert!(!divisor::identity_holds(&f).unwrap());
//! ```

pub mod arith;
pub mod checkpoint;
pub mod cli;
pub mod divisor;
pub mod factorization;
pub mod primality;
pub mod scan;

mod util;
