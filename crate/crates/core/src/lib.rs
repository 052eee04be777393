//! Number-theoretic kernels for studying small gaps between primes.
//!
//! The crate provides windowed multiplicative-function tables, truncated
//! divisor sums and their correlation statistics against sieved primes, the
//! singular series with certified truncation error, and an exact-rational
//! optimizer for the Poisson moment form whose sign change is governed by
//! the smallest zeros of generalized Laguerre polynomials.
//!
//! Everything here is pure computation over in-memory arrays; file formats,
//! caching, and the command-line surface live in the companion `pgl-cli`
//! crate. The crate builds without `std` (an allocator is required).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod correlate;
pub mod divisor;
mod error;
mod float;
pub mod gaps;
pub mod laguerre;
pub mod poisson;
pub mod qform;
pub mod rat;
pub mod sum;
pub mod tuples;

pub use error::{Error, Result};
