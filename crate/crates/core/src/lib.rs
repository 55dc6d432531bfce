//! Exact arithmetic for the 0th K-theory cooperations of connective K-theory.
//!
//! The crate builds two bases of the module of semistable numerical
//! polynomials and relates them:
//!
//! - [`semistable`]: the binomial polynomials `p_n`, the classical
//!   semistable basis `g_n(w) = (w-1)(w-3)...(w-(2n-1)) / (2^n n!)`, exact
//!   expansion in that basis and p-local integrality tests.
//! - [`phi`]: the generators `phi_n` built from the right unit on the
//!   Hazewinkel generators, both by their closed recursion and by an
//!   independent symbolic elimination, and the square-free (digit) monomials
//!   in them.
//! - [`filtration`]: a computable weight on 2-local semistable polynomials
//!   that models Adams filtration, the congruences between `g_n` and the
//!   `phi` monomials, and filtration-graded expansion in the `phi` monomials.
//! - [`margolis`]: the weight pieces `M1(k)` of `(A//E(1))_*`, the `Q0`/`Q1`
//!   differentials and their Margolis homology.
//!
//! Everything is exact. The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod filtration;
pub mod margolis;
pub mod phi;
pub mod poly;
pub mod semistable;

mod error;

pub use arith::{Prime, Rational, Valuation};
pub use error::{Error, Result};
pub use poly::Poly;

/// Default cap on residue evaluations and enumeration sizes.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Default cap on the `w`-degree of any polynomial the crate is asked to build.
pub const DEFAULT_MAX_DEGREE: u64 = 4096;
