//! Core algorithms for deciding strong, weak, delay, and pattern-based
//! equivalences on finite weighted transition systems.
//!
//! The crate is organised around a small stack of concepts:
//!
//! * [`semiring`] — exact arithmetic in the boolean, extended-natural and
//!   extended-rational semirings, including the star operation used by the
//!   linear solvers.
//! * [`valuation`] — finite-support maps into a semiring (the monad the
//!   systems live in), with Kleisli extension, join, sum and quotient
//!   projection.
//! * [`pattern`] — observation patterns: finite trace-set automata closed
//!   under word derivatives, with the strong/weak/delay built-ins.
//! * [`system`] — weighted transition systems, partitions and the
//!   probabilistic sub-class validators.
//! * [`fixpoint`] — solvers for the recursive behaviour equation, plus the
//!   truncated path-sum oracle.
//! * [`bisim`] — pattern bisimulation checking, partition refinement and the
//!   brute-force reference procedures.
//! * [`transform`] — saturation-based and continuation-based reductions of
//!   pattern bisimulation to kernel bisimulation.
//! * [`segala`] — simple Segala systems, convex valuation sets with exact
//!   hull membership, and weak probabilistic bisimulation.
//!
//! All arithmetic is exact; no floating point enters any decision. The crate
//! is `no_std` (with `alloc`) so the algorithmic core stays independent of
//! the I/O layer in the companion crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bisim;
pub mod fixpoint;
pub mod pattern;
pub mod random;
pub mod segala;
pub mod semiring;
pub mod system;
pub mod transform;
pub mod valuation;

pub use semiring::{Kind, Value};
pub use valuation::Valuation;
