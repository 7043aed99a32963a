//! Toolkit for computing with finitely generated groups (and semigroups) of
//! orientation-preserving homeomorphisms of the interval, the circle, and the
//! line.
//!
//! Everything that can be exact is exact: maps are given by pieces with
//! rational data (affine, power, Cantor-aligned), points are arbitrary-size
//! rationals, and evaluations that cannot be exact (rational powers such as
//! `x^(1/3)`) return validated enclosures of any requested width.
//!
//! The crate is organized around a pipeline:
//!
//! * [`homeo`] — piecewise monotone maps, validation, evaluation, words in
//!   generators.
//! * [`cantor`] — ternary-address machinery for the middle-thirds Cantor set,
//!   split homeomorphisms, and the two-generator Cantor-preserving system.
//! * [`action`] — generator systems, orbit enumeration, witness intervals,
//!   circle reduction, interval transport, stabilizer search.
//! * [`classify`] — empirical classification of orbit samples (dense /
//!   integer type / Cantor type / accumulation on a proper subset), level
//!   estimation, parallel-orbit testing.
//! * [`catalog`] — ready-made generator systems for the standard example
//!   constructions, with designated points and ladders.

pub mod action;
pub mod cantor;
pub mod catalog;
pub mod classify;
pub mod enclosure;
pub mod homeo;
pub mod rational;

pub use enclosure::Enclosure;
pub use rational::Rational;
