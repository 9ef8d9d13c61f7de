//! Set covering with an ordered replacement property.
//!
//! A set system over a partially ordered ground set *respects* the order when
//! swapping any element of a feasible set for a smaller one keeps the set
//! feasible, and costs never increase under such swaps. Many packing problems
//! (bin packing and its variants) are covering problems of this shape.
//!
//! The crate provides:
//! * exact-rational covering LPs with multiplicities ([`lp`]),
//! * pseudo sizes, chain covers and the additive-gap rounding loop
//!   ([`sizes`], [`rounding`]),
//! * a quasi-polynomial dynamic-programming 2-approximation, randomized
//!   multiplicative rounding, first-fit and an exact branch-and-bound oracle
//!   ([`approx`]),
//! * generators for lower-bound instance families and packing-variant
//!   adapters ([`instances`]),
//! * a benchmark CLI ([`cli`], binary `ordered-cover`).
//!
//! Everything that ends up in a report is exact: rationals are serialized as
//! `"p/q"` strings and no tolerance is applied anywhere.

pub mod approx;
pub mod cli;
pub mod error;
pub mod instances;
pub mod lp;
pub mod model;
pub mod rat;
pub mod rounding;
pub mod sizes;

pub use error::{Error, Result};
pub use rat::Rat;
