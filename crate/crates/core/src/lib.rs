//! Evaluation and numerical classification of inner functions on the unit disc.
//!
//! The crate evaluates finite Blaschke products and atomic singular inner functions
//! with certified modulus bounds, generates the standard families of zero sets, and
//! estimates the quantities that separate the classes of inner functions: the
//! `eta` curve, Carleson-Newman constants, Carleson box sums, thinness and
//! narrowness of sublevel sets. Boundary sets of finite entropy and the associated
//! dyadic constructions live in [`entropy`].

// validation is written as `!(x > 0.0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod schema;
pub mod turns;
pub mod zoo;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/geometry.md")]
mod book_geometry {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/evaluation.md")]
mod book_evaluation {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/zoo.md")]
mod book_zoo {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/diagnostics.md")]
mod book_diagnostics {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/entropy.md")]
mod book_entropy {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
