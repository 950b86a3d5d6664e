//! Drawstring metric deformations around codimension-2 submanifolds.
//!
//! The crate builds the radial profile functions of a drawstring, evaluates
//! the deformed metric on a handful of model geometries, and checks the
//! resulting curvature, distance, volume and mean-curvature estimates against
//! independent numerical oracles. Everything here is `no_std` with `alloc`;
//! file formats and the command-line front end live in the `drawstring` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// Guards are written `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cutoffs;
pub mod curvature;
pub mod error;
pub mod inversion;
pub mod math;
pub mod models;
pub mod profile;
pub mod pulled;
pub mod quad;
pub mod verifier;

pub use error::{Error, Result};
