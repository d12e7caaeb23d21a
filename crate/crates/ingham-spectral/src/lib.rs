//! Spectral transforms on radial profiles and Ingham-type uncertainty audits.
//!
//! Hankel and Jacobi transforms, rank-one symmetric space spherical functions,
//! Dunkl transforms for reflection groups of type Z2^d, and the box-product
//! constructions used to test quasi-analytic decay against compact support.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dunkl;
pub mod error;
pub mod ingham;
pub mod numerics;
pub mod specfun;
pub mod symmetric_space;
pub mod transforms;

pub use error::{Error, Result, Warning};
