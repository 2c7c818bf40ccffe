//! Monte-Carlo experiment engine for Yamamoto-Itoh decoding on Rician
//! fading channels: sweeps, bound evaluation and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod estimate;
pub mod grid;
pub mod harness;
pub mod output;

mod error;

pub use error::{Result, SimError};
