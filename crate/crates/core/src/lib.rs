//! Convolutionally coded transmission over interleaved Rician fading channels.
//!
//! The crate is `no_std` (with `alloc`) and covers the pure algorithmic layer:
//!
//! - [`convcode`]: shift-register encoders, trellises and exact weight enumeration
//!   of the transfer function coefficients.
//! - [`specfun`]: Gaussian Q, modified Bessel I₀, the closed-form Gaussian moment
//!   integral used by the bounds, and an adaptive Simpson integrator.
//! - [`channel`]: the Rician envelope sampler, AWGN and energy bookkeeping.
//! - [`decoder`]: the CSI-weighted Viterbi decoder with the Yamamoto-Itoh
//!   reliability label and retransmission verdict.
//! - [`bounds`]: union bounds on first-event, bit error and retransmission
//!   probabilities plus the asymptotic exponent predictions.
//!
//! IO, CSV sweeps and the command line live in the `yiarq-sim` crate.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod channel;
pub mod convcode;
pub mod decoder;
mod error;
pub mod specfun;

pub use error::{Error, Result};
