//! Capacity regions of compound multiple-access channels with a common
//! message or with rate-limited conferencing between the encoders, the
//! minimal cooperation recovering full-cooperation performance, and a
//! desk-scale Monte Carlo check that the one-shot conference coding
//! scheme actually decodes.
//!
//! Modules:
//! - [`prob`]: finite distributions, kernels, product-form joints and
//!   mutual information in bits;
//! - [`channel`]: compound states, CSIT partitions, channel files,
//!   grid quantization;
//! - [`policy`] / [`polytope`] / [`region`]: input policies, per-policy
//!   rate polytopes and max-min region optimization;
//! - [`conference`] / [`codebook`]: one-shot conference plans, Willems
//!   iteration, half-lattice codebooks, the joint-typicality decoder and
//!   error simulation;
//! - [`typicality`]: typed sequences with exact small-instance checks;
//! - [`cli`]: the command-line front end.

pub mod channel;
pub mod cli;
pub mod codebook;
pub mod conference;
pub mod error;
pub mod optim;
pub mod policy;
pub mod polytope;
pub mod prob;
pub mod region;
pub mod typicality;

pub use error::{Error, Result};
