//! Spectral adaptive state-space (SASS) layers and their training substrate.
//!
//! The crate has two computation paths for the same linear-time-invariant
//! sequence operator:
//!
//! * [`ssm`] — the classical reference path: a continuous (A, B, C, Δ) system,
//!   bilinear discretization, kernel unrolling, a recurrent scan, and direct
//!   O(L²) convolutions. Deliberately slow and simple; it is the oracle.
//! * [`spectral`] — the fast path: a directly parameterized complex kernel
//!   applied by FFT, with input-dependent frequency gating (pulse gate) and a
//!   magnitude-gated spectral unit (SAGU), plus exact hand-written reverse-mode
//!   gradients for every stage.
//!
//! [`numerics`] provides the shared complex vector type and the forward and
//! inverse discrete Fourier transforms (iterative radix-2 for power-of-two
//! lengths, Bluestein chirp-z for everything else). [`model`] stacks the
//! spectral core into residual blocks with projections, feed-forward units,
//! and classification heads; [`autodiff`] carries the parameter registry,
//! AdamW, the learning-rate schedule, and a central-finite-difference gradient
//! checker; [`data`] generates the deterministic synthetic tasks; [`train`]
//! runs the desk-scale training loop.
//!
//! The crate is `no_std` (with `alloc`): everything here is pure computation.
//! Timers, files, and the CLI live in the companion `sass-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod autodiff;
pub mod data;
pub mod error;
mod linalg;
pub mod model;
pub mod numerics;
pub mod rng;
pub mod spectral;
pub mod ssm;
pub mod train;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
