//! Error type shared by all library modules.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by library operations.
///
/// All operations validate their preconditions up front and return one of
/// these variants instead of panicking; panics are reserved for internal
/// invariant violations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation received an empty vector where L ≥ 1 is required.
    EmptyInput,
    /// Two operands (or an operand and a parameter set) disagree on length
    /// or shape. `context` names the check site.
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    /// The bilinear discretization matrix (I − Δ/2·A) is singular or too
    /// ill-conditioned to solve reliably.
    SingularDiscretization { cond_estimate: f64 },
    /// A per-channel operation was asked for a channel index ≥ H.
    ChannelOutOfRange { channel: usize, channels: usize },
    /// A scalar function under gradient check evaluated to NaN or ±∞.
    NonFinite(&'static str),
    /// A configuration or specification value violates its invariants.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "empty input: length must be at least 1"),
            Error::ShapeMismatch {
                context,
                expected,
                found,
            } => write!(
                f,
                "shape mismatch in {context}: expected {expected}, found {found}"
            ),
            Error::SingularDiscretization { cond_estimate } => write!(
                f,
                "singular discretization: (I - delta/2 A) condition estimate {cond_estimate:.3e} exceeds 1e12"
            ),
            Error::ChannelOutOfRange { channel, channels } => {
                write!(f, "channel {channel} out of range (H = {channels})")
            }
            Error::NonFinite(what) => write!(f, "non-finite value encountered in {what}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
