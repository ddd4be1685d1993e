//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Error {
    UnknownGenerator(String),
    TruncationMismatch {
        left: u32,
        right: u32,
    },
    /// An operation defined on the ghost-only algebra T received an antighost.
    AntighostPresent(String),
    NonHomogeneous,
    /// Resolution does not reach deep enough for the requested truncation.
    ResolutionTooShallow {
        needed_level: u32,
        have_level: u32,
    },
    /// A slice linear system had no solution within the given bounds.
    SliceTooSmall {
        context: &'static str,
        degree: i64,
        poly_degree_bound: u32,
    },
    /// A step produced data violating a theorem-level invariant.
    InvariantViolation(String),
    /// The charge fails the classical master equation at this truncation.
    MasterEquationFails {
        weight: u32,
    },
    /// Gauge/quantum matching precondition failed.
    Precondition(String),
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownGenerator(name) => write!(f, "unknown generator `{}`", name),
            Error::TruncationMismatch { left, right } => {
                write!(f, "truncation mismatch: {} vs {}", left, right)
            }
            Error::AntighostPresent(name) => {
                write!(
                    f,
                    "antighost `{}` not allowed here (T-only operation)",
                    name
                )
            }
            Error::NonHomogeneous => write!(f, "input must be homogeneous"),
            Error::ResolutionTooShallow {
                needed_level,
                have_level,
            } => write!(
                f,
                "resolution too shallow: need ghosts down to degree -{}, have -{}",
                needed_level, have_level
            ),
            Error::SliceTooSmall {
                context,
                degree,
                poly_degree_bound,
            } => write!(
                f,
                "slice too small in {}: no solution at degree {} within polynomial degree {}",
                context, degree, poly_degree_bound
            ),
            Error::InvariantViolation(msg) => write!(f, "invariant violation: {}", msg),
            Error::MasterEquationFails { weight } => {
                write!(
                    f,
                    "classical master equation fails: residual at weight {}",
                    weight
                )
            }
            Error::Precondition(msg) => write!(f, "precondition failed: {}", msg),
            Error::Parse {
                line,
                column,
                message,
            } => {
                write!(f, "parse error at {}:{}: {}", line, column, message)
            }
        }
    }
}

impl core::error::Error for Error {}
