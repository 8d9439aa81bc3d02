use alloc::string::String;
use core::fmt;

/// Errors shared by the exact and numeric halves of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Angle text did not match `p/q` or `0.<bits>:<bits>`.
    MalformedAngle(String),
    /// Denominator was zero.
    ZeroDenominator,
    /// Parsed value lies outside `[0, 1]`.
    AngleOutOfRange(String),
    /// Operation requires a periodic angle (preperiod 0).
    NotPeriodic,
    /// Operation requires a strictly preperiodic angle.
    NotPreperiodic,
    /// Kneading sequence is not *-periodic, so it has no internal address.
    NotStarPeriodic,
    /// Requested size exceeds what the implementation enumerates.
    BoundExceeded { what: &'static str, limit: u64, got: u64 },
    /// Invalid solver configuration field.
    BadConfig(&'static str),
    /// Newton iteration failed to converge.
    NewtonDiverged { context: &'static str },
    /// Boundary continuation ran out of step halvings.
    ContinuationFailed { at_radius: f64 },
    /// Root search ended with fewer distinct solutions than expected.
    IncompleteRoots { found: usize, expected: usize },
    /// Newton found a solution with smaller preperiod or period than asked.
    WrongOrbitType { preperiod: u64, period: u64 },
    /// An internal consistency assertion failed; indicates a bug.
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MalformedAngle(s) => write!(f, "malformed angle `{s}`"),
            Error::ZeroDenominator => write!(f, "angle denominator is zero"),
            Error::AngleOutOfRange(s) => write!(f, "angle `{s}` outside [0, 1]"),
            Error::NotPeriodic => write!(f, "angle is not periodic under doubling"),
            Error::NotPreperiodic => write!(f, "angle is not strictly preperiodic"),
            Error::NotStarPeriodic => write!(f, "kneading sequence is not *-periodic"),
            Error::BoundExceeded { what, limit, got } => {
                write!(f, "{what} {got} exceeds supported bound {limit}")
            }
            Error::BadConfig(what) => write!(f, "invalid solver config: {what}"),
            Error::NewtonDiverged { context } => write!(f, "newton diverged in {context}"),
            Error::ContinuationFailed { at_radius } => {
                write!(f, "boundary continuation stalled at radius {at_radius}")
            }
            Error::IncompleteRoots { found, expected } => {
                write!(f, "found {found} of {expected} expected roots")
            }
            Error::WrongOrbitType { preperiod, period } => {
                write!(f, "solution has different orbit type than ({preperiod}, {period})")
            }
            Error::Internal(what) => write!(f, "internal consistency error: {what}"),
        }
    }
}

impl core::error::Error for Error {}
