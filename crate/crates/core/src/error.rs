use thiserror::Error;

use crate::rational::{show, ExactRational};

/// Errors raised by map construction and the group operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("breakpoints must be strictly increasing (piece {index} ends at {end}, not after {previous})")]
    NonMonotoneBreakpoints {
        index: usize,
        previous: String,
        end: String,
    },
    #[error("slope {slope} of piece {index} is not strictly positive")]
    NonPositiveSlope { index: usize, slope: String },
    #[error(
        "geometric tail is not self-similar: f(base*T) = {actual}, but base*f(T) = {expected}"
    )]
    GeometricConsistencyViolation { expected: String, actual: String },
    #[error("geometric pattern must end exactly at base*T = {expected}, found {actual}")]
    PatternSpan { expected: String, actual: String },
    #[error("map description is empty: {0}")]
    EmptyMap(&'static str),
    #[error("geometric base must be greater than 1, found {0}")]
    InvalidBase(String),
    #[error("a geometric tail needs a positive tail start; add at least one finite piece")]
    GeometricTailAtOrigin,
    #[error("input {0} is negative; maps are defined on [0, inf)")]
    NegativeInput(String),
    #[error("tail of the outer map ({outer}) does not compose with the tail of the inner map ({inner}); compose the coset representatives with quotient_compose instead")]
    TailNotClosed { outer: String, inner: String },
    #[error(
        "geometric scales {first} and {second} share no common integer power within cap {cap}"
    )]
    IncommensurableScales {
        first: String,
        second: String,
        cap: u32,
    },
    #[error("linear tail slope {0} is not above 1 and the inverse fallback does not apply")]
    SlopeNotAboveOne(String),
    #[error("anchor {anchor} lies below the tail start {tail_start}")]
    AnchorBelowTailStart { anchor: String, tail_start: String },
    #[error("anchor sequences need a normalized map with a pure linear tail")]
    NotLinearTail,
    #[error("the map lies in H, so its class is the identity and no witness exists")]
    InHNoWitness,
    #[error("sampler exhausted its budget of {0} attempts")]
    RejectionLimitExceeded(usize),
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(&'static str),
}

impl Error {
    /// True for errors describing a malformed map rather than a failed operation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonMonotoneBreakpoints { .. }
                | Error::NonPositiveSlope { .. }
                | Error::GeometricConsistencyViolation { .. }
                | Error::PatternSpan { .. }
                | Error::EmptyMap(_)
                | Error::InvalidBase(_)
                | Error::GeometricTailAtOrigin
        )
    }

    pub(crate) fn incommensurable(first: &ExactRational, second: &ExactRational, cap: u32) -> Self {
        Error::IncommensurableScales {
            first: show(first),
            second: show(second),
            cap,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
