//! Piecewise-linear homeomorphisms of `[0, inf)` with bounded slopes and
//! their group operations.
//!
//! Maps carry a finite part on `[0, T]` and one of two tails: affine, or
//! geometric (self-similar under a rational scale). Composition, inversion
//! and powers are exact and stay inside these two classes, with the
//! exception of an affine tail with nonzero intercept composed against a
//! geometric one, which is reported as [`Error::TailNotClosed`](crate::Error::TailNotClosed).

mod canon;
mod map;
mod ops;
mod segments;

pub(crate) use canon::canonicalize;
pub use map::{Piece, PlMap, RawMap, RawTail, Tail};
pub(crate) use ops::common_scale;
pub use ops::{
    bilip_constant, compose, compose_capped, difference_witness, invert, maps_equal,
    maps_equal_capped, power, slope_bounds, SlopeBounds, DEFAULT_COMMENSURABILITY_CAP,
};
pub use segments::Segments;

/// Validates a raw description; see [`PlMap::validate`].
pub fn validate(raw: &RawMap) -> crate::Result<PlMap> {
    PlMap::validate(raw)
}

/// Exact `f(x)` for `x >= 0`.
pub fn evaluate(f: &PlMap, x: &crate::ExactRational) -> crate::Result<crate::ExactRational> {
    f.eval(x)
}
