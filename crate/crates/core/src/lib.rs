//! Exact algebra of piecewise-linear homeomorphisms of the half-line with
//! bounded slopes, modulo the subgroup `H` of maps with `f(x)/x -> 1`.
//!
//! * [`plcore`]: the maps themselves and the group law.
//! * [`asymptotics`]: the asymptotic ratio set `S_f`, membership in `H`,
//!   coset equivalence and quotient-level composition.
//! * [`witnesses`]: constructors and checkers for non-commuting partners,
//!   torsion certificates, conjugation, and a seeded map sampler.
//! * [`textio`]: the `.plm` text format.
//! * [`suites`]: the property suites run by `plq check`.

pub mod asymptotics;
mod error;
pub mod plcore;
pub mod rational;
pub mod suites;
pub mod textio;
pub mod witnesses;

pub use asymptotics::{
    coset_equivalent, in_h, normalize_mod_h, quotient_compose, s_invariant, torsion_order_check,
    CosetDecision, SInvariant,
};
pub use error::{Error, Result};
pub use plcore::{
    bilip_constant, compose, evaluate, invert, maps_equal, power, slope_bounds, validate, PlMap,
    SlopeBounds, Tail,
};
pub use rational::ExactRational;
