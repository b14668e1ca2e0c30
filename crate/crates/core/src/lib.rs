//! Regularity classes read off eigenfunction expansions on the circle, the
//! flat 2-torus and the round 2-sphere.
//!
//! A function (or functional) is reduced to the Hilbert-Schmidt norms of
//! its coefficient blocks, one per eigenvalue of `E = -Δ + c`. Membership in
//! a Komatsu class `Γ_{M_k}` is then a statement about how fast those norms
//! decay against `exp(-M(L λ^{1/ν}))`, with `M` the associated function of
//! the weight sequence; dual classes swap decay for growth.
//!
//! - [`weights`]: weight sequences, condition checks, associated function.
//! - [`spectrum`]: model operators, levels, bases, Weyl-type checks.
//! - [`transform`]: quadrature transforms and level-blocked coefficients.
//! - [`synth`]: coefficient vectors with prescribed profiles.
//! - [`classify`]: decay fits and membership decisions.

pub mod classify;
pub mod spectrum;
pub(crate) mod stats;
pub mod synth;
pub mod transform;
pub mod weights;
