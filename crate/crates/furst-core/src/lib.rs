//! Constructive density of multiplicative orbits `{a^u b^v α}` on the circle.
//!
//! For coprime bases `a, b ≥ 2` the semigroup `Σ = {a^u b^v : u, v ≥ 0}` is
//! dense enough that `{qα mod 1 : q ∈ Σ}` comes within an explicit distance of
//! every point of `[0, 1)`, with an effective bound of roughly
//! `1/(log log log Q)^{1/8}` once `α` is anchored by a rational `A/Q`. This
//! crate implements every step of that construction with exact arithmetic:
//!
//! - [`sunits`] — enumeration of `Σ(M) = {a^u b^v ≤ M}`, exact lattice counts
//!   against the two-term asymptotic, and gap statistics of consecutive
//!   elements.
//! - [`circle`] — points of `ℚ/ℤ` as reduced fractions, the orbit
//!   `Σ_α(M) = {qα mod 1}`, exact dispersion, and minimal positive gaps.
//! - [`alpha`] — real-number specs (rational / continued fraction / decimal),
//!   convergents, Dirichlet approximation, ψ-badness witnesses, and a
//!   certified probe of `|log a / log b − p/q|`.
//! - [`netgen`] — the pigeonhole Δ-net: a difference `η′ − η″` of two orbit
//!   points spawns a net `{q_j(η′ − η″)}` whose dispersion is certified by
//!   the gap structure of `Σ` itself.
//! - [`digits`] — base-`a` digit sets `𝔛_n = {⌊a^n {qα}⌋}`, their projections,
//!   congruence strata, and the search for a stratum that is both large and
//!   short enough to hand to the harmonic step.
//! - [`harmonics`] — the multiplicative subgroup `⟨b⟩ mod a^ℓ`, its complete
//!   exponential sums, second-moment bounds for stratum sums, triangle-bump
//!   equidistribution remainders, and the final shift search that places
//!   `b^w x / a^s` next to a target.
//! - [`pipeline`] — the end-to-end solvers: density reports for `Σ_α(Q^{1+δ})`,
//!   inhomogeneous approximation `‖qα − β‖` by brute force or by the full
//!   constructive pipeline, and ψ-bad uniform statements.
//! - [`real`] — the certified arithmetic everything above leans on: dyadic
//!   big-floats, outward-rounded intervals, and `ln`/`exp` with explicit
//!   truncation tails, so every comparison against a transcendental quantity
//!   is either decided or reported as undecided, never guessed.
//! - [`verify`] — the acceptance checks wired into the test suite and the
//!   `verify-all` CLI command.
//!
//! All counts, gaps, dispersions and search results are exact (`BigUint` /
//! `BigRational`); floating point appears only where the object itself is a
//! float (exponential-sum magnitudes, asymptotic estimates) or as input that
//! is converted exactly to a dyadic rational.

#![forbid(unsafe_code)]

pub mod alpha;
pub mod circle;
pub mod digits;
mod error;
pub mod harmonics;
pub mod netgen;
pub mod pipeline;
pub mod real;
pub mod regression;
pub mod sunits;
pub(crate) mod util;
pub mod verify;

pub use error::{Error, Result};
