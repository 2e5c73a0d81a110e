//! Finitary toolkit for zero-dimensional dynamical models.
//!
//! The crate is organized around five concerns:
//!
//! * [`symbolic`] — alphabets, words, multi-row array windows, subshifts
//!   (SFT and substitution) with cached language oracles, empirical
//!   frequency tables, and a weak-star distance between tables.
//! * [`markers`] — marker word sets for subshifts: exhaustive verification
//!   of the separation/covering conditions and a greedy search.
//! * [`embedding`] — marker-aligned row insertion: turning a host window
//!   into a taller array whose new rows carry prescribed pattern
//!   frequencies up to a certified error.
//! * [`encoder`] — metric systems (circle rotations, symbolic systems),
//!   one-parameter cover families, boundary-mass estimates with explicit
//!   quadrature tolerances, a Cantor-parameter selector table, and
//!   array-name encodings with a recoverability check.
//! * [`simplex`] — finite simplexes, barycentric coordinates, retractions
//!   onto faces, clopen-style set decomposition, and a staged gluing
//!   construction with per-stage certificates.
//!
//! Heavy inner loops (language scans, quadrature sums, batch window
//! checks) run on rayon when the default `parallel` feature is enabled
//! and fall back to equivalent sequential code without it; both lanes
//! produce bit-identical results.

pub mod embedding;
pub mod encoder;
pub mod markers;
pub mod par;
pub mod simplex;
pub mod symbolic;
