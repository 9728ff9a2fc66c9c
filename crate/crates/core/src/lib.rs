//! Counting methods for bibliometric credit allocation.
//!
//! A *counting method* is the combination of three choices: the basic units of
//! analysis found in publications (authors, addresses read as institutions or
//! countries), the objects of study whose scores are wanted (any aggregation
//! level at or above the basic units), and a score function that turns one
//! publication into credits for its basic units. This crate models all three
//! axes explicitly so the same score function can be studied at any level:
//!
//! - [`corpus`] — publications, bylines, addresses, attribution maps between
//!   aggregation levels, JSON-Lines I/O, and seeded corpus synthesis.
//! - [`scorefn`] — score functions: the classic five (complete,
//!   complete-fractionalized, straight, whole, whole-fractionalized) plus
//!   rank-weight families (harmonic, proportional, geometric), attribute-based
//!   weighting, equal-contribution floors, visibility ratios, and exact
//!   Shapley values.
//! - [`aggregate`] — object-of-study score tables, object unions, and
//!   rescoring through lower aggregation levels.
//! - [`classify`] — empirical classification of a score function against the
//!   five crediting properties (defined-for-all, fixed scheme, additive,
//!   rank dependence, fractionalized) with self-certifying counterexamples.
//! - [`registry`] — the catalog of 36 counting methods with validity lint
//!   flags, literature metadata, and bindings to executable score functions.
//! - [`npi`] — institutional point systems built on rooted publication
//!   fractions (k-th roots, level points, international bonus) and the
//!   floored fractionalized variant.
//! - [`harness`] — comparison and adequacy tooling: Gini, discrete power-law
//!   fits, Spearman rank correlation, cross-method comparisons, and group
//!   balance summaries.

pub mod aggregate;
pub mod classify;
pub mod corpus;
pub mod harness;
pub mod npi;
pub mod registry;
pub mod scorefn;
