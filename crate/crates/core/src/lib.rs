//! Exact computation on finite median algebras, finite median metric spaces
//! and finite spaces with measured walls.
//!
//! The modules build on each other bottom-up:
//!
//! - [`algebra`]: median tables, validation, intervals, convexity and gates;
//! - [`halfspaces`]: the halfspace pocset, rank, chain decompositions,
//!   filters and ultrafilters;
//! - [`metric`]: exact-rational median metrics, wall weights and
//!   `ℓ¹` embeddings of intervals;
//! - [`duality`]: ultrafilter enumeration, double dual, zero-completion and
//!   medianization of wall spaces;
//! - [`generators`]: instance families;
//! - [`io`] and [`cli`]: the JSON document format and the command line;
//! - [`harness`]: the invariant suite and scorecard.

pub mod algebra;
pub mod bitset;
pub mod cli;
pub mod duality;
pub mod error;
pub mod generators;
pub mod halfspaces;
pub mod harness;
pub mod io;
pub mod metric;
pub mod rational;
pub mod report;

pub use algebra::{validate, MedianAlgebra, MedianTable};
pub use bitset::{BitSet, PointId, PointSet};
pub use error::{Error, Result};
pub use halfspaces::{HalfspaceSystem, SideSelection};
pub use metric::FiniteMedianSpace;
pub use rational::Rational;
pub use report::ValidationReport;
