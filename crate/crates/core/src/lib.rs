//! Point sets whose pairwise distances stay away from the integers.
//!
//! For a gap parameter delta ∈ (0, 1/2), a set of points is *valid*
//! when every pairwise distance differs from every integer by at least
//! delta. This crate builds large valid sets, verifies validity with
//! exact integer arithmetic where possible, and produces checkable
//! analytic certificates for the harmonic-analysis side of the story.
//!
//! The pieces:
//!
//! * [`geometry`]: points, norms, the gap predicate, and the all-pairs
//!   verifier. Integer-coordinate sets are decided exactly; floating
//!   sets are decided conservatively with declared coordinate slack.
//! * [`constructions`]: a digit-based three-dimensional family with
//!   polynomially many points, and a snowflake-curve lift producing
//!   valid sets from a bilipschitz embedding.
//! * [`certificates`]: trigonometric negativity certificates found by
//!   linear programming and checked independently on a fresh grid,
//!   Bessel-sum positivity diagnostics, and the growth-exponent case
//!   table with its recursion integral.
//! * [`oracles`]: exact maximum valid subsets on small instances,
//!   seeded generators, and executable forms of the torus-counting and
//!   slab-projection arguments, for property testing everything else.
//! * [`io`]: plain-text file formats that round-trip exactly.

#![forbid(unsafe_code)]

pub mod certificates;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod io;
pub mod oracles;
pub mod rational;

pub use error::{Error, Result};
pub use geometry::{pairwise_verify, ArithMode, NormSpec, Point, PointSet, VerificationReport};
pub use rational::Delta;
