//! Exact-arithmetic toolkit for bisecting planar point sets with line arrangements.
//!
//! Given `2n` labeled point sets in general position, an arrangement of `n`
//! oriented lines two-colors the plane by parity of positive sides. This crate
//! finds arrangements that leave exactly `⌊|P_i|/2⌋` points of every set in
//! each color class, and ships the machinery around that search:
//!
//! - [`geometry`]: rational points, the orientation predicate, parity region labels
//! - [`instance`]: input families, validation, odd-size padding and post-solve repair
//! - [`arrangement`]: the matching-based arrangement representation and bisection predicates
//! - [`brute`]: exhaustive enumeration of all bisecting arrangements (the oracle)
//! - [`separated`]: hull-disjointness tests and per-pair cuts with prescribed counts
//! - [`homotopy`]: the path-following solver that drags start bisections to the target
//! - [`ppa`]: the search graph behind the solver, made explicit and auditable
//! - [`necklace`]: the moment-curve embedding of necklace splitting and solution lifting
//! - [`io`]: file formats (all coordinates as exact `numerator/denominator` strings)
//! - [`svg`]: deterministic figure rendering
//!
//! Every predicate is decided in exact rational arithmetic; there is no
//! floating point anywhere in the solve paths.

pub mod arrangement;
pub mod brute;
pub mod geometry;
pub mod homotopy;
pub mod instance;
pub mod io;
pub mod necklace;
pub mod ppa;
pub mod samples;
pub mod separated;
pub mod svg;

pub use arrangement::{Arrangement, BalanceReport};
pub use geometry::{
    orient, Anchor, Orientation, OrientedLine, Point, PointRef, Rational, RegionLabel, SideLabel,
};
pub use instance::PointFamily;
