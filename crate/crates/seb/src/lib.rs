//! Smallest enclosing ball of a finite point set.
//!
//! Four solvers over one representation (points as columns of a matrix,
//! candidate centers as barycentric weight vectors):
//!
//! * [`recurrence`]: a fixed-point iteration `w <- R w + c` on the weight
//!   simplex whose limit is the ball's barycentric coordinate vector, with
//!   convergence governed by the spectrum analyzed in [`spectral`].
//! * [`heuristic`]: the same iteration plus a drop-and-restart rule that
//!   removes points whose weight goes negative, converging on the support
//!   set alone.
//! * [`equidistant`]: a direct linear solve for the unique sphere through
//!   n affinely independent points.
//! * [`welzl`]: the exact randomized recursive algorithm, used as ground
//!   truth by the [`bench`] harness.
//!
//! [`io`] holds the CSV/JSON conventions (17 significant digits
//! everywhere), [`report`] the JSON report shapes the CLI emits.

pub mod bench;
pub mod equidistant;
pub mod error;
pub mod geometry;
pub mod heuristic;
pub mod io;
pub mod recurrence;
pub mod report;
pub mod spectral;
pub mod welzl;

pub use error::{Error, Result};
pub use geometry::{Ball, Barycentric, PointSet};
