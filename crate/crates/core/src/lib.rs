//! Exact analysis of least squares problems regularized by convex piecewise linear functions.

pub mod budget;
pub mod error;
pub mod exact;
pub mod format;
pub mod lp;
pub mod numeric;
mod pattern;
pub mod polyhedra;
pub mod pwl;
pub mod reductions;
pub mod tvgraph;
pub mod wellposed;

pub use budget::Budget;
pub use error::{Error, Result};
