//! Blaschke addition, symmetrization and affine functionals for
//! log-concave functions, computed exactly on piecewise-linear potentials.
//!
//! The crate is organised bottom-up: [`convex2d`] holds classical polygon
//! geometry, [`logconcave`] the two function classes, [`measures`] their
//! surface area measure pairs, [`solver`] the inverse problem, and
//! [`blaschke`] and [`functionals`] build on those.

pub mod blaschke;
pub mod convex2d;
pub mod corpus;
pub mod error;
pub mod functionals;
pub mod logconcave;
pub mod measures;
pub mod solver;

pub use error::{Error, Result};
