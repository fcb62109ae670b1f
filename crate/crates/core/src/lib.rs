//! Refined elliptic broccoli invariants of toric surfaces, computed exactly
//! by a lattice path algorithm.

pub mod error;
pub mod invariant;
pub mod exactmath;
pub mod lattice;
pub mod oracle;
pub mod pathsub;
pub mod qweights;
pub mod tropcurve;

pub use error::{Error, Result};
pub use exactmath::{Laurent, LaurentY, Rational, RationalFunction};
pub use lattice::{pt, Degree, Direction, NewtonPolygon, Point};
