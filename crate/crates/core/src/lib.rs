//! Numerical Moebius differential geometry of surfaces and similarity
//! geometry of plane curves on uniform conformal charts.

pub mod catalog;
pub mod deform;
pub mod error;
pub mod hazzidakis;
pub mod invariants;
pub mod lightcone;
pub mod numgrid;
pub mod residuals;
pub mod selftest;
pub mod simcurve;
pub mod tolerances;

pub use error::{Error, ErrorCategory, Result};
pub use numgrid::{ConformalChart, FieldKind, ScalarField};
pub use tolerances::{TolProfile, Tolerances};
