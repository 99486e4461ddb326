//! L^2-Alexander invariants: sparse Laurent polynomials, twisted Fuglede-Kadison
//! determinants computed through Mahler measures, degree and asymptote
//! analysis, and torsion functions of 3-manifolds.

pub mod degree;
pub mod error;
mod intpoly;
pub mod laurent;
pub mod mahler;
pub mod torsion;
pub mod twist;

pub use degree::{det_function, AsymptoteReport, DetFunction};
pub use error::{Error, Result};
pub use laurent::{ExponentVector, LaurentMatrix, LaurentPoly};
pub use mahler::{mahler_1v, mahler_mv, MahlerEstimate, MahlerOptions};
pub use torsion::{TorsionFunction, TorsionSpec, TorsionValue};
pub use twist::CohomClass;
