//! Convex hull certificates for epigraphs of quadratically constrained
//! quadratic programs whose convex Lagrange multipliers form a polyhedron.
//!
//! The pipeline is: diagonalize the Hessians ([`linalg`]), build the
//! multiplier polyhedron Γ and its faces ([`gamma`]), check sufficient
//! conditions for `conv(D) = D_SDP` ([`certify`]), write the hull as finitely
//! many convex quadratics and decompose relaxation points into true epigraph
//! points ([`hull`]).

pub mod certify;
pub mod error;
pub mod gamma;
pub mod generators;
pub mod hull;
pub mod linalg;
pub mod plot;
pub mod problem;
pub mod solve;

pub use certify::{analyze, ConditionReport, Verdict};
pub use error::{Error, Result};
pub use gamma::{DualModel, Face, FaceClass, Gamma, OptimalFace, PolyhedronH, PolyhedronV};
pub use problem::{EpigraphPoint, FeasReport, QuadraticFn, Qcqp};
pub use hull::{ConvexCombination, SocDescription};
pub use solve::{Bounds, SolveResult};
