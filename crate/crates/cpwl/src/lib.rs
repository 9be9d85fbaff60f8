//! Stable hat-basis parametrization of continuous piecewise-linear (CPWL)
//! functions on simplicial triangulations.
//!
//! The crate provides:
//! - exact simplex geometry ([`geometry`]);
//! - triangulation construction, validation, star queries and JSON I/O
//!   ([`triangulation`]);
//! - hat-basis evaluation, exact L_p norms and inner products, and Gram
//!   matrix assembly ([`basis`]);
//! - Riesz bounds and condition numbers for the synthesis operator
//!   ([`riesz`]);
//! - linear box splines on lattices with exact Riesz bounds ([`boxspline`]);
//! - the one-dimensional nonlocal ReLU-shift parametrization and its
//!   conditioning ([`nonlocal`]);
//! - brute-force quadrature oracles used to certify the closed forms
//!   ([`oracle`]).

pub mod basis;
pub mod boxspline;
pub mod geometry;
pub mod linalg;
pub mod nonlocal;
pub mod oracle;
pub mod riesz;
pub mod triangulation;

pub use basis::{CpwlFunction, GramMatrix};
pub use geometry::{Point, Simplex};
pub use riesz::{RieszMethod, RieszReport};
pub use triangulation::Triangulation;
