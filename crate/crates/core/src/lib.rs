//! Principal eigenvalues of two-subdomain elliptic operators coupled through
//! membrane (Kedem–Katchalsky) interface conditions, the eigencurve
//! `F(λ1, λ2) = 0`, and the associated logistic interface problem.
//!
//! The layout is one-dimensional (optionally radially symmetric): an inner
//! subdomain `Ω1 = (x0, xs)`, the interface point `xs`, and an outer subdomain
//! `Ω2 = (xs, xL)`.

// index loops read closer to the matrix formulas; negated float comparisons are NaN guards
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod banded;
pub mod checks;
pub mod curve;
pub mod dense;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod fields;
pub mod geometry;
pub mod logistic;
pub mod operator;
pub mod roots;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{build_mesh, DomainSpec, Mesh, Subdomain};
