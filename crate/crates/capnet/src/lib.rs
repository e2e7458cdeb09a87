//! Sharp capacity prefactors for metastable potential landscapes.
//!
//! The crate builds an electrical network from a potential landscape —
//! islands of the sublevel set become vertices, saddle bridges become
//! edges whose admittances are Laplace-type integrals of the saddle's
//! convex profiles — and evaluates the capacity between two minima as a
//! ratio of weighted spanning-tree polynomials. A finite-difference
//! solver for the weighted Dirichlet problem serves as the ground-truth
//! oracle.

pub mod admittance;
pub mod catalog;
pub mod dsl;
pub mod landscape;
pub mod logspace;
pub mod net;
pub mod oracle;
pub mod unionfind;

pub use logspace::LogVal;
