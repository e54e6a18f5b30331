//! Exact computations for framed Higgs bundles on marked curves.
//!
//! Dimension formulas live in [`dims`], sheaf cohomology on the marked line in [`curve`],
//! deformation complexes and the Poisson identity in [`defo`], Hitchin maps and Gaudin flows
//! in [`gaudin`], spectral curves in [`spectral`], and the job runner behind the `hfb` binary
//! in [`report`]. All algebra is over [`exact::Q`].

pub mod curve;
pub mod defo;
pub mod dims;
pub mod error;
pub mod exact;
pub mod gaudin;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod random;
pub mod report;
pub mod spectral;

#[cfg(doctest)]
mod book;
