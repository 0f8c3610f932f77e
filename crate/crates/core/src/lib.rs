//! Prepare-and-measure witnesses for non-stabilizerness.
//!
//! Classical, stabilizer and quantum bounds of qubit and qudit
//! prepare-and-measure inequalities, constrained sweeps over the facet
//! witness of the qubit stabilizer octahedron, and Gram-matrix tests.
//! Numerics are generic over [`Scalar`] (`f32`/`f64`); the aliases below fix
//! `f64`.

pub mod bloch;
pub mod error;
pub mod fixtures;
pub mod gram;
pub mod linalg;
pub mod polytope;
pub mod qrac;
pub mod qudit;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod sweep;
pub mod witness;

pub use error::{Error, Result};
pub use qudit::{DisplacementIndex, Phase, PrimeDimension};
pub use scalar::Scalar;

pub type BlochVector = bloch::BlochVector<f64>;
pub type DensityMatrix = qudit::DensityMatrix<f64>;
pub type StabilizerVertex = qudit::StabilizerVertex<f64>;
pub type CMatrix = linalg::CMatrix<f64>;
