//! Cylindrical contact homology of the open book with punctured-torus page
//! and a positive σ-fold Dehn twist as monodromy.
//!
//! The chain-level layer ([`differential`], [`homology`]) is generic over an
//! exact field ([`ExactField`]); the numerical 0-surgery model
//! ([`localmodel`]) is generic over `f32`/`f64` ([`Real`]). The aliases below
//! fix the usual choices.

pub mod differential;
pub mod error;
pub mod exactq;
pub mod homology;
pub mod localmodel;
pub mod orbits;
pub mod scalar;

pub use differential::{BoundaryMatrix, Chain, SignConvention};
pub use error::{Error, Result};
pub use exactq::{kappa, SparseMat};
pub use homology::{HomologyReport, TheoremCheck};
pub use localmodel::LocalModelParams;
pub use orbits::{Orbit, OrbitClass, OrbitKind};
pub use scalar::{ExactField, Real};

/// Arbitrary-precision rational.
pub type Rat = num_rational::BigRational;
pub type ChainQ = Chain<Rat>;
pub type SparseMatQ = SparseMat<Rat>;
pub type BoundaryMatrixQ = BoundaryMatrix<Rat>;
pub type HomologyReportQ = HomologyReport<Rat>;
pub type LocalModelParams64 = LocalModelParams<f64>;
pub type LocalModelParams32 = LocalModelParams<f32>;
