//! Joint measurements of conjugate observables on finite quantum systems.
//!
//! The crate builds discrete Weyl systems over finite abelian groups, the
//! canonically conjugate observable pair and its smeared versions, covariant
//! phase-space observables with their exact joint-measurability boundary,
//! informational-completeness tests and constructions, linear-inversion state
//! tomography, and sequential (instrument-based) implementations.
//!
//! All numerics are generic over the real scalar via [`Scalar`]; concrete
//! `f64` aliases for the main types live at the crate root.

pub mod error;
pub mod group;
pub mod infocomplete;
pub mod io;
pub mod jointness;
pub mod linalg;
pub mod mub;
pub mod povm;
pub mod random;
pub mod scalar;
pub mod sequential;
pub mod weyl;

pub use error::{Error, Result};
pub use group::FiniteAbelianGroup;
pub use linalg::{DensityOperator, HermitianEigen, Operator, Vector};
pub use scalar::{Scalar, Tolerances};
pub use weyl::WeylSystem;

/// `f64` aliases for the main types.
pub type Operator64 = linalg::Operator<f64>;
pub type Vector64 = linalg::Vector<f64>;
pub type DensityOperator64 = linalg::DensityOperator<f64>;
pub type WeylSystem64 = weyl::WeylSystem<f64>;
pub type Povm64 = povm::Povm<f64>;
pub type ProbDist64 = povm::ProbDist<f64>;
pub type PhaseSpaceObservable64 = jointness::PhaseSpaceObservable<f64>;
pub type Instrument64 = sequential::Instrument<f64>;
pub type Tolerances64 = scalar::Tolerances<f64>;

/// `f32` aliases, for callers trading accuracy for storage.
pub type Operator32 = linalg::Operator<f32>;
pub type Vector32 = linalg::Vector<f32>;
pub type WeylSystem32 = weyl::WeylSystem<f32>;
