//! Exact computer algebra for twisted affine Lie algebras.
//!
//! Given a finite-dimensional Lie algebra with a nondegenerate invariant
//! symmetric bilinear form and an automorphism (semisimple or not, of finite
//! or infinite order, with rational spectral exponents), this crate builds
//! the twisted affine Lie algebra, the four universal induced twisted
//! modules over it, twisted Sugawara/Virasoro operators, graded dimension
//! tables, twist-field weights, and level-quotient characters, and verifies
//! the structural identities of the construction by exact computation.
//!
//! All coefficients live in cyclotomic-rational fields; there is no floating
//! point anywhere.

pub mod affine;
pub mod config;
pub mod automorphism;
pub mod error;
pub mod harness;
pub mod lie;
pub mod linalg;
pub mod module;
pub mod quotient;
pub mod report;
pub mod scalar;

pub use affine::{AffineElement, AffineGen, Triangular, TwistedAffine};
pub use config::RunConfig;
pub use automorphism::Automorphism;
pub use error::Error;
pub use harness::{parse_suites, run_suites};
pub use lie::LieAlgebra;
pub use linalg::{Mat, PiMat};
pub use module::{GeneratorSpace, Mode, Module, ModuleElement, Monomial, WeightSpec, WordOp};
pub use quotient::{NullField, RelationSpace};
pub use report::{Check, Status, VerificationReport};
pub use scalar::{PiScalar, Rat, RationalExponent, Scalar};
