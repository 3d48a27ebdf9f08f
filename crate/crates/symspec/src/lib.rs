//! Construction of symmetric invariant subspaces of real linear operators.
//!
//! The pipeline: complexify a real operator, integrate its resolvent over a
//! conjugation-closed contour to obtain a Riesz spectral projection, extract
//! the (conjugation-closed) range, and return its real part as an invariant
//! subspace of the original operator. When the spectrum of interest is a
//! single conjugate pair the quadratic-pencil fallback applies instead.

pub mod calculus;
pub mod contour;
pub mod error;
pub mod growth;
pub mod linalg;
pub mod lu;
pub mod mm;
pub mod operator;
pub mod poly;
pub mod report;
pub mod testgen;
pub mod twopoint;

pub use error::{Error, Result};
