//! Exact-rational multivariate orthogonal polynomials: graded orthogonal
//! decomposition of a moment functional, creation/preservation/annihilation
//! operators, Jacobi sequences, atomic-measure detection and closed forms for
//! the classical product families.

pub mod cap_operators;
pub mod cli;
pub mod closed_forms;
pub mod error;
pub mod jacobi_sequences;
pub mod linalg;
pub mod moments;
pub mod multiindex;
pub mod orthodecomp;
pub mod polyring;
pub mod rational;
pub mod symbolic;

pub use error::{Error, Result};
pub use rational::Q;
