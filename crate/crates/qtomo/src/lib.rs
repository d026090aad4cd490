//! Finite-dimensional quantum state calculus.
//!
//! `qtomo` implements the matrix-to-vector superoperator formalism for
//! density matrices: positive maps and Kraus channels as n^2 x n^2
//! matrices acting on vectorized states, the qubit positive-map
//! semigroup, spin and U(n) tomograms, star-product symbol frames on
//! finite label sets, and separability criteria (partial transpose,
//! block inequalities, positive-map sampling, and the tomographic
//! F(g, L) functional) with the Werner-state threshold as the canonical
//! worked example.
//!
//! The `examples/` directory holds one runnable program per capability;
//! the `qtomo` binary exposes state generation, channels, tomograms,
//! and separability verdicts on QMX matrix files.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod qmx;
pub mod separability;
pub mod starprod;
pub mod states;
pub mod tomography;
pub mod vectorize;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, Subsystem};
pub use states::{BellState, BlochVector, DensityMatrix};
pub use vectorize::{Superoperator, VecState};
