//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by state constructors, maps, and tomography routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("vector length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix is singular (|det| = {det_abs:.3e})")]
    Singular { det_abs: f64 },
    #[error("Bloch vector lies outside the unit ball (norm {norm})")]
    BlochOutOfBall { norm: f64 },
    #[error("parameter {value} outside valid range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },
    #[error("not a probability distribution (sum {sum}, min entry {min_entry:.3e})")]
    NotADistribution { sum: f64, min_entry: f64 },
    #[error("state is not bipartite (dimension signature has {factors} factors)")]
    NotBipartite { factors: usize },
    #[error("invalid density matrix: {reason}")]
    InvalidState { reason: String },
    #[error("Kraus completeness violated: ||sum V'V - 1||_max = {deviation:.3e}")]
    IncompleteKraus { deviation: f64 },
    #[error("map normalization failed: ||sum V'V - sum v'v - 1||_max = {deviation:.3e}")]
    NormalizationFail { deviation: f64 },
    #[error("weights do not form a distribution (sum {sum})")]
    BadWeights { sum: f64 },
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("fiducial projector has vanishing overlap (denominator {value:.3e})")]
    DegenerateFiducial { value: f64 },
    #[error("spin {twice_j}/2 unsupported (need 0 <= 2j <= {max})")]
    BadSpin { twice_j: u32, max: u32 },
    #[error("directions are degenerate (design rank {rank} < 3)")]
    DirectionsDegenerate { rank: usize },
    #[error("frame does not span the operator space (roundtrip residual {residual:.3e})")]
    FrameIncomplete { residual: f64 },
    #[error("matrix does not match the expected sparsity pattern (violation {violation:.3e})")]
    PatternMismatch { violation: f64 },
    #[error("bad map sample: {reason}")]
    BadMapSample { reason: String },
    #[error("matrix trace is not positive ({trace})")]
    NonpositiveTrace { trace: f64 },
    #[error("tomogram outside probability range (value {value:.3e})")]
    InvalidTomogram { value: f64 },
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
