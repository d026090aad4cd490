//! Matrix-to-vector maps and the superoperator algebra built on them.
//!
//! A square matrix is read row by row into a column vector; linear
//! transforms of the matrix become n^2 x n^2 superoperator matrices
//! acting on that vector. Left multiplication is g (x) 1, right
//! multiplication is 1 (x) g^T, and a similarity transform is
//! g (x) (g^-1)^T. The reshuffle permutation relates vectors of tensor
//! products to tensor products of vectors, and a metric permutation
//! expresses the trace scalar product in vector form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cx, mat_vec, tensor, ComplexMatrix};

/// Vectorized square operator with a subsystem dimension signature.
///
/// Row-major flattening: component i*n + j holds the (i, j) entry of
/// the underlying n x n matrix, n being the product of `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct VecState {
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl VecState {
    pub fn new(dims: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
}

/// Map a matrix onto its row-major vector (the t-hat operator).
pub fn vec(m: &ComplexMatrix) -> Result<VecState> {
    vec_with_dims(m, &[m.rows()])
}

/// Same as [`vec`] but records a subsystem dimension signature.
pub fn vec_with_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<VecState> {
    let n: usize = dims.iter().product();
    if !m.is_square() || m.rows() != n {
        return Err(Error::ShapeMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    VecState::new(dims.to_vec(), m.data().to_vec())
}

/// Inverse map (the p-hat operator): relabel vector components into a
/// square matrix, so that `devec(vec(M)) == M` exactly.
pub fn devec(v: &VecState) -> ComplexMatrix {
    let n = v.total_dim();
    ComplexMatrix::from_vec(n, n, v.data.clone()).expect("length invariant")
}

/// Relabel an arbitrary vector into a rows x cols matrix.
pub fn devec_rect(data: &[Complex64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if data.len() != rows * cols {
        return Err(Error::LengthMismatch {
            expected: rows * cols,
            got: data.len(),
        });
    }
    ComplexMatrix::from_vec(rows, cols, data.to_vec())
}

/// How a matrix transform acts in [`superop`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperopMode {
    /// M -> g M, superoperator g (x) 1.
    Left,
    /// M -> M g, superoperator 1 (x) g^T.
    Right,
    /// M -> g M g^-1, superoperator g (x) (g^-1)^T.
    Similarity,
}

/// Where a superoperator matrix came from; informational only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Left,
    Right,
    Similarity,
    MixedUnitary,
    Kraus,
    NonCpDifference,
    Transpose,
    LocalProduct,
    Reshuffle,
    Metric,
    Epsilon,
    Custom(String),
}

/// An n^2 x n^2 matrix acting on vectorized states.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    mat: ComplexMatrix,
    provenance: Provenance,
}

impl Superoperator {
    pub fn new(mat: ComplexMatrix, provenance: Provenance) -> Self {
        assert!(mat.is_square(), "superoperator must be square");
        Self { mat, provenance }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(
            ComplexMatrix::identity(n * n),
            Provenance::Custom("identity".into()),
        )
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Side length n of the operator space this acts on (matrix is n^2 x n^2).
    pub fn state_dim(&self) -> usize {
        (self.mat.rows() as f64).sqrt().round() as usize
    }

    pub fn apply(&self, v: &VecState) -> Result<VecState> {
        if v.data.len() != self.mat.cols() {
            return Err(Error::LengthMismatch {
                expected: self.mat.cols(),
                got: v.data.len(),
            });
        }
        VecState::new(v.dims.clone(), mat_vec(&self.mat, &v.data))
    }

    /// Apply to a matrix: devec(L vec(M)).
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let v = vec(m)?;
        Ok(devec(&self.apply(&v)?))
    }

    /// Composition (self after other).
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator::new(
            &self.mat * &other.mat,
            Provenance::Custom("composition".into()),
        )
    }
}

/// Superoperator of a left/right/similarity matrix transform.
pub fn superop(g: &ComplexMatrix, mode: SuperopMode) -> Result<Superoperator> {
    if !g.is_square() {
        return Err(Error::ShapeMismatch {
            expected_rows: g.rows(),
            expected_cols: g.rows(),
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    let n = g.rows();
    let id = ComplexMatrix::identity(n);
    let (mat, prov) = match mode {
        SuperopMode::Left => (tensor(g, &id), Provenance::Left),
        SuperopMode::Right => (tensor(&id, &g.transpose()), Provenance::Right),
        SuperopMode::Similarity => {
            let det = g.determinant().norm();
            if det < 1e-12 {
                return Err(Error::Singular { det_abs: det });
            }
            let g_inv_t = g.inverse()?.transpose();
            (tensor(g, &g_inv_t), Provenance::Similarity)
        }
    };
    Ok(Superoperator::new(mat, prov))
}

/// Reshuffle permutation C for a bipartition (n1, n2):
/// C (vec rho_A (x) vec rho_B) = vec(rho_A (x) rho_B).
///
/// Defined by its action on elementary tensors, i.e. the index shuffle
/// (i, j, k, l) -> (i, k, j, l); for n1 = n2 = 2 this is the displayed
/// 16 x 16 matrix of 2 x 2 zero and unit blocks. C is orthogonal with
/// C^-1 = C^T, and an involution whenever n1 = n2.
pub fn reshuffle(n1: usize, n2: usize) -> Superoperator {
    reshuffle_multi(&[n1, n2])
}

/// Multipartite reshuffle: maps vec(rho_1) (x) ... (x) vec(rho_N) to
/// vec(rho_1 (x) ... (x) rho_N).
pub fn reshuffle_multi(dims: &[usize]) -> Superoperator {
    assert!(!dims.is_empty());
    let n: usize = dims.iter().product();
    let size = n * n;
    let parts = dims.len();
    let mut mat = ComplexMatrix::zeros(size, size);
    // Iterate over all (row_k, col_k) digit tuples.
    let mut digits = vec![0usize; 2 * parts]; // (i_1, j_1, ..., i_N, j_N)
    loop {
        // source index: per-subsystem (row, col) pairs, tensor order
        let mut src = 0usize;
        for k in 0..parts {
            src = src * dims[k] * dims[k] + digits[2 * k] * dims[k] + digits[2 * k + 1];
        }
        // target index: global row digits then global column digits
        let mut row = 0usize;
        let mut col = 0usize;
        for k in 0..parts {
            row = row * dims[k] + digits[2 * k];
            col = col * dims[k] + digits[2 * k + 1];
        }
        mat[(row * n + col, src)] = Complex64::ONE;

        // increment mixed-radix counter
        let mut pos = 2 * parts;
        loop {
            if pos == 0 {
                return Superoperator::new(mat, Provenance::Reshuffle);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < dims[pos / 2] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// The metric permutation g sending vec(M) to vec(M^T); for n = 2 this
/// is the displayed 4 x 4 matrix with swapped middle components, and
/// g^2 = 1 for every n.
pub fn metric_matrix(n: usize) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            g[(i * n + j, j * n + i)] = Complex64::ONE;
        }
    }
    g
}

/// Trace scalar product of two vectorized operators,
/// Tr(M1' M2) = sum_ab vec(M1')_a g^{ab} (M2)_b.
pub fn metric_product(v1: &VecState, v2: &VecState) -> Result<Complex64> {
    if v1.data.len() != v2.data.len() {
        return Err(Error::LengthMismatch {
            expected: v1.data.len(),
            got: v2.data.len(),
        });
    }
    Ok(v1
        .data
        .iter()
        .zip(&v2.data)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Associative star-product of vectors: vec(M1) * vec(M2) = vec(M1 M2).
pub fn vec_star(v1: &VecState, v2: &VecState) -> Result<VecState> {
    if v1.total_dim() != v2.total_dim() {
        return Err(Error::ShapeMismatch {
            expected_rows: v1.total_dim(),
            expected_cols: v1.total_dim(),
            rows: v2.total_dim(),
            cols: v2.total_dim(),
        });
    }
    let m = &devec(v1) * &devec(v2);
    VecState::new(v1.dims.clone(), m.into_data())
}

/// Unitary map S taking vec(rho) of a Hermitian matrix onto a real
/// vector: diagonal entries pass through, each off-diagonal pair
/// (jk), (kj) maps to sqrt(2) Re rho_jk and sqrt(2) Im rho_jk.
pub fn real_map_s(n: usize) -> ComplexMatrix {
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    let mut s = ComplexMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            let row = j * n + k;
            if j == k {
                s[(row, row)] = Complex64::ONE;
            } else if j < k {
                // sqrt(2) Re rho_jk = (rho_jk + rho_kj) / sqrt(2)
                s[(row, j * n + k)] = cx(inv_sqrt2, 0.0);
                s[(row, k * n + j)] = cx(inv_sqrt2, 0.0);
            } else {
                // sqrt(2) Im rho_kj = (-i rho_kj + i rho_jk) / sqrt(2)
                s[(row, k * n + j)] = cx(0.0, -inv_sqrt2);
                s[(row, j * n + k)] = cx(0.0, inv_sqrt2);
            }
        }
    }
    s
}

/// Real coordinate vector of a Hermitian matrix: S vec(rho). The
/// squared norm equals Tr(rho^2).
pub fn real_vec(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    let dev = rho.herm_deviation();
    if !rho.is_square() || dev > 1e-10 * rho.norm_max().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let s = real_map_s(rho.rows());
    let v = mat_vec(&s, rho.data());
    Ok(v.into_iter().map(|z| z.re).collect())
}

/// Discrete positivity-preserving transform in real coordinates: sign
/// flip on every Im coordinate, diag(1, 1, -1, 1) for n = 2. Conjugated
/// back with S it is the global transpose.
pub fn discrete_d(n: usize) -> ComplexMatrix {
    let mut d = ComplexMatrix::identity(n * n);
    for j in 0..n {
        for k in 0..n {
            if j > k {
                d[(j * n + k, j * n + k)] = cx(-1.0, 0.0);
            }
        }
    }
    d
}
