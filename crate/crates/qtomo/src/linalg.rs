//! Dense complex linear algebra for small matrices.
//!
//! Everything here is self-contained: a row-major complex matrix type,
//! a cyclic Jacobi eigensolver for Hermitian matrices, matrix square
//! roots, tensor products, partial trace/transpose over a bipartition,
//! and Haar-random unitaries. All paper instances are tiny (n <= 64),
//! so robustness beats asymptotics throughout.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Shorthand for a complex number.
#[inline]
pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix, row-major storage.
///
/// The row-major layout is load-bearing: the vectorization map of the
/// superoperator calculus is exactly the identity on this buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from a row-major slice of (re, im) pairs; length must be rows*cols.
    pub fn from_pairs(rows: usize, cols: usize, entries: &[(f64, f64)]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            data: entries.iter().map(|&(re, im)| cx(re, im)).collect(),
        })
    }

    /// Build a square matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            data: entries.iter().map(|&re| cx(re, 0.0)).collect(),
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry buffer; this is also vec(M) in the sense of the
    /// matrix-to-vector map.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(cx(s, 0.0))
    }

    /// Max-abs (Chebyshev) norm over entries.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-abs deviation from Hermitian symmetry.
    pub fn herm_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.herm_deviation() <= tol
    }

    /// Max-abs deviation of U'U from the identity.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&(&self.adjoint() * self) - &Self::identity(self.rows)).norm_max()
    }

    /// Check all entries are finite.
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Hermitian part (M + M')/2.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + adj[(i, j)])
        })
    }

    /// In-place Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pivot_abs < 1e-300 {
                return Err(Error::Singular { det_abs: pivot_abs });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot_row * n + j);
                    inv.data.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pivot = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= pivot;
                inv[(col, j)] /= pivot;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let av = a[(col, j)];
                    let iv = inv[(col, j)];
                    a[(r, j)] -= factor * av;
                    inv[(r, j)] -= factor * iv;
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex64::ONE;
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pivot_abs == 0.0 {
                return Complex64::ZERO;
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot_row * n + j);
                }
                det = -det;
            }
            let pivot = a[(col, col)];
            det *= pivot;
            for r in col + 1..n {
                let factor = a[(r, col)] / pivot;
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= factor * v;
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Apply a square matrix to a vector.
pub fn mat_vec(m: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(m.cols(), v.len());
    let mut out = vec![Complex64::ZERO; m.rows()];
    for i in 0..m.rows() {
        let mut acc = Complex64::ZERO;
        for j in 0..m.cols() {
            acc += m[(i, j)] * v[j];
        }
        out[i] = acc;
    }
    out
}

/// Pauli matrix sigma_k for k = 0..3 (sigma_0 is the identity).
pub fn pauli(k: usize) -> ComplexMatrix {
    match k {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_pairs(2, 2, &[(0., 0.), (1., 0.), (1., 0.), (0., 0.)]).unwrap(),
        2 => ComplexMatrix::from_pairs(2, 2, &[(0., 0.), (0., -1.), (0., 1.), (0., 0.)]).unwrap(),
        3 => ComplexMatrix::from_pairs(2, 2, &[(1., 0.), (0., 0.), (0., 0.), (-1., 0.)]).unwrap(),
        _ => panic!("pauli index must be 0..=3"),
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted descending; the columns of
/// `eigenvectors` are the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Rebuild V diag(f(lambda)) V'.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let fk = f(self.eigenvalues[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += cx(fk, 0.0) * v[(i, k)] * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations.
///
/// Each rotation is a complex plane rotation annihilating one
/// off-diagonal element; sweeps continue until the off-diagonal
/// Frobenius norm drops below 1e-13 times the norm of the input.
/// The reconstruction residual is checked against `tol` on exit.
///
/// Ties in the descending eigenvalue sort keep the first-occurrence
/// order of the Jacobi output, so results are deterministic.
pub fn herm_eig(h: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch {
            expected_rows: h.rows(),
            expected_cols: h.rows(),
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let herm_tol = 1e-12 * h.norm_max().max(1.0);
    let dev = h.herm_deviation();
    if dev > herm_tol {
        return Err(Error::NotHermitian { deviation: dev });
    }

    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let norm = h.norm_fro();
    let target = 1e-13 * norm;

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = norm == 0.0 || off_norm(&a) <= target;
    if !converged {
        'sweeps: for _ in 0..JACOBI_MAX_SWEEPS {
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let h_pq = a[(p, q)];
                    let mag = h_pq.norm();
                    if mag <= target / (n as f64) {
                        continue;
                    }
                    // Phase-rotated real Jacobi angle: with h_pq = |h| e^{i phi},
                    // choose s = sin(theta) e^{i phi} so the (p,q) entry
                    // vanishes. The root with |theta| <= pi/4 keeps the
                    // cyclic sweep monotone.
                    let phase = h_pq / cx(mag, 0.0);
                    let zeta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                    let t = if zeta >= 0.0 {
                        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                    } else {
                        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = phase * cx(t * c, 0.0);

                    // A <- J' A J with J = [[c, s], [-s*, c]] in the (p,q) plane.
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = cx(c, 0.0) * apj - s * aqj;
                        a[(q, j)] = s.conj() * apj + cx(c, 0.0) * aqj;
                    }
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = cx(c, 0.0) * aip - s.conj() * aiq;
                        a[(i, q)] = s * aip + cx(c, 0.0) * aiq;
                    }
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = cx(c, 0.0) * vip - s.conj() * viq;
                        v[(i, q)] = s * vip + cx(c, 0.0) * viq;
                    }
                }
            }
            if off_norm(&a) <= target {
                converged = true;
                break 'sweeps;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps first-occurrence order on ties.
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    let decomp = EigenDecomposition {
        eigenvalues,
        eigenvectors,
    };
    let residual = (&decomp.map_eigenvalues(|x| x) - &h.hermitian_part()).norm_max();
    if residual > tol {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }
    Ok(decomp)
}

/// Window below zero in which eigenvalues are clamped to zero before
/// taking matrix functions of nominally PSD inputs.
pub const PSD_CLAMP: f64 = 1e-10;

/// Hermitian PSD square root. Eigenvalues in [-1e-10, 0) are clamped
/// to zero; anything lower is an error.
pub fn mat_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(rho, 1e-9 * rho.norm_max().max(1.0))?;
    let min = eig.min_eigenvalue();
    if min < -PSD_CLAMP {
        return Err(Error::NotPsd { min_eig: min });
    }
    Ok(eig.map_eigenvalues(|x| if x < 0.0 { 0.0 } else { x.sqrt() }))
}

/// Kronecker (tensor) product A (x) B with the block layout
/// [[a_11 B, a_12 B, ...], ...].
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Tensor product of a list of matrices, left to right.
pub fn tensor_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    assert!(!ms.is_empty());
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        acc = tensor(&acc, m);
    }
    acc
}

/// Which factor of a bipartition an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

fn check_bipartite(rho: &ComplexMatrix, dims: (usize, usize)) -> Result<()> {
    let n = dims.0 * dims.1;
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: rho.rows(),
        });
    }
    Ok(())
}

/// Partial trace over one factor of an (n1 x n2)-partitioned state.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: (usize, usize),
    which: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(rho, dims)?;
    let (n1, n2) = dims;
    match which {
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(n1, n1);
            for i in 0..n1 {
                for j in 0..n1 {
                    for k in 0..n2 {
                        out[(i, j)] += rho[(i * n2 + k, j * n2 + k)];
                    }
                }
            }
            Ok(out)
        }
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(n2, n2);
            for k in 0..n2 {
                for l in 0..n2 {
                    for i in 0..n1 {
                        out[(k, l)] += rho[(i * n2 + k, i * n2 + l)];
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Partial transpose on one factor; an entry permutation, so exactly
/// involutive.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    dims: (usize, usize),
    which: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(rho, dims)?;
    let (n1, n2) = dims;
    let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for i in 0..n1 {
        for j in 0..n1 {
            for k in 0..n2 {
                for l in 0..n2 {
                    let (r, c) = match which {
                        // transpose the B indices
                        Subsystem::B => (i * n2 + l, j * n2 + k),
                        // transpose the A indices
                        Subsystem::A => (j * n2 + k, i * n2 + l),
                    };
                    out[(r, c)] = rho[(i * n2 + k, j * n2 + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Sample a standard complex Gaussian (Ginibre) matrix.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        cx(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        )
    })
}

/// Haar-random unitary: orthonormalize a Ginibre matrix column by
/// column with modified Gram-Schmidt. The R-diagonal of this
/// factorization is real positive by construction, which is exactly
/// the phase convention that makes Q Haar-distributed.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(n >= 1);
    loop {
        let g = ginibre(n, n, rng);
        if let Some(u) = mgs_orthonormalize(&g) {
            return u;
        }
        // Rank-deficient draw has probability zero; resample.
    }
}

fn mgs_orthonormalize(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = g.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let c = cols[k][i];
                cols[j][i] -= proj * c;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        for z in cols[j].iter_mut() {
            *z /= cx(norm, 0.0);
        }
    }
    Some(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
}

/// PSD check on a Hermitian matrix: verdict is `min_eig >= -tol`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    let eig = herm_eig(a, 1e-9 * a.norm_max().max(1.0))?;
    let min = eig.min_eigenvalue();
    Ok((min >= -tol, min))
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;

    #[test]
    fn herm_eig_diagonal_is_trivial() {
        let h = ComplexMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, 1.0]).unwrap();
        let e = herm_eig(&h, 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        assert_close(&e.eigenvectors, &ComplexMatrix::identity(2), 1e-15, "V=I");
    }

    #[test]
    fn herm_eig_pauli_x_spectrum() {
        let e = herm_eig(&pauli(1), 1e-12).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn herm_eig_werner_spectrum() {
        // Hand expansion of the characteristic polynomial of the Werner
        // matrix: eigenvalues (1+3p)/4 once and (1-p)/4 three times.
        let p = 0.7;
        let w = ComplexMatrix::from_real(
            4,
            4,
            &[
                (1.0 + p) / 4.0, 0.0, 0.0, p / 2.0,
                0.0, (1.0 - p) / 4.0, 0.0, 0.0,
                0.0, 0.0, (1.0 - p) / 4.0, 0.0,
                p / 2.0, 0.0, 0.0, (1.0 + p) / 4.0,
            ],
        )
        .unwrap();
        let e = herm_eig(&w, 1e-12).unwrap();
        assert!((e.eigenvalues[0] - (1.0 + 3.0 * p) / 4.0).abs() < 1e-12);
        for k in 1..4 {
            assert!((e.eigenvalues[k] - (1.0 - p) / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn herm_eig_reconstructs_random_matrices() {
        let mut rng = rng(1);
        for n in 1..=8 {
            let h = random_hermitian(n, &mut rng);
            let e = herm_eig(&h, 1e-10).unwrap();
            assert_close(&e.map_eigenvalues(|x| x), &h, 1e-9, "V diag(l) V' = H");
            assert!(e.eigenvectors.unitary_deviation() < 1e-10);
            // residual per eigenpair
            for k in 0..n {
                let v: Vec<Complex64> = (0..n).map(|i| e.eigenvectors[(i, k)]).collect();
                let hv = mat_vec(&h, &v);
                let lv: Vec<Complex64> = v.iter().map(|z| z * e.eigenvalues[k]).collect();
                let res: f64 = hv
                    .iter()
                    .zip(&lv)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(res <= 1e-10 * h.norm_fro().max(1.0));
            }
        }
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_pairs(2, 2, &[(0., 0.), (1., 0.), (0., 0.), (0., 0.)]).unwrap();
        assert!(matches!(herm_eig(&m, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn mat_sqrt_cases() {
        let s = mat_sqrt(&ComplexMatrix::identity(3)).unwrap();
        assert_close(&s, &ComplexMatrix::identity(3), 1e-12, "sqrt(I)=I");

        let d = ComplexMatrix::from_real(2, 2, &[4.0, 0.0, 0.0, 9.0]).unwrap();
        let s = mat_sqrt(&d).unwrap();
        assert_close(
            &s,
            &ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 3.0]).unwrap(),
            1e-12,
            "sqrt(diag(4,9))",
        );

        // pure projector is idempotent
        let mut rng = rng(2);
        let g = ginibre(3, 1, &mut rng);
        let norm = g.norm_fro();
        let psi = g.scale_re(1.0 / norm);
        let proj = &psi * &psi.adjoint();
        let s = mat_sqrt(&proj).unwrap();
        // sqrt amplifies roundoff at zero eigenvalues to ~sqrt(eps)
        assert_close(&s, &proj, 1e-7, "sqrt of projector");
        assert_close(&(&s * &s), &proj, 1e-9, "S*S = rho");
    }

    #[test]
    fn mat_sqrt_squares_back() {
        let mut rng = rng(3);
        for n in 2..=6 {
            let rho = random_psd(n, n, &mut rng);
            let s = mat_sqrt(&rho).unwrap();
            assert!(s.is_hermitian(1e-10));
            assert_close(&(&s * &s), &rho, 1e-9 * rho.norm_max(), "S*S = rho");
        }
    }

    #[test]
    fn mat_sqrt_rejects_indefinite() {
        let d = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -0.1]).unwrap();
        assert!(matches!(mat_sqrt(&d), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn tensor_products() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_close(&i4, &ComplexMatrix::identity(4), 0.0, "I2(x)I2");

        // sigma_1 (x) sigma_1 is the 4x4 antidiagonal of ones
        let xx = tensor(&pauli(1), &pauli(1));
        let mut expect = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            expect[(i, 3 - i)] = Complex64::ONE;
        }
        assert_close(&xx, &expect, 0.0, "sigma1(x)sigma1");

        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert_close(
            &tensor(&half, &half),
            &ComplexMatrix::identity(4).scale_re(0.25),
            0.0,
            "(I/2)(x)(I/2)",
        );
    }

    #[test]
    fn partial_trace_recovers_factors() {
        let mut rng = rng(4);
        let a = random_psd(2, 2, &mut rng);
        let b = random_psd(3, 3, &mut rng);
        let ab = tensor(&a, &b);
        let ta = partial_trace(&ab, (2, 3), Subsystem::B).unwrap();
        assert_close(&ta, &a.scale(b.trace()), 1e-12 * ab.norm_max(), "Tr_B(A(x)B)");
        let tb = partial_trace(&ab, (2, 3), Subsystem::A).unwrap();
        assert_close(&tb, &b.scale(a.trace()), 1e-12 * ab.norm_max(), "Tr_A(A(x)B)");
        // total trace preserved
        let t = partial_trace(&ab, (2, 3), Subsystem::B).unwrap().trace();
        assert!((t - ab.trace()).norm() < 1e-12 * ab.norm_max());
    }

    #[test]
    fn partial_transpose_involutive_and_trace_preserving() {
        let mut rng = rng(5);
        let rho = random_psd(6, 6, &mut rng);
        for which in [Subsystem::A, Subsystem::B] {
            let pt = partial_transpose(&rho, (2, 3), which).unwrap();
            let ptpt = partial_transpose(&pt, (2, 3), which).unwrap();
            assert_eq!(ptpt, rho, "PT twice is the identity, exactly");
            assert!((pt.trace() - rho.trace()).norm() < 1e-14 * rho.norm_max());
            assert!(pt.is_hermitian(1e-12 * rho.norm_max()));
        }
    }

    #[test]
    fn partial_transpose_of_product_transposes_factor() {
        let mut rng = rng(6);
        let a = random_matrix(2, 2, &mut rng);
        let b = random_matrix(2, 2, &mut rng);
        let ab = tensor(&a, &b);
        let pt = partial_transpose(&ab, (2, 2), Subsystem::B).unwrap();
        assert_close(&pt, &tensor(&a, &b.transpose()), 1e-14, "PT_B(A(x)B)");
    }

    #[test]
    fn bell_partial_transpose_min_eigenvalue() {
        // 4x4 eigensolve by hand: PT of the Bell projector has spectrum
        // {1/2, 1/2, 1/2, -1/2}.
        let mut bell = ComplexMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = cx(0.5, 0.0);
        }
        let pt = partial_transpose(&bell, (2, 2), Subsystem::B).unwrap();
        let (ok, min) = is_psd(&pt, 1e-9).unwrap();
        assert!(!ok);
        assert!((min + 0.5).abs() < 1e-12);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng(7);
        for n in 1..=6 {
            let u = haar_unitary(n, &mut rng);
            assert!(u.unitary_deviation() < 1e-10, "n={n}");
        }
        // n=1 is a bare phase
        let u1 = haar_unitary(1, &mut rng);
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_unitary_entry_means_vanish() {
        let mut rng = rng(8);
        let n_samples = 10_000;
        let mut mean = ComplexMatrix::zeros(2, 2);
        for _ in 0..n_samples {
            let u = haar_unitary(2, &mut rng);
            mean = &mean + &u;
        }
        mean = mean.scale_re(1.0 / n_samples as f64);
        assert!(mean.norm_max() < 0.05);
    }

    #[test]
    fn haar_left_invariance_statistics() {
        // |u_11|^2 averages to 1/2 both with and without a fixed left factor.
        let mut rng = rng(9);
        let fixed = haar_unitary(2, &mut rng);
        let n_samples = 10_000;
        let (mut plain, mut shifted) = (0.0, 0.0);
        for _ in 0..n_samples {
            let u = haar_unitary(2, &mut rng);
            plain += u[(0, 0)].norm_sqr();
            shifted += (&fixed * &u)[(0, 0)].norm_sqr();
        }
        plain /= n_samples as f64;
        shifted /= n_samples as f64;
        assert!((plain - 0.5).abs() < 0.02);
        assert!((shifted - 0.5).abs() < 0.02);
    }

    #[test]
    fn is_psd_examples() {
        let (ok, min) = is_psd(&ComplexMatrix::identity(2).scale_re(0.5), 1e-9).unwrap();
        assert!(ok);
        assert!((min - 0.5).abs() < 1e-12);

        let d = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -0.1]).unwrap();
        let (ok, min) = is_psd(&d, 1e-9).unwrap();
        assert!(!ok);
        assert!((min + 0.1).abs() < 1e-12);
    }

    #[test]
    fn inverse_and_determinant() {
        let mut rng = rng(10);
        for n in 1..=5 {
            let m = random_matrix(n, n, &mut rng);
            let inv = m.inverse().unwrap();
            assert_close(&(&m * &inv), &ComplexMatrix::identity(n), 1e-10, "M M^-1");
        }
        let u = haar_unitary(4, &mut rng);
        assert!((u.determinant().norm() - 1.0).abs() < 1e-10);
    }
}
