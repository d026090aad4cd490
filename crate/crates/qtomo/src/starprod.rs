//! Operator symbols and star products on finite label sets.
//!
//! A symbol frame is a finite family of quantizers U(x) and
//! dequantizers D(x) on an n-dimensional space. The symbol of an
//! operator is f_A(x) = Tr[A U(x)]; the operator is recovered as
//! A = sum_x f_A(x) D(x). Operator multiplication induces an
//! associative star product on symbols whose kernel is the trace of
//! products of the basic operators, K(x'', x', x) = Tr[D(x'') D(x') U(x)],
//! and N-fold kernels give traces of operator powers (the generalized
//! purity).
//!
//! Finitely, the delta-kernel consistency condition of the continuous
//! theory becomes full rank of the frame matrix; overcomplete frames
//! (like the spin tomographic one) get their canonical dual from the
//! minimum-norm pseudoinverse.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::tomography::{direction_rotation, Direction};

/// Relative singular-value tolerance for frame rank decisions.
const RANK_TOL: f64 = 1e-10;
/// Roundtrip residual bound on basis probes.
const ROUNDTRIP_TOL: f64 = 1e-8;

/// Finite label set with paired quantizer/dequantizer families.
#[derive(Debug, Clone)]
pub struct SymbolFrame {
    labels: Vec<String>,
    quantizers: Vec<ComplexMatrix>,
    dequantizers: Vec<ComplexMatrix>,
    dim: usize,
}

/// Symbol of an operator: one complex value per frame label.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    values: Vec<Complex64>,
}

impl Symbol {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

impl SymbolFrame {
    /// Build a frame from quantizers alone; the dequantizers are the
    /// minimum-norm dual family, computed by pseudoinversion of the
    /// frame matrix. Fails with `FrameIncomplete` when the quantizers
    /// do not span the full operator space.
    pub fn new(labels: Vec<String>, quantizers: Vec<ComplexMatrix>) -> Result<Self> {
        if labels.len() != quantizers.len() || quantizers.is_empty() {
            return Err(Error::LengthMismatch {
                expected: labels.len().max(1),
                got: quantizers.len(),
            });
        }
        let dim = quantizers[0].rows();
        for u in &quantizers {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::ShapeMismatch {
                    expected_rows: dim,
                    expected_cols: dim,
                    rows: u.rows(),
                    cols: u.cols(),
                });
            }
        }
        let count = quantizers.len();
        let size = dim * dim;

        // Frame matrix F with F[x, a] = vec(U(x)^T)_a, so that
        // symbol = F vec(A).
        let f = ComplexMatrix::from_fn(count, size, |x, a| {
            let (i, j) = (a / dim, a % dim);
            quantizers[x][(j, i)]
        });

        // Normal matrix M = F' F is Hermitian PSD; rank via eigenvalues.
        let m = &f.adjoint() * &f;
        let eig = herm_eig(&m.hermitian_part(), 1e-9 * m.norm_max().max(1.0))?;
        let lambda_max = eig.eigenvalues[0].max(0.0);
        let lambda_min = *eig.eigenvalues.last().unwrap();
        if lambda_min <= RANK_TOL * RANK_TOL * lambda_max || lambda_max == 0.0 {
            let rank = eig
                .eigenvalues
                .iter()
                .filter(|&&l| l > RANK_TOL * RANK_TOL * lambda_max)
                .count();
            return Err(Error::FrameIncomplete {
                residual: (size - rank) as f64,
            });
        }
        // G = M^-1 F': columns are the vectorized dequantizers.
        let m_inv = eig.map_eigenvalues(|l| 1.0 / l);
        let g = &m_inv * &f.adjoint();
        let dequantizers: Vec<ComplexMatrix> = (0..count)
            .map(|x| ComplexMatrix::from_fn(dim, dim, |i, j| g[(i * dim + j, x)]))
            .collect();

        let frame = Self {
            labels,
            quantizers,
            dequantizers,
            dim,
        };
        frame.check_roundtrip()?;
        Ok(frame)
    }

    /// Verify reconstruct(symbol(E_ij)) = E_ij on all basis matrices.
    fn check_roundtrip(&self) -> Result<()> {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut e = ComplexMatrix::zeros(self.dim, self.dim);
                e[(i, j)] = Complex64::ONE;
                let back = self.reconstruct(&self.symbol(&e)?)?;
                worst = worst.max((&back - &e).norm_max());
            }
        }
        if worst > ROUNDTRIP_TOL {
            return Err(Error::FrameIncomplete { residual: worst });
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn quantizers(&self) -> &[ComplexMatrix] {
        &self.quantizers
    }

    pub fn dequantizers(&self) -> &[ComplexMatrix] {
        &self.dequantizers
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Symbol of an operator: f_A(x) = Tr[A U(x)], linear in A.
    pub fn symbol(&self, a: &ComplexMatrix) -> Result<Symbol> {
        if a.rows() != self.dim || a.cols() != self.dim {
            return Err(Error::ShapeMismatch {
                expected_rows: self.dim,
                expected_cols: self.dim,
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let values = self
            .quantizers
            .iter()
            .map(|u| (a * u).trace())
            .collect();
        Ok(Symbol { values })
    }

    /// Reconstruct the operator sum_x f(x) D(x).
    pub fn reconstruct(&self, f: &Symbol) -> Result<ComplexMatrix> {
        if f.values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: f.values.len(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (v, d) in f.values.iter().zip(&self.dequantizers) {
            out = &out + &d.scale(*v);
        }
        Ok(out)
    }

    /// Three-index star-product kernel K(x'', x', x) =
    /// Tr[D(x'') D(x') U(x)].
    pub fn star_kernel(&self) -> StarKernel {
        let n = self.len();
        let mut data = vec![Complex64::ZERO; n * n * n];
        for x2 in 0..n {
            for x1 in 0..n {
                let dd = &self.dequantizers[x2] * &self.dequantizers[x1];
                for (x, u) in self.quantizers.iter().enumerate() {
                    data[(x2 * n + x1) * n + x] = (&dd * u).trace();
                }
            }
        }
        StarKernel { n_labels: n, data }
    }

    /// Star product through the kernel sum:
    /// (f * h)(x) = sum_{x'', x'} f(x'') h(x') K(x'', x', x).
    pub fn star(&self, f: &Symbol, h: &Symbol, kernel: &StarKernel) -> Result<Symbol> {
        let n = self.len();
        if f.values.len() != n || h.values.len() != n || kernel.n_labels != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: f.values.len().max(h.values.len()),
            });
        }
        let mut values = vec![Complex64::ZERO; n];
        for x2 in 0..n {
            if f.values[x2] == Complex64::ZERO {
                continue;
            }
            for x1 in 0..n {
                let coeff = f.values[x2] * h.values[x1];
                if coeff == Complex64::ZERO {
                    continue;
                }
                for (x, v) in values.iter_mut().enumerate() {
                    *v += coeff * kernel.get(x2, x1, x);
                }
            }
        }
        Ok(Symbol { values })
    }

    /// N-fold kernel contraction: sum over N labels of
    /// prod_i f(x_i) Tr[D(x_1) ... D(x_N)], which equals Tr A^N when f
    /// is the symbol of A.
    pub fn trace_power(&self, f: &Symbol, power: u32) -> Result<Complex64> {
        if f.values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: f.values.len(),
            });
        }
        assert!(power >= 1, "power must be positive");
        // explicit label sum, depth-first over tuples
        fn go(
            frame: &SymbolFrame,
            f: &Symbol,
            remaining: u32,
            acc: &ComplexMatrix,
            coeff: Complex64,
            total: &mut Complex64,
        ) {
            if remaining == 0 {
                *total += coeff * acc.trace();
                return;
            }
            for (v, d) in f.values.iter().zip(&frame.dequantizers) {
                let c = coeff * v;
                if c == Complex64::ZERO {
                    continue;
                }
                go(frame, f, remaining - 1, &(acc * d), c, total);
            }
        }
        let mut total = Complex64::ZERO;
        go(
            self,
            f,
            power,
            &ComplexMatrix::identity(self.dim),
            Complex64::ONE,
            &mut total,
        );
        Ok(total)
    }
}

/// Dense 3-index kernel table.
#[derive(Debug, Clone)]
pub struct StarKernel {
    n_labels: usize,
    data: Vec<Complex64>,
}

impl StarKernel {
    #[inline]
    pub fn get(&self, x2: usize, x1: usize, x: usize) -> Complex64 {
        self.data[(x2 * self.n_labels + x1) * self.n_labels + x]
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }
}

/// Spin tomographic frame: one quantizer per (m, direction) pair,
/// U = D(g) |jm><jm| D'(g), with the pseudoinverse dual as
/// dequantizers. Needs enough directions that the rotated projectors
/// span the full (2j+1)^2-dimensional operator space.
pub fn tomographic_frame(twice_j: u32, directions: &[Direction]) -> Result<SymbolFrame> {
    let dim = twice_j as usize + 1;
    let mut labels = Vec::with_capacity(dim * directions.len());
    let mut quantizers = Vec::with_capacity(dim * directions.len());
    for (di, dir) in directions.iter().enumerate() {
        let d = direction_rotation(twice_j, dir)?;
        for k in 0..dim {
            let m = (twice_j as f64 - 2.0 * k as f64) / 2.0;
            // D |jm><jm| D'
            let proj = ComplexMatrix::from_fn(dim, dim, |i, j| d[(i, k)] * d[(j, k)].conj());
            labels.push(format!("m={m} dir={di}"));
            quantizers.push(proj);
        }
    }
    SymbolFrame::new(labels, quantizers)
}
