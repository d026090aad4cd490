//! Validated density matrices, named state families, distances, and the
//! intrinsic entanglement measures.
//!
//! A density matrix is Hermitian, unit-trace, and positive
//! semidefinite; constructors reject anything that violates those
//! constraints instead of repairing it. Distances come in two flavors,
//! the plain Hilbert-Schmidt distance and its square-root (Hellinger
//! like) variant, and the intrinsic measure e compares a bipartite
//! state against the tensor product of its partial traces.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    cx, ginibre, herm_eig, is_psd, mat_sqrt, partial_trace, partial_transpose, pauli, tensor,
    ComplexMatrix, Subsystem,
};

pub const HERM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Hermitian, unit-trace, positive-semidefinite matrix together with a
/// subsystem dimension signature.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validate and wrap. Hermiticity within 1e-10, trace within 1e-10
    /// of one, minimum eigenvalue not below -1e-9.
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if !mat.is_square() || mat.rows() != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: mat.rows(),
            });
        }
        if !mat.all_finite() {
            return Err(Error::InvalidState {
                reason: "non-finite entries".into(),
            });
        }
        let dev = mat.herm_deviation();
        if dev > HERM_TOL {
            return Err(Error::InvalidState {
                reason: format!("not Hermitian (deviation {dev:.3e})"),
            });
        }
        let tr = mat.trace();
        if (tr - Complex64::ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState {
                reason: format!("trace {tr} differs from 1"),
            });
        }
        let (ok, min_eig) = is_psd(&mat, PSD_TOL)?;
        if !ok {
            return Err(Error::InvalidState {
                reason: format!("negative eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(Self { mat, dims })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Reinterpret the same matrix with a different subsystem split.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if n != self.total_dim() {
            return Err(Error::DimMismatch {
                expected: self.total_dim(),
                got: n,
            });
        }
        Ok(Self {
            mat: self.mat.clone(),
            dims,
        })
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(herm_eig(&self.mat, 1e-9)?.eigenvalues)
    }

    fn bipartite_dims(&self) -> Result<(usize, usize)> {
        if self.dims.len() != 2 {
            return Err(Error::NotBipartite {
                factors: self.dims.len(),
            });
        }
        Ok((self.dims[0], self.dims[1]))
    }

    /// Partial trace over one factor of a bipartite state.
    pub fn partial_trace(&self, which: Subsystem) -> Result<DensityMatrix> {
        let dims = self.bipartite_dims()?;
        let reduced = partial_trace(&self.mat, dims, which)?;
        let keep = match which {
            Subsystem::A => dims.1,
            Subsystem::B => dims.0,
        };
        DensityMatrix::new(reduced, vec![keep])
    }

    /// Partial transpose over one factor; the result is Hermitian and
    /// unit trace but in general not PSD, so it comes back as a bare
    /// matrix.
    pub fn partial_transpose(&self, which: Subsystem) -> Result<ComplexMatrix> {
        let dims = self.bipartite_dims()?;
        partial_transpose(&self.mat, dims, which)
    }
}

/// Point in the Bloch ball parameterizing qubit states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// Qubit state rho = (1 + n . sigma) / 2; pure exactly when |n| = 1.
pub fn from_bloch(n: &BlochVector) -> Result<DensityMatrix> {
    let norm = n.norm();
    if norm > 1.0 + 1e-12 {
        return Err(Error::BlochOutOfBall { norm });
    }
    let mut m = ComplexMatrix::identity(2);
    for (k, c) in [(1usize, n.x), (2, n.y), (3, n.z)] {
        m = &m + &pauli(k).scale_re(c);
    }
    DensityMatrix::new(m.scale_re(0.5), vec![2])
}

/// The four maximally entangled two-qubit Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl std::str::FromStr for BellState {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phiplus" => Ok(BellState::PhiPlus),
            "phi-" | "phiminus" => Ok(BellState::PhiMinus),
            "psi+" | "psiplus" => Ok(BellState::PsiPlus),
            "psi-" | "psiminus" => Ok(BellState::PsiMinus),
            other => Err(format!("unknown Bell state '{other}'")),
        }
    }
}

/// Rank-one projector onto a Bell state, dims (2, 2).
pub fn bell(which: BellState) -> DensityMatrix {
    let s = 1.0 / 2.0_f64.sqrt();
    // basis order |++>, |+->, |-+>, |--> with m = +1/2 first
    let amps: [Complex64; 4] = match which {
        BellState::PhiPlus => [cx(s, 0.0), Complex64::ZERO, Complex64::ZERO, cx(s, 0.0)],
        BellState::PhiMinus => [cx(s, 0.0), Complex64::ZERO, Complex64::ZERO, cx(-s, 0.0)],
        BellState::PsiPlus => [Complex64::ZERO, cx(-s, 0.0), cx(-s, 0.0), Complex64::ZERO],
        BellState::PsiMinus => [Complex64::ZERO, cx(-s, 0.0), cx(s, 0.0), Complex64::ZERO],
    };
    let mat = ComplexMatrix::from_fn(4, 4, |i, j| amps[i] * amps[j].conj());
    DensityMatrix::new(mat, vec![2, 2]).expect("Bell projector is a valid state")
}

/// Two-qubit Werner state: (1+p)/4 on the outer diagonal, (1-p)/4 on
/// the inner diagonal, p/2 in the corners. Positive exactly for
/// -1/3 <= p <= 1; eigenvalues (1+3p)/4 and (1-p)/4 (threefold).
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            value: p,
            min: -1.0 / 3.0,
            max: 1.0,
        });
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = cx((1.0 + p) / 4.0, 0.0);
    m[(1, 1)] = cx((1.0 - p) / 4.0, 0.0);
    m[(2, 2)] = cx((1.0 - p) / 4.0, 0.0);
    m[(3, 3)] = cx((1.0 + p) / 4.0, 0.0);
    m[(0, 3)] = cx(p / 2.0, 0.0);
    m[(3, 0)] = cx(p / 2.0, 0.0);
    DensityMatrix::new(m, vec![2, 2])
}

/// Random density matrix of the given rank: G G' / Tr(G G') with G an
/// n x rank complex Gaussian.
pub fn random_density(n: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    if rank < 1 || rank > n {
        return Err(Error::OutOfRange {
            value: rank as f64,
            min: 1.0,
            max: n as f64,
        });
    }
    let g = ginibre(n, rank, rng);
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale_re(1.0 / tr), vec![n])
}

/// Random bipartite density matrix with a (n1, n2) signature.
pub fn random_density_bipartite(
    n1: usize,
    n2: usize,
    rank: usize,
    rng: &mut impl Rng,
) -> Result<DensityMatrix> {
    random_density(n1 * n2, rank, rng)?.with_dims(vec![n1, n2])
}

fn check_same_dim(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<()> {
    if r1.total_dim() != r2.total_dim() {
        return Err(Error::DimMismatch {
            expected: r1.total_dim(),
            got: r2.total_dim(),
        });
    }
    Ok(())
}

/// Squared Hilbert-Schmidt distance Tr(rho1 - rho2)^2; equals the
/// squared norm of the difference of the vectorized states.
pub fn hs_distance_sq(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    check_same_dim(r1, r2)?;
    let d = r1.matrix() - r2.matrix();
    Ok((&d * &d).trace().re)
}

/// Squared square-root distance Tr(sqrt(rho1) - sqrt(rho2))^2.
pub fn sqrt_distance_sq(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    check_same_dim(r1, r2)?;
    let s1 = mat_sqrt(r1.matrix())?;
    let s2 = mat_sqrt(r2.matrix())?;
    let d = &s1 - &s2;
    Ok((&d * &d).trace().re)
}

fn check_distribution(p: &[f64]) -> Result<()> {
    let sum: f64 = p.iter().sum();
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-12 || (sum - 1.0).abs() > 1e-10 {
        return Err(Error::NotADistribution {
            sum,
            min_entry: min,
        });
    }
    Ok(())
}

/// Squared Euclidean distance between probability vectors.
pub fn prob_distance_sq(p1: &[f64], p2: &[f64]) -> Result<f64> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch {
            expected: p1.len(),
            got: p2.len(),
        });
    }
    check_distribution(p1)?;
    check_distribution(p2)?;
    Ok(p1.iter().zip(p2).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Squared Hellinger distance 2 - 2 sum_k sqrt(P1(k) P2(k)), in [0, 2].
pub fn hellinger_sq(p1: &[f64], p2: &[f64]) -> Result<f64> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch {
            expected: p1.len(),
            got: p2.len(),
        });
    }
    check_distribution(p1)?;
    check_distribution(p2)?;
    let cross: f64 = p1
        .iter()
        .zip(p2)
        .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    Ok(2.0 - 2.0 * cross)
}

/// Intrinsic entanglement measure: Hilbert-Schmidt distance between a
/// bipartite state and the tensor product of its partial traces,
/// e = Tr(rho_AB - rho_A (x) rho_B)^2. Zero on product states and
/// invariant under local unitaries.
pub fn measure_e(rho: &DensityMatrix) -> Result<f64> {
    let ra = rho.partial_trace(Subsystem::B)?;
    let rb = rho.partial_trace(Subsystem::A)?;
    let prod = tensor(ra.matrix(), rb.matrix());
    let d = rho.matrix() - &prod;
    Ok((&d * &d).trace().re)
}

/// Alternative measure built on the square root of the state:
/// || sqrt(rho_AB) - Tr_B sqrt(rho_AB) (x) Tr_A sqrt(rho_AB) ||^2.
/// The partial traces of sqrt(rho) are used as they come, without
/// renormalization.
pub fn measure_e_tilde(rho: &DensityMatrix) -> Result<f64> {
    let dims = {
        if rho.dims().len() != 2 {
            return Err(Error::NotBipartite {
                factors: rho.dims().len(),
            });
        }
        (rho.dims()[0], rho.dims()[1])
    };
    let sqrt = mat_sqrt(rho.matrix())?;
    let ta = partial_trace(&sqrt, dims, Subsystem::B)?; // acts on A
    let tb = partial_trace(&sqrt, dims, Subsystem::A)?; // acts on B
    let d = &sqrt - &tensor(&ta, &tb);
    Ok((&d.adjoint() * &d).trace().re)
}
