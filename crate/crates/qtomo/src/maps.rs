//! Positive maps of density matrices and their superoperator matrices.
//!
//! Mixed-unitary maps sum p_k U_k rho U_k', Kraus maps sum V_k rho V_k'
//! with completeness sum V_k' V_k = 1, and both act on vectorized
//! states through n^2 x n^2 matrices sum p_k U_k (x) U_k* and
//! sum V_k (x) V_k*. The qubit case carries a compact semigroup of
//! such matrices parameterized by five moments of a random SU(2)
//! element; the transpose sits in it as a positive but not completely
//! positive member. Differences of Kraus-like terms give the
//! non-completely-positive maps used as entanglement witnesses.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cx, is_psd, pauli, tensor, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::vectorize::{metric_matrix, reshuffle_multi, vec, Provenance, Superoperator};

pub const KRAUS_TOL: f64 = 1e-9;
pub const WEIGHT_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;

/// Convex mixture of unitary conjugations, rho -> sum p_k U_k rho U_k'.
#[derive(Debug, Clone)]
pub struct MixedUnitaryMap {
    weights: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
}

impl MixedUnitaryMap {
    pub fn new(weights: Vec<f64>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if weights.len() != unitaries.len() || weights.is_empty() {
            return Err(Error::LengthMismatch {
                expected: weights.len().max(1),
                got: unitaries.len(),
            });
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::BadWeights { sum });
        }
        let n = unitaries[0].rows();
        for u in &unitaries {
            if u.rows() != n || u.cols() != n {
                return Err(Error::DimMismatch {
                    expected: n,
                    got: u.rows(),
                });
            }
            let dev = u.unitary_deviation();
            if dev > UNITARY_TOL {
                return Err(Error::NotUnitary { deviation: dev });
            }
        }
        Ok(Self { weights, unitaries })
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].rows()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    /// Re-express as a Kraus map with V_k = sqrt(p_k) U_k.
    pub fn to_kraus(&self) -> KrausMap {
        let ops = self
            .weights
            .iter()
            .zip(&self.unitaries)
            .map(|(&p, u)| u.scale_re(p.sqrt()))
            .collect();
        KrausMap::new(ops).expect("mixed-unitary Kraus form is complete")
    }
}

/// Generic completely positive trace-preserving transform
/// rho -> sum V_k rho V_k' with sum V_k' V_k = 1.
#[derive(Debug, Clone)]
pub struct KrausMap {
    ops: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        let n = ops[0].rows();
        for v in &ops {
            if v.rows() != n || v.cols() != n {
                return Err(Error::DimMismatch {
                    expected: n,
                    got: v.rows(),
                });
            }
        }
        let dev = completeness_deviation(&ops, n);
        if dev > KRAUS_TOL {
            return Err(Error::IncompleteKraus { deviation: dev });
        }
        Ok(Self { ops })
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }
}

fn completeness_deviation(ops: &[ComplexMatrix], n: usize) -> f64 {
    let mut acc = ComplexMatrix::zeros(n, n);
    for v in ops {
        acc = &acc + &(&v.adjoint() * v);
    }
    (&acc - &ComplexMatrix::identity(n)).norm_max()
}

fn check_state_dim(rho: &DensityMatrix, n: usize) -> Result<()> {
    if rho.total_dim() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: rho.total_dim(),
        });
    }
    Ok(())
}

/// Apply a mixed-unitary map; trace, Hermiticity, and positivity are
/// preserved, so the output is validated back into a `DensityMatrix`.
pub fn apply_mixed_unitary(rho: &DensityMatrix, map: &MixedUnitaryMap) -> Result<DensityMatrix> {
    check_state_dim(rho, map.dim())?;
    let n = map.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (&p, u) in map.weights.iter().zip(&map.unitaries) {
        out = &out + &(&(&u.scale_re(p) * rho.matrix()) * &u.adjoint());
    }
    DensityMatrix::new(out, rho.dims().to_vec())
}

/// Apply a Kraus map.
pub fn apply_kraus(rho: &DensityMatrix, map: &KrausMap) -> Result<DensityMatrix> {
    check_state_dim(rho, map.dim())?;
    let n = map.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for v in &map.ops {
        out = &out + &(&(v * rho.matrix()) * &v.adjoint());
    }
    DensityMatrix::new(out, rho.dims().to_vec())
}

/// Superoperator matrix of a mixed-unitary map: sum p_k U_k (x) U_k*.
pub fn superop_of_mixed_unitary(map: &MixedUnitaryMap) -> Superoperator {
    let n = map.dim();
    let mut mat = ComplexMatrix::zeros(n * n, n * n);
    for (&p, u) in map.weights.iter().zip(&map.unitaries) {
        mat = &mat + &tensor(u, &u.conj()).scale_re(p);
    }
    Superoperator::new(mat, Provenance::MixedUnitary)
}

/// Superoperator matrix of a Kraus map: sum V_k (x) V_k*.
pub fn superop_of_kraus(map: &KrausMap) -> Superoperator {
    let n = map.dim();
    let mut mat = ComplexMatrix::zeros(n * n, n * n);
    for v in &map.ops {
        mat = &mat + &tensor(v, &v.conj());
    }
    Superoperator::new(mat, Provenance::Kraus)
}

/// Positive-but-not-completely-positive difference of two Kraus-like
/// families: L = sum V (x) V* - sum v (x) v*, subject to the joint
/// normalization sum V'V - sum v'v = 1. Trace is preserved; positivity
/// of outputs is not guaranteed.
pub fn noncp_difference(plus: &[ComplexMatrix], minus: &[ComplexMatrix]) -> Result<Superoperator> {
    if plus.is_empty() {
        return Err(Error::LengthMismatch {
            expected: 1,
            got: 0,
        });
    }
    let n = plus[0].rows();
    for v in plus.iter().chain(minus) {
        if v.rows() != n || v.cols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: v.rows(),
            });
        }
    }
    let mut acc = ComplexMatrix::zeros(n, n);
    for v in plus {
        acc = &acc + &(&v.adjoint() * v);
    }
    for v in minus {
        acc = &acc - &(&v.adjoint() * v);
    }
    let dev = (&acc - &ComplexMatrix::identity(n)).norm_max();
    if dev > KRAUS_TOL {
        return Err(Error::NormalizationFail { deviation: dev });
    }
    let mut mat = ComplexMatrix::zeros(n * n, n * n);
    for v in plus {
        mat = &mat + &tensor(v, &v.conj());
    }
    for v in minus {
        mat = &mat - &tensor(v, &v.conj());
    }
    Ok(Superoperator::new(mat, Provenance::NonCpDifference))
}

/// The n-dimensional epsilon map rho -> -eps rho + (1 + eps)/n Tr(rho) 1,
/// realized as a difference of Kraus families.
pub fn epsilon_map(n: usize, eps: f64) -> Result<Superoperator> {
    if eps <= 0.0 {
        return Err(Error::OutOfRange {
            value: eps,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let scale = ((1.0 + eps) / n as f64).sqrt();
    let mut plus = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let mut e = ComplexMatrix::zeros(n, n);
            e[(j, k)] = cx(scale, 0.0);
            plus.push(e);
        }
    }
    let minus = vec![ComplexMatrix::identity(n).scale_re(eps.sqrt())];
    let mut l = noncp_difference(&plus, &minus)?;
    l = Superoperator::new(l.matrix().clone(), Provenance::Epsilon);
    Ok(l)
}

/// Superoperator mapping vec(rho) to vec(rho^T); a pure entry
/// permutation, so it preserves the spectrum. For n = 2 it equals the
/// displayed 4 x 4 matrix and the Pauli combination
/// (rho + s1 rho s1 - s2 rho s2 + s3 rho s3) / 2.
pub fn transpose_superop(n: usize) -> Superoperator {
    Superoperator::new(metric_matrix(n), Provenance::Transpose)
}

/// The five moments of a random SU(2) element that determine a qubit
/// positive-map semigroup matrix: ell = <a a*>, m = <a b*>, n = <a b>,
/// s = <a^2>, q = <b^2>. All moduli are at most one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSemigroupParams {
    pub ell: f64,
    pub m: Complex64,
    pub n: Complex64,
    pub s: Complex64,
    pub q: Complex64,
}

impl QubitSemigroupParams {
    /// Assemble the 4 x 4 semigroup matrix from the five moments.
    pub fn matrix(&self) -> ComplexMatrix {
        let (l, m, n, s, q) = (self.ell, self.m, self.n, self.s, self.q);
        let one = Complex64::ONE;
        ComplexMatrix::from_vec(
            4,
            4,
            vec![
                cx(l, 0.0), m, m.conj(), one - l,
                -n, s, -q, n,
                -n.conj(), -q.conj(), s.conj(), n.conj(),
                one - l, -m, -m.conj(), cx(l, 0.0),
            ],
        )
        .unwrap()
    }

    /// Closed-form determinant of the semigroup matrix:
    /// (1 - 2 ell)(|q|^2 - |s|^2) + 4 Re(q* m* n + m n s*).
    pub fn determinant(&self) -> f64 {
        (1.0 - 2.0 * self.ell) * (self.q.norm_sqr() - self.s.norm_sqr())
            + 4.0 * (self.q.conj() * self.m.conj() * self.n + self.m * self.n * self.s.conj()).re
    }
}

/// One weighted SU(2) sample (p, alpha, beta) with |a|^2 + |b|^2 = 1.
pub type WeightedSu2 = (f64, Complex64, Complex64);

/// Build the qubit semigroup superoperator <U (x) U*> from a finite
/// weighted sample set, together with the five moments. The block
/// relations D = s2 A* s2 and C = -s2 B* s2 hold by construction, and
/// (1/2, 0, 0, 1/2) is always a fixed point.
pub fn qubit_semigroup_sample(
    samples: &[WeightedSu2],
) -> Result<(Superoperator, QubitSemigroupParams)> {
    if samples.is_empty() {
        return Err(Error::LengthMismatch {
            expected: 1,
            got: 0,
        });
    }
    let sum: f64 = samples.iter().map(|s| s.0).sum();
    if samples.iter().any(|s| s.0 < 0.0) || (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::BadWeights { sum });
    }
    for &(_, a, b) in samples {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitary {
                deviation: (norm - 1.0).abs(),
            });
        }
    }
    let mean = |f: &dyn Fn(Complex64, Complex64) -> Complex64| -> Complex64 {
        samples
            .iter()
            .map(|&(p, a, b)| cx(p, 0.0) * f(a, b))
            .sum()
    };
    let params = QubitSemigroupParams {
        ell: mean(&|a, _| a * a.conj()).re,
        m: mean(&|a, b| a * b.conj()),
        n: mean(&|a, b| a * b),
        s: mean(&|a, _| a * a),
        q: mean(&|_, b| b * b),
    };
    Ok((
        Superoperator::new(params.matrix(), Provenance::MixedUnitary),
        params,
    ))
}

/// The SU(2) matrix [[a, b], [-b*, a*]] of one sample.
pub fn su2_matrix(alpha: Complex64, beta: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![alpha, beta, -beta.conj(), alpha.conj()],
    )
    .unwrap()
}

/// Local product superoperator C (L_1 (x) ... (x) L_N) C^-1 acting on
/// the vectorized composite state; for per-subsystem unitary channels
/// this equals the global (u_1 (x) ...) (x) (u_1 (x) ...)* conjugation.
pub fn local_product_superop(parts: &[Superoperator], dims: &[usize]) -> Result<Superoperator> {
    if parts.len() != dims.len() || parts.is_empty() {
        return Err(Error::LengthMismatch {
            expected: dims.len().max(1),
            got: parts.len(),
        });
    }
    for (l, &d) in parts.iter().zip(dims) {
        if l.matrix().rows() != d * d {
            return Err(Error::DimMismatch {
                expected: d * d,
                got: l.matrix().rows(),
            });
        }
    }
    let mut inner = parts[0].matrix().clone();
    for l in &parts[1..] {
        inner = tensor(&inner, l.matrix());
    }
    let c = reshuffle_multi(dims);
    // C is orthogonal; its transpose is its inverse (and equals C when
    // all factor dimensions agree).
    let mat = &(c.matrix() * &inner) * &c.matrix().transpose();
    Ok(Superoperator::new(mat, Provenance::LocalProduct))
}

/// Purify a mixture sum p_k rho_k through a fiducial rank-one projector:
/// rho'' = N sum_kj sqrt(p_k p_j) rho_k P0 rho_j / sqrt(Tr rho_k P0 rho_j P0).
/// The output has rank one.
pub fn purify(
    weights: &[f64],
    states: &[DensityMatrix],
    fiducial: &ComplexMatrix,
) -> Result<DensityMatrix> {
    if weights.len() != states.len() || weights.is_empty() {
        return Err(Error::LengthMismatch {
            expected: weights.len().max(1),
            got: states.len(),
        });
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::BadWeights { sum });
    }
    let n = states[0].total_dim();
    for s in states {
        check_state_dim(s, n)?;
    }
    if fiducial.rows() != n || fiducial.cols() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: fiducial.rows(),
        });
    }
    // rank-one projector: Hermitian, idempotent, unit trace
    let herm = fiducial.herm_deviation();
    let idem = (&(fiducial * fiducial) - fiducial).norm_max();
    let tr = (fiducial.trace() - Complex64::ONE).norm();
    if herm > 1e-10 || idem > 1e-10 || tr > 1e-10 {
        return Err(Error::BadMapSample {
            reason: format!(
                "fiducial is not a rank-1 projector (herm {herm:.1e}, idem {idem:.1e}, trace dev {tr:.1e})"
            ),
        });
    }

    let k = states.len();
    let mut acc = ComplexMatrix::zeros(n, n);
    for i in 0..k {
        for j in 0..k {
            let num = &(&(states[i].matrix() * fiducial) * states[j].matrix());
            let denom_sq = (&(num * fiducial)).trace().re;
            if denom_sq <= 1e-14 {
                return Err(Error::DegenerateFiducial { value: denom_sq });
            }
            let coeff = (weights[i] * weights[j]).sqrt() / denom_sq.sqrt();
            acc = &acc + &num.scale_re(coeff);
        }
    }
    let norm = acc.trace().re;
    if norm <= 1e-14 {
        return Err(Error::DegenerateFiducial { value: norm });
    }
    DensityMatrix::new(acc.scale_re(1.0 / norm), states[0].dims().to_vec())
}

/// Real quadratic form of a Hermitian matrix: D = [[r, R], [R^T, r]]
/// with r the real part of rho and R chosen so that
/// (x, y) D (x, y)^T = z* rho z for z = x + i y.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    r: ComplexMatrix,
    big_r: ComplexMatrix,
    d: ComplexMatrix,
}

impl QuadraticForm {
    pub fn new(rho: &ComplexMatrix) -> Result<Self> {
        let dev = rho.herm_deviation();
        if !rho.is_square() || dev > 1e-10 * rho.norm_max().max(1.0) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let n = rho.rows();
        // r = (rho + rho*)/2 entrywise; R = -(Im rho), real antisymmetric.
        let r = ComplexMatrix::from_fn(n, n, |i, j| cx(rho[(i, j)].re, 0.0));
        let big_r = ComplexMatrix::from_fn(n, n, |i, j| cx(-rho[(i, j)].im, 0.0));
        let mut d = ComplexMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                d[(i, j)] = r[(i, j)];
                d[(n + i, n + j)] = r[(i, j)];
                d[(i, n + j)] = big_r[(i, j)];
                d[(n + i, j)] = big_r[(j, i)];
            }
        }
        Ok(Self { r, big_r, d })
    }

    pub fn r(&self) -> &ComplexMatrix {
        &self.r
    }

    pub fn big_r(&self) -> &ComplexMatrix {
        &self.big_r
    }

    /// The real 2n x 2n block matrix.
    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    /// Evaluate the form on real vectors x, y.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let n = self.r.rows();
        if x.len() != n || y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x.len().max(y.len()),
            });
        }
        let z: Vec<Complex64> = x
            .iter()
            .chain(y.iter())
            .map(|&v| cx(v, 0.0))
            .collect();
        let dz = crate::linalg::mat_vec(&self.d, &z);
        Ok(z.iter().zip(&dz).map(|(a, b)| (a * b).re).sum())
    }
}

/// Shorthand constructor for [`QuadraticForm`].
pub fn quad_form(rho: &ComplexMatrix) -> Result<QuadraticForm> {
    QuadraticForm::new(rho)
}

/// The two Peres-like transforms of a 3 x 3 Hermitian matrix: sign flip
/// of the third row/column off-diagonal entries, and the same composed
/// with transposition. Both come from congruence with the orthogonal
/// diag(1, -1, -1)-type reflection, so the first preserves the
/// spectrum.
pub fn peres_like_n3(rho: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if rho.rows() != 3 || rho.cols() != 3 {
        return Err(Error::ShapeMismatch {
            expected_rows: 3,
            expected_cols: 3,
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    let dev = rho.herm_deviation();
    if dev > 1e-10 * rho.norm_max().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let sign = |i: usize, j: usize| -> f64 {
        let s = [1.0, 1.0, -1.0];
        s[i] * s[j]
    };
    let prime = ComplexMatrix::from_fn(3, 3, |i, j| rho[(i, j)].scale(sign(i, j)));
    let double_prime = ComplexMatrix::from_fn(3, 3, |i, j| rho[(j, i)].scale(sign(i, j)));
    Ok((prime, double_prime))
}

/// Entrywise cosh/sinh transform
/// rho_jk -> rho_jk (cosh^2 theta cos(theta_j - theta_k) - sinh^2 theta delta_jk).
/// Diagonal entries are multiplied by cosh^2 - sinh^2 = 1, so the trace
/// is preserved; off-diagonal growth makes the map non-completely
/// positive for large theta.
pub fn coshsinh_map(rho: &ComplexMatrix, theta: f64, phases: &[f64]) -> Result<ComplexMatrix> {
    if !rho.is_square() || phases.len() != rho.rows() {
        return Err(Error::ShapeMismatch {
            expected_rows: rho.rows(),
            expected_cols: rho.rows(),
            rows: phases.len(),
            cols: rho.cols(),
        });
    }
    let dev = rho.herm_deviation();
    if dev > 1e-10 * rho.norm_max().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let ch2 = theta.cosh() * theta.cosh();
    let sh2 = theta.sinh() * theta.sinh();
    Ok(ComplexMatrix::from_fn(rho.rows(), rho.cols(), |j, k| {
        let factor = ch2 * (phases[j] - phases[k]).cos() - if j == k { sh2 } else { 0.0 };
        rho[(j, k)].scale(factor)
    }))
}

/// Trace-preservation check for a superoperator: the rows addressing
/// diagonal output entries must sum to vec(1)^T.
pub fn is_trace_preserving(l: &Superoperator, tol: f64) -> bool {
    let n = l.state_dim();
    let m = l.matrix();
    for col in 0..n * n {
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            acc += m[(i * n + i, col)];
        }
        let expect = if col % (n + 1) == 0 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        };
        if (acc - expect).norm() > tol {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::*;
    use crate::linalg::{haar_unitary, herm_eig, mat_vec};
    use crate::states::{random_density, DensityMatrix};
    use crate::vectorize::devec;
    use rand::Rng as _;

    fn diag_state(entries: &[f64]) -> DensityMatrix {
        let n = entries.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = cx(x, 0.0);
        }
        DensityMatrix::new(m, vec![n]).unwrap()
    }

    #[test]
    fn mixed_unitary_identity_and_bitflip() {
        let mut rng = rng(40);
        let rho = random_density(2, 2, &mut rng).unwrap();
        let id = MixedUnitaryMap::new(vec![1.0], vec![ComplexMatrix::identity(2)]).unwrap();
        let out = apply_mixed_unitary(&rho, &id).unwrap();
        assert_close(out.matrix(), rho.matrix(), 1e-14, "identity map");

        let flip =
            MixedUnitaryMap::new(vec![0.5, 0.5], vec![ComplexMatrix::identity(2), pauli(1)])
                .unwrap();
        let out = apply_mixed_unitary(&diag_state(&[1.0, 0.0]), &flip).unwrap();
        assert_close(
            out.matrix(),
            &ComplexMatrix::identity(2).scale_re(0.5),
            1e-14,
            "balanced bit flip",
        );
    }

    #[test]
    fn mixed_unitary_validation() {
        assert!(MixedUnitaryMap::new(vec![0.7, 0.7], vec![pauli(0), pauli(1)]).is_err());
        assert!(MixedUnitaryMap::new(vec![1.0], vec![pauli(1).scale_re(2.0)]).is_err());
    }

    #[test]
    fn mixed_unitary_smooths_diagonal_states() {
        // unital channels majorize: partial sums of the sorted output
        // spectrum never exceed the input's
        let mut rng = rng(41);
        let rho = diag_state(&[0.6, 0.3, 0.1]);
        for _ in 0..10 {
            let map = MixedUnitaryMap::new(
                vec![0.4, 0.35, 0.25],
                (0..3).map(|_| haar_unitary(3, &mut rng)).collect(),
            )
            .unwrap();
            let out = apply_mixed_unitary(&rho, &map).unwrap();
            let eigs = out.eigenvalues().unwrap();
            let mut partial_in = 0.0;
            let mut partial_out = 0.0;
            for k in 0..3 {
                partial_in += [0.6, 0.3, 0.1][k];
                partial_out += eigs[k];
                assert!(partial_out <= partial_in + 1e-10);
            }
        }
    }

    #[test]
    fn kraus_identity_and_completeness() {
        let id = KrausMap::new(vec![ComplexMatrix::identity(3)]).unwrap();
        let mut rng = rng(42);
        let rho = random_density(3, 2, &mut rng).unwrap();
        let out = apply_kraus(&rho, &id).unwrap();
        assert_close(out.matrix(), rho.matrix(), 1e-14, "identity Kraus");

        assert!(matches!(
            KrausMap::new(vec![ComplexMatrix::identity(2).scale_re(0.9)]),
            Err(Error::IncompleteKraus { .. })
        ));
    }

    /// Normalize an arbitrary family into a Kraus set via T^(-1/2).
    fn random_kraus(n: usize, terms: usize, rng: &mut impl rand::Rng) -> KrausMap {
        use crate::linalg::{ginibre, mat_sqrt};
        let raw: Vec<ComplexMatrix> = (0..terms).map(|_| ginibre(n, n, rng)).collect();
        let mut t = ComplexMatrix::zeros(n, n);
        for a in &raw {
            t = &t + &(&a.adjoint() * a);
        }
        let t_inv_sqrt = mat_sqrt(&t.inverse().unwrap().hermitian_part()).unwrap();
        KrausMap::new(raw.iter().map(|a| a * &t_inv_sqrt).collect()).unwrap()
    }

    #[test]
    fn many_kraus_terms_approach_maximally_mixed() {
        let mut rng = rng(43);
        let rho = diag_state(&[1.0, 0.0]);
        let maximally_mixed = ComplexMatrix::identity(2).scale_re(0.5);
        let dist = |k: usize, rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
            let mut acc = 0.0;
            for _ in 0..20 {
                let map = random_kraus(2, k, rng);
                let out = apply_kraus(&rho, &map).unwrap();
                acc += (out.matrix() - &maximally_mixed).norm_fro();
            }
            acc / 20.0
        };
        let near = dist(2, &mut rng);
        let far = dist(40, &mut rng);
        assert!(
            far < near,
            "distance to I/n should shrink with term count ({far} vs {near})"
        );
    }

    #[test]
    fn mixed_unitary_as_kraus_agrees() {
        let mut rng = rng(44);
        let map = MixedUnitaryMap::new(
            vec![0.3, 0.7],
            vec![haar_unitary(2, &mut rng), haar_unitary(2, &mut rng)],
        )
        .unwrap();
        let rho = random_density(2, 2, &mut rng).unwrap();
        let a = apply_mixed_unitary(&rho, &map).unwrap();
        let b = apply_kraus(&rho, &map.to_kraus()).unwrap();
        assert_close(a.matrix(), b.matrix(), 1e-12, "V_k = sqrt(p_k) U_k");
    }

    #[test]
    fn superop_commutes_with_channel() {
        let mut rng = rng(45);
        for _ in 0..5 {
            let map = MixedUnitaryMap::new(
                vec![0.5, 0.25, 0.25],
                (0..3).map(|_| haar_unitary(2, &mut rng)).collect(),
            )
            .unwrap();
            let rho = random_density(2, 2, &mut rng).unwrap();
            let l = superop_of_mixed_unitary(&map);
            let via_vec = devec(&l.apply(&vec(rho.matrix()).unwrap()).unwrap());
            let direct = apply_mixed_unitary(&rho, &map).unwrap();
            assert_close(&via_vec, direct.matrix(), 1e-10, "L vec = vec channel");

            let kmap = random_kraus(3, 4, &mut rng);
            let rho3 = random_density(3, 3, &mut rng).unwrap();
            let l = superop_of_kraus(&kmap);
            let via_vec = devec(&l.apply(&vec(rho3.matrix()).unwrap()).unwrap());
            let direct = apply_kraus(&rho3, &kmap).unwrap();
            assert_close(&via_vec, direct.matrix(), 1e-10, "Kraus superop");
        }
        let id = MixedUnitaryMap::new(vec![1.0], vec![ComplexMatrix::identity(2)]).unwrap();
        assert_close(
            superop_of_mixed_unitary(&id).matrix(),
            &ComplexMatrix::identity(4),
            1e-15,
            "identity superop",
        );
    }

    #[test]
    fn kraus_superop_has_twelve_free_parameters() {
        // For a generic 2x2 Kraus family the 4x4 superoperator is built
        // from the sixteen second moments <z w*>, z, w in {a, b, c, d}:
        // four real corners, six conjugate off-diagonal pairs, and four
        // real trace-preservation constraints leave 12 real parameters.
        let mut rng = rng(46);
        let map = random_kraus(2, 3, &mut rng);
        let l = superop_of_kraus(&map);
        let m = l.matrix();
        // corners real
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!(m[(i, j)].im.abs() < 1e-12);
        }
        // conjugate pairing of the six moment parameters
        let pairs = [
            ((0, 1), (0, 2)),
            ((1, 0), (2, 0)),
            ((1, 1), (2, 2)),
            ((1, 2), (2, 1)),
            ((1, 3), (2, 3)),
            ((3, 1), (3, 2)),
        ];
        for (a, b) in pairs {
            assert!((m[a].conj() - m[b]).norm() < 1e-12, "{a:?} vs {b:?}");
        }
        // trace preservation: diagonal output rows sum to vec(1)^T
        assert!(is_trace_preserving(&l, 1e-10));
    }

    #[test]
    fn noncp_difference_reduces_to_kraus_when_minus_empty() {
        let mut rng = rng(47);
        let kmap = random_kraus(2, 2, &mut rng);
        let direct = superop_of_kraus(&kmap);
        let diff = noncp_difference(kmap.ops(), &[]).unwrap();
        assert_close(diff.matrix(), direct.matrix(), 1e-12, "empty minus");
    }

    #[test]
    fn epsilon_map_values() {
        let l = epsilon_map(2, 0.2).unwrap();
        let rho = diag_state(&[1.0, 0.0]);
        let out = devec(&l.apply(&vec(rho.matrix()).unwrap()).unwrap());
        let expect = ComplexMatrix::from_real(2, 2, &[0.4, 0.0, 0.0, 0.6]).unwrap();
        assert_close(&out, &expect, 1e-12, "eps = 0.2, N = 2 on diag(1, 0)");
        assert!(is_trace_preserving(&l, 1e-10));

        // large eps drives outputs negative: non-CP witness
        let l = epsilon_map(2, 1.5).unwrap();
        let out = devec(&l.apply(&vec(rho.matrix()).unwrap()).unwrap());
        let (ok, min) = is_psd(&out, 1e-9).unwrap();
        assert!(!ok && min < -0.1);
    }

    #[test]
    fn noncp_normalization_check() {
        let plus = vec![ComplexMatrix::identity(2)];
        let minus = vec![ComplexMatrix::identity(2).scale_re(0.5)];
        assert!(matches!(
            noncp_difference(&plus, &minus),
            Err(Error::NormalizationFail { .. })
        ));
    }

    #[test]
    fn transpose_superop_matches_display_and_pauli_combination() {
        let t = transpose_superop(2);
        let expect = ComplexMatrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0,
                0.0, 0.0, 1.0, 0.0,
                0.0, 1.0, 0.0, 0.0,
                0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        assert_close(t.matrix(), &expect, 0.0, "displayed matrix");

        let mut rng = rng(48);
        let rho = random_density(2, 2, &mut rng).unwrap();
        let out = t.apply_matrix(rho.matrix()).unwrap();
        assert_close(&out, &rho.matrix().transpose(), 0.0, "vec rho -> vec rho^T");

        // (rho + s1 rho s1 - s2 rho s2 + s3 rho s3) / 2 = rho^T
        let mut combo = rho.matrix().clone();
        for (k, sign) in [(1usize, 1.0), (2, -1.0), (3, 1.0)] {
            combo = &combo + &(&(&pauli(k) * rho.matrix()) * &pauli(k)).scale_re(sign);
        }
        combo = combo.scale_re(0.5);
        assert_close(&combo, &rho.matrix().transpose(), 1e-14, "Pauli combination");

        // symmetric states are fixed points
        let sym = ComplexMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        assert_close(
            &t.apply_matrix(&sym).unwrap(),
            &sym,
            0.0,
            "symmetric fixed point",
        );
    }

    fn random_su2_samples(count: usize, rng: &mut impl rand::Rng) -> Vec<WeightedSu2> {
        use rand_distr::{Distribution, StandardNormal};
        let mut weights: Vec<f64> = (0..count)
            .map(|_| -> f64 {
                let u: f64 = rng.random();
                -u.ln()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        weights
            .into_iter()
            .map(|p| {
                let v: Vec<f64> = (0..4).map(|_| StandardNormal.sample(rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                (
                    p,
                    cx(v[0] / norm, v[1] / norm),
                    cx(v[2] / norm, v[3] / norm),
                )
            })
            .collect()
    }

    #[test]
    fn semigroup_single_trivial_sample() {
        let (l, params) = qubit_semigroup_sample(&[(1.0, Complex64::ONE, Complex64::ZERO)]).unwrap();
        assert_close(l.matrix(), &ComplexMatrix::identity(4), 1e-15, "alpha=1 gives 1");
        assert!((params.ell - 1.0).abs() < 1e-15);
        assert!((params.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn semigroup_matrix_equals_averaged_tensor() {
        let mut rng = rng(49);
        let samples = random_su2_samples(4, &mut rng);
        let (l, params) = qubit_semigroup_sample(&samples).unwrap();
        let mut avg = ComplexMatrix::zeros(4, 4);
        for &(p, a, b) in &samples {
            let u = su2_matrix(a, b);
            avg = &avg + &tensor(&u, &u.conj()).scale_re(p);
        }
        assert_close(l.matrix(), &avg, 1e-13, "R3 assembly = <U (x) U*>");
        assert!(params.m.norm() <= 1.0 + 1e-12 && params.ell <= 1.0 + 1e-12);
    }

    #[test]
    fn semigroup_determinant_formula() {
        let mut rng = rng(50);
        for _ in 0..100 {
            let samples = random_su2_samples(3, &mut rng);
            let (l, params) = qubit_semigroup_sample(&samples).unwrap();
            let numeric = l.matrix().determinant();
            assert!(numeric.im.abs() < 1e-10);
            assert!(
                (numeric.re - params.determinant()).abs() < 1e-9,
                "det formula"
            );
        }
    }

    #[test]
    fn semigroup_degenerate_family_has_zero_determinant() {
        // Balance (a, b) with the swapped sample (b, a): then
        // <aa*> = (|a|^2 + |b|^2)/2 = 1/2 and <ab*> = Re(ab*), which a
        // phase rotation of b turns into zero. Such families have
        // vanishing determinant.
        let mut rng = rng(51);
        let v: Vec<f64> = (0..4)
            .map(|_| rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let a = cx(v[0] / norm, v[1] / norm);
        let b = cx(v[2] / norm, v[3] / norm);
        // rotate b so that a b* becomes purely imaginary
        let phase = (a * b.conj()).arg();
        let b = b * Complex64::from_polar(1.0, phase - std::f64::consts::FRAC_PI_2);
        let samples = vec![(0.5, a, b), (0.5, b, a)];
        let (_, params) = qubit_semigroup_sample(&samples).unwrap();
        assert!((params.ell - 0.5).abs() < 1e-12);
        assert!(params.m.norm() < 1e-12);
        assert!(params.determinant().abs() < 1e-12, "det vanishes");
    }

    #[test]
    fn semigroup_block_relations_and_fixed_point() {
        let mut rng = rng(52);
        let s2 = pauli(2);
        let check_blocks = |m: &ComplexMatrix| {
            let block = |r0: usize, c0: usize| {
                ComplexMatrix::from_fn(2, 2, |i, j| m[(r0 + i, c0 + j)])
            };
            let (a, b, c, d) = (block(0, 0), block(0, 2), block(2, 0), block(2, 2));
            assert_close(&d, &(&(&s2 * &a.conj()) * &s2), 1e-12, "D = s2 A* s2");
            assert_close(&c, &(&(&s2 * &b.conj()) * &s2).scale_re(-1.0), 1e-12, "C = -s2 B* s2");
        };
        let fixed = [cx(0.5, 0.0), Complex64::ZERO, Complex64::ZERO, cx(0.5, 0.0)];
        for _ in 0..20 {
            let (l1, _) = qubit_semigroup_sample(&random_su2_samples(3, &mut rng)).unwrap();
            let (l2, _) = qubit_semigroup_sample(&random_su2_samples(2, &mut rng)).unwrap();
            check_blocks(l1.matrix());
            // products stay in the semigroup
            let prod = l1.compose(&l2);
            check_blocks(prod.matrix());
            let out = mat_vec(prod.matrix(), &fixed);
            for (got, want) in out.iter().zip(&fixed) {
                assert!((got - want).norm() < 1e-10, "fixed point");
            }
        }
    }

    #[test]
    fn local_product_identity_and_unitary_oracle() {
        let id2 = Superoperator::identity(2);
        let l = local_product_superop(&[id2.clone(), id2], &[2, 2]).unwrap();
        assert_close(&l.matrix().clone(), &ComplexMatrix::identity(16), 1e-15, "identities");

        let mut rng = rng(53);
        for dims in [[2usize, 2usize], [2, 3]] {
            let u = haar_unitary(dims[0], &mut rng);
            let v = haar_unitary(dims[1], &mut rng);
            let lu = Superoperator::new(tensor(&u, &u.conj()), Provenance::MixedUnitary);
            let lv = Superoperator::new(tensor(&v, &v.conj()), Provenance::MixedUnitary);
            let l = local_product_superop(&[lu, lv], &dims).unwrap();
            let rho = random_density(dims[0] * dims[1], 3, &mut rng).unwrap();
            let out = l.apply_matrix(rho.matrix()).unwrap();
            let w = tensor(&u, &v);
            let oracle = &(&w * rho.matrix()) * &w.adjoint();
            assert_close(&out, &oracle, 1e-12, "local conjugation oracle");
        }
    }

    #[test]
    fn local_transpose_keeps_separable_states_positive() {
        let mut rng = rng(54);
        // random two-qubit separable mixture
        for _ in 0..10 {
            let mut acc = ComplexMatrix::zeros(4, 4);
            let terms = 3;
            for _ in 0..terms {
                let a = random_density(2, 2, &mut rng).unwrap();
                let b = random_density(2, 2, &mut rng).unwrap();
                acc = &acc + &tensor(a.matrix(), b.matrix()).scale_re(1.0 / terms as f64);
            }
            let l = local_product_superop(
                &[Superoperator::identity(2), transpose_superop(2)],
                &[2, 2],
            )
            .unwrap();
            let out = l.apply_matrix(&acc).unwrap();
            let (ok, min) = is_psd(&out, 1e-9).unwrap();
            assert!(ok, "separable PT stays PSD (min {min:.2e})");
        }
    }

    #[test]
    fn purify_single_pure_state_is_identity() {
        let mut rng = rng(55);
        let psi = random_density(3, 1, &mut rng).unwrap();
        let out = purify(&[1.0], &[psi.clone()], psi.matrix()).unwrap();
        assert_close(out.matrix(), psi.matrix(), 1e-10, "pure fixed point");
    }

    #[test]
    fn purify_two_orthogonal_pure_states() {
        // orthogonal-support projectors with a generic fiducial
        let e1 = diag_state(&[1.0, 0.0]);
        let e2 = diag_state(&[0.0, 1.0]);
        let fid_vec = [cx(0.6, 0.0), cx(0.8, 0.0)];
        let fid = ComplexMatrix::from_fn(2, 2, |i, j| fid_vec[i] * fid_vec[j].conj());
        let out = purify(&[0.5, 0.5], &[e1, e2], &fid).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!((out.purity() - 1.0).abs() < 1e-10, "rank-1 output");
    }

    #[test]
    fn purify_random_mixtures_are_pure() {
        let mut rng = rng(56);
        for _ in 0..5 {
            let states: Vec<DensityMatrix> = (0..3)
                .map(|_| random_density(3, 2, &mut rng).unwrap())
                .collect();
            let fid_state = random_density(3, 1, &mut rng).unwrap();
            let out = purify(&[0.2, 0.5, 0.3], &states, fid_state.matrix()).unwrap();
            assert!((out.purity() - 1.0).abs() < 1e-9);
            let eigs = herm_eig(out.matrix(), 1e-9).unwrap().eigenvalues;
            assert!(eigs[0] > 1.0 - 1e-9 && eigs[1].abs() < 1e-9);
        }
    }

    #[test]
    fn purify_rejects_degenerate_fiducial() {
        let e1 = diag_state(&[1.0, 0.0]);
        let e2 = diag_state(&[0.0, 1.0]);
        // fiducial orthogonal to e2's support
        let fid = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            purify(&[0.5, 0.5], &[e1, e2], &fid),
            Err(Error::DegenerateFiducial { .. })
        ));
    }

    #[test]
    fn quad_form_real_matrix_has_zero_off_block() {
        let rho = ComplexMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
        let q = quad_form(&rho).unwrap();
        assert!(q.big_r().norm_max() < 1e-15);
        assert_close(q.r(), &rho, 1e-15, "r = rho for real rho");
    }

    #[test]
    fn quad_form_sigma2_block_structure() {
        // rho = (1 + sigma_2)/2: R is the real antisymmetric off-block
        // proportional to sigma_2 / i.
        let rho = &ComplexMatrix::identity(2).scale_re(0.5) + &pauli(2).scale_re(0.5);
        let q = quad_form(&rho).unwrap();
        let r = q.big_r();
        assert!((r[(0, 1)].re.abs() - 0.5).abs() < 1e-15);
        assert!((r[(0, 1)] + r[(1, 0)]).norm() < 1e-15, "antisymmetric");
        assert!(r[(0, 0)].norm() < 1e-15 && r[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn quad_form_matches_complex_oracle() {
        let mut rng = rng(57);
        for n in [2usize, 3, 4] {
            let rho = random_hermitian(n, &mut rng);
            let q = quad_form(&rho).unwrap();
            for _ in 0..10 {
                let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
                let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
                let z: Vec<Complex64> = x.iter().zip(&y).map(|(&a, &b)| cx(a, b)).collect();
                let zrz: Complex64 = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| z[i].conj() * rho[(i, j)] * z[j])
                            .sum::<Complex64>()
                    })
                    .sum();
                assert!(zrz.im.abs() < 1e-12);
                let form = q.eval(&x, &y).unwrap();
                assert!((form - zrz.re).abs() < 1e-12, "z* rho z oracle");
            }
            // PSD rho keeps the form nonnegative
            let psd = random_psd(n, n, &mut rng);
            let q = quad_form(&psd).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            assert!(q.eval(&x, &y).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn peres_like_patterns_and_spectrum() {
        let mut rng = rng(58);
        // diagonal matrices are fixed by both transforms
        let d = ComplexMatrix::from_real(3, 3, &[0.5, 0., 0., 0., 0.3, 0., 0., 0., 0.2]).unwrap();
        let (p1, p2) = peres_like_n3(&d).unwrap();
        assert_close(&p1, &d, 0.0, "diagonal fixed");
        assert_close(&p2, &d, 0.0, "diagonal fixed");

        let rho = random_hermitian(3, &mut rng);
        let (p1, p2) = peres_like_n3(&rho).unwrap();
        // displayed sign patterns
        for i in 0..3 {
            for j in 0..3 {
                let s = if (i == 2) ^ (j == 2) { -1.0 } else { 1.0 };
                assert!((p1[(i, j)] - rho[(i, j)].scale(s)).norm() < 1e-15);
                assert!((p2[(i, j)] - rho[(j, i)].scale(s)).norm() < 1e-15);
            }
        }
        assert!(p1.is_hermitian(1e-12) && p2.is_hermitian(1e-12));
        assert!((p1.trace() - rho.trace()).norm() < 1e-14);
        // congruence with an orthogonal reflection preserves the spectrum
        let e0 = herm_eig(&rho, 1e-9).unwrap().eigenvalues;
        let e1 = herm_eig(&p1, 1e-9).unwrap().eigenvalues;
        for (a, b) in e0.iter().zip(&e1) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn coshsinh_identity_and_trace() {
        let mut rng = rng(59);
        let rho = random_psd(3, 3, &mut rng);
        let out = coshsinh_map(&rho, 0.0, &[0.4, 0.4, 0.4]).unwrap();
        assert_close(&out, &rho, 1e-14, "theta = 0, equal phases");

        let out = coshsinh_map(&rho, 1.3, &[0.1, 0.9, 2.0]).unwrap();
        assert!(out.is_hermitian(1e-12));
        assert!((out.trace() - rho.trace()).norm() < 1e-12, "diagonal scale is 1");
    }

    #[test]
    fn coshsinh_can_break_positivity() {
        // scan theta; the flat rank-1 state with spread phases loses
        // positivity once cosh^2 theta cos(d_phase) overwhelms the diagonal
        let third = cx(1.0 / 3.0, 0.0);
        let rho = ComplexMatrix::from_fn(3, 3, |_, _| third);
        let phases = [0.0, std::f64::consts::PI, 0.0];
        let mut witnessed = false;
        let mut theta = 0.1;
        while theta <= 2.0 {
            let out = coshsinh_map(&rho, theta, &phases).unwrap();
            let (ok, _) = is_psd(&out, 1e-9).unwrap();
            if !ok {
                witnessed = true;
                break;
            }
            theta += 0.1;
        }
        assert!(witnessed, "non-CP witness found in theta scan");
    }
}
