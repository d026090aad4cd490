//! Spin and U(n) tomograms.
//!
//! The spin tomogram of a spin-j state is the probability of finding
//! projection m along a rotated quantization axis,
//! W(m, o) = <jm| D'(g) rho D(g) |jm>, with D(g) the SU(2) rotation in
//! the 2j+1 dimensional representation. Only two Euler angles matter,
//! combined into the unit vector o = (cos phi sin theta, sin phi sin
//! theta, cos theta). The U(n) tomogram generalizes this to the
//! diagonal of U' rho U in a product basis for an arbitrary unitary U;
//! spin tomograms are the special case U = D(g1) (x) D(g2) (x) ...
//!
//! Convention: zyz Euler angles with D = e^{-i a Jz} e^{-i b Jy}
//! e^{-i c Jz} and the Wigner formula for the small d-matrix; basis
//! states are ordered by descending m. Probabilities are invariant
//! under any fixed convention choice.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cx, tensor, ComplexMatrix};
use crate::states::{from_bloch, BlochVector, DensityMatrix};

/// Largest supported spin, as twice its value (j = 8).
pub const MAX_TWICE_J: u32 = 16;

/// Exact factorials up to 16! (all representable in f64).
const FACT: [f64; 17] = {
    let mut f = [1.0_f64; 17];
    let mut i = 1;
    while i < 17 {
        f[i] = f[i - 1] * i as f64;
        i += 1;
    }
    f
};

/// Quantization direction on the sphere, theta in [0, pi], phi in
/// [0, 2 pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn z() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn x() -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, 0.0)
    }

    pub fn y() -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
    }

    /// The unit vector (cos phi sin theta, sin phi sin theta, cos theta).
    pub fn unit_vector(&self) -> [f64; 3] {
        [
            self.phi.cos() * self.theta.sin(),
            self.phi.sin() * self.theta.sin(),
            self.theta.cos(),
        ]
    }

    /// Direction of a Bloch-style vector (need not be normalized).
    pub fn from_vector(v: [f64; 3]) -> Self {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm == 0.0 {
            return Self::z();
        }
        Self::new((v[2] / norm).acos(), v[1].atan2(v[0]))
    }
}

/// Probability table over outcome labels for one measurement context.
#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram {
    outcomes: Vec<Vec<f64>>,
    probabilities: Vec<f64>,
    context: String,
}

impl Tomogram {
    /// Validate and wrap: probabilities clipped at -1e-12, each in
    /// [0, 1], sum within 1e-10 of one. Larger negativity signals an
    /// invalid input state and is an error.
    pub fn new(outcomes: Vec<Vec<f64>>, probabilities: Vec<f64>, context: String) -> Result<Self> {
        let mut probs = probabilities;
        for p in &mut probs {
            if *p < -1e-12 || *p > 1.0 + 1e-12 {
                return Err(Error::InvalidTomogram { value: *p });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidTomogram { value: sum });
        }
        Ok(Self {
            outcomes,
            probabilities: probs,
            context,
        })
    }

    pub fn outcomes(&self) -> &[Vec<f64>] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    /// Probability of a given outcome label, if present.
    pub fn probability_of(&self, outcome: &[f64]) -> Option<f64> {
        self.outcomes
            .iter()
            .position(|o| {
                o.len() == outcome.len()
                    && o.iter().zip(outcome).all(|(a, b)| (a - b).abs() < 1e-9)
            })
            .map(|i| self.probabilities[i])
    }
}

fn check_spin(twice_j: u32) -> Result<()> {
    if twice_j > MAX_TWICE_J {
        return Err(Error::BadSpin {
            twice_j,
            max: MAX_TWICE_J,
        });
    }
    Ok(())
}

/// Wigner small-d matrix element d^j_{m'm}(beta) by the factorial sum.
/// Spins and projections are passed as twice their value.
pub fn wigner_d_small(twice_j: u32, twice_mp: i32, twice_m: i32, beta: f64) -> Result<f64> {
    check_spin(twice_j)?;
    let tj = twice_j as i32;
    if twice_mp.abs() > tj
        || twice_m.abs() > tj
        || (tj - twice_mp) % 2 != 0
        || (tj - twice_m) % 2 != 0
    {
        return Err(Error::BadSpin {
            twice_j,
            max: MAX_TWICE_J,
        });
    }
    // integer combinations (all guaranteed integral)
    let j_plus_mp = ((tj + twice_mp) / 2) as usize;
    let j_minus_mp = ((tj - twice_mp) / 2) as usize;
    let j_plus_m = ((tj + twice_m) / 2) as usize;
    let j_minus_m = ((tj - twice_m) / 2) as usize;
    let mp_minus_m = (twice_mp - twice_m) / 2; // may be negative

    let prefactor =
        (FACT[j_plus_mp] * FACT[j_minus_mp] * FACT[j_plus_m] * FACT[j_minus_m]).sqrt();

    let k_min = 0.max(-mp_minus_m) as usize;
    let k_max = j_plus_m.min(j_minus_mp);
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());

    let mut sum = 0.0;
    let mut k = k_min;
    while k <= k_max {
        let ki = k as i32;
        let sign = if (mp_minus_m + ki) % 2 == 0 { 1.0 } else { -1.0 };
        let denom = FACT[j_plus_m - k]
            * FACT[k]
            * FACT[j_minus_mp - k]
            * FACT[(mp_minus_m + ki) as usize];
        let cos_pow = (j_plus_m - k) + (j_minus_mp - k);
        let sin_pow = (mp_minus_m + 2 * ki) as u32;
        sum += sign * c.powi(cos_pow as i32) * s.powi(sin_pow as i32) / denom;
        if k == k_max {
            break;
        }
        k += 1;
    }
    Ok(prefactor * sum)
}

/// Full SU(2) rotation matrix D(alpha, beta, gamma) in the spin-j
/// representation, D_{m'm} = e^{-i m' alpha} d^j_{m'm}(beta) e^{-i m gamma},
/// rows and columns ordered by descending m' and m.
pub fn wigner_d(twice_j: u32, alpha: f64, beta: f64, gamma: f64) -> Result<ComplexMatrix> {
    check_spin(twice_j)?;
    let dim = twice_j as usize + 1;
    let mut d = ComplexMatrix::zeros(dim, dim);
    for row in 0..dim {
        let tmp = twice_j as i32 - 2 * row as i32;
        for col in 0..dim {
            let tm = twice_j as i32 - 2 * col as i32;
            let small = wigner_d_small(twice_j, tmp, tm, beta)?;
            let phase = cx(0.0, -(alpha * tmp as f64 + gamma * tm as f64) / 2.0).exp();
            d[(row, col)] = phase.scale(small);
        }
    }
    Ok(d)
}

/// Rotation taking the z axis onto the given direction: D(phi, theta, 0).
pub fn direction_rotation(twice_j: u32, dir: &Direction) -> Result<ComplexMatrix> {
    wigner_d(twice_j, dir.phi, dir.theta, 0.0)
}

fn m_labels(twice_j: u32) -> Vec<f64> {
    (0..=twice_j)
        .map(|k| (twice_j as f64 - 2.0 * k as f64) / 2.0)
        .collect()
}

/// Spin tomogram: W(m) = <jm| D'(g) rho D(g) |jm>, the probability of
/// spin projection m along the direction.
pub fn spin_tomogram(rho: &DensityMatrix, twice_j: u32, dir: &Direction) -> Result<Tomogram> {
    check_spin(twice_j)?;
    let dim = twice_j as usize + 1;
    if rho.total_dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            got: rho.total_dim(),
        });
    }
    let d = direction_rotation(twice_j, dir)?;
    let rotated = &(&d.adjoint() * rho.matrix()) * &d;
    let probs: Vec<f64> = (0..dim).map(|i| rotated[(i, i)].re).collect();
    Tomogram::new(
        m_labels(twice_j).into_iter().map(|m| vec![m]).collect(),
        probs,
        format!("spin j={} theta={} phi={}", twice_j as f64 / 2.0, dir.theta, dir.phi),
    )
}

/// Joint tomogram of a bipartite spin state: probabilities over
/// (m1, m2) for independent directions on the two factors.
pub fn bipartite_tomogram(
    rho: &DensityMatrix,
    twice_j1: u32,
    twice_j2: u32,
    dir1: &Direction,
    dir2: &Direction,
) -> Result<Tomogram> {
    check_spin(twice_j1)?;
    check_spin(twice_j2)?;
    let (n1, n2) = (twice_j1 as usize + 1, twice_j2 as usize + 1);
    if rho.total_dim() != n1 * n2 {
        return Err(Error::DimMismatch {
            expected: n1 * n2,
            got: rho.total_dim(),
        });
    }
    let u = tensor(
        &direction_rotation(twice_j1, dir1)?,
        &direction_rotation(twice_j2, dir2)?,
    );
    let rotated = &(&u.adjoint() * rho.matrix()) * &u;
    let m1 = m_labels(twice_j1);
    let m2 = m_labels(twice_j2);
    let mut outcomes = Vec::with_capacity(n1 * n2);
    let mut probs = Vec::with_capacity(n1 * n2);
    for (i, &ma) in m1.iter().enumerate() {
        for (k, &mb) in m2.iter().enumerate() {
            outcomes.push(vec![ma, mb]);
            probs.push(rotated[(i * n2 + k, i * n2 + k)].re);
        }
    }
    Tomogram::new(
        outcomes,
        probs,
        format!(
            "bipartite j1={} j2={} dir1=({},{}) dir2=({},{})",
            twice_j1 as f64 / 2.0,
            twice_j2 as f64 / 2.0,
            dir1.theta,
            dir1.phi,
            dir2.theta,
            dir2.phi
        ),
    )
}

/// U(n) tomogram: the diagonal of U' rho U in the product basis, a
/// probability distribution over the m-vector labels of the subsystem
/// dimension signature.
pub fn un_tomogram(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<Tomogram> {
    let n = rho.total_dim();
    if u.rows() != n || u.cols() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: u.rows(),
        });
    }
    let dev = u.unitary_deviation();
    if dev > 1e-10 {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let rotated = &(&u.adjoint() * rho.matrix()) * u;
    let probs: Vec<f64> = (0..n).map(|i| rotated[(i, i)].re).collect();
    // decompose basis index into per-subsystem m labels
    let dims = rho.dims().to_vec();
    let mut outcomes = Vec::with_capacity(n);
    for idx in 0..n {
        let mut rem = idx;
        let mut label = vec![0.0; dims.len()];
        for (pos, &d) in dims.iter().enumerate().rev() {
            let i = rem % d;
            rem /= d;
            label[pos] = (d as f64 - 1.0) / 2.0 - i as f64;
        }
        outcomes.push(label);
    }
    Tomogram::new(outcomes, probs, format!("U({n}) tomogram"))
}

/// Recover the Bloch vector of a qubit from spin tomograms at three or
/// more directions by linear least squares on
/// W(+1/2, o) = (1 + n . o)/2.
pub fn reconstruct_bloch(samples: &[(Direction, Tomogram)]) -> Result<BlochVector> {
    if samples.len() < 3 {
        return Err(Error::DirectionsDegenerate {
            rank: samples.len(),
        });
    }
    // normal equations A^T A n = A^T b with rows o_k, b_k = 2 W_k - 1
    let mut ata = [[0.0_f64; 3]; 3];
    let mut atb = [0.0_f64; 3];
    for (dir, tomo) in samples {
        if tomo.probabilities().len() != 2 {
            return Err(Error::DimMismatch {
                expected: 2,
                got: tomo.probabilities().len(),
            });
        }
        let o = dir.unit_vector();
        let b = 2.0 * tomo.probabilities()[0] - 1.0;
        for r in 0..3 {
            for c in 0..3 {
                ata[r][c] += o[r] * o[c];
            }
            atb[r] += o[r] * b;
        }
    }
    let m = ComplexMatrix::from_real(
        3,
        3,
        &[
            ata[0][0], ata[0][1], ata[0][2],
            ata[1][0], ata[1][1], ata[1][2],
            ata[2][0], ata[2][1], ata[2][2],
        ],
    )?;
    let eig = crate::linalg::herm_eig(&m, 1e-9)?;
    let scale = eig.eigenvalues[0].abs().max(1.0);
    let rank = eig.eigenvalues.iter().filter(|&&l| l > 1e-10 * scale).count();
    if rank < 3 {
        return Err(Error::DirectionsDegenerate { rank });
    }
    let inv = m.inverse()?;
    let mut n = [0.0_f64; 3];
    for r in 0..3 {
        for c in 0..3 {
            n[r] += inv[(r, c)].re * atb[c];
        }
    }
    Ok(BlochVector::new(n[0], n[1], n[2]))
}

/// Reconstruct the qubit density matrix from tomogram samples. A
/// recovered vector marginally outside the Bloch ball (noise) is
/// rescaled onto the boundary.
pub fn reconstruct_qubit(samples: &[(Direction, Tomogram)]) -> Result<DensityMatrix> {
    let mut n = reconstruct_bloch(samples)?;
    let norm = n.norm();
    if norm > 1.0 {
        if norm > 1.1 {
            return Err(Error::BlochOutOfBall { norm });
        }
        n = BlochVector::new(n.x / norm, n.y / norm, n.z / norm);
    }
    from_bloch(&n)
}
