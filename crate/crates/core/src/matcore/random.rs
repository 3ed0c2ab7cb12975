use faer::{c64, Mat, MatRef};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{kron, ChoiCandidate, HermitianMatrix, PovmCandidate};
use crate::error::{Error, Result};

/// Seeded, splittable random stream backed by the ChaCha20 block function.
///
/// A split stream depends only on the parent's seed and the split key, never
/// on how many values the parent has already produced, so parallel workers
/// can each derive their own stream up front.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream identified by `key`.
    pub fn split(&self, key: u64) -> Rng {
        Rng::new(mix_seed(self.seed, key))
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform integer in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

/// Combines a seed with a key into a new well-mixed seed (splitmix64
/// finalizer applied to both halves).
pub fn mix_seed(seed: u64, key: u64) -> u64 {
    splitmix(seed ^ splitmix(key.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `d × d` matrix with i.i.d. standard normal real and imaginary parts.
pub fn random_ginibre(d: usize, rng: &mut Rng) -> Mat<c64> {
    // explicit loop fixes the draw order (row-major)
    let mut m = Mat::<c64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let re = rng.standard_normal();
            let im = rng.standard_normal();
            m[(i, j)] = c64::new(re, im);
        }
    }
    m
}

/// `N = (M + M†) / tr(M + M†)` for a Ginibre `M`: Hermitian, unit trace and
/// generally indefinite.
pub fn random_hermitian_noise(d: usize, rng: &mut Rng) -> HermitianMatrix {
    loop {
        let m = random_ginibre(d, rng);
        let h = Mat::from_fn(d, d, |i, j| m[(i, j)] + m[(j, i)].conj());
        let tr: f64 = (0..d).map(|i| h[(i, i)].re).sum();
        if tr.abs() < 1e-12 {
            continue;
        }
        let scaled = Mat::from_fn(d, d, |i, j| h[(i, j)] / tr);
        return HermitianMatrix::symmetrize(scaled.as_ref());
    }
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_haar_unitary(d: usize, rng: &mut Rng) -> Mat<c64> {
    let g = random_ginibre(d, rng);
    let qr = g.as_ref().qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<c64> = (0..d)
        .map(|k| {
            let rk = r[(k, k)];
            let n = rk.norm();
            if n == 0.0 {
                c64::new(1.0, 0.0)
            } else {
                rk / n
            }
        })
        .collect();
    Mat::from_fn(d, d, |i, j| q[(i, j)] * phases[j])
}

/// Choi matrix `(1/d)·v·v†` of the channel `ρ ↦ u ρ u†`, where
/// `v = Σ_i (u|i⟩) ⊗ |i⟩`, i.e. `v[s·d + a] = u[s][a]`.
pub fn choi_of_unitary(u: MatRef<'_, c64>) -> Result<ChoiCandidate> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let d = u.nrows();
    let uhu = u.adjoint() * u;
    let mut deviation = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((uhu[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    if !deviation.is_finite() || deviation > 1e-8 {
        return Err(Error::NotUnitary { deviation });
    }
    let n = d * d;
    let v: Vec<c64> = (0..n).map(|k| u[(k / d, k % d)]).collect();
    let inv_d = 1.0 / d as f64;
    let m = Mat::from_fn(n, n, |i, j| v[i] * v[j].conj() * inv_d);
    ChoiCandidate::new(d, HermitianMatrix::symmetrize(m.as_ref()))
}

/// Single-qubit Pauli measurement axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// `(I + sign·σ)/2`.
    fn projector(self, sign: f64) -> Mat<c64> {
        let h = 0.5 * sign;
        let z = c64::new(0.0, 0.0);
        let (off01, d0) = match self {
            PauliAxis::X => (c64::new(h, 0.0), 0.0),
            PauliAxis::Y => (c64::new(0.0, -h), 0.0),
            PauliAxis::Z => (z, h),
        };
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 0)] = c64::new(0.5 + d0, 0.0);
        m[(1, 1)] = c64::new(0.5 - d0, 0.0);
        m[(0, 1)] = off01;
        m[(1, 0)] = off01.conj();
        m
    }
}

/// Eigenprojectors of the Pauli string `⊗_i σ_{axes[i]}`, one per sign
/// string, with `+` before `−` and the first qubit most significant.
pub fn pauli_povm_with_axes(axes: &[PauliAxis]) -> PovmCandidate {
    let m = axes.len();
    let elements = (0..1usize << m)
        .map(|n| {
            let mut acc = Mat::<c64>::identity(1, 1);
            for (q, axis) in axes.iter().enumerate() {
                let bit = (n >> (m - 1 - q)) & 1;
                let sign = if bit == 0 { 1.0 } else { -1.0 };
                acc = kron(acc.as_ref(), axis.projector(sign).as_ref());
            }
            HermitianMatrix::symmetrize(acc.as_ref())
        })
        .collect();
    PovmCandidate::from_elements_unchecked(elements)
}

/// Projective measurement of an `m`-qubit Pauli string with each factor
/// drawn uniformly from `{σ_X, σ_Y, σ_Z}`.
pub fn pauli_povm(m_qubits: usize, rng: &mut Rng) -> PovmCandidate {
    assert!(m_qubits >= 1, "need at least one qubit");
    let axes: Vec<PauliAxis> = (0..m_qubits).map(|_| PauliAxis::ALL[rng.index(3)]).collect();
    pauli_povm_with_axes(&axes)
}
