//! Dense complex matrix kernel shared by every projection.

mod random;
mod spectral;

pub use faer::{c64, Mat, MatRef};
pub use random::{
    choi_of_unitary, mix_seed, pauli_povm, pauli_povm_with_axes, random_ginibre,
    random_haar_unitary, random_hermitian_noise, PauliAxis, Rng,
};
pub use spectral::{
    default_rel_tol, hermitian_eig, inv_sqrt_psd, min_eigenvalue, pseudo_inv_sqrt, PseudoInvSqrt,
    Spectrum,
};
pub(crate) use spectral::fingerprint;

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Maximum absolute entrywise deviation from `m = m†` accepted by
/// [`HermitianMatrix::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Dense complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: Mat<c64>,
}

impl HermitianMatrix {
    /// Wraps `m`, rejecting it when any entry deviates from Hermitian
    /// symmetry by more than [`HERMITICITY_TOL`].
    pub fn new(m: Mat<c64>) -> Result<Self> {
        Self::with_tolerance(m, HERMITICITY_TOL)
    }

    /// As [`HermitianMatrix::new`] with a caller-chosen tolerance. Accepted
    /// matrices are stored symmetrized.
    pub fn with_tolerance(m: Mat<c64>, tol: f64) -> Result<Self> {
        ensure_square(m.as_ref())?;
        ensure_finite(m.as_ref())?;
        let deviation = hermiticity_deviation(m.as_ref());
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrize(m.as_ref()))
    }

    /// `(m + m†) / 2`.
    ///
    /// # Panics
    /// If `m` is not square.
    pub fn symmetrize(m: MatRef<'_, c64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrize needs a square matrix");
        let n = m.nrows();
        let inner = Mat::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Self { inner }
    }

    pub fn zeros(n: usize) -> Self {
        Self { inner: Mat::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: Mat::identity(n, n) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let inner = Mat::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(diag[i], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.inner.as_ref()
    }

    pub fn as_mat(&self) -> &Mat<c64> {
        &self.inner
    }

    pub fn into_inner(self) -> Mat<c64> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.inner[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    pub fn scaled(&self, k: f64) -> Self {
        let n = self.dim();
        Self {
            inner: Mat::from_fn(n, n, |i, j| self.inner[(i, j)] * k),
        }
    }

    /// `self + k·I`.
    pub fn shifted(&self, k: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.inner[(i, i)].re += k;
        }
        out
    }

    /// Squared Frobenius norm.
    pub fn norm_sq(&self) -> f64 {
        self.inner.squared_norm_l2()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.as_ref())
    }

    /// `Σ_k w_k·m_k` over equally sized matrices.
    pub fn linear_combination(terms: &[(f64, &HermitianMatrix)]) -> Self {
        let n = terms.first().map_or(0, |(_, m)| m.dim());
        let inner = Mat::from_fn(n, n, |i, j| {
            terms
                .iter()
                .fold(c64::new(0.0, 0.0), |acc, (w, m)| acc + m.inner[(i, j)] * *w)
        });
        Self { inner }
    }

    #[cfg(test)]
    pub(crate) fn from_mat_unchecked(inner: Mat<c64>) -> Self {
        Self { inner }
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, k: f64) -> HermitianMatrix {
        self.scaled(k)
    }
}

/// Hermitian matrix on `S ⊗ A` with `dim S = dim A = sys_dim`; a candidate
/// Choi matrix that may violate CP and/or TP.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiCandidate {
    sys_dim: usize,
    matrix: HermitianMatrix,
}

impl ChoiCandidate {
    pub fn new(sys_dim: usize, matrix: HermitianMatrix) -> Result<Self> {
        if sys_dim == 0 {
            return Err(Error::InvalidConfig("system dimension must be positive".into()));
        }
        let expected = sys_dim * sys_dim;
        if matrix.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: matrix.dim(),
            });
        }
        Ok(Self { sys_dim, matrix })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.matrix
    }

    /// `tr_S` of the matrix, a Hermitian operator on `A`.
    pub fn marginal(&self) -> HermitianMatrix {
        let m = partial_trace_s(self.matrix.as_ref(), self.sys_dim)
            .expect("dimension checked at construction");
        HermitianMatrix::symmetrize(m.as_ref())
    }

    pub(crate) fn with_matrix(&self, matrix: HermitianMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), self.matrix.dim());
        Self {
            sys_dim: self.sys_dim,
            matrix,
        }
    }
}

/// Ordered list of equally sized Hermitian matrices; a candidate POVM that
/// may violate positivity and/or completeness.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmCandidate {
    elements: Vec<HermitianMatrix>,
}

impl PovmCandidate {
    pub fn new(elements: Vec<HermitianMatrix>) -> Result<Self> {
        let first = elements.first().ok_or(Error::EmptyPovm)?;
        let d = first.dim();
        if let Some(bad) = elements.iter().find(|e| e.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(Self { elements })
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<HermitianMatrix> {
        self.elements
    }

    /// `Σ_n F_n`.
    pub fn element_sum(&self) -> HermitianMatrix {
        let d = self.dim();
        let inner = Mat::from_fn(d, d, |i, j| {
            self.elements
                .iter()
                .fold(c64::new(0.0, 0.0), |acc, e| acc + e.inner[(i, j)])
        });
        HermitianMatrix { inner }
    }

    pub(crate) fn from_elements_unchecked(elements: Vec<HermitianMatrix>) -> Self {
        debug_assert!(!elements.is_empty());
        Self { elements }
    }
}

/// Kronecker product with `a` as the leading factor.
pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Partial trace over the leading factor `S` of a `d² × d²` matrix:
/// `out[a][a'] = Σ_s m[s·d + a][s·d + a']`.
pub fn partial_trace_s(m: MatRef<'_, c64>, d: usize) -> Result<Mat<c64>> {
    ensure_square(m)?;
    if m.nrows() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: m.nrows(),
        });
    }
    Ok(Mat::from_fn(d, d, |a, b| {
        (0..d).fold(c64::new(0.0, 0.0), |acc, s| acc + m[(s * d + a, s * d + b)])
    }))
}

/// `(I_d ⊗ b) · x · (I_d ⊗ b)†`, evaluated block by block.
pub fn congruence_id_kron(b: MatRef<'_, c64>, x: MatRef<'_, c64>, d: usize) -> Mat<c64> {
    let k = b.nrows();
    debug_assert_eq!(x.nrows(), d * k);
    let bh = b.adjoint();
    let mut out = Mat::<c64>::zeros(d * k, d * k);
    for s in 0..d {
        for t in 0..d {
            let block = x.submatrix(s * k, t * k, k, k);
            let res = b * block * bh;
            out.as_mut().submatrix_mut(s * k, t * k, k, k).copy_from(&res);
        }
    }
    out
}

/// `u · x · u†`.
pub fn congruence(u: MatRef<'_, c64>, x: MatRef<'_, c64>) -> Mat<c64> {
    u * x * u.adjoint()
}

/// Frobenius norm of `a − b`.
pub fn frobenius_dist(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<f64> {
    Ok(frobenius_dist_sq(a, b)?.sqrt())
}

fn frobenius_dist_sq(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<f64> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: b.ncols(),
        });
    }
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    Ok(acc)
}

/// `(Σ_n ‖a_n − b_n‖²_F)^{1/2}` over paired lists.
pub fn frobenius_dist_list(a: &[HermitianMatrix], b: &[HermitianMatrix]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += frobenius_dist_sq(x.as_ref(), y.as_ref())?;
    }
    Ok(acc.sqrt())
}

/// Largest `|m_ij − conj(m_ji)|`.
pub fn hermiticity_deviation(m: MatRef<'_, c64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn is_finite(m: MatRef<'_, c64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].re.is_finite() && m[(i, j)].im.is_finite()))
}

fn ensure_finite(m: MatRef<'_, c64>) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn ensure_square(m: MatRef<'_, c64>) -> Result<()> {
    if m.nrows() == m.ncols() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}
