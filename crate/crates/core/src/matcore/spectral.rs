use std::hash::{DefaultHasher, Hash, Hasher};

use faer::{c64, Mat, Side};

use super::HermitianMatrix;
use crate::error::{Error, Result};

/// Eigendecomposition `m = V·diag(λ)·V†` with eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat<c64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `V·diag(values)·V†`. Only columns with a nonzero value contribute,
    /// so low-rank results are cheap.
    pub fn compose(&self, values: &[f64]) -> HermitianMatrix {
        assert_eq!(values.len(), self.dim());
        let n = self.dim();
        let support: Vec<usize> = (0..n).filter(|&k| values[k] != 0.0).collect();
        if support.is_empty() {
            return HermitianMatrix::zeros(n);
        }
        let v = &self.eigenvectors;
        let scaled = Mat::from_fn(n, support.len(), |i, c| v[(i, support[c])] * values[support[c]]);
        let basis = Mat::from_fn(n, support.len(), |i, c| v[(i, support[c])]);
        let m = &scaled * basis.adjoint();
        HermitianMatrix::symmetrize(m.as_ref())
    }

    /// `V·diag(f(λ))·V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.compose(&values)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.compose(&self.eigenvalues)
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn hermitian_eig(m: &HermitianMatrix) -> Result<Spectrum> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let evd = m
        .as_ref()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Eigensolver {
            dim: m.dim(),
            fingerprint: fingerprint(m),
        })?;
    let eigenvalues: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::Eigensolver {
            dim: m.dim(),
            fingerprint: fingerprint(m),
        });
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: evd.U().to_owned(),
    })
}

pub fn min_eigenvalue(m: &HermitianMatrix) -> Result<f64> {
    let values = m
        .as_ref()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Eigensolver {
            dim: m.dim(),
            fingerprint: fingerprint(m),
        })?;
    values.first().copied().ok_or(Error::NonFinite)
}

pub(crate) fn fingerprint(m: &HermitianMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    for j in 0..m.dim() {
        for i in 0..m.dim() {
            let z = m.get(i, j);
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

/// Default relative cutoff for pseudo-inverses: `1e-12·dim`.
pub fn default_rel_tol(dim: usize) -> f64 {
    1e-12 * dim as f64
}

/// Pseudo-inverse square root together with the spectral facts the
/// corrections report.
#[derive(Clone, Debug)]
pub struct PseudoInvSqrt {
    pub matrix: HermitianMatrix,
    pub min_eigenvalue: f64,
    /// Number of eigenvalues at or below the cutoff that were mapped to 0.
    pub truncated: usize,
}

/// Eigenvalues `λ ≤ rel_tol·λ_max` map to 0, the rest to `λ^{-1/2}`.
pub fn pseudo_inv_sqrt(m: &HermitianMatrix, rel_tol: f64) -> Result<PseudoInvSqrt> {
    let spec = hermitian_eig(m)?;
    let cutoff = rel_tol * spec.max().max(0.0);
    if spec.min() < -cutoff {
        return Err(Error::NotPsd {
            min_eigenvalue: spec.min(),
        });
    }
    let mut truncated = 0;
    let values: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&l| {
            if l <= cutoff {
                truncated += 1;
                0.0
            } else {
                l.sqrt().recip()
            }
        })
        .collect();
    Ok(PseudoInvSqrt {
        matrix: spec.compose(&values),
        min_eigenvalue: spec.min(),
        truncated,
    })
}

pub fn inv_sqrt_psd(m: &HermitianMatrix, rel_tol: f64) -> Result<HermitianMatrix> {
    pseudo_inv_sqrt(m, rel_tol).map(|p| p.matrix)
}
