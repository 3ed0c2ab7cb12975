//! Cholesky-based approximation (CBA).
//!
//! Given a PSD matrix `X = E·E†`, the TP-restoring correction solves
//! `min ‖E − Y‖_F` subject to `tr_S(Y·Y†) = I/d`. The minimizer is
//! `Y = (I ⊗ (I − Λ)⁻¹)·E` with `(I − Λ)² = d·tr_S X`, hence
//!
//! ```text
//! Y·Y† = (I ⊗ (d·tr_S X)^{-1/2}) · X · (I ⊗ (d·tr_S X)^{-1/2})
//! ```
//!
//! The POVM analogue replaces the marginal with `S = Σ_n X_n` and gives
//! `Y_n·Y_n† = S^{-1/2}·X_n·S^{-1/2}`. Both depend on `E` only through
//! `X = E·E†`, so no factorization is formed and rank-deficient inputs are
//! handled uniformly. When the marginal (or `S`) is singular the inverse
//! square root becomes a pseudo-inverse and [`CbaDiagnostics::regularized`]
//! is set.
//!
//! A pseudo-inverse congruence leaves the constraint satisfied only on the
//! range of the marginal; the remaining deficit is a multiple of the
//! projector onto its kernel, which is PSD. The pipelines ([`cba_qpt`],
//! [`cba_qdt`] and the Dykstra methods) therefore follow a regularized
//! congruence with the affine projection, which fills the kernel without
//! breaking positivity. The public corrections return the raw congruence.

use crate::error::{Error, Result};
use crate::matcore::{
    congruence, congruence_id_kron, default_rel_tol, min_eigenvalue, pseudo_inv_sqrt, ChoiCandidate,
    HermitianMatrix, PovmCandidate,
};
use crate::projections::{completeness_residual, proj_cp1, proj_psd, proj_sum_id, proj_tp, tp_residual};

/// Inputs to the public corrections must be PSD down to this floor.
pub const PSD_INPUT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CbaDiagnostics {
    /// Smallest eigenvalue of `tr_S X` (channels) or `Σ_n X_n` (POVMs)
    /// before inversion.
    pub marginal_min_eig: f64,
    /// A pseudo-inverse was needed because the marginal was singular.
    pub regularized: bool,
    /// TP residual `‖tr_S Y − I/d‖_F` or completeness residual
    /// `‖Σ_n Y_n − I‖_F` of the corrected output.
    pub residual: f64,
}

/// TP-restoring congruence `U·X·U†` with `U = I ⊗ (d·tr_S X)^{-1/2}`.
///
/// Returns [`Error::NotPsd`] when `x` has an eigenvalue below
/// `-PSD_INPUT_TOL`.
pub fn cba_tp_correction(x: &ChoiCandidate) -> Result<(ChoiCandidate, CbaDiagnostics)> {
    ensure_psd(x.matrix())?;
    tp_congruence(x)
}

pub(crate) fn tp_congruence(x: &ChoiCandidate) -> Result<(ChoiCandidate, CbaDiagnostics)> {
    let d = x.sys_dim();
    let scaled_marginal = x.marginal().scaled(d as f64);
    let root = pseudo_inv_sqrt(&scaled_marginal, default_rel_tol(d))?;
    let out = congruence_id_kron(root.matrix.as_ref(), x.matrix().as_ref(), d);
    let out = x.with_matrix(HermitianMatrix::symmetrize(out.as_ref()));
    let diagnostics = CbaDiagnostics {
        marginal_min_eig: root.min_eigenvalue / d as f64,
        regularized: root.truncated > 0,
        residual: tp_residual(&out),
    };
    Ok((out, diagnostics))
}

/// [`tp_congruence`] followed, when regularized, by the TP projection.
pub(crate) fn restore_tp(x: &ChoiCandidate) -> Result<(ChoiCandidate, CbaDiagnostics)> {
    let (out, mut diagnostics) = tp_congruence(x)?;
    if !diagnostics.regularized {
        return Ok((out, diagnostics));
    }
    let out = proj_tp(&out);
    diagnostics.residual = tp_residual(&out);
    Ok((out, diagnostics))
}

/// One-shot CBA for channels: nearest density matrix, then the TP-restoring
/// congruence.
pub fn cba_qpt(f: &ChoiCandidate) -> Result<(ChoiCandidate, CbaDiagnostics)> {
    let x = f.with_matrix(proj_cp1(f.matrix())?);
    restore_tp(&x)
}

/// Completeness-restoring congruence `Y_n = S^{-1/2}·X_n·S^{-1/2}` with
/// `S = Σ_k X_k`. Element order is preserved.
pub fn cba_povm_correction(xs: &PovmCandidate) -> Result<(PovmCandidate, CbaDiagnostics)> {
    for e in xs.elements() {
        ensure_psd(e)?;
    }
    completeness_congruence(xs)
}

pub(crate) fn completeness_congruence(xs: &PovmCandidate) -> Result<(PovmCandidate, CbaDiagnostics)> {
    let d = xs.dim();
    let root = pseudo_inv_sqrt(&xs.element_sum(), default_rel_tol(d))?;
    let elements = xs
        .elements()
        .iter()
        .map(|e| {
            let y = congruence(root.matrix.as_ref(), e.as_ref());
            HermitianMatrix::symmetrize(y.as_ref())
        })
        .collect();
    let out = PovmCandidate::new(elements)?;
    let diagnostics = CbaDiagnostics {
        marginal_min_eig: root.min_eigenvalue,
        regularized: root.truncated > 0,
        residual: completeness_residual(&out),
    };
    Ok((out, diagnostics))
}

/// [`completeness_congruence`] followed, when regularized, by the
/// sum-to-identity projection.
pub(crate) fn restore_completeness(xs: &PovmCandidate) -> Result<(PovmCandidate, CbaDiagnostics)> {
    let (out, mut diagnostics) = completeness_congruence(xs)?;
    if !diagnostics.regularized {
        return Ok((out, diagnostics));
    }
    let out = proj_sum_id(&out);
    diagnostics.residual = completeness_residual(&out);
    Ok((out, diagnostics))
}

/// One-shot CBA for detectors: clip every element to PSD, then the
/// completeness-restoring congruence.
pub fn cba_qdt(fs: &PovmCandidate) -> Result<(PovmCandidate, CbaDiagnostics)> {
    let clipped = fs.elements().iter().map(proj_psd).collect::<Result<Vec<_>>>()?;
    restore_completeness(&PovmCandidate::new(clipped)?)
}

fn ensure_psd(m: &HermitianMatrix) -> Result<()> {
    let lmin = min_eigenvalue(m)?;
    if lmin < -PSD_INPUT_TOL {
        Err(Error::NotPsd { min_eigenvalue: lmin })
    } else {
        Ok(())
    }
}
