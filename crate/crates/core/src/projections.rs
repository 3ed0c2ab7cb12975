//! Elementary Frobenius projections and feasibility measures.
//!
//! | set | definition | projection |
//! |-----|------------|------------|
//! | TP  | `tr_S X = I/d` | [`proj_tp`] (affine, closed form) |
//! | CP1 | `X ≥ 0`, `tr X = 1` | [`proj_cp1`] (eigenvalues onto the simplex) |
//! | PSD | `X ≥ 0` | [`proj_psd`] (clip negative eigenvalues) |
//! | Id  | `Σ_n X_n = I` | [`proj_sum_id`] (affine, closed form) |

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, min_eigenvalue, ChoiCandidate, HermitianMatrix, PovmCandidate, Spectrum};

/// Closest Hermitian matrix with `tr_S X = I/d`:
/// `X = F + (1/d)·I ⊗ (I/d − tr_S F)`.
pub fn proj_tp(f: &ChoiCandidate) -> ChoiCandidate {
    let d = f.sys_dim();
    let inv_d = 1.0 / d as f64;
    let marginal = f.marginal();
    let correction = Mat::from_fn(d, d, |a, b| {
        let target = if a == b { inv_d } else { 0.0 };
        (c64::new(target, 0.0) - marginal.get(a, b)) * inv_d
    });
    let src = f.matrix().as_ref();
    let out = Mat::from_fn(d * d, d * d, |i, j| {
        let v = src[(i, j)];
        if i / d == j / d {
            v + correction[(i % d, j % d)]
        } else {
            v
        }
    });
    f.with_matrix(HermitianMatrix::symmetrize(out.as_ref()))
}

/// Euclidean projection of `values` onto the probability simplex
/// `{x ≥ 0, Σx = 1}`.
///
/// Sorts descending (stable on index), finds the largest `ρ` with
/// `λ_ρ − θ_ρ > 0` where `θ_ρ = (Σ_{i≤ρ} λ_i − 1)/ρ`, and returns
/// `max(λ_i − θ_ρ, 0)` in the original order.
pub fn project_onto_simplex(values: &[f64]) -> Vec<f64> {
    let theta = simplex_shift(values);
    values.iter().map(|&l| (l - theta).max(0.0)).collect()
}

fn simplex_shift(values: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &idx) in order.iter().enumerate() {
        cumsum += values[idx];
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if values[idx] - candidate > 0.0 {
            theta = candidate;
        }
    }
    theta
}

/// Closest density matrix (unit-trace PSD) to a Hermitian matrix of any
/// trace.
pub fn proj_cp1(f: &HermitianMatrix) -> Result<HermitianMatrix> {
    let spec = hermitian_eig(f)?;
    let theta = simplex_shift(&spec.eigenvalues);
    Ok(shift_and_clip(f, &spec, -theta))
}

/// Closest PSD matrix: negative eigenvalues set to zero.
pub fn proj_psd(f: &HermitianMatrix) -> Result<HermitianMatrix> {
    let spec = hermitian_eig(f)?;
    Ok(shift_and_clip(f, &spec, 0.0))
}

/// `Σ_i max(λ_i + shift, 0)·v_i·v_i†`, assembled from the smaller side of
/// the spectrum: either the kept columns directly, or `f + shift·I` minus
/// the dropped columns.
fn shift_and_clip(f: &HermitianMatrix, spec: &Spectrum, shift: f64) -> HermitianMatrix {
    let shifted: Vec<f64> = spec.eigenvalues.iter().map(|&l| l + shift).collect();
    let kept = shifted.iter().filter(|&&v| v > 0.0).count();
    if 2 * kept <= shifted.len() {
        let values: Vec<f64> = shifted.iter().map(|&v| v.max(0.0)).collect();
        spec.compose(&values)
    } else {
        let dropped: Vec<f64> = shifted.iter().map(|&v| if v > 0.0 { 0.0 } else { v }).collect();
        &f.shifted(shift) - &spec.compose(&dropped)
    }
}

/// Closest list summing to the identity:
/// `X_n = F_n − Σ_j F_j/N + I/N`.
pub fn proj_sum_id(fs: &PovmCandidate) -> PovmCandidate {
    let n = fs.len() as f64;
    let d = fs.dim();
    let sum = fs.element_sum();
    let offset = Mat::from_fn(d, d, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        (c64::new(id, 0.0) - sum.get(i, j)) / n
    });
    let offset = HermitianMatrix::symmetrize(offset.as_ref());
    let elements = fs.elements().iter().map(|e| e + &offset).collect();
    PovmCandidate::from_elements_unchecked(elements)
}

/// Outcome of [`mix_with_identity`].
#[derive(Clone, Debug)]
pub struct Mixed {
    pub choi: ChoiCandidate,
    /// Weight of `I/d²` in the mixture.
    pub weight: f64,
}

/// `Z = (1 − p)·Z' + p·I/d²` with `p` the smallest weight making `Z` PSD,
/// i.e. `(1 − p)·λ_min + p/d² = 0`. PSD inputs are returned unchanged.
pub fn mix_with_identity(z: &ChoiCandidate) -> Result<Mixed> {
    let trace = z.matrix().trace();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(Error::TraceNotOne { trace });
    }
    let lambda_min = min_eigenvalue(z.matrix())?;
    if lambda_min >= 0.0 {
        return Ok(Mixed {
            choi: z.clone(),
            weight: 0.0,
        });
    }
    let n = z.matrix().dim();
    let floor = 1.0 / n as f64;
    let denom = floor - lambda_min;
    if denom < 1e-15 {
        return Err(Error::DegenerateMixing {
            min_eigenvalue: lambda_min,
            dim: n,
        });
    }
    let p = -lambda_min / denom;
    let mixed = z.matrix().scaled(1.0 - p).shifted(p * floor);
    Ok(Mixed {
        choi: z.with_matrix(mixed),
        weight: p,
    })
}

/// `‖tr_S X − I/d‖_F`.
pub fn tp_residual(c: &ChoiCandidate) -> f64 {
    let d = c.sys_dim();
    let target = HermitianMatrix::identity(d).scaled(1.0 / d as f64);
    (&c.marginal() - &target).norm()
}

/// `‖Σ_n X_n − I‖_F`.
pub fn completeness_residual(p: &PovmCandidate) -> f64 {
    (&p.element_sum() - &HermitianMatrix::identity(p.dim())).norm()
}

/// `max(0, −λ_min)`.
pub fn psd_violation(m: &HermitianMatrix) -> Result<f64> {
    Ok((-min_eigenvalue(m)?).max(0.0))
}

/// Largest of the TP residual and the PSD violation.
pub fn choi_violation(c: &ChoiCandidate) -> Result<f64> {
    Ok(tp_residual(c).max(psd_violation(c.matrix())?))
}

/// Largest of the completeness residual and the elementwise PSD violations.
pub fn povm_violation(p: &PovmCandidate) -> Result<f64> {
    let mut worst = completeness_residual(p);
    for e in p.elements() {
        worst = worst.max(psd_violation(e)?);
    }
    Ok(worst)
}
