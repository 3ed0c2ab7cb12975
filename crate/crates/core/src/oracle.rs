//! Reference projections onto the CPTP set and the POVM set.
//!
//! Two independent solvers are run and must agree:
//!
//! - tightly converged Dykstra, whose limit is the exact projection, closed
//!   by the congruence correction for exact feasibility;
//! - accelerated projected gradient ascent on the Lagrange dual of the
//!   equality constraint. For the channel problem
//!   `min ½‖Z − F‖²` s.t. `Z ⪰ 0`, `tr_S Z = I/d`, the inner minimizer is
//!   `Z(Λ) = P_psd(F + I⊗Λ)` and the dual gradient is `I/d − tr_S Z(Λ)`,
//!   which is `d`-Lipschitz. The detector problem is analogous with
//!   `Z_n(Λ) = P_psd(F_n + Λ)`, gradient `I − Σ_n Z_n`, Lipschitz constant `N`.
//!
//! Intended sizes: channels with `d ≤ 4`, detectors with `d ≤ 16`.

use crate::cba::{restore_completeness, restore_tp};
use crate::dykstra::{dykstra, DykstraConfig, DykstraTrace};
use crate::error::Result;
use crate::matcore::{frobenius_dist, frobenius_dist_list, kron, ChoiCandidate, HermitianMatrix, Mat, PovmCandidate, c64};
use crate::projections::{choi_violation, povm_violation, proj_cp1, proj_psd, proj_sum_id, proj_tp};

/// Solutions further apart than this are flagged unreliable.
pub const AGREEMENT_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub dykstra: DykstraConfig,
    pub dual_max_iters: usize,
    /// Stop the dual solver once the constraint residual falls below this.
    pub dual_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            dykstra: DykstraConfig::oracle(),
            dual_max_iters: 100_000,
            dual_tol: 1e-13,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult<T> {
    pub solution: T,
    /// Frobenius distance between the two solvers' answers.
    pub method_agreement: f64,
    pub feasibility_residual: f64,
    pub reliable: bool,
    pub dykstra_trace: DykstraTrace,
    pub dual: DualReport,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

pub fn oracle_qpt(f: &ChoiCandidate) -> Result<OracleResult<ChoiCandidate>> {
    oracle_qpt_with(f, &OracleConfig::default())
}

pub fn oracle_qpt_with(f: &ChoiCandidate, cfg: &OracleConfig) -> Result<OracleResult<ChoiCandidate>> {
    let out = dykstra(
        f,
        |c: &ChoiCandidate| Ok(proj_tp(c)),
        |c: &ChoiCandidate| Ok(c.with_matrix(proj_cp1(c.matrix())?)),
        &cfg.dykstra,
    )?;
    let (solution, _) = restore_tp(&out.x)?;
    let (dual_solution, dual) = dual_gradient_qpt(f, cfg)?;
    let method_agreement = frobenius_dist(solution.matrix().as_ref(), dual_solution.matrix().as_ref())?;
    let feasibility_residual = choi_violation(&solution)?;
    Ok(OracleResult {
        solution,
        method_agreement,
        feasibility_residual,
        reliable: method_agreement <= AGREEMENT_TOL,
        dykstra_trace: out.trace,
        dual,
    })
}

pub fn oracle_qdt(fs: &PovmCandidate) -> Result<OracleResult<PovmCandidate>> {
    oracle_qdt_with(fs, &OracleConfig::default())
}

pub fn oracle_qdt_with(fs: &PovmCandidate, cfg: &OracleConfig) -> Result<OracleResult<PovmCandidate>> {
    let out = dykstra(
        fs,
        |p: &PovmCandidate| {
            let clipped = p.elements().iter().map(proj_psd).collect::<Result<Vec<_>>>()?;
            Ok(PovmCandidate::from_elements_unchecked(clipped))
        },
        |p: &PovmCandidate| Ok(proj_sum_id(p)),
        &cfg.dykstra,
    )?;
    let (solution, _) = restore_completeness(&out.y)?;
    let (dual_solution, dual) = dual_gradient_qdt(fs, cfg)?;
    let method_agreement = frobenius_dist_list(solution.elements(), dual_solution.elements())?;
    let feasibility_residual = povm_violation(&solution)?;
    Ok(OracleResult {
        solution,
        method_agreement,
        feasibility_residual,
        reliable: method_agreement <= AGREEMENT_TOL,
        dykstra_trace: out.trace,
        dual,
    })
}

/// Dual solver for the channel problem. Returns the primal point `Z(Λ)` at
/// the last evaluated multiplier; it is PSD but TP only up to the reported
/// residual.
pub fn dual_gradient_qpt(f: &ChoiCandidate, cfg: &OracleConfig) -> Result<(ChoiCandidate, DualReport)> {
    let d = f.sys_dim();
    let id_d = Mat::<c64>::identity(d, d);
    let target = HermitianMatrix::identity(d).scaled(1.0 / d as f64);
    let (z, report) = accelerated_ascent(d, d as f64, cfg, |lambda| {
        let lifted = HermitianMatrix::symmetrize(kron(id_d.as_ref(), lambda.as_ref()).as_ref());
        let z = f.with_matrix(proj_psd(&(f.matrix() + &lifted))?);
        let grad = &target - &z.marginal();
        Ok((grad, z))
    })?;
    Ok((z, report))
}

/// Dual solver for the detector problem.
pub fn dual_gradient_qdt(fs: &PovmCandidate, cfg: &OracleConfig) -> Result<(PovmCandidate, DualReport)> {
    let d = fs.dim();
    let id = HermitianMatrix::identity(d);
    let (z, report) = accelerated_ascent(d, fs.len() as f64, cfg, |lambda| {
        let elements = fs
            .elements()
            .iter()
            .map(|e| proj_psd(&(e + lambda)))
            .collect::<Result<Vec<_>>>()?;
        let z = PovmCandidate::from_elements_unchecked(elements);
        let grad = &id - &z.element_sum();
        Ok((grad, z))
    })?;
    Ok((z, report))
}

/// FISTA ascent with gradient-based adaptive restart on a `d×d` Hermitian
/// multiplier. `eval` returns the dual gradient and the matching primal.
fn accelerated_ascent<T>(
    d: usize,
    lipschitz: f64,
    cfg: &OracleConfig,
    mut eval: impl FnMut(&HermitianMatrix) -> Result<(HermitianMatrix, T)>,
) -> Result<(T, DualReport)> {
    let step = 1.0 / lipschitz;
    let mut lambda = HermitianMatrix::zeros(d);
    let mut prev = lambda.clone();
    let mut t = 1.0_f64;
    let mut iterations = 0;
    loop {
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        let w = HermitianMatrix::linear_combination(&[(1.0 + beta, &lambda), (-beta, &prev)]);
        let (grad, primal) = eval(&w)?;
        iterations += 1;
        let residual = grad.norm();
        if !residual.is_finite() {
            return Err(crate::Error::NonFinite);
        }
        let converged = residual <= cfg.dual_tol;
        if converged || iterations >= cfg.dual_max_iters {
            return Ok((primal, DualReport { iterations, residual, converged }));
        }
        let next = HermitianMatrix::linear_combination(&[(1.0, &w), (step, &grad)]);
        let progress = real_inner(&grad, &(&next - &lambda));
        prev = lambda;
        lambda = next;
        if progress < 0.0 {
            t = 1.0;
            prev = lambda.clone();
        } else {
            t = t_next;
        }
    }
}

fn real_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (a.get(i, j), b.get(i, j));
            acc += x.re * y.re + x.im * y.im;
        }
    }
    acc
}
