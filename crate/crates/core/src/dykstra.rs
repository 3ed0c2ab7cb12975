//! Two-set Dykstra alternating projections and the composed methods built on
//! top of it.
//!
//! For closed convex sets `A` and `B` with nonempty intersection, the
//! sequence
//!
//! ```text
//! y_k     = P_A(x_k + p_k)      p_{k+1} = x_k + p_k − y_k
//! x_{k+1} = P_B(y_k + q_k)      q_{k+1} = y_k + q_k − x_{k+1}
//! ```
//!
//! started from `x_0 = r`, `p_0 = q_0 = 0` converges to the projection of `r`
//! onto `A ∩ B`. The loop stops once
//! `c_k = ‖p_k − p_{k+1}‖² + ‖q_k − q_{k+1}‖² ≤ ε` or after `max_iters`
//! iterations, one iteration being one `(P_A, P_B)` pair.

use crate::cba::{cba_qdt, restore_completeness, restore_tp, CbaDiagnostics};
use crate::error::{Error, Result};
use crate::matcore::{ChoiCandidate, HermitianMatrix, PovmCandidate};
use crate::projections::{mix_with_identity, proj_cp1, proj_psd, proj_sum_id, proj_tp};

/// Elements of a real inner-product space that the engine can iterate on.
pub trait Point: Clone {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    /// Squared norm induced by the inner product.
    fn norm_sq(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl Point for HermitianMatrix {
    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn norm_sq(&self) -> f64 {
        HermitianMatrix::norm_sq(self)
    }

    fn is_finite(&self) -> bool {
        HermitianMatrix::is_finite(self)
    }
}

impl Point for ChoiCandidate {
    fn add(&self, other: &Self) -> Self {
        self.with_matrix(self.matrix() + other.matrix())
    }

    fn sub(&self, other: &Self) -> Self {
        self.with_matrix(self.matrix() - other.matrix())
    }

    fn norm_sq(&self) -> f64 {
        self.matrix().norm_sq()
    }

    fn is_finite(&self) -> bool {
        self.matrix().is_finite()
    }
}

/// Lists add entrywise; the norm is the sum of the element norms.
impl Point for PovmCandidate {
    fn add(&self, other: &Self) -> Self {
        let elements = self.elements().iter().zip(other.elements()).map(|(a, b)| a + b).collect();
        PovmCandidate::from_elements_unchecked(elements)
    }

    fn sub(&self, other: &Self) -> Self {
        let elements = self.elements().iter().zip(other.elements()).map(|(a, b)| a - b).collect();
        PovmCandidate::from_elements_unchecked(elements)
    }

    fn norm_sq(&self) -> f64 {
        self.elements().iter().map(HermitianMatrix::norm_sq).sum()
    }

    fn is_finite(&self) -> bool {
        self.elements().iter().all(HermitianMatrix::is_finite)
    }
}

/// Which iterate of the detector loop feeds the closing correction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QdtTerminus {
    /// The elementwise-PSD iterate `{X_n}`, fed directly to the congruence.
    #[default]
    PsdSide,
    /// The sum-to-identity iterate `{Y_n}`. It is not PSD in general, so it
    /// goes through the full one-shot pipeline (clip, then congruence).
    IdentitySide,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DykstraConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    pub oracle_mode: bool,
    /// Check `y_k + p_{k+1} = x_k + p_k` after every `P_A` step.
    pub verify_bookkeeping: bool,
    pub qdt_terminus: QdtTerminus,
}

impl Default for DykstraConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-7,
            max_iters: 100,
            oracle_mode: false,
            verify_bookkeeping: false,
            qdt_terminus: QdtTerminus::PsdSide,
        }
    }
}

impl DykstraConfig {
    /// Tight settings used for reference solutions. The residual is a
    /// squared step length, so `1e-24` pins iterates to roughly `1e-12`.
    pub fn oracle() -> Self {
        Self {
            epsilon: 1e-24,
            max_iters: 100_000,
            oracle_mode: true,
            ..Self::default()
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DykstraTrace {
    pub iterations: usize,
    /// `c_k` for every completed iteration.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Final state of the engine.
#[derive(Clone, Debug)]
pub struct DykstraOutput<P> {
    /// Last `P_B` iterate.
    pub x: P,
    /// Last `P_A` iterate.
    pub y: P,
    pub trace: DykstraTrace,
}

const BOOKKEEPING_TOL: f64 = 1e-9;

pub fn dykstra<P, FA, FB>(x0: &P, mut proj_a: FA, mut proj_b: FB, cfg: &DykstraConfig) -> Result<DykstraOutput<P>>
where
    P: Point,
    FA: FnMut(&P) -> Result<P>,
    FB: FnMut(&P) -> Result<P>,
{
    cfg.validate()?;
    if !x0.is_finite() {
        return Err(Error::NonFinite);
    }
    let zero = x0.sub(x0);
    let mut x = x0.clone();
    let mut p = zero.clone();
    let mut q = zero;
    let mut trace = DykstraTrace::default();
    loop {
        let arg_a = x.add(&p);
        let y = proj_a(&arg_a)?;
        let p_next = arg_a.sub(&y);
        if cfg.verify_bookkeeping {
            let drift = y.add(&p_next).sub(&arg_a).norm_sq().sqrt();
            let scale = 1.0 + arg_a.norm_sq().sqrt();
            if drift > BOOKKEEPING_TOL * scale {
                return Err(Error::Bookkeeping { residual: drift });
            }
        }
        let arg_b = y.add(&q);
        let x_next = proj_b(&arg_b)?;
        let q_next = arg_b.sub(&x_next);
        if !(y.is_finite() && x_next.is_finite()) {
            return Err(Error::NonFinite);
        }

        let c = p.sub(&p_next).norm_sq() + q.sub(&q_next).norm_sq();
        if !c.is_finite() {
            return Err(Error::NonFinite);
        }
        trace.iterations += 1;
        trace.residuals.push(c);
        x = x_next;
        p = p_next;
        q = q_next;
        if c <= cfg.epsilon {
            trace.converged = true;
        }
        if trace.converged || trace.iterations >= cfg.max_iters {
            return Ok(DykstraOutput { x, y, trace });
        }
    }
}

fn choi_dykstra(f: &ChoiCandidate, cfg: &DykstraConfig) -> Result<DykstraOutput<ChoiCandidate>> {
    dykstra(
        f,
        |c: &ChoiCandidate| Ok(proj_tp(c)),
        |c: &ChoiCandidate| Ok(c.with_matrix(proj_cp1(c.matrix())?)),
        cfg,
    )
}

/// Dykstra between the TP subspace (first) and unit-trace PSD matrices
/// (second), closed with the TP-restoring congruence on the PSD iterate.
pub fn dykstra_cba_qpt(f: &ChoiCandidate, cfg: &DykstraConfig) -> Result<(ChoiCandidate, DykstraTrace, CbaDiagnostics)> {
    let out = choi_dykstra(f, cfg)?;
    let (corrected, diagnostics) = restore_tp(&out.x)?;
    Ok((corrected, out.trace, diagnostics))
}

/// Same loop as [`dykstra_cba_qpt`], closed by mixing the TP iterate with
/// the maximally mixed Choi matrix.
pub fn dykstra_id_qpt(f: &ChoiCandidate, cfg: &DykstraConfig) -> Result<(ChoiCandidate, DykstraTrace)> {
    let out = choi_dykstra(f, cfg)?;
    let mixed = mix_with_identity(&out.y)?;
    Ok((mixed.choi, out.trace))
}

/// Dykstra between elementwise PSD lists (first) and the sum-to-identity
/// subspace (second), closed with the completeness-restoring congruence.
pub fn dykstra_cba_qdt(fs: &PovmCandidate, cfg: &DykstraConfig) -> Result<(PovmCandidate, DykstraTrace, CbaDiagnostics)> {
    let out = dykstra(
        fs,
        |p: &PovmCandidate| {
            let clipped = p.elements().iter().map(proj_psd).collect::<Result<Vec<_>>>()?;
            Ok(PovmCandidate::from_elements_unchecked(clipped))
        },
        |p: &PovmCandidate| Ok(proj_sum_id(p)),
        cfg,
    )?;
    let (corrected, diagnostics) = match cfg.qdt_terminus {
        QdtTerminus::PsdSide => restore_completeness(&out.y)?,
        QdtTerminus::IdentitySide => cba_qdt(&out.x)?,
    };
    Ok((corrected, out.trace, diagnostics))
}
