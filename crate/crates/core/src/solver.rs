//! Minimisation of the Tikhonov functional T_α(u, v) = ½‖Fu − v‖² + αR(u)
//! and the dual certificate (ω_α^δ, ξ_α^δ) with −αω_α^δ = Fu_α^δ − v^δ and
//! ξ_α^δ = F*ω_α^δ.

use crate::error::{LabError, Result};
use crate::linalg::{SpectralOperator, Vector};
use crate::regulariser::RegulariserSpec;

/// Iteration controls for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Hard iteration cap; hitting it flags the result instead of failing.
    pub max_iterations: usize,
    /// Stopping threshold, relative to α·(1 + ‖ξ‖).
    pub kkt_tolerance: f64,
    /// Step multiplier in (0, 1]; the gradient step is step_scale/L, L = σ_max².
    pub step_scale: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            kkt_tolerance: 1e-9,
            step_scale: 1.0,
        }
    }
}

impl SolveOptions {
    /// Checks the option invariants.
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(LabError::InvalidConfig("max_iterations must be >= 1".into()));
        }
        if !(self.kkt_tolerance > 0.0 && self.kkt_tolerance.is_finite()) {
            return Err(LabError::InvalidConfig(format!(
                "kkt_tolerance must be > 0, got {}",
                self.kkt_tolerance
            )));
        }
        if !(self.step_scale > 0.0 && self.step_scale <= 1.0) {
            return Err(LabError::InvalidConfig(format!(
                "step_scale must be in (0, 1], got {}",
                self.step_scale
            )));
        }
        Ok(())
    }
}

/// Minimiser with diagnostics and the dual certificate.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// The minimiser u_α^δ.
    pub u: Vector,
    /// ω_α^δ = −(Fu − v)/α.
    pub omega: Vector,
    /// ξ_α^δ = F*ω_α^δ (in ∂R(u) at exact convergence).
    pub xi: Vector,
    /// Iterations performed (0 when the start point already satisfies the test).
    pub iterations: usize,
    /// Final scaled fixed-point residual L·‖u − prox_{(α/L)R}(u − ∇f(u)/L)‖.
    pub kkt_residual: f64,
    /// ½‖Fu − v‖² + α·R(u) at the returned iterate.
    pub objective: f64,
    /// False when the iteration cap was reached before the tolerance.
    pub converged: bool,
}

/// T_α(u, v) = ½‖Fu − v‖² + α·R(u).
pub fn objective(
    op: &SpectralOperator,
    v: &Vector,
    alpha: f64,
    spec: &RegulariserSpec,
    u: &Vector,
) -> Result<f64> {
    if v.len() != op.nrows() {
        return Err(LabError::DimensionError {
            expected: op.nrows(),
            got: v.len(),
        });
    }
    let res = op.apply(u)? - v;
    Ok(0.5 * res.dot(&res) + alpha * spec.value(u))
}

/// The certificate of the optimality system: ω = −(Fu − v)/α, ξ = F*ω.
pub fn dual_certificate(
    op: &SpectralOperator,
    v: &Vector,
    alpha: f64,
    u: &Vector,
) -> Result<(Vector, Vector)> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(LabError::InvalidAlpha(alpha));
    }
    if v.len() != op.nrows() {
        return Err(LabError::DimensionError {
            expected: op.nrows(),
            got: v.len(),
        });
    }
    let omega = (v - &op.apply(u)?).mapv(|x| x / alpha);
    let xi = op.apply_adjoint(&omega)?;
    Ok((omega, xi))
}

/// Closed-form minimiser for the quadratic regulariser:
/// u = (F*F + αI)^{-1} F*v = Σ_k σ_k/(σ_k² + α)·⟨u_k, v⟩ v_k.
pub fn direct_quadratic_solve(op: &SpectralOperator, v: &Vector, alpha: f64) -> Result<Vector> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(LabError::InvalidAlpha(alpha));
    }
    if v.len() != op.nrows() {
        return Err(LabError::DimensionError {
            expected: op.nrows(),
            got: v.len(),
        });
    }
    let mut coeffs = op.left_vectors().t().dot(v);
    for (c, &s) in coeffs.iter_mut().zip(op.singular_values().iter()) {
        *c *= s / (s * s + alpha);
    }
    Ok(op.right_vectors().dot(&coeffs))
}

/// Accelerated proximal gradient (FISTA) with function-value restart.
///
/// Stops when the fixed-point residual at the plain step 1/L drops below
/// kkt_tolerance·α·(1 + ‖ξ‖) with ξ the current dual certificate; returns the
/// last iterate flagged unconverged when the cap is reached first.
pub fn solve(
    op: &SpectralOperator,
    v: &Vector,
    alpha: f64,
    spec: &RegulariserSpec,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    spec.validate()?;
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(LabError::InvalidAlpha(alpha));
    }
    if v.len() != op.nrows() {
        return Err(LabError::DimensionError {
            expected: op.nrows(),
            got: v.len(),
        });
    }

    let n = op.ncols();
    let lip = op.operator_norm().powi(2);
    if lip == 0.0 {
        // Zero operator: T_α(u) = ½‖v‖² + αR(u), minimised at u = 0.
        let u = Vector::zeros(n);
        let (omega, xi) = dual_certificate(op, v, alpha, &u)?;
        let objective = 0.5 * v.dot(v);
        return Ok(SolveResult {
            u,
            omega,
            xi,
            iterations: 0,
            kkt_residual: 0.0,
            objective,
            converged: true,
        });
    }

    let step = opts.step_scale / lip;
    let tau = step * alpha;
    let mut x = Vector::zeros(n);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut obj_prev = 0.5 * v.dot(v) + alpha * spec.value(&x);

    let mut iterations = 0;
    let mut converged = false;
    let mut kkt_residual = f64::INFINITY;
    let mut obj = obj_prev;

    for k in 1..=opts.max_iterations {
        let grad_y = op.apply_adjoint(&(op.apply(&y)? - v))?;
        let x_next = spec.prox(&(&y - &grad_y.mapv(|g| g * step)), tau);

        // Residual, certificate norm and objective at the candidate iterate.
        let res_vec = op.apply(&x_next)? - v;
        let grad_x = op.apply_adjoint(&res_vec)?;
        let fp = spec.prox(&(&x_next - &grad_x.mapv(|g| g / lip)), alpha / lip);
        let diff = &x_next - &fp;
        kkt_residual = lip * diff.dot(&diff).sqrt();
        let xi_norm = grad_x.dot(&grad_x).sqrt() / alpha;
        obj = 0.5 * res_vec.dot(&res_vec) + alpha * spec.value(&x_next);

        if obj > obj_prev {
            // Function-value restart: drop momentum.
            t = 1.0;
            y = x_next.clone();
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            y = &x_next + &(&x_next - &x).mapv(|d| d * beta);
            t = t_next;
        }
        x = x_next;
        obj_prev = obj;
        iterations = k;

        if kkt_residual <= opts.kkt_tolerance * alpha * (1.0 + xi_norm) {
            converged = true;
            break;
        }
    }

    let (omega, xi) = dual_certificate(op, v, alpha, &x)?;
    Ok(SolveResult {
        u: x,
        omega,
        xi,
        iterations,
        kkt_residual,
        objective: obj,
        converged,
    })
}
