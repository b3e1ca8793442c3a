//! The regularisation functionals R with values, proximal maps, subgradients,
//! inverse subgradients, convexity profiles and Bregman distances.

use crate::error::{LabError, Result};
use crate::linalg::Vector;
use crate::tv1d;

/// Selects the functional R and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum RegulariserSpec {
    /// R(u) = ½‖u‖².
    Quadratic,
    /// R(u) = (h/p)Σ|u_i|^p with p ∈ (1, 2).
    PowerSum { p: f64, weight: f64 },
    /// R(u) = (h/p)Σ|u_i|^p with p ∈ (2, ∞); h plays the quadrature weight.
    PowerSumHigh { p: f64, weight: f64 },
    /// R(u) = Σ|u_{i+1} − u_i| (discrete 1D total variation).
    TotalVariation1D,
    /// R(u) = Σφ_γ(u_i), φ_γ(t) = t²/2 for |t| ≤ γ, γ|t| − γ²/2 beyond.
    Huber { gamma: f64 },
}

/// Local convexity classification: R is p-convex if D_ξ(ũ,u) ≥ C‖ũ−u‖^p and
/// q-coconvex if C‖ξ−ξ̃‖^q ≤ D^sym on bounded sets. `None` = no such exponent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConvexityProfile {
    pub p_convex: Option<f64>,
    pub q_coconvex: Option<f64>,
}

fn huber_phi(t: f64, gamma: f64) -> f64 {
    let a = t.abs();
    if a <= gamma {
        0.5 * t * t
    } else {
        gamma * a - 0.5 * gamma * gamma
    }
}

/// φ'_γ: the clamp of t to [−γ, γ].
fn huber_rho(t: f64, gamma: f64) -> f64 {
    t.clamp(-gamma, gamma)
}

/// Solves w + c·w^{p−1} = b for w ≥ 0 (b ≥ 0, c ≥ 0, p > 1): the scalar
/// stationarity equation of the power-sum prox. Monotone in w; safeguarded
/// Newton inside the bracket [0, b].
fn power_prox_scalar(b: f64, c: f64, p: f64) -> f64 {
    if b == 0.0 || c == 0.0 {
        return if c == 0.0 { b } else { 0.0 };
    }
    let f = |w: f64| w + c * w.powf(p - 1.0) - b;
    let (mut lo, mut hi) = (0.0f64, b);
    let mut w = b;
    for _ in 0..200 {
        let fw = f(w);
        if fw == 0.0 {
            return w;
        }
        if fw > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let d = 1.0 + c * (p - 1.0) * w.powf(p - 2.0);
        let mut next = w - fw / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - w).abs();
        w = next;
        if step <= 1e-17 * (1.0 + w) || hi - lo <= 1e-17 * (1.0 + hi) {
            break;
        }
    }
    w
}

impl RegulariserSpec {
    /// Human-readable variant name for error messages.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Quadratic => "Quadratic",
            Self::PowerSum { .. } => "PowerSum",
            Self::PowerSumHigh { .. } => "PowerSumHigh",
            Self::TotalVariation1D => "TotalVariation1D",
            Self::Huber { .. } => "Huber",
        }
    }

    /// Checks the parameter ranges of the variant.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(LabError::InvalidSpec(msg));
        match *self {
            Self::Quadratic | Self::TotalVariation1D => Ok(()),
            Self::PowerSum { p, weight } => {
                if !(p > 1.0 && p < 2.0) {
                    return fail(format!("PowerSum needs p in (1, 2), got {p}"));
                }
                if !(weight > 0.0 && weight.is_finite()) {
                    return fail(format!("PowerSum needs weight > 0, got {weight}"));
                }
                Ok(())
            }
            Self::PowerSumHigh { p, weight } => {
                if !(p > 2.0 && p.is_finite()) {
                    return fail(format!("PowerSumHigh needs p in (2, inf), got {p}"));
                }
                if !(weight > 0.0 && weight.is_finite()) {
                    return fail(format!("PowerSumHigh needs weight > 0, got {weight}"));
                }
                Ok(())
            }
            Self::Huber { gamma } => {
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return fail(format!("Huber needs gamma > 0, got {gamma}"));
                }
                Ok(())
            }
        }
    }

    /// R(u).
    pub fn value(&self, u: &Vector) -> f64 {
        match *self {
            Self::Quadratic => 0.5 * u.iter().map(|x| x * x).sum::<f64>(),
            Self::PowerSum { p, weight } | Self::PowerSumHigh { p, weight } => {
                weight / p * u.iter().map(|x| x.abs().powf(p)).sum::<f64>()
            }
            Self::TotalVariation1D => u
                .windows(2)
                .into_iter()
                .map(|w| (w[1] - w[0]).abs())
                .sum::<f64>(),
            Self::Huber { gamma } => u.iter().map(|&x| huber_phi(x, gamma)).sum::<f64>(),
        }
    }

    /// argmin_w ½‖w − u‖² + τ·R(w). Exact closed forms except the power sums,
    /// whose coordinatewise stationarity equation is solved to ~1e-15.
    pub fn prox(&self, u: &Vector, tau: f64) -> Vector {
        assert!(tau > 0.0, "prox needs tau > 0, got {tau}");
        match *self {
            Self::Quadratic => u.mapv(|x| x / (1.0 + tau)),
            Self::PowerSum { p, weight } | Self::PowerSumHigh { p, weight } => {
                let c = tau * weight;
                u.mapv(|x| x.signum() * power_prox_scalar(x.abs(), c, p))
            }
            Self::TotalVariation1D => {
                Vector::from_vec(tv1d::denoise(u.as_slice().unwrap(), tau))
            }
            Self::Huber { gamma } => u.mapv(|x| {
                if x.abs() <= gamma * (1.0 + tau) {
                    x / (1.0 + tau)
                } else {
                    x - tau * gamma * x.signum()
                }
            }),
        }
    }

    /// ∂R(u) where single-valued (all variants except total variation).
    pub fn subgradient(&self, u: &Vector) -> Result<Vector> {
        match *self {
            Self::Quadratic => Ok(u.clone()),
            Self::PowerSum { p, weight } | Self::PowerSumHigh { p, weight } => {
                Ok(u.mapv(|x| weight * x.signum() * x.abs().powf(p - 1.0)))
            }
            Self::TotalVariation1D => Err(LabError::NotSingleValued("TotalVariation1D")),
            Self::Huber { gamma } => Ok(u.mapv(|x| huber_rho(x, gamma))),
        }
    }

    /// Selects u with ξ ∈ ∂R(u) (an element of ∂R*(ξ)).
    ///
    /// Huber: only |ξ_i| ≤ γ is in the domain; at the boundary the
    /// minimal-norm preimage u_i = ξ_i is returned.
    pub fn invert_subgradient(&self, xi: &Vector) -> Result<Vector> {
        match *self {
            Self::Quadratic => Ok(xi.clone()),
            Self::PowerSum { p, weight } | Self::PowerSumHigh { p, weight } => {
                Ok(xi.mapv(|x| x.signum() * (x.abs() / weight).powf(1.0 / (p - 1.0))))
            }
            Self::TotalVariation1D => Err(LabError::Unsupported(
                "TotalVariation1D inverse subgradient (set-valued)".into(),
            )),
            Self::Huber { gamma } => {
                for (i, &x) in xi.iter().enumerate() {
                    if x.abs() > gamma {
                        return Err(LabError::OutOfDomain(format!(
                            "Huber subgradient bound |xi_{i}| = {} > gamma = {gamma}; \
                             rescale omega",
                            x.abs()
                        )));
                    }
                }
                Ok(xi.clone())
            }
        }
    }

    /// Local convexity/coconvexity exponents of the variant.
    pub fn convexity_profile(&self) -> ConvexityProfile {
        match *self {
            Self::Quadratic => ConvexityProfile {
                p_convex: Some(2.0),
                q_coconvex: Some(2.0),
            },
            Self::PowerSum { p, .. } => ConvexityProfile {
                p_convex: Some(2.0),
                q_coconvex: Some(p / (p - 1.0)),
            },
            Self::PowerSumHigh { p, .. } => ConvexityProfile {
                p_convex: Some(p),
                q_coconvex: Some(2.0),
            },
            Self::TotalVariation1D => ConvexityProfile {
                p_convex: None,
                q_coconvex: None,
            },
            Self::Huber { .. } => ConvexityProfile {
                p_convex: None,
                q_coconvex: Some(2.0),
            },
        }
    }

    /// Bregman distance D_ξ(ũ, u) = R(ũ) − R(u) − ⟨ξ, ũ − u⟩ for ξ ∈ ∂R(u).
    pub fn bregman(&self, u_tilde: &Vector, u: &Vector, xi: &Vector) -> Result<f64> {
        if u_tilde.len() != u.len() {
            return Err(LabError::DimensionError {
                expected: u.len(),
                got: u_tilde.len(),
            });
        }
        if xi.len() != u.len() {
            return Err(LabError::DimensionError {
                expected: u.len(),
                got: xi.len(),
            });
        }
        let inner: f64 = xi
            .iter()
            .zip(u_tilde.iter().zip(u.iter()))
            .map(|(x, (a, b))| x * (a - b))
            .sum();
        Ok(self.value(u_tilde) - self.value(u) - inner)
    }
}

/// Symmetric Bregman distance D^sym = D_ξ(ũ,u) + D_ξ̃(u,ũ) = ⟨ξ − ξ̃, u − ũ⟩.
pub fn sym_bregman(xi: &Vector, xi_tilde: &Vector, u: &Vector, u_tilde: &Vector) -> Result<f64> {
    let n = u.len();
    for len in [xi.len(), xi_tilde.len(), u_tilde.len()] {
        if len != n {
            return Err(LabError::DimensionError {
                expected: n,
                got: len,
            });
        }
    }
    Ok((0..n)
        .map(|i| (xi[i] - xi_tilde[i]) * (u[i] - u_tilde[i]))
        .sum())
}
