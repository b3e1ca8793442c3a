//! Self-contained verification suites: each one checks a structural
//! inequality or an independent oracle on a seeded batch of random cases and
//! reports the number of violations plus the worst margin seen.

use crate::error::{LabError, Result};
use crate::linalg::{SpectralOperator, Vector};
use crate::regulariser::RegulariserSpec;
use crate::solver::{self, SolveOptions};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Outcome of one suite. `worst` is the largest signed margin observed;
/// values ≤ 0 mean "inside the tolerance" for every suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    pub detail: String,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Array2<f64> {
    Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Array1::from_shape_fn(n, |_| scale * rng.sample::<f64, _>(StandardNormal))
}

fn norm(v: &Vector) -> f64 {
    v.dot(v).sqrt()
}

/// Moment inequality ‖(F*F)^ν u‖ ≤ ‖Fu‖^{2ν}·‖u‖^{1−2ν} for ν ∈ [0, 1/2]
/// (the concave range of t ↦ t^{2ν}; it reverses beyond 1/2) on random
/// operators up to 20×20, with 1e-9 relative slack.
pub fn interpolation_suite(trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-9;
    let fixed_nu = [0.0, 0.125, 0.25, 0.375, 0.5];
    let mut failures = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_case = String::new();
    for t in 0..trials {
        let m = rng.gen_range(2..=20);
        let n = rng.gen_range(2..=20);
        let op = SpectralOperator::factorize(random_matrix(&mut rng, m, n))?;
        let nu = if t % 10 == 0 {
            fixed_nu[(t / 10) % fixed_nu.len()]
        } else {
            0.5 * rng.gen::<f64>()
        };
        let u = random_vector(&mut rng, n, 1.0);
        let lhs = norm(&op.fractional_gram_apply(nu, &u)?);
        let fu = norm(&op.apply(&u)?);
        let rhs = fu.powf(2.0 * nu) * norm(&u).powf(1.0 - 2.0 * nu);
        let excess = if rhs > 0.0 {
            lhs / rhs - 1.0 - tol
        } else if lhs <= 1e-12 * norm(&u) * (1.0 + op.operator_norm()).powi(2) {
            -1.0
        } else {
            f64::INFINITY
        };
        if excess > 0.0 {
            failures += 1;
        }
        if excess > worst {
            worst = excess;
            worst_case = format!("trial {t}: {m}x{n}, nu = {nu:.6}, lhs = {lhs:.6e}, rhs = {rhs:.6e}");
        }
    }
    Ok(SuiteOutcome {
        name: "interpolation",
        cases: trials,
        failures,
        worst,
        detail: format!("relative excess over the moment bound (slack {tol:.0e}); worst: {worst_case}"),
    })
}

/// Scalar bisection oracle for the power-penalty prox: solves
/// w + tau·h·w^{p−1} = b on [0, b] to machine-level accuracy.
pub fn bisection_prox_oracle(b: f64, tau_h: f64, p: f64) -> f64 {
    let target = b.abs();
    if target == 0.0 {
        return 0.0;
    }
    let f = |w: f64| w + tau_h * w.powf(p - 1.0) - target;
    let (mut lo, mut hi) = (0.0f64, target);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    b.signum() * 0.5 * (lo + hi)
}

/// Power-penalty prox (both the p < 2 and p > 2 branches) against the
/// bisection oracle, absolute tolerance 1e-8.
pub fn prox_suite(trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-8;
    let low_p = [1.2, 1.5, 1.8];
    let high_p = [2.5, 3.0, 4.0];
    let weights = [0.5, 1.0, 2.0];
    let mut failures = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for t in 0..trials {
        let weight = weights[t % weights.len()];
        let spec = if t % 2 == 0 {
            RegulariserSpec::PowerSum {
                p: low_p[(t / 2) % low_p.len()],
                weight,
            }
        } else {
            RegulariserSpec::PowerSumHigh {
                p: high_p[(t / 2) % high_p.len()],
                weight,
            }
        };
        let (p, h) = match spec {
            RegulariserSpec::PowerSum { p, weight } | RegulariserSpec::PowerSumHigh { p, weight } => {
                (p, weight)
            }
            _ => unreachable!(),
        };
        let b: f64 = 3.0 * rng.sample::<f64, _>(StandardNormal);
        // τ log-uniform over [1e-3, 1e2].
        let tau = 10f64.powf(rng.gen_range(-3.0..2.0));
        let got = spec.prox(&ndarray::array![b], tau)[0];
        let want = bisection_prox_oracle(b, tau * h, p);
        let err = (got - want).abs() - tol;
        if err > 0.0 {
            failures += 1;
        }
        worst = worst.max(err);
    }
    Ok(SuiteOutcome {
        name: "prox",
        cases: trials,
        failures,
        worst,
        detail: format!("absolute deviation from the bisection oracle minus {tol:.0e}"),
    })
}

/// Iterative solves of quadratic problems against the closed-form filter
/// solution, tolerance 1e-6 on ‖u_iter − u_direct‖.
pub fn kkt_suite(trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-6;
    let opts = SolveOptions {
        max_iterations: 200_000,
        kkt_tolerance: 1e-11,
        step_scale: 1.0,
    };
    let spec = RegulariserSpec::Quadratic;
    let mut failures = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let m = rng.gen_range(2..=12);
        let n = rng.gen_range(2..=12);
        let op = SpectralOperator::factorize(random_matrix(&mut rng, m, n))?;
        let v = random_vector(&mut rng, m, 1.0);
        let alpha = 10f64.powf(rng.gen_range(-3.0..0.0));
        let direct = solver::direct_quadratic_solve(&op, &v, alpha)?;
        let iter = solver::solve(&op, &v, alpha, &spec, &opts)?;
        let diff = &iter.u - &direct;
        let err = norm(&diff) - tol;
        if err > 0.0 || !iter.converged {
            failures += 1;
        }
        worst = worst.max(err);
    }
    Ok(SuiteOutcome {
        name: "kkt",
        cases: trials,
        failures,
        worst,
        detail: format!("iterative-vs-direct gap minus {tol:.0e}"),
    })
}

/// Huber 2-coconvexity with constant exactly 1: per coordinate,
/// (u − ũ)(ρ(u) − ρ(ũ)) ≥ (ρ(u) − ρ(ũ))² with zero tolerance, where
/// ρ = ∇R is the clipped identity.
pub fn coconvexity_suite(trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gammas = [0.3, 1.0, 2.5];
    let mut failures = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut cases = 0usize;
    for t in 0..trials {
        let gamma = gammas[t % gammas.len()];
        let spec = RegulariserSpec::Huber { gamma };
        let len = rng.gen_range(1..=8);
        let u = random_vector(&mut rng, len, 2.0 * gamma);
        let ut = random_vector(&mut rng, len, 2.0 * gamma);
        let xi = spec.subgradient(&u)?;
        let xit = spec.subgradient(&ut)?;
        for i in 0..len {
            let du = u[i] - ut[i];
            let dr = xi[i] - xit[i];
            let margin = dr * dr - du * dr;
            if margin > 0.0 {
                failures += 1;
            }
            worst = worst.max(margin);
            cases += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "coconvexity",
        cases,
        failures,
        worst,
        detail: "coordinatewise (dρ)² − du·dρ, zero tolerance".into(),
    })
}

/// Exact witness that total variation is not strictly convex: for a step
/// signal w and its prox-derived subgradient ξ ∈ ∂TV(w), the Bregman distance
/// D_ξ(2w, w) vanishes identically (tolerance 1e-10), while ξ still satisfies
/// the subgradient inequality against random probes.
pub fn tv_witness_suite() -> Result<SuiteOutcome> {
    let tol = 1e-10;
    let spec = RegulariserSpec::TotalVariation1D;
    let u_step = ndarray::array![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let tau = 0.05;
    let w = spec.prox(&u_step, tau);
    // Prox optimality: (u − w)/τ ∈ ∂TV(w).
    let xi = (&u_step - &w) / tau;
    let two_w = 2.0 * &w;
    let gap = spec.bregman(&two_w, &w, &xi)?.abs();

    let mut failures = 0usize;
    let mut worst = gap - tol;
    if gap > tol {
        failures += 1;
    }
    // ξ must be a genuine subgradient: D_ξ(ũ, w) ≥ 0 up to roundoff.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 1usize;
    for _ in 0..200 {
        let probe = random_vector(&mut rng, w.len(), 1.5);
        let d = spec.bregman(&probe, &w, &xi)?;
        let margin = -d - tol;
        if margin > 0.0 {
            failures += 1;
        }
        worst = worst.max(margin);
        cases += 1;
    }
    Ok(SuiteOutcome {
        name: "tv-witness",
        cases,
        failures,
        worst,
        detail: format!(
            "max of |D(2w, w)| and subgradient-inequality violations minus {tol:.0e}"
        ),
    })
}

/// Runs the named suite ("all" for every one) with default batch sizes.
pub fn run(which: &str, seed: u64) -> Result<Vec<SuiteOutcome>> {
    let mut out = Vec::new();
    let all = which == "all";
    if all || which == "interpolation" {
        out.push(interpolation_suite(1000, seed)?);
    }
    if all || which == "prox" {
        out.push(prox_suite(1000, seed)?);
    }
    if all || which == "kkt" {
        out.push(kkt_suite(100, seed)?);
    }
    if all || which == "coconvexity" {
        out.push(coconvexity_suite(1000, seed)?);
    }
    if all || which == "tv-witness" {
        out.push(tv_witness_suite()?);
    }
    if out.is_empty() {
        return Err(LabError::Unsupported(format!(
            "unknown verification suite '{which}'"
        )));
    }
    Ok(out)
}
