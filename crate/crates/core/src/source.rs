//! Construction of problem instances that satisfy the fractional source
//! condition ξ† = (F*F)^ν ω† ∈ ∂R(u†), exact-norm noisy data, and the preset
//! operators used by the experiments.

use crate::error::{LabError, Result};
use crate::linalg::{SpectralOperator, Vector};
use crate::regulariser::RegulariserSpec;
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A consistent bundle realizing the source condition for one (F, R, ν).
#[derive(Debug, Clone)]
pub struct SourceInstance {
    /// Smoothness exponent ν ∈ (0, 1].
    pub nu: f64,
    /// Source element ω†.
    pub omega_dagger: Vector,
    /// ξ† = (F*F)^ν ω†.
    pub xi_dagger: Vector,
    /// Exact solution u† with ξ† ∈ ∂R(u†).
    pub u_dagger: Vector,
    /// Exact data v† = F u†.
    pub v_dagger: Vector,
    /// ‖ω†‖.
    pub omega_norm: f64,
}

/// Noisy data with ‖v^δ − v†‖ = δ exactly.
#[derive(Debug, Clone)]
pub struct NoisyData {
    pub v_delta: Vector,
    pub delta: f64,
    pub seed: u64,
}

/// The operator presets of the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    /// n×n diagonal with σ_k = k^{−a}.
    DiagonalDecay { n: usize, a: f64 },
    /// Lower-triangular cumulative sum scaled by 1/n (classic smoothing).
    Integration { n: usize },
    /// m×n with seeded i.i.d. N(0, 1)/√m entries.
    RandomGaussian { m: usize, n: usize, seed: u64 },
}

/// Builds a [`SourceInstance`]: ξ† spectrally, u† through the inverse
/// subgradient, v† = F u†.
///
/// Fails with `Unsupported` for total variation (set-valued inverse), with
/// `OutOfDomain` for Huber when some |ξ†_i| > γ (rescale ω† instead — no
/// silent rescaling here), and with `InvalidExponent` for ν outside (0, 1].
pub fn synthesize(
    op: &SpectralOperator,
    spec: &RegulariserSpec,
    nu: f64,
    omega_dagger: Vector,
) -> Result<SourceInstance> {
    spec.validate()?;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(LabError::InvalidExponent(format!(
            "source condition needs nu in (0, 1], got {nu}"
        )));
    }
    let xi_dagger = op.fractional_gram_apply(nu, &omega_dagger)?;
    let u_dagger = spec.invert_subgradient(&xi_dagger)?;
    let v_dagger = op.apply(&u_dagger)?;
    let omega_norm = omega_dagger.dot(&omega_dagger).sqrt();
    Ok(SourceInstance {
        nu,
        omega_dagger,
        xi_dagger,
        u_dagger,
        v_dagger,
        omega_norm,
    })
}

/// Adds noise of exact norm δ in a seeded standard-normal direction.
pub fn add_noise(v_dagger: &Vector, delta: f64, seed: u64) -> Result<NoisyData> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(LabError::InvalidNoise(format!(
            "delta must be > 0, got {delta}"
        )));
    }
    if v_dagger.is_empty() {
        return Err(LabError::InvalidNoise("data vector is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = v_dagger.len();
    let dir = loop {
        let d = Vector::from_iter((0..m).map(|_| StandardNormal.sample(&mut rng)));
        let norm = d.dot(&d).sqrt();
        if norm > 0.0 {
            break d.mapv(|x| x * delta / norm);
        }
    };
    Ok(NoisyData {
        v_delta: v_dagger + &dir,
        delta,
        seed,
    })
}

/// Materializes an operator preset.
pub fn preset_operator(kind: &OperatorKind) -> Result<SpectralOperator> {
    let matrix = match *kind {
        OperatorKind::DiagonalDecay { n, a } => {
            if n < 2 {
                return Err(LabError::InvalidOperator(format!(
                    "diagonal_decay needs n >= 2, got {n}"
                )));
            }
            if !(a > 0.0 && a.is_finite()) {
                return Err(LabError::InvalidOperator(format!(
                    "diagonal_decay needs a > 0, got {a}"
                )));
            }
            Array2::from_diag(&Vector::from_iter(
                (1..=n).map(|k| (k as f64).powf(-a)),
            ))
        }
        OperatorKind::Integration { n } => {
            if n < 2 {
                return Err(LabError::InvalidOperator(format!(
                    "integration needs n >= 2, got {n}"
                )));
            }
            let scale = 1.0 / n as f64;
            Array2::from_shape_fn((n, n), |(i, j)| if j <= i { scale } else { 0.0 })
        }
        OperatorKind::RandomGaussian { m, n, seed } => {
            if m == 0 || n == 0 {
                return Err(LabError::InvalidOperator(format!(
                    "random_gaussian needs m, n >= 1, got {m}x{n}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scale = 1.0 / (m as f64).sqrt();
            Array2::from_shape_fn((m, n), |_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                x * scale
            })
        }
    };
    SpectralOperator::factorize(matrix)
}

/// The deterministic default source element: alternating signs on k^{−1/2}
/// coordinates, normalized to ‖ω†‖ = 1.
pub fn default_omega(n: usize) -> Vector {
    let mut omega = Vector::from_iter(
        (1..=n).map(|k| if k % 2 == 1 { 1.0 } else { -1.0 } * (k as f64).powf(-0.5)),
    );
    let norm = omega.dot(&omega).sqrt();
    if norm > 0.0 {
        omega.mapv_inplace(|x| x / norm);
    }
    omega
}

/// A seeded random unit-norm source element.
pub fn random_omega(n: usize, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let omega = Vector::from_iter((0..n).map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            x
        }));
        let norm = omega.dot(&omega).sqrt();
        if norm > 0.0 {
            return omega.mapv(|x| x / norm);
        }
    }
}
