//! Independent numerical oracles for the integration tests. Deliberately
//! implemented with different algorithms than the library (Jacobi rotations
//! instead of SVD, coordinate descent instead of taut strings) so agreement
//! is meaningful.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix:
/// returns (eigenvalues, orthonormal eigenvector columns) with
/// A = V · diag(λ) · Vᵀ. Eigenvalues are unsorted.
pub fn jacobi_eigh(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigh needs a square matrix");
    let mut b = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += b[[p, q]] * b[[p, q]];
            }
        }
        if off.sqrt() <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let bpq = b[[p, q]];
                if bpq.abs() <= 1e-300 {
                    continue;
                }
                let tau = (b[[q, q]] - b[[p, p]]) / (2.0 * bpq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let bkp = b[[k, p]];
                    let bkq = b[[k, q]];
                    b[[k, p]] = c * bkp - s * bkq;
                    b[[k, q]] = s * bkp + c * bkq;
                }
                for k in 0..n {
                    let bpk = b[[p, k]];
                    let bqk = b[[q, k]];
                    b[[p, k]] = c * bpk - s * bqk;
                    b[[q, k]] = s * bpk + c * bqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let lambda = Array1::from_iter((0..n).map(|i| b[[i, i]]));
    (lambda, v)
}

/// Applies (A)^nu · u for symmetric positive semidefinite A through the
/// Jacobi eigendecomposition. Eigenvalues below a relative cutoff count as
/// zero rank: exact-zero eigenvalues of rank-deficient Grams surface from
/// Jacobi at roundoff scale (~1e-16·λmax), and at small nu they would
/// otherwise contribute O(1) junk. The cutoff sits above that floor but far
/// below any genuine eigenvalue of the test matrices.
pub fn sym_fractional_apply(a: &Array2<f64>, nu: f64, u: &Array1<f64>) -> Array1<f64> {
    let (lambda, v) = jacobi_eigh(a);
    let lmax = lambda.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = 1e-12 * lmax;
    let coeff = v.t().dot(u);
    let scaled = Array1::from_iter(
        lambda
            .iter()
            .zip(coeff.iter())
            .map(|(&l, &c)| if l > cutoff && l > 0.0 { l.powf(nu) * c } else { 0.0 }),
    );
    v.dot(&scaled)
}

/// Largest singular value via power iteration on AᵀA.
pub fn power_iteration_norm(a: &Array2<f64>, iters: usize, seed: u64) -> f64 {
    let n = a.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array1::from_shape_fn(n, |_| rng.sample::<f64, _>(StandardNormal));
    let mut norm = x.dot(&x).sqrt();
    if norm == 0.0 {
        x[0] = 1.0;
        norm = 1.0;
    }
    x /= norm;
    let mut value = 0.0f64;
    for _ in 0..iters {
        let y = a.t().dot(&a.dot(&x));
        let ny = y.dot(&y).sqrt();
        if ny == 0.0 {
            return 0.0;
        }
        value = ny; // Rayleigh quotient of AᵀA at unit x.
        x = y / ny;
    }
    value.sqrt()
}

/// 1D total-variation denoising via coordinate ascent on the dual box
/// problem: w = y − Dᵀz with |z_i| ≤ λ, maximizing the dual objective.
/// Slow and simple; used only as an oracle.
pub fn tv_prox_dual_cd(y: &[f64], lam: f64, passes: usize) -> Vec<f64> {
    let n = y.len();
    if n <= 1 || lam <= 0.0 {
        return y.to_vec();
    }
    let m = n - 1;
    let mut z = vec![0.0f64; m];
    let mut w: Vec<f64> = y.to_vec(); // w = y − Dᵀz, kept incrementally.
    for _ in 0..passes {
        let mut biggest = 0.0f64;
        for i in 0..m {
            // (Dw)_i = w[i+1] − w[i]; curvature (DDᵀ)_{ii} = 2.
            let grad = w[i + 1] - w[i];
            let zi_new = (z[i] + grad / 2.0).clamp(-lam, lam);
            let dz = zi_new - z[i];
            if dz != 0.0 {
                z[i] = zi_new;
                // Dᵀz contributes −z_i at position i and +z_i at i+1.
                w[i] += dz;
                w[i + 1] -= dz;
            }
            biggest = biggest.max(dz.abs());
        }
        if biggest <= 1e-16 {
            break;
        }
    }
    w
}

pub fn seeded_matrix(seed: u64, m: usize, n: usize) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal))
}

pub fn seeded_vector(seed: u64, n: usize, scale: f64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array1::from_shape_fn(n, |_| scale * rng.sample::<f64, _>(StandardNormal))
}
