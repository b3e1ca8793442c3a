//! Dense operators with cached singular-value factorization and the spectral
//! calculus for fractional Gram powers.

use crate::error::{LabError, Result};
use ndarray::{Array1, Array2};

/// Elements of the Hilbert spaces involved; plain dense coordinate vectors.
pub type Vector = Array1<f64>;

/// Relative cutoff under which singular values are treated as zero: directions
/// below `RANK_CUTOFF · σ_max` belong to the kernel for all spectral calculus.
pub const RANK_CUTOFF: f64 = 1e-12;

/// A bounded linear operator F : R^n → R^m together with its reduced singular
/// value decomposition F = U diag(σ) Vᵀ (U: m×r, σ: r strictly positive and
/// descending, V: n×r).
///
/// Immutable after construction; all operations are pure, so values can be
/// shared freely across threads.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    matrix: Array2<f64>,
    left: Array2<f64>,
    sigma: Array1<f64>,
    right: Array2<f64>,
}

impl SpectralOperator {
    /// Factorizes a dense matrix. Rank is the number of singular values above
    /// `RANK_CUTOFF · σ_max`; smaller ones are dropped together with their
    /// singular vectors.
    pub fn factorize(matrix: Array2<f64>) -> Result<Self> {
        let (m, n) = matrix.dim();
        if m == 0 || n == 0 {
            return Err(LabError::InvalidOperator(format!(
                "matrix must be at least 1x1, got {m}x{n}"
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(LabError::InvalidOperator(
                "matrix has a non-finite entry".into(),
            ));
        }

        let dm = nalgebra::DMatrix::from_fn(m, n, |i, j| matrix[[i, j]]);
        let svd = dm.svd(true, true);
        let u = svd.u.expect("u requested");
        let vt = svd.v_t.expect("v_t requested");
        let vals = svd.singular_values;

        // Sort descending defensively, truncate at the rank cutoff.
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
        let sigma_max = order.first().map_or(0.0, |&k| vals[k]);
        let cutoff = RANK_CUTOFF * sigma_max;
        order.retain(|&k| vals[k] > cutoff && vals[k] > 0.0);
        let r = order.len();

        let mut left = Array2::zeros((m, r));
        let mut right = Array2::zeros((n, r));
        let mut sigma = Array1::zeros(r);
        for (col, &k) in order.iter().enumerate() {
            sigma[col] = vals[k];
            for i in 0..m {
                left[[i, col]] = u[(i, k)];
            }
            for j in 0..n {
                right[[j, col]] = vt[(k, j)];
            }
        }

        Ok(Self {
            matrix,
            left,
            sigma,
            right,
        })
    }

    /// Domain dimension n.
    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Range dimension m.
    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    /// Numerical rank after the cutoff.
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// Strictly positive singular values, descending.
    pub fn singular_values(&self) -> &Array1<f64> {
        &self.sigma
    }

    /// The raw matrix entries.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Left singular vectors as columns (m×r).
    pub fn left_vectors(&self) -> &Array2<f64> {
        &self.left
    }

    /// Right singular vectors as columns (n×r).
    pub fn right_vectors(&self) -> &Array2<f64> {
        &self.right
    }

    /// Largest singular value (0 for the zero operator).
    pub fn operator_norm(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    fn check_len(&self, len: usize, expected: usize) -> Result<()> {
        if len != expected {
            return Err(LabError::DimensionError { expected, got: len });
        }
        Ok(())
    }

    /// F u.
    pub fn apply(&self, u: &Vector) -> Result<Vector> {
        self.check_len(u.len(), self.ncols())?;
        Ok(self.matrix.dot(u))
    }

    /// F* v (transpose action).
    pub fn apply_adjoint(&self, v: &Vector) -> Result<Vector> {
        self.check_len(v.len(), self.nrows())?;
        Ok(self.matrix.t().dot(v))
    }

    /// (F*F)^ν w computed spectrally as Σ_k σ_k^{2ν} ⟨v_k, w⟩ v_k.
    ///
    /// For ν = 0 this is the orthogonal projection onto the row space (kernel
    /// components map to zero for every ν ∈ [0, 1]).
    pub fn fractional_gram_apply(&self, nu: f64, w: &Vector) -> Result<Vector> {
        if !(0.0..=1.0).contains(&nu) || !nu.is_finite() {
            return Err(LabError::InvalidExponent(format!(
                "nu = {nu} outside [0, 1]"
            )));
        }
        self.check_len(w.len(), self.ncols())?;
        let mut coeffs = self.right.t().dot(w);
        for (c, &s) in coeffs.iter_mut().zip(self.sigma.iter()) {
            *c *= s.powf(2.0 * nu);
        }
        Ok(self.right.dot(&coeffs))
    }

    /// (FF*)^μ w on the range side, spectrally via the left singular vectors.
    pub fn gram_power_factor(&self, mu: f64, w: &Vector) -> Result<Vector> {
        if !(0.0..=0.5).contains(&mu) || !mu.is_finite() {
            return Err(LabError::InvalidExponent(format!(
                "mu = {mu} outside [0, 1/2]"
            )));
        }
        self.check_len(w.len(), self.nrows())?;
        let mut coeffs = self.left.t().dot(w);
        for (c, &s) in coeffs.iter_mut().zip(self.sigma.iter()) {
            *c *= s.powf(2.0 * mu);
        }
        Ok(self.left.dot(&coeffs))
    }

    /// Solves min ‖w‖ s.t. F*w = ξ for ξ in the row space: w = Σ σ_k^{-1}⟨v_k,ξ⟩u_k.
    /// Used to certify ξ ∈ range(F*).
    pub fn adjoint_preimage(&self, xi: &Vector) -> Result<Vector> {
        self.check_len(xi.len(), self.ncols())?;
        let mut coeffs = self.right.t().dot(xi);
        for (c, &s) in coeffs.iter_mut().zip(self.sigma.iter()) {
            *c /= s;
        }
        Ok(self.left.dot(&coeffs))
    }
}
