//! Circular complex Gaussian measures with positive-semidefinite covariance.
//!
//! A [`GeneralizedGaussian`] is supported on the span of the positive
//! eigenvectors of its covariance; sampling goes through a factor `F` with
//! `F F* = Σ`, and moments are evaluated exactly by the complex Wick formula
//! in [`wick`].

mod wick;

use std::ops::Index;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{circular_normal, substream};

pub use wick::{
    brute_force_permanent, det_product_moment, mc_det_product_moment, permanent, wick_moment,
    MomentPattern, MAX_EXACT_NK, MAX_PATTERN,
};

/// Default relative eigenvalue tolerance for [`psd_factorize`].
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// A Hermitian matrix. Construction symmetrises the input, so
/// `m[(i,j)] == conj(m[(j,i)])` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Input(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input("matrix has non-finite entries".into()));
        }
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { entries: sym })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: DMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { entries: &self.entries * Complex64::new(c, 0.0) }
    }

    /// `I_k ⊗ self`, indexed so that block `j` occupies rows `j·d .. (j+1)·d`.
    pub fn kron_identity(&self, k: usize) -> Self {
        let d = self.dim();
        let mut out = DMatrix::zeros(k * d, k * d);
        for j in 0..k {
            out.view_mut((j * d, j * d), (d, d)).copy_from(&self.entries);
        }
        Self { entries: out }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.entries[idx]
    }
}

/// A circular complex Gaussian with positive-semidefinite covariance.
#[derive(Debug, Clone)]
pub struct GeneralizedGaussian {
    pub covariance: HermitianMatrix,
    pub rank: usize,
    /// `dim × rank` factor with `F F* = covariance`.
    pub factor: DMatrix<Complex64>,
    /// Eigenvalues at or below this level were treated as zero.
    pub eigen_floor: f64,
}

impl GeneralizedGaussian {
    pub fn dim(&self) -> usize {
        self.covariance.dim()
    }

    /// One draw `F w` with `w` standard circular of length `rank`.
    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let w: Vec<Complex64> = (0..self.rank).map(|_| circular_normal(rng)).collect();
        (0..self.dim())
            .map(|i| (0..self.rank).map(|r| self.factor[(i, r)] * w[r]).sum())
            .collect()
    }
}

/// Eigen-factorises a PSD covariance, dropping eigenvalues below `tol · λ_max`.
pub fn psd_factorize(sigma: &HermitianMatrix, tol: f64) -> Result<GeneralizedGaussian> {
    if !(tol >= 0.0) {
        return Err(Error::Input(format!("tolerance must be nonnegative, got {tol}")));
    }
    let dim = sigma.dim();
    let eig = SymmetricEigen::new(sigma.as_matrix().clone());
    let max = eig.eigenvalues.iter().copied().fold(0.0_f64, f64::max);
    let floor = tol * max;
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if dim > 0 && min < -floor {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: min });
    }
    let keep: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > floor && eig.eigenvalues[i] > 0.0).collect();
    let mut factor = DMatrix::zeros(dim, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let s = eig.eigenvalues[i].sqrt();
        for row in 0..dim {
            factor[(row, col)] = eig.eigenvectors[(row, i)] * s;
        }
    }
    Ok(GeneralizedGaussian { covariance: sigma.clone(), rank: keep.len(), factor, eigen_floor: floor })
}

/// `count` draws from `g`; draw `i` uses the substream `(seed, i)`.
pub fn sample(g: &GeneralizedGaussian, seed: u64, count: usize) -> Vec<Vec<Complex64>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| g.draw(&mut substream(seed, i)))
        .collect()
}
