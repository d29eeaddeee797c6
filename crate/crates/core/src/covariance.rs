//! Covariance of section values and first derivatives at `n` points.
//!
//! All matrices use the `π^m`-rescaled convention: `A` has unit diagonal and
//! `C` has unit diagonal in the limit. Block indices: `B[p][(p', q')]` sits in
//! column `p'·m + q'`, and `C[(p, q)][(p', q')]` at row `p·m + q`, column
//! `p'·m + q'`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{psd_factorize, GeneralizedGaussian, HermitianMatrix, DEFAULT_PSD_TOL};

/// Condition number of `A` beyond which the configuration is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// `n` pairwise-distinct points of `C^m` in scaled coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    points: Vec<Vec<Complex64>>,
    m: usize,
}

impl PointConfiguration {
    pub fn new(points: Vec<Vec<Complex64>>) -> Result<Self> {
        let m = points.first().map(Vec::len).ok_or_else(|| Error::Input("configuration is empty".into()))?;
        if m == 0 {
            return Err(Error::Input("points must have dimension m >= 1".into()));
        }
        for p in &points {
            if p.len() != m {
                return Err(Error::DimensionMismatch { expected: m, actual: p.len() });
            }
            if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::Input("configuration has non-finite coordinates".into()));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::CoincidentPoints(i, j));
                }
            }
        }
        Ok(Self { points, m })
    }

    /// Points on the real axis of `C^1`.
    pub fn on_real_line(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| vec![Complex64::new(x, 0.0)]).collect())
    }

    /// Two points of `C^m` at distance `r` along the first coordinate.
    pub fn pair(r: f64, m: usize) -> Result<Self> {
        let mut b = vec![Complex64::new(0.0, 0.0); m];
        b[0] = Complex64::new(r, 0.0);
        Self::new(vec![vec![Complex64::new(0.0, 0.0); m], b])
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn point(&self, p: usize) -> &[Complex64] {
        &self.points[p]
    }

    pub fn distance(&self, p: usize, q: usize) -> f64 {
        dist(&self.points[p], &self.points[q])
    }

    pub fn min_distance(&self) -> f64 {
        self.pair_distances().fold(f64::INFINITY, f64::min)
    }

    pub fn max_distance(&self) -> f64 {
        self.pair_distances().fold(0.0, f64::max)
    }

    fn pair_distances(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n();
        (0..n).flat_map(move |p| (p + 1..n).map(move |q| self.distance(p, q)))
    }

    /// The sub-configuration made of the listed points, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        Self::new(idx.iter().map(|&i| self.points[i].clone()).collect())
    }

    /// Applies `z ↦ f(z)` to every point.
    pub fn map_points(&self, f: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Result<Self> {
        Self::new(self.points.iter().map(|p| f(p)).collect())
    }
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Value/derivative covariance blocks `[[A, B], [B*, C]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBlocks {
    pub a: DMatrix<Complex64>,
    pub b: DMatrix<Complex64>,
    pub c: DMatrix<Complex64>,
    pub n: usize,
    pub m: usize,
}

impl CovarianceBlocks {
    /// The full `(n + mn)`-dimensional covariance.
    pub fn assembled(&self) -> Result<HermitianMatrix> {
        let (n, mn) = (self.n, self.n * self.m);
        let mut full = DMatrix::zeros(n + mn, n + mn);
        full.view_mut((0, 0), (n, n)).copy_from(&self.a);
        full.view_mut((0, n), (n, mn)).copy_from(&self.b);
        full.view_mut((n, 0), (mn, n)).copy_from(&self.b.adjoint());
        full.view_mut((n, n), (mn, mn)).copy_from(&self.c);
        HermitianMatrix::new(full)
    }

    /// Largest entrywise modulus of the difference between two block sets.
    pub fn max_abs_diff(&self, other: &CovarianceBlocks) -> f64 {
        let d = |x: &DMatrix<Complex64>, y: &DMatrix<Complex64>| {
            x.iter().zip(y.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        };
        d(&self.a, &other.a).max(d(&self.b, &other.b)).max(d(&self.c, &other.c))
    }
}

/// Finite-level context for `O(N) → CP^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteNContext {
    pub level: u64,
    pub m: usize,
    /// `dim H^0(CP^m, O(N)) = binomial(N + m, m)`.
    pub d_n: u64,
}

impl FiniteNContext {
    pub fn new(level: u64, m: usize) -> Result<Self> {
        if level == 0 || m == 0 {
            return Err(Error::Input("level and dimension must be positive".into()));
        }
        let mut d: u64 = 1;
        for j in 1..=m as u64 {
            d = d
                .checked_mul(level + j)
                .map(|x| x / j)
                .ok_or_else(|| Error::Input(format!("binomial({}, {m}) overflows", level + m as u64)))?;
        }
        Ok(Self { level, m, d_n: d })
    }
}

/// Limit blocks `A∞, B∞, C∞` at a configuration (π^m-scaled).
pub fn limit_blocks(z: &PointConfiguration) -> CovarianceBlocks {
    let (n, m) = (z.n(), z.m());
    let pts = z.points();
    let a = DMatrix::from_fn(n, n, |p, pp| {
        let cross: Complex64 = pts[p].iter().zip(&pts[pp]).map(|(x, y)| x * y.conj()).sum();
        let d2: f64 = pts[p].iter().zip(&pts[pp]).map(|(x, y)| (x - y).norm_sqr()).sum();
        Complex64::from_polar((-0.5 * d2).exp(), cross.im)
    });
    let b = DMatrix::from_fn(n, n * m, |p, col| {
        let (pp, qq) = (col / m, col % m);
        (pts[p][qq] - pts[pp][qq]) * a[(p, pp)]
    });
    let c = DMatrix::from_fn(n * m, n * m, |row, col| {
        let (p, q) = (row / m, row % m);
        let (pp, qq) = (col / m, col % m);
        let delta = if q == qq { 1.0 } else { 0.0 };
        (delta + (pts[pp][q].conj() - pts[p][q].conj()) * (pts[p][qq] - pts[pp][qq])) * a[(p, pp)]
    });
    CovarianceBlocks { a, b, c, n, m }
}

fn condition_number(a: &DMatrix<Complex64>) -> Result<f64> {
    let ev = HermitianMatrix::new(a.clone())?.eigenvalues();
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    Ok(if lo <= 0.0 { f64::INFINITY } else { hi / lo })
}

/// Conditional derivative covariance `Λ = C − B* A^{-1} B`.
pub fn lambda_schur(blocks: &CovarianceBlocks) -> Result<HermitianMatrix> {
    let condition = condition_number(&blocks.a)?;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::NearCoincident { condition });
    }
    let solved = blocks
        .a
        .clone()
        .lu()
        .solve(&blocks.b)
        .ok_or(Error::NearCoincident { condition })?;
    HermitianMatrix::new(&blocks.c - blocks.b.adjoint() * solved)
}

/// Finite-`N` blocks on `CP^1`, evaluated at affine points `ζ/√N`.
///
/// With `P(z, w) = (1 + z w̄)^N ((1+|z|²)(1+|w|²))^{-N/2}` (the lifted kernel
/// at zero fibre angle divided by `d_N/π`), the horizontal derivatives are
/// `∂̄^h_w P = β P` and `∂^h_z ∂̄^h_w P = (N/(1+z w̄)² + α β) P`, where
/// `β = N (z/(1+z w̄) − w/(1+|w|²))` and `α = N (w̄/(1+z w̄) − z̄/(1+|z|²))`.
/// Each derivative carries a factor `N^{-1/2}`.
pub fn finite_blocks_cp1(z: &PointConfiguration, ctx: &FiniteNContext) -> Result<CovarianceBlocks> {
    if z.m() != 1 || ctx.m != 1 {
        return Err(Error::Input("finite-N blocks are implemented for m = 1 only".into()));
    }
    let n = z.n();
    let level = ctx.level as f64;
    let s = level.sqrt();
    let pts: Vec<Complex64> = z.points().iter().map(|p| p[0] / s).collect();
    let one = Complex64::new(1.0, 0.0);
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    let mut c = DMatrix::zeros(n, n);
    for p in 0..n {
        for pp in 0..n {
            let (zp, wp) = (pts[p], pts[pp]);
            let g = one + zp * wp.conj();
            if g.norm() == 0.0 {
                return Err(Error::Input("antipodal points have no common affine chart".into()));
            }
            let hz = 1.0 + zp.norm_sqr();
            let hw = 1.0 + wp.norm_sqr();
            let kernel = (level * (g.ln() - 0.5 * (hz.ln() + hw.ln()))).exp();
            let beta = level * (zp / g - wp / hw);
            let alpha = level * (wp.conj() / g - zp.conj() / hz);
            a[(p, pp)] = kernel;
            b[(p, pp)] = beta * kernel / s;
            c[(p, pp)] = (level / (g * g) + alpha * beta) * kernel / level;
        }
    }
    Ok(CovarianceBlocks { a, b, c, n, m: 1 })
}

/// Prefactor `(π^n det A)^{-k}` and the conditional law `γ_{I_k ⊗ Λ}` of the
/// derivatives given vanishing values.
pub fn assemble_conditional(blocks: &CovarianceBlocks, k: usize) -> Result<(f64, GeneralizedGaussian)> {
    if k == 0 || k > blocks.m {
        return Err(Error::Input(format!("codimension k={k} must lie in 1..={}", blocks.m)));
    }
    let lambda = lambda_schur(blocks)?;
    let det = blocks.a.clone().lu().determinant();
    if !(det.re > 0.0) || det.im.abs() > 1e-10 * det.re.abs().max(1e-300) {
        return Err(Error::Internal(format!("det A = {det} is not positive")));
    }
    let prefactor = (PI.powi(blocks.n as i32) * det.re).powi(-(k as i32));
    let gg = psd_factorize(&lambda.kron_identity(k), DEFAULT_PSD_TOL)?;
    Ok((prefactor, gg))
}
