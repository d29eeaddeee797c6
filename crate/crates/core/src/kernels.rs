//! Exact model Szegő kernels.
//!
//! Two models are provided: the level-`N` kernel of the reduced Heisenberg
//! group `C^m × S^1`, and the Fubini–Study kernel of `O(N) → CP^m` lifted to
//! the unit sphere `S^{2m+1}`. The Heisenberg chart on `CP^m` is fixed at the
//! base point `[1:0:…:0]`; angles are kept unreduced.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_NORM_TOL: f64 = 1e-12;

/// A point `(u, θ)` of the reduced Heisenberg group in scaled coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergPoint {
    pub u: Vec<Complex64>,
    pub theta: f64,
}

impl HeisenbergPoint {
    pub fn new(u: Vec<Complex64>, theta: f64) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::Input("Heisenberg point needs m >= 1".into()));
        }
        if !theta.is_finite() || u.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input("Heisenberg point has non-finite entries".into()));
        }
        Ok(Self { u, theta })
    }

    pub fn origin(m: usize) -> Self {
        Self { u: vec![Complex64::new(0.0, 0.0); m], theta: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// A point of the unit sphere `S^{2m+1} ⊂ C^{m+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    w: Vec<Complex64>,
}

impl SpherePoint {
    /// Wraps `w`, rejecting vectors whose norm differs from 1 by more than 1e-12.
    pub fn new(w: Vec<Complex64>) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::Input("sphere point needs at least 2 coordinates".into()));
        }
        let norm = norm(&w);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::Input(format!("sphere point has norm {norm}, expected 1")));
        }
        Ok(Self { w })
    }

    /// Normalises a nonzero vector onto the sphere.
    pub fn normalized(w: Vec<Complex64>) -> Result<Self> {
        let n = norm(&w);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Input("cannot normalise a zero or non-finite vector".into()));
        }
        Ok(Self { w: w.into_iter().map(|c| c / n).collect() })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.w
    }

    /// Complex dimension `m` of the projective space the point lies over.
    pub fn base_dim(&self) -> usize {
        self.w.len() - 1
    }

    /// Hermitian product `⟨self, other⟩ = Σ self_i conj(other_i)`.
    pub fn inner(&self, other: &SpherePoint) -> Complex64 {
        self.w.iter().zip(&other.w).map(|(a, b)| a * b.conj()).sum()
    }
}

fn norm(w: &[Complex64]) -> f64 {
    w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// A kernel value together with the level and dimension it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub level: u64,
    pub dimension: usize,
}

/// Level-`N` Szegő kernel of the reduced Heisenberg group:
/// `π^{-m} N^m e^{iN(t−s)} e^{N(ζ·η̄ − |ζ|²/2 − |η|²/2)}`.
pub fn heisenberg_szego(level: u64, x: &HeisenbergPoint, y: &HeisenbergPoint) -> Result<KernelValue> {
    if level == 0 {
        return Err(Error::Input("kernel level must be positive".into()));
    }
    let m = x.dim();
    if y.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, actual: y.dim() });
    }
    let n = level as f64;
    let cross: Complex64 = x.u.iter().zip(&y.u).map(|(a, b)| a * b.conj()).sum();
    let nx: f64 = x.u.iter().map(|c| c.norm_sqr()).sum();
    let ny: f64 = y.u.iter().map(|c| c.norm_sqr()).sum();
    let exponent = Complex64::new(0.0, n * (x.theta - y.theta)) + n * (cross - 0.5 * nx - 0.5 * ny);
    let prefactor = (n / PI).powi(m as i32);
    Ok(KernelValue { value: prefactor * exponent.exp(), level, dimension: m })
}

/// Heisenberg dilation `δ_r(u, θ) = (r u, r² θ)`.
pub fn heisenberg_dilate(r: f64, x: &HeisenbergPoint) -> Result<HeisenbergPoint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Input(format!("dilation factor must be positive, got {r}")));
    }
    Ok(HeisenbergPoint { u: x.u.iter().map(|c| c * r).collect(), theta: r * r * x.theta })
}

/// Multiplicative evaluation of `(N+m)!/(π^m N!)`.
pub(crate) fn fs_normalization(level: u64, m: usize) -> f64 {
    (1..=m).map(|j| (level as f64 + j as f64) / PI).product()
}

/// Szegő kernel of `O(N) → CP^m` on the unit sphere: `(N+m)!/(π^m N!) ⟨x,y⟩^N`.
pub fn fs_szego(level: u64, m: usize, x: &SpherePoint, y: &SpherePoint) -> Result<KernelValue> {
    if level == 0 || m == 0 {
        return Err(Error::Input("level and dimension must be positive".into()));
    }
    for p in [x, y] {
        if p.base_dim() != m {
            return Err(Error::DimensionMismatch { expected: m + 1, actual: p.coords().len() });
        }
    }
    let exponent = u32::try_from(level)
        .map_err(|_| Error::Input(format!("level {level} is too large")))?;
    let value = fs_normalization(level, m) * x.inner(y).powu(exponent);
    Ok(KernelValue { value, level, dimension: m })
}

/// Lifts affine coordinates `z` of `CP^m` and a fibre angle to the sphere:
/// `e^{iθ}(1, z_1, …, z_m)/√(1+|z|²)`.
pub fn heisenberg_lift(z: &[Complex64], theta: f64, m: usize) -> Result<SpherePoint> {
    if z.len() != m {
        return Err(Error::DimensionMismatch { expected: m, actual: z.len() });
    }
    if m == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    if !theta.is_finite() || z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Input("non-finite lift input".into()));
    }
    let scale = 1.0 / (1.0 + z.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
    let phase = Complex64::from_polar(scale, theta);
    let mut w = Vec::with_capacity(m + 1);
    w.push(phase);
    w.extend(z.iter().map(|c| c * phase));
    Ok(SpherePoint { w })
}

/// `|N^{-m} Π_N(lift(u/√N, θ/N), lift(v/√N, φ/N)) − Π^H_1((u,θ),(v,φ))|`.
pub fn scaled_kernel_residual(
    level: u64,
    m: usize,
    u: &[Complex64],
    v: &[Complex64],
    theta: f64,
    phi: f64,
) -> Result<f64> {
    if level == 0 {
        return Err(Error::Input("kernel level must be positive".into()));
    }
    let n = level as f64;
    let s = n.sqrt();
    let us: Vec<_> = u.iter().map(|c| c / s).collect();
    let vs: Vec<_> = v.iter().map(|c| c / s).collect();
    let x = heisenberg_lift(&us, theta / n, m)?;
    let y = heisenberg_lift(&vs, phi / n, m)?;
    let finite = fs_szego(level, m, &x, &y)?.value / n.powi(m as i32);
    let limit = heisenberg_szego(
        1,
        &HeisenbergPoint::new(u.to_vec(), theta)?,
        &HeisenbergPoint::new(v.to_vec(), phi)?,
    )?
    .value;
    Ok((finite - limit).norm())
}
