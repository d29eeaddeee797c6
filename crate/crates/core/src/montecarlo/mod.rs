//! Random SU(2) polynomials and the empirical pair correlation of their zeros.
//!
//! Roots of each sampled polynomial are placed on the Riemann sphere with the
//! Fubini–Study distance `d(z, w) = arctan|(z − w)/(1 + z w̄)|` (total area `π`,
//! Euclidean at the origin of the affine chart). Every unordered pair of
//! roots contributes `u = √N d` to a histogram, and counts are normalised by
//! the exact expected count of a point process with flat pair correlation.

mod roots;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::pair_correlation_closed;
use crate::curve::{CorrelationCurve, CurvePoint, Provenance};
use crate::error::{Error, Result};
use crate::rng::{circular_normal, substream};

/// Leading coefficients below this fraction of the largest are roots at infinity.
/// For SU(2) samples the comparison uses the unweighted Gaussians.
pub const INFINITY_TOL: f64 = 1e-13;
/// Largest accepted relative backward error of a polished root.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// One random polynomial `Σ_j c_j √binom(N, j) z^j` in the affine chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SU2Sample {
    pub level: usize,
    /// The i.i.d. standard circular Gaussians `c_j`.
    pub gaussians: Vec<Complex64>,
    /// `coeffs[j] = c_j √binom(N, j)` multiplies `z^j`.
    pub coeffs: Vec<Complex64>,
}

fn sqrt_binomials(level: usize) -> Vec<f64> {
    let mut log = Vec::with_capacity(level + 1);
    let mut acc = 0.0f64;
    log.push(0.0);
    for j in 1..=level {
        acc += ((level - j + 1) as f64).ln() - (j as f64).ln();
        log.push(acc);
    }
    // Rescale only when the central binomial would overflow; roots do not
    // depend on an overall factor.
    let peak = log.iter().copied().fold(0.0, f64::max) / 2.0;
    let shift = if peak > 600.0 { peak } else { 0.0 };
    log.into_iter().map(|l| (l / 2.0 - shift).exp()).collect()
}

fn draw_su2(level: usize, weights: &[f64], seed: u64, index: u64) -> SU2Sample {
    let mut rng = substream(seed, index);
    let gaussians: Vec<Complex64> = (0..=level).map(|_| circular_normal(&mut rng)).collect();
    let coeffs = gaussians.iter().zip(weights).map(|(c, w)| c * w).collect();
    SU2Sample { level, gaussians, coeffs }
}

/// Sample `index` of the SU(2) ensemble of degree `level` under `seed`.
pub fn sample_su2(level: usize, seed: u64, index: u64) -> Result<SU2Sample> {
    if level == 0 {
        return Err(Error::Input("degree must be at least 1".into()));
    }
    Ok(draw_su2(level, &sqrt_binomials(level), seed, index))
}

/// Zeros of one polynomial on the Riemann sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub affine_roots: Vec<Complex64>,
    pub roots_at_infinity: usize,
    /// Largest relative backward error `|p(z)| / Σ|a_j||z|^j` over the affine roots.
    pub max_residual: f64,
}

impl ZeroSet {
    pub fn total(&self) -> usize {
        self.affine_roots.len() + self.roots_at_infinity
    }

    /// All zeros as sphere points; `None` is the point at infinity.
    pub fn sphere_points(&self) -> Vec<Option<Complex64>> {
        self.affine_roots
            .iter()
            .copied()
            .map(Some)
            .chain(std::iter::repeat_n(None, self.roots_at_infinity))
            .collect()
    }
}

/// Roots of `Σ coeffs[j] z^j` of formal degree `coeffs.len() − 1`.
///
/// Leading coefficients below `INFINITY_TOL` times the largest count as
/// roots at infinity.
pub fn roots_of(coeffs: &[Complex64]) -> Result<ZeroSet> {
    solve(coeffs, leading_negligible(coeffs)?)
}

/// Number of trailing entries of `c` below `INFINITY_TOL · max|c|`.
fn leading_negligible(c: &[Complex64]) -> Result<usize> {
    let max = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::DegenerateSample);
    }
    Ok(c.iter().rev().take_while(|x| x.norm() < INFINITY_TOL * max).count())
}

fn solve(coeffs: &[Complex64], roots_at_infinity: usize) -> Result<ZeroSet> {
    let top = coeffs.len() - 1 - roots_at_infinity;
    let low = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut affine_roots = vec![Complex64::new(0.0, 0.0); low];
    let (found, max_residual) = roots::aberth(&coeffs[low..=top]);
    if !(max_residual <= RESIDUAL_TOL) {
        return Err(Error::Internal(format!("root residual {max_residual:.3e} exceeds {RESIDUAL_TOL:e}")));
    }
    affine_roots.extend(found);
    Ok(ZeroSet { affine_roots, roots_at_infinity, max_residual })
}

/// Zeros of a sampled SU(2) polynomial.
///
/// Roots at infinity are decided on the unweighted Gaussians `c_j`: the
/// binomial weights make the top coefficient of a degree-`N` polynomial tiny
/// next to the central ones even when the root is at moderate modulus.
pub fn roots(sample: &SU2Sample) -> Result<ZeroSet> {
    solve(&sample.coeffs, leading_negligible(&sample.gaussians)?)
}

/// Fubini–Study distance `arctan|(z − w)/(1 + z w̄)|` on the Riemann sphere.
pub fn fs_distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    (num / (Complex64::new(1.0, 0.0) + z * w.conj()).norm()).atan()
}

/// [`fs_distance`] extended to the point at infinity (`None`).
pub fn fs_distance_ext(z: Option<Complex64>, w: Option<Complex64>) -> f64 {
    match (z, w) {
        (Some(a), Some(b)) => fs_distance(a, b),
        (None, None) => 0.0,
        (Some(a), None) | (None, Some(a)) => {
            let r = a.norm();
            if r == 0.0 {
                PI / 2.0
            } else {
                (1.0 / r).atan()
            }
        }
    }
}

/// Histogram of scaled pair distances `u = √N d_FS` over `[0, u_max)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairHistogram {
    pub u_max: f64,
    pub bins: usize,
    /// Unordered pairs per bin.
    pub counts: Vec<u64>,
    pub samples: usize,
    pub level: usize,
}

impl PairHistogram {
    fn empty(level: usize, u_max: f64, bins: usize) -> Self {
        Self { u_max, bins, counts: vec![0; bins], samples: 0, level }
    }

    pub fn bin_width(&self) -> f64 {
        self.u_max / self.bins as f64
    }

    pub fn bin_edges(&self, b: usize) -> (f64, f64) {
        let w = self.bin_width();
        (b as f64 * w, (b + 1) as f64 * w)
    }

    fn add_points(&mut self, pts: &[Option<Complex64>]) {
        let s = (self.level as f64).sqrt();
        let w = self.bin_width();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let u = s * fs_distance_ext(pts[i], pts[j]);
                if u < self.u_max {
                    let b = ((u / w) as usize).min(self.bins - 1);
                    self.counts[b] += 1;
                }
            }
        }
        self.samples += 1;
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.samples += other.samples;
        self
    }

    /// Expected unordered pairs in bin `b` for one sample of `N` points with
    /// unit normalised pair correlation and density `N/π`:
    /// `(N²/4)(cos 2d₀ − cos 2d₁)`, from the area of the geodesic annulus on a
    /// sphere of area `π`.
    pub fn flat_expectation(&self, b: usize) -> f64 {
        let s = (self.level as f64).sqrt();
        let (u0, u1) = self.bin_edges(b);
        let (d0, d1) = ((u0 / s).min(PI / 2.0), (u1 / s).min(PI / 2.0));
        let n = self.level as f64;
        // cos 2d0 - cos 2d1 = 2 sin(d1 + d0) sin(d1 - d0)
        n * n / 2.0 * (d1 + d0).sin() * (d1 - d0).sin()
    }

    /// The universal `m = 1` pair correlation averaged over bin `b` with the
    /// annulus area element `sin(2u/√N) du`, which is what the estimator
    /// targets (composite Simpson, 32 panels).
    pub fn reference(&self, b: usize) -> Result<f64> {
        const PANELS: usize = 32;
        let s = (self.level as f64).sqrt();
        let (u0, u1) = self.bin_edges(b);
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..=PANELS {
            let u = u0 + (u1 - u0) * i as f64 / PANELS as f64;
            let w = match i {
                0 | PANELS => 1.0,
                _ if i % 2 == 1 => 4.0,
                _ => 2.0,
            };
            let area = (2.0 * u / s).min(PI).sin();
            let k = if u > 0.0 { pair_correlation_closed(u * u / 2.0, 1)? } else { 0.0 };
            num += w * area * k;
            den += w * area;
        }
        Ok(if den > 0.0 { num / den } else { f64::NAN })
    }

    /// Normalised pair correlation per bin, with Poisson standard errors.
    pub fn curve(&self, provenance: Provenance) -> CorrelationCurve {
        let mut curve = CorrelationCurve::new(provenance)
            .with_meta("level", self.level)
            .with_meta("samples", self.samples)
            .with_meta("u_max", self.u_max)
            .with_meta("bins", self.bins);
        for (b, &count) in self.counts.iter().enumerate() {
            let (u0, u1) = self.bin_edges(b);
            let denom = self.samples as f64 * self.flat_expectation(b);
            let flagged = !(denom > 0.0);
            let (value, se) = if flagged {
                (f64::NAN, f64::NAN)
            } else {
                (count as f64 / denom, (count as f64).sqrt() / denom)
            };
            curve.points.push(CurvePoint { u: 0.5 * (u0 + u1), value, std_error: Some(se), flagged });
        }
        curve
    }
}

fn check_estimator_args(level: usize, samples: usize, u_max: f64, bins: usize) -> Result<()> {
    if level < 2 {
        return Err(Error::Input("degree must be at least 2".into()));
    }
    if samples == 0 || bins == 0 {
        return Err(Error::Input("samples and bins must be positive".into()));
    }
    if !(u_max > 0.0) || !u_max.is_finite() {
        return Err(Error::Input(format!("u_max must be positive, got {u_max}")));
    }
    Ok(())
}

fn accumulate<F>(level: usize, samples: usize, u_max: f64, bins: usize, points: F) -> Result<PairHistogram>
where
    F: Fn(u64) -> Result<Vec<Option<Complex64>>> + Sync,
{
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut h = PairHistogram::empty(level, u_max, bins);
            h.add_points(&points(i)?);
            Ok(h)
        })
        .try_reduce(|| PairHistogram::empty(level, u_max, bins), |a, b| Ok(a.merge(b)))
}

/// Pair-distance histogram of SU(2) zeros and the normalised curve.
pub fn empirical_pair_correlation(
    level: usize,
    samples: usize,
    u_max: f64,
    bins: usize,
    seed: u64,
) -> Result<(PairHistogram, CorrelationCurve)> {
    empirical_pair_correlation_rotated(level, samples, u_max, bins, seed, 0.0)
}

/// As [`empirical_pair_correlation`], with every root rotated by `e^{iα}`.
pub fn empirical_pair_correlation_rotated(
    level: usize,
    samples: usize,
    u_max: f64,
    bins: usize,
    seed: u64,
    alpha: f64,
) -> Result<(PairHistogram, CorrelationCurve)> {
    check_estimator_args(level, samples, u_max, bins)?;
    let weights = sqrt_binomials(level);
    let rot = Complex64::from_polar(1.0, alpha);
    let hist = accumulate(level, samples, u_max, bins, |i| {
        let zs = roots(&draw_su2(level, &weights, seed, i))?;
        if zs.total() != level {
            return Err(Error::Internal(format!("found {} zeros for degree {level}", zs.total())));
        }
        Ok(zs.sphere_points().into_iter().map(|p| p.map(|z| z * rot)).collect())
    })?;
    let curve = hist.curve(Provenance::MonteCarlo).with_meta("seed", seed).with_meta("ensemble", "su2");
    Ok((hist, curve))
}

/// One Fubini–Study-uniform point: `√(t/(1−t)) e^{iφ}`, `t, φ/2π` uniform.
fn fs_uniform<R: Rng + ?Sized>(rng: &mut R) -> Option<Complex64> {
    let t: f64 = rng.random();
    let phi: f64 = rng.random::<f64>() * 2.0 * PI;
    if t >= 1.0 {
        return None;
    }
    Some(Complex64::from_polar((t / (1.0 - t)).sqrt(), phi))
}

/// The same estimator applied to `N` independent uniform points per sample.
/// Its expectation is `1 − 1/N` in every bin.
pub fn poisson_baseline(level: usize, samples: usize, u_max: f64, bins: usize, seed: u64) -> Result<(PairHistogram, CorrelationCurve)> {
    check_estimator_args(level, samples, u_max, bins)?;
    let hist = accumulate(level, samples, u_max, bins, |i| {
        let mut rng = substream(seed, i);
        Ok((0..level).map(|_| fs_uniform(&mut rng)).collect())
    })?;
    let curve = hist.curve(Provenance::MonteCarlo).with_meta("seed", seed).with_meta("ensemble", "poisson");
    Ok((hist, curve))
}
