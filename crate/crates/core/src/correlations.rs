//! Kac–Rice zero correlation functions.
//!
//! `K_nkm(z) = (π^n det A)^{-k} E[∏_p det_k(Σ_q ξ^p_{jq} conj ξ^p_{j'q})]`
//! with `ξ ~ γ_{I_k ⊗ Λ}`. The normalised value divides by the one-point
//! density to the `n`-th power.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::covariance::{
    assemble_conditional, finite_blocks_cp1, limit_blocks, CovarianceBlocks, FiniteNContext,
    PointConfiguration,
};
use crate::curve::Provenance;
use crate::error::{Error, Result};
use crate::gaussian::{det_product_moment, mc_det_product_moment};

/// Below this `t` the closed pair correlation switches to its Taylor series.
pub const SERIES_BELOW: f64 = 1e-3;
/// Above this `t` the closed pair correlation equals 1 to double precision.
pub const ASYMPTOTE_ABOVE: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactWick,
    MonteCarlo { samples: usize, seed: u64 },
    ClosedForm,
}

impl Method {
    pub fn provenance(self) -> Provenance {
        match self {
            Method::ExactWick => Provenance::Wick,
            Method::MonteCarlo { .. } => Provenance::MonteCarlo,
            Method::ClosedForm => Provenance::Analytic,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRequest {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub config: PointConfiguration,
    pub method: Method,
}

impl CorrelationRequest {
    pub fn new(k: usize, config: PointConfiguration, method: Method) -> Self {
        Self { n: config.n(), k, m: config.m(), config, method }
    }

    fn validate(&self) -> Result<()> {
        if self.n != self.config.n() {
            return Err(Error::Input(format!("n={} but configuration has {} points", self.n, self.config.n())));
        }
        if self.m != self.config.m() {
            return Err(Error::DimensionMismatch { expected: self.m, actual: self.config.m() });
        }
        if self.k == 0 || self.k > self.m {
            return Err(Error::Input(format!("codimension k={} must lie in 1..={}", self.k, self.m)));
        }
        if self.method == Method::ClosedForm && !(self.n == 1 || (self.n == 2 && self.k == 1)) {
            return Err(Error::Input("closed form is available for n = 1 or (n, k) = (2, 1) only".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationValue {
    pub raw: f64,
    pub normalized: f64,
    pub std_error: Option<f64>,
    pub provenance: Provenance,
}

impl CorrelationValue {
    fn from_raw(raw: f64, std_error: Option<f64>, n: usize, k: usize, m: usize, provenance: Provenance) -> Self {
        let scale = density_one_point_unchecked(k, m).powi(-(n as i32));
        Self { raw, normalized: raw * scale, std_error, provenance }
    }

    /// Standard error of the normalised value, if any.
    pub fn normalized_std_error(&self) -> Option<f64> {
        self.std_error.map(|s| if self.raw == 0.0 { s } else { s * self.normalized / self.raw })
    }
}

fn density_one_point_unchecked(k: usize, m: usize) -> f64 {
    // m!/(m-k)! = m (m-1) ... (m-k+1)
    let falling: f64 = (m - k + 1..=m).map(|j| j as f64).product();
    falling / PI.powi(k as i32)
}

/// Expected volume density of the zero set, `m!/(π^k (m−k)!)`.
pub fn density_one_point(k: usize, m: usize) -> Result<f64> {
    if k == 0 || k > m {
        return Err(Error::Input(format!("need 1 <= k <= m, got k={k}, m={m}")));
    }
    Ok(density_one_point_unchecked(k, m))
}

fn kac_rice(blocks: &CovarianceBlocks, n: usize, k: usize, m: usize, method: Method) -> Result<(f64, Option<f64>)> {
    let (prefactor, gg) = assemble_conditional(blocks, k)?;
    match method {
        Method::ExactWick => Ok((prefactor * det_product_moment(&gg.covariance, n, k, m)?, None)),
        Method::MonteCarlo { samples, seed } => {
            let (est, se) = mc_det_product_moment(&gg.covariance, n, k, m, samples, seed)?;
            Ok((prefactor * est, Some(prefactor * se)))
        }
        Method::ClosedForm => Err(Error::Input("closed form does not use the Kac–Rice pipeline".into())),
    }
}

/// Scaling-limit correlation `K∞_nkm` at a configuration.
pub fn limit_correlation(req: &CorrelationRequest) -> Result<CorrelationValue> {
    req.validate()?;
    let (n, k, m) = (req.n, req.k, req.m);
    if req.method == Method::ClosedForm {
        let normalized = if n == 1 {
            1.0
        } else {
            let r = req.config.distance(0, 1);
            pair_correlation_closed(r * r / 2.0, m)?
        };
        let raw = normalized * density_one_point_unchecked(k, m).powi(n as i32);
        return Ok(CorrelationValue { raw, normalized, std_error: None, provenance: Provenance::Analytic });
    }
    let blocks = limit_blocks(&req.config);
    let (raw, se) = kac_rice(&blocks, n, k, m, req.method)?;
    Ok(CorrelationValue::from_raw(raw, se, n, k, m, req.method.provenance()))
}

/// Closed-form normalised pair correlation of hypersurface zeros in `C^m`,
/// as a function of `t = |z¹ − z²|²/2`.
pub fn pair_correlation_closed(t: f64, m: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Input(format!("t must be positive and finite, got {t}")));
    }
    if m == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    let mf = m as f64;
    let tail = (mf - 1.0) / (2.0 * mf);
    if t < SERIES_BELOW {
        let inv = 1.0 / mf;
        let inv2 = inv * inv;
        let c1 = 1.0 / 6.0 + inv / 2.0 + inv2 / 3.0;
        let c3 = -(1.0 / 90.0 + 7.0 * inv / 90.0 + 2.0 * inv2 / 15.0);
        let c5 = 1.0 / 945.0 + 11.0 * inv / 945.0 + 2.0 * inv2 / 63.0;
        let t2 = t * t;
        return Ok(tail / t + tail + t * (c1 + t2 * (c3 + t2 * c5)));
    }
    if t > ASYMPTOTE_ABOVE {
        return Ok(1.0);
    }
    let (sh, ch) = (t.sinh(), t.cosh());
    let num = (0.5 * (mf * mf + mf) * sh * sh + t * t) * ch - (mf + 1.0) * t * sh;
    Ok(num / (mf * mf * sh * sh * sh) + tail)
}

/// Leading small-distance behaviour `(m+1)/4 · r^{4−2m}` of the point-pair
/// correlation (`k = m`).
pub fn small_r_asymptote(r: f64, m: usize) -> f64 {
    (m as f64 + 1.0) / 4.0 * r.powi(4 - 2 * m as i32)
}

/// Finite-`N` correlation of zeros of SU(2) polynomials on `CP^1`, `k = 1`.
///
/// Points are in scaled coordinates (affine coordinate `ζ/√N`); the value is
/// the density per unit Fubini–Study area divided by `N^n`, directly
/// comparable with the `m = 1` limit.
pub fn finite_correlation_cp1(level: u64, config: &PointConfiguration) -> Result<CorrelationValue> {
    if config.m() != 1 {
        return Err(Error::Input("finite-N correlations are available on CP^1 only".into()));
    }
    let n = config.n();
    let ctx = FiniteNContext::new(level, 1)?;
    let blocks = finite_blocks_cp1(config, &ctx)?;
    let (raw, _) = kac_rice(&blocks, n, 1, 1, Method::ExactWick)?;
    let s = (level as f64).sqrt();
    let area: f64 = config
        .points()
        .iter()
        .map(|p| (1.0 + (p[0] / s).norm_sqr()).powi(2))
        .product();
    Ok(CorrelationValue::from_raw(raw * area, None, n, 1, 1, Provenance::Wick))
}
