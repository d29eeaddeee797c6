//! Connected (truncated) correlation functions and their decay.

mod graphs;
mod partitions;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::correlations::{limit_correlation, CorrelationRequest, Method};
use crate::covariance::PointConfiguration;
use crate::error::{Error, Result};

pub use graphs::{decay_bound, decay_bound_with_cap, for_each_balanced_graph, BalancedGraph, MAX_GRAPH_VERTICES};
pub use partitions::{partitions, Partition, MAX_PARTITION_SIZE};

/// Minimum pairwise distance required by [`decay_check`].
pub const MIN_SEPARATION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectedValue {
    pub value: f64,
    pub order: usize,
}

/// Memoises an evaluator over point subsets, keyed by the sorted index set.
struct SubsetCache<F> {
    eval: F,
    cache: HashMap<Vec<usize>, f64>,
}

impl<F: FnMut(&[usize]) -> Result<f64>> SubsetCache<F> {
    fn new(eval: F) -> Self {
        Self { eval, cache: HashMap::new() }
    }

    fn get(&mut self, block: &[usize]) -> Result<f64> {
        let mut key = block.to_vec();
        key.sort_unstable();
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let v = (self.eval)(&key)?;
        self.cache.insert(key, v);
        Ok(v)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn connected_on<F: FnMut(&[usize]) -> Result<f64>>(labels: &[usize], cache: &mut SubsetCache<F>) -> Result<f64> {
    let mut total = 0.0;
    for blocks in partitions::partitions_of(labels)? {
        let l = blocks.len();
        let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
        let mut prod = sign * factorial(l - 1);
        for b in &blocks {
            prod *= cache.get(b)?;
        }
        total += prod;
    }
    Ok(total)
}

/// `T̃_n = Σ_G (−1)^{l+1} (l−1)! ∏_j K̃(G_j)` over set partitions `G` of the
/// configuration. `k_eval` receives sorted point indices and returns `K̃` of
/// that sub-configuration; each subset is evaluated once.
pub fn connected_correlation<F>(config: &PointConfiguration, k_eval: F) -> Result<ConnectedValue>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    let labels: Vec<usize> = (0..config.n()).collect();
    let mut cache = SubsetCache::new(k_eval);
    Ok(ConnectedValue { value: connected_on(&labels, &mut cache)?, order: config.n() })
}

/// Inverse of [`connected_correlation`]: `K̃ = Σ_G ∏_j T̃(G_j)`.
pub fn moebius_reconstruct<F>(config: &PointConfiguration, t_eval: F) -> Result<f64>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    let labels: Vec<usize> = (0..config.n()).collect();
    let mut cache = SubsetCache::new(t_eval);
    let mut total = 0.0;
    for blocks in partitions::partitions_of(&labels)? {
        let mut prod = 1.0;
        for b in &blocks {
            prod *= cache.get(b)?;
        }
        total += prod;
    }
    Ok(total)
}

/// Connected correlations of every sub-configuration, computed from the
/// same cached `K̃` values. Keys are sorted index sets.
pub fn connected_table<F>(config: &PointConfiguration, k_eval: F) -> Result<HashMap<Vec<usize>, f64>>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    let n = config.n();
    let mut cache = SubsetCache::new(k_eval);
    let mut out = HashMap::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let t = connected_on(&subset, &mut cache)?;
        out.insert(subset, t);
    }
    Ok(out)
}

/// Evaluator returning the exact-Wick normalised `K̃_{|S|,k,m}` of a subset `S`.
pub fn exact_k_evaluator(config: &PointConfiguration, k: usize) -> impl FnMut(&[usize]) -> Result<f64> + '_ {
    move |idx: &[usize]| {
        if idx.len() == 1 {
            return Ok(1.0);
        }
        let sub = config.subset(idx)?;
        Ok(limit_correlation(&CorrelationRequest::new(k, sub, Method::ExactWick))?.normalized)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    /// Largest pairwise distance `R`.
    pub max_distance: f64,
    pub connected: f64,
    pub bound: f64,
    /// `|T̃| / d(z)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub rows: Vec<DecayRow>,
    pub max_ratio: f64,
    /// Least-squares slope of `log|T̃|` against `R²`.
    pub fitted_slope: f64,
    /// `−1/(n−1)`, the exponent of the `R^{4n−4} e^{−R²/(n−1)}` envelope.
    pub envelope_slope: f64,
}

impl DecayReport {
    /// Fitted slope within `slack` of the envelope exponent.
    pub fn slope_ok(&self, slack: f64) -> bool {
        self.fitted_slope <= self.envelope_slope + slack
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Measures `|T̃_n| / d(z)` and the decay rate of `|T̃_n|` in `R²` over a
/// family of configurations, using exact-Wick `K̃` values.
pub fn decay_check(k: usize, configs: &[PointConfiguration]) -> Result<DecayReport> {
    let first = configs.first().ok_or_else(|| Error::Input("empty configuration family".into()))?;
    let (n, m) = (first.n(), first.m());
    if n < 2 {
        return Err(Error::Input("decay check needs n >= 2".into()));
    }
    let mut rows = Vec::with_capacity(configs.len());
    for z in configs {
        if z.n() != n || z.m() != m {
            return Err(Error::Input("configuration family must share n and m".into()));
        }
        if z.min_distance() < MIN_SEPARATION {
            return Err(Error::Input(format!(
                "minimum separation {:.3} is below {MIN_SEPARATION}",
                z.min_distance()
            )));
        }
        let t = connected_correlation(z, exact_k_evaluator(z, k))?.value;
        let d = decay_bound(z)?;
        rows.push(DecayRow { max_distance: z.max_distance(), connected: t, bound: d, ratio: t.abs() / d });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let x: Vec<f64> = rows.iter().map(|r| r.max_distance.powi(2)).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.connected.abs().ln()).collect();
    let fitted_slope = if rows.len() >= 2 { fit_slope(&x, &y) } else { f64::NAN };
    Ok(DecayReport { n, k, m, rows, max_ratio, fitted_slope, envelope_slope: -1.0 / (n as f64 - 1.0) })
}
