use serde::{Deserialize, Serialize};

use crate::covariance::PointConfiguration;
use crate::error::{Error, Result};

/// Largest vertex count accepted by [`decay_bound`].
pub const MAX_GRAPH_VERTICES: usize = 5;

/// Oriented multigraph on `{0, …, n−1}`, connected, with in-degree equal to
/// out-degree (at least one) at every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl BalancedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.iter().any(|&(i, f)| i >= n || f >= n || i == f) {
            return Err(Error::Input("edge endpoints must be distinct vertices in range".into()));
        }
        let g = Self { n, edges };
        if !g.is_balanced() || !g.is_connected() {
            return Err(Error::Input("graph must be connected with zero boundary".into()));
        }
        Ok(g)
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn is_balanced(&self) -> bool {
        let mut out = vec![0usize; self.n];
        let mut inc = vec![0usize; self.n];
        for &(i, f) in &self.edges {
            out[i] += 1;
            inc[f] += 1;
        }
        out.iter().zip(&inc).all(|(o, i)| o == i && *o >= 1)
    }

    fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(i, f) in &self.edges {
                for (a, b) in [(i, f), (f, i)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `∏_l |z^{i(l)} − z^{f(l)}|² e^{−|z^{i(l)} − z^{f(l)}|²/2}`.
    pub fn weight(&self, config: &PointConfiguration) -> f64 {
        self.edges.iter().map(|&(i, f)| edge_weight(config.distance(i, f))).product()
    }
}

pub(crate) fn edge_weight(r: f64) -> f64 {
    let t = r * r;
    t * (-0.5 * t).exp()
}

fn edge_types(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..n).filter(move |&f| f != i).map(move |f| (i, f))).collect()
}

/// Visits every balanced connected multigraph on `n` vertices with at most
/// `max_edges` edges. Each graph is validated structurally before the visit.
pub fn for_each_balanced_graph(n: usize, max_edges: usize, mut visit: impl FnMut(&BalancedGraph)) {
    let types = edge_types(n);
    let mut mult = vec![0usize; types.len()];
    enumerate(&types, &mut mult, 0, max_edges, n, &mut |edges| {
        if let Ok(g) = BalancedGraph::new(n, edges) {
            visit(&g);
        }
        true
    });
}

// Recursively assigns edge multiplicities; `leaf` returns false to stop.
fn enumerate(
    types: &[(usize, usize)],
    mult: &mut [usize],
    pos: usize,
    budget: usize,
    n: usize,
    leaf: &mut dyn FnMut(Vec<(usize, usize)>) -> bool,
) -> bool {
    if pos == types.len() {
        let edges: Vec<_> = types
            .iter()
            .zip(mult.iter())
            .flat_map(|(&e, &k)| std::iter::repeat_n(e, k))
            .collect();
        if edges.is_empty() {
            return true;
        }
        return leaf(edges);
    }
    for k in 0..=budget {
        mult[pos] = k;
        if !enumerate(types, mult, pos + 1, budget - k, n, leaf) {
            return false;
        }
    }
    mult[pos] = 0;
    true
}

/// `d(z)` with the edge count capped at `max_edges`, by branch and bound:
/// every edge factor is below one, so a partial product that is already no
/// better than the incumbent cannot improve.
pub fn decay_bound_with_cap(config: &PointConfiguration, max_edges: usize) -> Result<f64> {
    let n = config.n();
    if n > MAX_GRAPH_VERTICES {
        return Err(Error::SizeLimit { size: n, limit: MAX_GRAPH_VERTICES });
    }
    if n == 1 {
        return Ok(1.0);
    }
    let types = edge_types(n);
    let weights: Vec<f64> = types.iter().map(|&(i, f)| edge_weight(config.distance(i, f))).collect();
    let mut best = 0.0;
    let mut mult = vec![0usize; types.len()];
    search(&types, &weights, &mut mult, 0, max_edges, 1.0, n, &mut best);
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn search(
    types: &[(usize, usize)],
    weights: &[f64],
    mult: &mut [usize],
    pos: usize,
    budget: usize,
    product: f64,
    n: usize,
    best: &mut f64,
) {
    if product <= *best {
        return;
    }
    if pos == types.len() {
        let edges: Vec<_> = types
            .iter()
            .zip(mult.iter())
            .flat_map(|(&e, &k)| std::iter::repeat_n(e, k))
            .collect();
        if !edges.is_empty() && BalancedGraph::new(n, edges).is_ok() {
            *best = product;
        }
        return;
    }
    let mut p = product;
    for k in 0..=budget {
        mult[pos] = k;
        search(types, weights, mult, pos + 1, budget - k, p, n, best);
        p *= weights[pos];
        if p <= *best {
            break;
        }
    }
    mult[pos] = 0;
}

/// `d(z) = max_G ∏_l |z^{i(l)} − z^{f(l)}|² e^{−|z^{i(l)} − z^{f(l)}|²/2}` over
/// connected zero-boundary graphs with at most `2(n − 1)` edges.
pub fn decay_bound(config: &PointConfiguration) -> Result<f64> {
    let n = config.n();
    decay_bound_with_cap(config, 2 * n.saturating_sub(1))
}
