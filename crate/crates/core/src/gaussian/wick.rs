//! Complex Wick moments and determinant-product expectations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{psd_factorize, HermitianMatrix, DEFAULT_PSD_TOL};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Largest balanced pattern evaluated exactly.
pub const MAX_PATTERN: usize = 12;

/// Largest `n·k` for which [`det_product_moment`] expands exactly.
pub const MAX_EXACT_NK: usize = 4;

/// Monomial `∏ ξ_{holo[a]} ∏ conj(ξ_{anti[b]})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentPattern {
    pub holo: Vec<usize>,
    pub anti: Vec<usize>,
}

impl MomentPattern {
    pub fn new(holo: Vec<usize>, anti: Vec<usize>) -> Self {
        Self { holo, anti }
    }

    pub fn is_balanced(&self) -> bool {
        self.holo.len() == self.anti.len()
    }
}

/// Permanent by Ryser's formula with Gray-code column updates.
pub fn permanent(a: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray = 0usize;
    for step in 1usize..(1 << n) {
        let j = step.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray & (1 << j) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, j)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Permanent by summing over all `n!` bijections. Reference for testing.
pub fn brute_force_permanent(a: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut total = Complex64::new(0.0, 0.0);
    for_each_permutation(n, |perm, _| {
        total += (0..n).map(|i| a[(i, perm[i])]).product::<Complex64>();
    });
    total
}

/// Calls `f(perm, sign)` for every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize], i32)) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1;
    f(&perm, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            f(&perm, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `E[∏ ξ_{holo} ∏ conj ξ_{anti}]` under the circular Gaussian with covariance
/// `sigma`: the permanent of `sigma[holo[a]][anti[b]]`, or zero if unbalanced.
pub fn wick_moment(sigma: &HermitianMatrix, pattern: &MomentPattern) -> Result<Complex64> {
    let dim = sigma.dim();
    if let Some(&bad) = pattern.holo.iter().chain(&pattern.anti).find(|&&i| i >= dim) {
        return Err(Error::Input(format!("pattern index {bad} out of range for dimension {dim}")));
    }
    if !pattern.is_balanced() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = pattern.holo.len();
    if s > MAX_PATTERN {
        return Err(Error::PatternTooLarge { size: s });
    }
    let m = DMatrix::from_fn(s, s, |a, b| sigma[(pattern.holo[a], pattern.anti[b])]);
    Ok(permanent(&m))
}

fn check_shape(cov: &HermitianMatrix, n: usize, k: usize, m: usize) -> Result<()> {
    if n == 0 || k == 0 || m == 0 {
        return Err(Error::Input("n, k, m must be positive".into()));
    }
    if k > m {
        return Err(Error::Input(format!("codimension k={k} exceeds dimension m={m}")));
    }
    if cov.dim() != k * n * m {
        return Err(Error::DimensionMismatch { expected: k * n * m, actual: cov.dim() });
    }
    Ok(())
}

/// One term of `det_k(Σ_q ξ_{jq} conj ξ_{j'q})` at a single point.
struct PointTerm {
    sign: f64,
    holo: Vec<usize>,
    anti: Vec<usize>,
}

fn point_terms(p: usize, n: usize, k: usize, m: usize) -> Vec<PointTerm> {
    let flat = |j: usize, q: usize| j * n * m + p * m + q;
    let mut perms = Vec::new();
    for_each_permutation(k, |perm, sign| perms.push((perm.to_vec(), sign)));
    let mut out = Vec::new();
    let tuples = m.pow(k as u32);
    for (perm, sign) in &perms {
        for t in 0..tuples {
            let mut rem = t;
            let mut holo = Vec::with_capacity(k);
            let mut anti = Vec::with_capacity(k);
            for (j, &pj) in perm.iter().enumerate() {
                let q = rem % m;
                rem /= m;
                holo.push(flat(j, q));
                anti.push(flat(pj, q));
            }
            out.push(PointTerm { sign: *sign as f64, holo, anti });
        }
    }
    out
}

/// `E[∏_p det_{j,j'}(Σ_q ξ^p_{jq} conj ξ^p_{j'q})]` under the covariance
/// `cov = I_k ⊗ Λ`, with flat index `(j, p, q) ↦ j·n·m + p·m + q`.
///
/// Each determinant is expanded over permutations and the resulting monomials
/// are evaluated by [`wick_moment`].
pub fn det_product_moment(cov: &HermitianMatrix, n: usize, k: usize, m: usize) -> Result<f64> {
    check_shape(cov, n, k, m)?;
    if n * k > MAX_EXACT_NK {
        return Err(Error::ExactPathExceeded { nk: n * k });
    }
    let per_point: Vec<Vec<PointTerm>> = (0..n).map(|p| point_terms(p, n, k, m)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut abs_total = 0.0;
    let mut idx = vec![0usize; n];
    'outer: loop {
        let mut sign = 1.0;
        let mut pattern = MomentPattern::new(Vec::with_capacity(n * k), Vec::with_capacity(n * k));
        for (p, &i) in idx.iter().enumerate() {
            let term = &per_point[p][i];
            sign *= term.sign;
            pattern.holo.extend_from_slice(&term.holo);
            pattern.anti.extend_from_slice(&term.anti);
        }
        let v = wick_moment(cov, &pattern)? * sign;
        abs_total += v.norm();
        total += v;
        for p in 0..n {
            idx[p] += 1;
            if idx[p] < per_point[p].len() {
                continue 'outer;
            }
            idx[p] = 0;
        }
        break;
    }
    let scale = total.re.abs();
    if total.im.abs() > 1e-10 * scale + 1e-15 * abs_total {
        return Err(Error::Internal(format!(
            "determinant moment has imaginary part {:.3e} against real part {:.3e}",
            total.im, total.re
        )));
    }
    if total.re < 0.0 {
        if total.re.abs() > 1e-12 * abs_total {
            return Err(Error::Internal(format!("determinant moment is negative: {:.6e}", total.re)));
        }
        return Ok(0.0);
    }
    Ok(total.re)
}

/// Monte Carlo estimate of [`det_product_moment`] with its standard error.
///
/// Per-draw values come from the substreams `(seed, i)` and are summed in
/// index order, so the estimate is bit-identical for any thread count.
pub fn mc_det_product_moment(
    cov: &HermitianMatrix,
    n: usize,
    k: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_shape(cov, n, k, m)?;
    if samples < 1000 {
        return Err(Error::Input(format!("at least 1000 samples required, got {samples}")));
    }
    let g = psd_factorize(cov, DEFAULT_PSD_TOL)?;
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let xi = g.draw(&mut substream(seed, i));
            (0..n)
                .map(|p| {
                    let at = |j: usize, q: usize| xi[j * n * m + p * m + q];
                    let gram = DMatrix::from_fn(k, k, |j, jp| (0..m).map(|q| at(j, q) * at(jp, q).conj()).sum::<Complex64>());
                    gram.determinant().re
                })
                .product()
        })
        .collect();
    let count = samples as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    Ok((mean, (var / count).sqrt()))
}
