//! Simultaneous polynomial root finding (Aberth–Ehrlich).
//!
//! Initial approximations come from the upper convex hull of the points
//! `(j, ln|a_j|)`, which places roots on circles at the right scales even when
//! the moduli span many orders of magnitude. Evaluation switches to the
//! reversed polynomial outside the unit disc.

use std::f64::consts::PI;

use num_complex::Complex64;

const MAX_ITER: usize = 500;

/// `p(z)`, `p'(z)` and `Σ |a_j| |z|^j`, by Horner's rule. `a[j]` multiplies `z^j`.
fn horner(a: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let az = z.norm();
    for c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        scale = scale * az + c.norm();
    }
    (p, dp, scale)
}

/// Newton correction `p(z)/p'(z)` and relative backward error `|p(z)|/Σ|a_j||z|^j`.
pub(crate) fn newton_ratio(a: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let degree = (a.len() - 1) as f64;
    if z.norm() <= 1.0 {
        let (p, dp, scale) = horner(a, z);
        let rel = if scale > 0.0 { p.norm() / scale } else { 0.0 };
        return (p / dp, rel);
    }
    // p(z) = z^d q(y) with y = 1/z and q the reversed polynomial.
    let y = z.inv();
    let rev: Vec<Complex64> = a.iter().rev().copied().collect();
    let (q, dq, scale) = horner(&rev, y);
    let rel = if scale > 0.0 { q.norm() / scale } else { 0.0 };
    (z * q / (degree * q - y * dq), rel)
}

fn initial_guesses(a: &[Complex64]) -> Vec<Complex64> {
    let d = a.len() - 1;
    let pts: Vec<(usize, f64)> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, c)| (j, c.norm().ln()))
        .collect();
    // Upper convex hull, monotone chain.
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (o, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (q.0 as f64 - o.0 as f64) * (p.1 - o.1) - (q.1 - o.1) * (p.0 as f64 - o.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(d);
    for (s, w) in hull.windows(2).enumerate() {
        let (i, li) = w[0];
        let (k, lk) = w[1];
        let count = k - i;
        let radius = ((li - lk) / count as f64).exp();
        let offset = 2.0 * PI * (s as f64 + 0.25) / hull.len() as f64 + 0.4;
        for l in 0..count {
            out.push(Complex64::from_polar(radius, 2.0 * PI * l as f64 / count as f64 + offset));
        }
    }
    out
}

/// Roots of `Σ a_j z^j`, with `a[0] != 0` and `a[d] != 0`.
///
/// Returns the roots and the largest relative backward error after one
/// Newton polishing step.
pub(crate) fn aberth(a: &[Complex64]) -> (Vec<Complex64>, f64) {
    let d = a.len() - 1;
    if d == 0 {
        return (Vec::new(), 0.0);
    }
    if d == 1 {
        return (vec![-a[0] / a[1]], 0.0);
    }
    let mut z = initial_guesses(a);
    let mut done = vec![false; d];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (ratio, rel) = newton_ratio(a, z[i]);
            if rel <= 4.0 * f64::EPSILON * d as f64 {
                done[i] = true;
                continue;
            }
            all_done = false;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
            }
        }
        if all_done {
            break;
        }
    }
    let mut worst: f64 = 0.0;
    for zi in z.iter_mut() {
        let (ratio, rel) = newton_ratio(a, *zi);
        let candidate = *zi - ratio;
        let (_, rel_new) = newton_ratio(a, candidate);
        if rel_new.is_finite() && rel_new <= rel {
            *zi = candidate;
            worst = worst.max(rel_new);
        } else {
            worst = worst.max(rel);
        }
    }
    (z, worst)
}
