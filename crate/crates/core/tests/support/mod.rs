//! Independent oracles shared by the integration tests.
//!
//! The finite-difference oracle rebuilds derivative covariance blocks from
//! kernel values alone, by Richardson-extrapolated central differences of the
//! kernel in real coordinates and fibre angles.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use zerocorr::{
    fs_szego, heisenberg_lift, heisenberg_szego, HeisenbergPoint, PointConfiguration,
};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Step used by the oracle; Richardson extrapolation removes the `h²` term.
pub const FD_STEP: f64 = 1e-3;

/// `f'(0)` by central differences at `h` and `h/2`, extrapolated.
pub fn richardson(f: impl Fn(f64) -> Complex64, h: f64) -> Complex64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// A real direction in the kernel's argument space.
#[derive(Debug, Clone, Copy)]
pub enum Dir {
    XRe(usize),
    XIm(usize),
    XAngle,
    YRe(usize),
    YIm(usize),
    YAngle,
}

/// Kernel as a function of two points and two fibre angles.
pub trait Kernel {
    fn eval(&self, x: &[Complex64], theta: f64, y: &[Complex64], phi: f64) -> Complex64;
    /// Coefficient `c(z)` of the horizontal lift `∂_z + (i/2) c(z) z̄ ∂_θ`.
    fn connection(&self, z: &[Complex64]) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct Args<'a> {
    pub x: &'a [Complex64],
    pub y: &'a [Complex64],
}

fn shifted(k: &dyn Kernel, a: Args, moves: &[(Dir, f64)]) -> Complex64 {
    let (mut x, mut y) = (a.x.to_vec(), a.y.to_vec());
    let (mut theta, mut phi) = (0.0, 0.0);
    for &(d, t) in moves {
        match d {
            Dir::XRe(q) => x[q] += t,
            Dir::XIm(q) => x[q] += c(0.0, t),
            Dir::XAngle => theta += t,
            Dir::YRe(q) => y[q] += t,
            Dir::YIm(q) => y[q] += c(0.0, t),
            Dir::YAngle => phi += t,
        }
    }
    k.eval(&x, theta, &y, phi)
}

/// `∂^h_{z_q} = ½(∂_x − i∂_y) + (i/2) c z̄_q ∂_θ` on the first argument.
pub fn holo_lift(k: &dyn Kernel, x: &[Complex64], q: usize) -> Vec<(Complex64, Dir)> {
    let cz = k.connection(x);
    vec![(c(0.5, 0.0), Dir::XRe(q)), (c(0.0, -0.5), Dir::XIm(q)), (0.5 * I * cz * x[q].conj(), Dir::XAngle)]
}

/// `∂^h_{w̄_q} = ½(∂_x + i∂_y) − (i/2) c w_q ∂_φ` on the second argument.
pub fn anti_lift(k: &dyn Kernel, y: &[Complex64], q: usize) -> Vec<(Complex64, Dir)> {
    let cw = k.connection(y);
    vec![(c(0.5, 0.0), Dir::YRe(q)), (c(0.0, 0.5), Dir::YIm(q)), (-0.5 * I * cw * y[q], Dir::YAngle)]
}

pub fn first(k: &dyn Kernel, a: Args, op: &[(Complex64, Dir)]) -> Complex64 {
    op.iter()
        .map(|&(coef, d)| coef * richardson(|t| shifted(k, a, &[(d, t)]), FD_STEP))
        .sum()
}

pub fn mixed(k: &dyn Kernel, a: Args, op1: &[(Complex64, Dir)], op2: &[(Complex64, Dir)]) -> Complex64 {
    let mut total = c(0.0, 0.0);
    for &(c1, d1) in op1 {
        for &(c2, d2) in op2 {
            let inner = |s: f64| richardson(|t| shifted(k, a, &[(d1, s), (d2, t)]), FD_STEP);
            total += c1 * c2 * richardson(inner, FD_STEP);
        }
    }
    total
}

/// `π^m Π^H_1` at zero fibre offset, the unit-diagonal limit kernel.
pub struct HeisenbergOracle {
    pub m: usize,
}

impl Kernel for HeisenbergOracle {
    fn eval(&self, x: &[Complex64], theta: f64, y: &[Complex64], phi: f64) -> Complex64 {
        let px = HeisenbergPoint::new(x.to_vec(), theta).unwrap();
        let py = HeisenbergPoint::new(y.to_vec(), phi).unwrap();
        heisenberg_szego(1, &px, &py).unwrap().value * PI.powi(self.m as i32)
    }

    fn connection(&self, _z: &[Complex64]) -> f64 {
        1.0
    }
}

/// Level-`N` kernel on `CP^1` in scaled coordinates `ζ = √N z`, fibre angle
/// `θ/N`, divided by its diagonal value.
pub struct SphereOracle {
    pub level: u64,
}

impl Kernel for SphereOracle {
    fn eval(&self, x: &[Complex64], theta: f64, y: &[Complex64], phi: f64) -> Complex64 {
        let n = self.level as f64;
        let s = n.sqrt();
        let lx = heisenberg_lift(&[x[0] / s], theta / n, 1).unwrap();
        let ly = heisenberg_lift(&[y[0] / s], phi / n, 1).unwrap();
        fs_szego(self.level, 1, &lx, &ly).unwrap().value * PI / (n + 1.0)
    }

    fn connection(&self, z: &[Complex64]) -> f64 {
        1.0 / (1.0 + z[0].norm_sqr() / self.level as f64)
    }
}

/// Blocks `(A, B, C)` of a configuration from the oracle, in the same layout
/// as the library: `B[p][(p', q')]`, `C[(p, q)][(p', q')]`.
pub fn oracle_blocks(
    k: &dyn Kernel,
    z: &PointConfiguration,
) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let (n, m) = (z.n(), z.m());
    let mut a = vec![vec![c(0.0, 0.0); n]; n];
    let mut b = vec![vec![c(0.0, 0.0); n * m]; n];
    let mut cc = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for p in 0..n {
        for pp in 0..n {
            let args = Args { x: z.point(p), y: z.point(pp) };
            a[p][pp] = k.eval(args.x, 0.0, args.y, 0.0);
            for qq in 0..m {
                let op2 = anti_lift(k, args.y, qq);
                b[p][pp * m + qq] = first(k, args, &op2);
                for q in 0..m {
                    let op1 = holo_lift(k, args.x, q);
                    cc[p * m + q][pp * m + qq] = mixed(k, args, &op1, &op2);
                }
            }
        }
    }
    (a, b, cc)
}

/// A deterministic, non-degenerate configuration of `n` points in `C^m`.
pub fn spread_configuration(n: usize, m: usize, scale: f64) -> PointConfiguration {
    let pts = (0..n)
        .map(|p| {
            (0..m)
                .map(|q| {
                    let t = (p * m + q) as f64;
                    c(scale * (1.3 * t + 0.7 * p as f64).sin(), scale * (0.9 * t - 0.4 * q as f64).cos())
                })
                .collect()
        })
        .collect();
    PointConfiguration::new(pts).unwrap()
}

/// Equilateral triangle of side `s` in `C`.
pub fn equilateral(s: f64) -> PointConfiguration {
    let h = s * 3f64.sqrt() / 2.0;
    PointConfiguration::new(vec![vec![c(0.0, 0.0)], vec![c(s, 0.0)], vec![c(s / 2.0, h)]]).unwrap()
}
