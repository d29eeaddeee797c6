//! Scaling-limit zero correlations of Gaussian random holomorphic sections.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernels`]: exact model Szegő kernels on the reduced Heisenberg group
//!   and on `CP^m`, plus the near-diagonal scaling residual.
//! * [`gaussian`]: circular complex Gaussians with positive-semidefinite
//!   covariance, counter-based sampling and exact Wick moments.
//! * [`covariance`]: limit and finite-`N` covariance blocks of values and
//!   derivatives, and the conditional covariance `Λ`.
//! * [`correlations`]: Kac–Rice correlation functions (Wick, Monte Carlo and
//!   closed-form routes).
//! * [`connected`]: connected correlations, Möbius inversion and the
//!   graph decay bound.
//! * [`montecarlo`]: random SU(2) polynomials, their roots and the empirical
//!   pair correlation.

pub mod connected;
pub mod correlations;
pub mod covariance;
pub mod curve;
pub mod error;
pub mod gaussian;
pub mod kernels;
pub mod montecarlo;
pub mod rng;

pub use num_complex::Complex64;

pub use crate::connected::{
    connected_correlation, decay_bound, decay_check, moebius_reconstruct, partitions,
    BalancedGraph, ConnectedValue, DecayReport, Partition,
};
pub use crate::correlations::{
    density_one_point, finite_correlation_cp1, limit_correlation, pair_correlation_closed,
    small_r_asymptote, CorrelationRequest, CorrelationValue, Method,
};
pub use crate::covariance::{
    assemble_conditional, finite_blocks_cp1, lambda_schur, limit_blocks, CovarianceBlocks,
    FiniteNContext, PointConfiguration,
};
pub use crate::curve::{CorrelationCurve, CurvePoint, Provenance};
pub use crate::error::{Error, Result};
pub use crate::gaussian::{
    det_product_moment, mc_det_product_moment, psd_factorize, sample, wick_moment,
    GeneralizedGaussian, HermitianMatrix, MomentPattern,
};
pub use crate::kernels::{
    fs_szego, heisenberg_dilate, heisenberg_lift, heisenberg_szego, scaled_kernel_residual,
    HeisenbergPoint, KernelValue, SpherePoint,
};
pub use crate::montecarlo::{
    empirical_pair_correlation, fs_distance, poisson_baseline, roots, sample_su2, PairHistogram,
    SU2Sample, ZeroSet,
};
