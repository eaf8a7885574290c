//! Non-isotropic positive definite kernels on the sphere `S^{d-1}`.
//!
//! Kernels are built from explicit spherical harmonics `Y_α` in polar
//! coordinates and a [`kernels::CoefficientScheme`] selecting which
//! harmonics carry a positive weight. The crate evaluates the harmonics and
//! the Jacobi/Gegenbauer/Ferrers functions they are made of, assembles Gram
//! matrices, decides strict positive definiteness on finite point sets
//! (with null-space witnesses when it fails), and certifies the inequality
//! chain and rate conditions under which a sparse coefficient set still
//! yields a strictly positive definite kernel.
//!
//! All verdicts are taken at a finite truncation degree `k_max`.

pub mod error;
pub mod harmonics;
pub mod kernels;
pub mod quadrature;
pub mod special_fn;
pub mod spd_analysis;

pub use error::{Error, Result};
pub use harmonics::{HarmonicValue, MultiIndex, PolarPoint};
pub use kernels::{CoefficientScheme, GramReport, Verdict};
pub use special_fn::{JacobiParams, ManifoldFamily, ManifoldSpec};

/// Version tag embedded in every serialized report.
pub const SCHEMA: &str = "spherekern/1";
