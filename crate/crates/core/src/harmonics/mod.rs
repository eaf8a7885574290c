//! Explicit spherical harmonics on `S^{d-1}` in polar coordinates.
//!
//! `Y_α(ξ) = (1/√(2π)) e^{iα_1θ_1} ∏_{j=2}^{d-1} _jP̃_{α_j}^{α_{j-1}}(θ_j)`,
//! orthonormal for the normalized surface measure, so that
//! `Σ_{α∈τ_k} |Y_α(ξ)|² = N_{k,d}`.

mod index;
mod point;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::special_fn::{
    jacobi_at_one, jacobi_sequence, lgamma, ptilde, ptilde_log_scale, sin_cos_exact, ManifoldSpec,
};

pub use index::{
    dim_harmonic, enumerate_tau, enumerate_tau_jzero, jzero_count, tau_iter, tau_jzero_iter, MultiIndex, TauIter,
};
pub use point::{
    format_points, geodesic_distance, parse_point_row, parse_points, polar_distance, random_points, PointRepr,
    PointSet, PolarPoint, POINT_EQ_TOL, UNIT_TOL,
};

/// Value of a spherical harmonic at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicValue {
    pub value: Complex64,
}

impl HarmonicValue {
    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn check_pair(a: &MultiIndex, p: &PolarPoint) -> Result<()> {
    if a.d() != p.d() {
        return domain(format!("index {a} is for d = {}, point has d = {}", a.d(), p.d()));
    }
    Ok(())
}

/// `Y_α(ξ)` evaluated directly from [`ptilde`].
pub fn eval_harmonic(a: &MultiIndex, p: &PolarPoint) -> Result<HarmonicValue> {
    check_pair(a, p)?;
    let mut prod = INV_SQRT_2PI;
    for j in 2..p.d() {
        prod *= ptilde(j, a.get(j) as usize, a.get(j - 1), p.theta(j))?;
    }
    let phase = Complex64::from_polar(1.0, a.get(1) as f64 * p.theta(1));
    Ok(HarmonicValue { value: phase * prod })
}

/// Tabulated factors `_jP̃_L^ℓ(θ_j)` and phases `e^{imθ_1}` of one point up
/// to a maximum degree, for evaluating many harmonics at the same point.
#[derive(Debug, Clone)]
pub struct PointFactors {
    d: usize,
    max_degree: usize,
    phases: Vec<Complex64>,
    // tables[j - 2][tri(L, ℓ)] = _jP̃_L^ℓ(θ_j), 0 ≤ ℓ ≤ L ≤ max_degree
    tables: Vec<Vec<f64>>,
}

#[inline]
fn tri(l: usize, ell: usize) -> usize {
    l * (l + 1) / 2 + ell
}

impl PointFactors {
    pub fn new(p: &PolarPoint, max_degree: usize) -> Self {
        let d = p.d();
        let k = max_degree as i64;
        let phases = (-k..=k).map(|m| Complex64::from_polar(1.0, m as f64 * p.theta(1))).collect();
        let mut tables = Vec::with_capacity(d - 2);
        for j in 2..d {
            let (s, c) = sin_cos_exact(p.theta(j));
            let mut table = vec![0.0; tri(max_degree, max_degree) + 1];
            let mut sin_pow = 1.0;
            for ell in 0..=max_degree {
                let mu = ell as f64 + (j as f64 - 2.0) / 2.0;
                let polys = jacobi_sequence(max_degree - ell, mu, mu, c);
                for l in ell..=max_degree {
                    table[tri(l, ell)] = ptilde_log_scale(j, l, ell).exp() * sin_pow * polys[l - ell];
                }
                sin_pow *= s;
            }
            tables.push(table);
        }
        Self { d, max_degree, phases, tables }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    fn factor(&self, j: usize, l: usize, ell: i64) -> f64 {
        let m = ell.unsigned_abs() as usize;
        let v = self.tables[j - 2][tri(l, m)];
        if ell < 0 && m % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Product of the real factors `∏_{j=from}^{d-1} _jP̃_{α_j}^{α_{j-1}}(θ_j)`.
    pub fn real_part_product(&self, a: &MultiIndex, from: usize) -> f64 {
        (from..self.d).map(|j| self.factor(j, a.get(j) as usize, a.get(j - 1))).product()
    }

    /// `Y_α` at the tabulated point. Panics if `α` exceeds the tabulated degree.
    pub fn value(&self, a: &MultiIndex) -> Complex64 {
        debug_assert_eq!(a.d(), self.d);
        assert!(a.degree() <= self.max_degree, "degree {} above table limit {}", a.degree(), self.max_degree);
        let phase = self.phases[(a.get(1) + self.max_degree as i64) as usize];
        phase * (INV_SQRT_2PI * self.real_part_product(a, 2))
    }
}

/// `Σ_{α∈τ_k^{d-1}} Y_α(p) · conj(Y_α(q))`.
pub fn zonal_sum(d: usize, k: usize, p: &PolarPoint, q: &PolarPoint) -> Result<Complex64> {
    if p.d() != d || q.d() != d {
        return domain(format!("points must lie on S^{}", d - 1));
    }
    let fp = PointFactors::new(p, k);
    let fq = PointFactors::new(q, k);
    Ok(zonal_sum_tabulated(d, k, &fp, &fq))
}

pub(crate) fn zonal_sum_tabulated(d: usize, k: usize, fp: &PointFactors, fq: &PointFactors) -> Complex64 {
    tau_iter(d, k).map(|a| fp.value(&a) * fq.value(&a).conj()).sum()
}

/// `ln c_k` of the addition formula,
/// `c_k = Γ(β+1)(2k+α+β+1)Γ(k+α+β+1) / (Γ(α+β+2)Γ(k+β+1))`.
pub fn log_ck_constant(m: &ManifoldSpec, k: usize) -> f64 {
    if k == 0 {
        // (α+β+1)Γ(α+β+1) = Γ(α+β+2)
        return 0.0;
    }
    let p = m.jacobi_params();
    let (a, b, kf) = (p.alpha, p.beta, k as f64);
    lgamma(b + 1.0) + (2.0 * kf + a + b + 1.0).ln() + lgamma(kf + a + b + 1.0)
        - lgamma(a + b + 2.0)
        - lgamma(kf + b + 1.0)
}

/// The addition-formula constant `c_k`.
pub fn ck_constant(m: &ManifoldSpec, k: usize) -> f64 {
    log_ck_constant(m, k).exp()
}

/// `c_k P_k^{(α,β)}(1)`, the diagonal value of the degree-`k` zonal kernel.
pub fn zonal_at_one(m: &ManifoldSpec, k: usize) -> f64 {
    (log_ck_constant(m, k) + jacobi_at_one(k, m.jacobi_params())).exp()
}

/// `ln N_{k,n}` in floating point, valid for every `n ≥ 2` (`N_{k,2} = 2`
/// for `k ≥ 1`, the circle).
pub fn log_dim_harmonic(n: usize, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    (2.0 * k + n - 2.0).ln() + lgamma(k + n - 2.0) - lgamma(k + 1.0) - lgamma(n - 1.0)
}

/// Volume of `S^{d-1}`, `2π^{d/2}/Γ(d/2)`.
pub fn sphere_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * (h * PI.ln() - lgamma(h)).exp()
}
