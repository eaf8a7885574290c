//! Jacobi, Gegenbauer and Ferrers functions with the normalizations used by
//! the harmonic basis.
//!
//! Every Γ-ratio is formed in log space: degrees of a few hundred overflow
//! `f64` Γ long before the ratios themselves become large. Polynomial values
//! come from the three-term recurrence, which is stable on `[-1, 1]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Natural logarithm of Γ(x) for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires a finite x > 0, got {x}"));
    }
    Ok(lgamma(x))
}

/// Unchecked log-Γ for internal callers that already guarantee `x > 0`.
#[inline]
pub(crate) fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    statrs::function::gamma::ln_gamma(x)
}

/// Jacobi parameters `(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return domain("Jacobi parameters must be finite");
        }
        if alpha < -0.5 {
            return domain(format!("alpha must be >= -1/2, got {alpha}"));
        }
        if beta < -1.0 {
            return domain(format!("beta must be >= -1, got {beta}"));
        }
        Ok(Self { alpha, beta })
    }

    /// The ultraspherical case `α = β = λ - 1/2`.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha)
    }

    /// `(β, α)`.
    pub fn swapped(self) -> Self {
        Self { alpha: self.beta, beta: self.alpha }
    }
}

/// The five families of compact two-point homogeneous spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldFamily {
    Sphere,
    RealProjective,
    ComplexProjective,
    QuaternionProjective,
    Cayley,
}

/// A two-point homogeneous space: `S^{d-1}` or `P^{d-1}(·)`.
///
/// The Cayley plane has fixed real dimension 16, so its `d` is always 17.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub family: ManifoldFamily,
    pub d: usize,
}

impl ManifoldSpec {
    pub const CAYLEY_D: usize = 17;

    pub fn new(family: ManifoldFamily, d: usize) -> Result<Self> {
        if d < 2 {
            return domain(format!("ambient dimension d must be >= 2, got {d}"));
        }
        let d = if family == ManifoldFamily::Cayley { Self::CAYLEY_D } else { d };
        Ok(Self { family, d })
    }

    pub fn sphere(d: usize) -> Result<Self> {
        Self::new(ManifoldFamily::Sphere, d)
    }

    pub fn is_sphere(&self) -> bool {
        self.family == ManifoldFamily::Sphere
    }

    /// `α = (d-3)/2` and β from the family.
    pub fn jacobi_params(&self) -> JacobiParams {
        let alpha = (self.d as f64 - 3.0) / 2.0;
        let beta = match self.family {
            ManifoldFamily::Sphere => alpha,
            ManifoldFamily::RealProjective => -0.5,
            ManifoldFamily::ComplexProjective => 0.0,
            ManifoldFamily::QuaternionProjective => 1.0,
            ManifoldFamily::Cayley => 3.0,
        };
        JacobiParams { alpha, beta }
    }
}

fn check_unit_interval(x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() > 1.0 + 1e-14 {
        return domain(format!("argument must lie in [-1, 1], got {x}"));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// `P_k^{(α,β)}(x)` by the three-term recurrence, no argument checks.
pub(crate) fn jacobi_value(k: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (alpha - beta + (alpha + beta + 2.0) * x);
    for n in 1..k {
        let n = n as f64;
        let s = 2.0 * n + alpha + beta;
        let a1 = 2.0 * (n + 1.0) * (n + alpha + beta + 1.0) * s;
        let a2 = (s + 1.0) * (alpha * alpha - beta * beta);
        let a3 = s * (s + 1.0) * (s + 2.0);
        let a4 = 2.0 * (n + alpha) * (n + beta) * (s + 2.0);
        let next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `P_0^{(α,β)}(x), …, P_kmax^{(α,β)}(x)` from a single recurrence pass.
pub(crate) fn jacobi_sequence(kmax: usize, alpha: f64, beta: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    if kmax == 0 {
        return out;
    }
    out.push(0.5 * (alpha - beta + (alpha + beta + 2.0) * x));
    for n in 1..kmax {
        let nf = n as f64;
        let s = 2.0 * nf + alpha + beta;
        let a1 = 2.0 * (nf + 1.0) * (nf + alpha + beta + 1.0) * s;
        let a2 = (s + 1.0) * (alpha * alpha - beta * beta);
        let a3 = s * (s + 1.0) * (s + 2.0);
        let a4 = 2.0 * (nf + alpha) * (nf + beta) * (s + 2.0);
        out.push(((a2 + a3 * x) * out[n] - a4 * out[n - 1]) / a1);
    }
    out
}

/// Jacobi polynomial `P_k^{(α,β)}(x)` with `P_k(1) = Γ(k+α+1)/(Γ(k+1)Γ(α+1))`.
pub fn jacobi_p(k: usize, p: JacobiParams, x: f64) -> Result<f64> {
    let x = check_unit_interval(x)?;
    Ok(jacobi_value(k, p.alpha, p.beta, x))
}

/// `ln P_k^{(α,β)}(1)`.
pub fn jacobi_at_one(k: usize, p: JacobiParams) -> f64 {
    let k = k as f64;
    lgamma(k + p.alpha + 1.0) - lgamma(k + 1.0) - lgamma(p.alpha + 1.0)
}

/// Gegenbauer polynomial `C_n^λ(x)` through its Jacobi representation.
pub fn gegenbauer_c(n: usize, lambda: f64, x: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("Gegenbauer parameter must be > 0, got {lambda}"));
    }
    let x = check_unit_interval(x)?;
    let nf = n as f64;
    let log_scale = lgamma(2.0 * lambda + nf) + lgamma(lambda + 0.5)
        - lgamma(2.0 * lambda)
        - lgamma(lambda + 0.5 + nf);
    let a = lambda - 0.5;
    Ok(log_scale.exp() * jacobi_value(n, a, a, x))
}

/// Splits `nu - mu` into a non-negative integer, if it is one.
fn integer_gap(nu: f64, mu: f64) -> Option<usize> {
    let gap = nu - mu;
    let rounded = gap.round();
    if rounded >= 0.0 && (gap - rounded).abs() <= 1e-12 * nu.abs().max(1.0) {
        Some(rounded as usize)
    } else {
        None
    }
}

/// Ferrers function of negative order `P_ν^{-μ}(x)` for `ν ≥ μ ≥ 0`,
/// `ν - μ ∈ ℕ` (integer and half-integer cases alike):
///
/// `P_ν^{-μ}(x) = (1-x²)^{μ/2} Γ(ν-μ+1) / (2^μ Γ(ν+1)) · P_{ν-μ}^{(μ,μ)}(x)`.
pub fn legendre_neg_order(nu: f64, mu: f64, x: f64) -> Result<f64> {
    if !(mu >= 0.0) || !(nu >= mu) {
        return domain(format!("need nu >= mu >= 0, got nu={nu}, mu={mu}"));
    }
    let Some(n) = integer_gap(nu, mu) else {
        return domain(format!("nu - mu must be a non-negative integer, got {}", nu - mu));
    };
    if !(x.abs() < 1.0) {
        return domain(format!("Ferrers functions are evaluated on (-1, 1), got {x}"));
    }
    let log_scale = lgamma(n as f64 + 1.0) - mu * std::f64::consts::LN_2 - lgamma(nu + 1.0);
    let envelope = (1.0 - x * x).powf(mu / 2.0);
    Ok(envelope * log_scale.exp() * jacobi_value(n, mu, mu, x))
}

/// `∫_0^π sin^{j-1}θ dθ = √π Γ(j/2) / Γ((j+1)/2)`.
pub fn sine_power_integral(j: usize) -> f64 {
    let j = j as f64;
    (0.5 * PI.ln() + lgamma(j / 2.0) - lgamma((j + 1.0) / 2.0)).exp()
}

/// Leading constant of `_jP̃_L^ℓ`.
///
/// With the `1/√(2π)` prefactor of `Y_α` kept, this is the unique positive
/// per-`j` constant that makes the basis orthonormal for the normalized
/// surface measure `dσ / Vol(S^{d-1})`: `√(2π W_2)` for `j = 2` and `√W_j`
/// for `j ≥ 3`, where `W_j = ∫_0^π sin^{j-1}`.
pub fn ptilde_leading_constant(j: usize) -> f64 {
    assert!(j >= 2, "ptilde is defined for j >= 2");
    if j == 2 {
        (2.0 * PI * sine_power_integral(2)).sqrt()
    } else {
        sine_power_integral(j).sqrt()
    }
}

/// `sin θ` and `cos θ` with the endpoints 0 and π mapped exactly.
#[inline]
pub(crate) fn sin_cos_exact(theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        (0.0, 1.0)
    } else if theta == PI {
        (0.0, -1.0)
    } else {
        theta.sin_cos()
    }
}

/// `ln` of the θ-independent factor of `_jP̃_L^ℓ` for `ℓ ≥ 0`, in the form
/// `K_j · _jc_L^ℓ · Γ(L-ℓ+1) / (2^μ Γ(ν+1))` with `μ = ℓ + (j-2)/2`,
/// `ν = L + (j-2)/2`.
pub(crate) fn ptilde_log_scale(j: usize, l: usize, ell: usize) -> f64 {
    let jf = j as f64;
    let (lf, ef) = (l as f64, ell as f64);
    let shift = (jf - 2.0) / 2.0;
    let mu = ef + shift;
    let nu = lf + shift;
    let log_c = 0.5 * (((2.0 * lf + jf - 1.0) / 2.0).ln() + lgamma(lf + ef + jf - 1.0) - lgamma(lf - ef + 1.0));
    ptilde_leading_constant(j).ln() + log_c + lgamma(lf - ef + 1.0)
        - mu * std::f64::consts::LN_2
        - lgamma(nu + 1.0)
}

/// Normalized Ferrers factor `_jP̃_L^ℓ(θ)` of the polar-coordinate basis:
///
/// `K_j · _jc_L^ℓ · (sin θ)^{(2-j)/2} · P_{L+(j-2)/2}^{-(ℓ+(j-2)/2)}(cos θ)`,
/// `_jc_L^ℓ = ((2L+j-1)/2 · (L+ℓ+j-2)!/(L-ℓ)!)^{1/2}`.
///
/// The sine powers combine to `(sin θ)^ℓ`, so the value is evaluated in the
/// Gegenbauer form `(sin θ)^ℓ P_{L-ℓ}^{(μ,μ)}(cos θ)` and is finite at the
/// poles. For `j = 2` negative orders follow the Ferrers sign convention
/// `_2P̃_L^{-m} = (-1)^m _2P̃_L^m`.
pub fn ptilde(j: usize, l: usize, ell: i64, theta: f64) -> Result<f64> {
    if j < 2 {
        return domain(format!("ptilde needs j >= 2, got {j}"));
    }
    if ell < 0 && j != 2 {
        return domain(format!("negative order {ell} only allowed for j = 2"));
    }
    let m = ell.unsigned_abs() as usize;
    if m > l {
        return domain(format!("order |{ell}| exceeds degree {l}"));
    }
    if !(0.0..=PI).contains(&theta) {
        return domain(format!("theta must lie in [0, pi], got {theta}"));
    }
    let sign = if ell < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let (s, c) = sin_cos_exact(theta);
    let mu = m as f64 + (j as f64 - 2.0) / 2.0;
    let poly = jacobi_value(l - m, mu, mu, c);
    Ok(sign * ptilde_log_scale(j, l, m).exp() * s.powi(m as i32) * poly)
}
