//! Kernel assembly from coefficient schemes, Gram matrices, strict positive
//! definiteness verdicts and null-space witnesses.
//!
//! Quadratic forms follow the convention `Σ_{ξ,ζ} c_ξ conj(c_ζ) K(ξ,ζ)`, in
//! which a coefficient vector `c` with `Σ_ξ c_ξ Y_α(ξ) = 0` for every active
//! `α` makes the form vanish. Both witness routes (Gram eigenvectors and the
//! collocation null space) report vectors in this convention.

mod io;
mod scheme;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::harmonics::{polar_distance, PointFactors, PolarPoint, POINT_EQ_TOL};
use crate::special_fn::{jacobi_value, ManifoldSpec};
use crate::harmonics::log_ck_constant;

pub use io::{scheme_from_json, scheme_to_json};
pub use scheme::{CoefficientScheme, Parity, Rule, Weights};

/// Default relative eigenvalue / singular value tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Precomputed active set and weights of a scheme, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    d: usize,
    k_max: usize,
    terms: Vec<(crate::harmonics::MultiIndex, f64)>,
}

impl KernelEvaluator {
    pub fn new(s: &CoefficientScheme) -> Self {
        Self { d: s.d(), k_max: s.k_max(), terms: s.active_set() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, p: &PolarPoint) -> Result<()> {
        if p.d() != self.d {
            return domain(format!("point on S^{} used with a scheme for d = {}", p.d() - 1, self.d));
        }
        Ok(())
    }

    /// Row `α ↦ Y_α(p)` of the collocation matrix, one entry per active term.
    pub fn features(&self, p: &PolarPoint) -> Result<Vec<Complex64>> {
        self.check(p)?;
        let f = PointFactors::new(p, self.k_max);
        Ok(self.terms.iter().map(|(a, _)| f.value(a)).collect())
    }

    pub fn eval(&self, p: &PolarPoint, q: &PolarPoint) -> Result<Complex64> {
        let fp = self.features(p)?;
        let fq = self.features(q)?;
        Ok(self.combine(&fp, &fq))
    }

    fn combine(&self, fp: &[Complex64], fq: &[Complex64]) -> Complex64 {
        self.terms.iter().zip(fp.iter().zip(fq)).map(|((_, w), (a, b))| *w * a * b.conj()).sum()
    }
}

/// `K(p, q) = Σ_{α∈F} d_α Y_α(p) conj(Y_α(q))`, truncated at `k_max`.
pub fn kernel_eval(s: &CoefficientScheme, p: &PolarPoint, q: &PolarPoint) -> Result<Complex64> {
    KernelEvaluator::new(s).eval(p, q)
}

/// `Σ_k b_k c_k P_k^{(α,β)}(t)` on any two-point homogeneous space.
pub fn isotropic_kernel_eval(b: &[f64], m: &ManifoldSpec, t: f64) -> Result<f64> {
    if let Some((k, v)) = b.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
        return domain(format!("coefficient b_{k} = {v} must be finite and non-negative"));
    }
    if t.is_nan() || t.abs() > 1.0 + 1e-14 {
        return domain(format!("t must lie in [-1, 1], got {t}"));
    }
    let t = t.clamp(-1.0, 1.0);
    let p = m.jacobi_params();
    Ok(b.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(k, v)| v * log_ck_constant(m, k).exp() * jacobi_value(k, p.alpha, p.beta, t))
        .sum())
}

fn check_distinct(pts: &[PolarPoint]) -> Result<()> {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if polar_distance(&pts[i], &pts[j]) <= POINT_EQ_TOL {
                return Err(Error::Precondition(format!("points {i} and {j} coincide (geodesic distance <= 1e-9)")));
            }
        }
    }
    Ok(())
}

/// Collocation matrix `B[α, ξ] = Y_α(ξ)` (rows: active indices, columns:
/// points).
pub fn collocation_matrix(s: &CoefficientScheme, pts: &[PolarPoint]) -> Result<DMatrix<Complex64>> {
    let ev = KernelEvaluator::new(s);
    let cols = pts.iter().map(|p| ev.features(p)).collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(ev.len(), pts.len(), |r, c| cols[c][r]))
}

/// Gram matrix `K_Ξ = {K(ξ, ζ)}` over pairwise distinct points.
pub fn gram_matrix(s: &CoefficientScheme, pts: &[PolarPoint]) -> Result<DMatrix<Complex64>> {
    check_distinct(pts)?;
    let ev = KernelEvaluator::new(s);
    let feats = pts.iter().map(|p| ev.features(p)).collect::<Result<Vec<_>>>()?;
    let n = pts.len();
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = Complex64::new(ev.combine(&feats[i], &feats[i]).re, 0.0);
        for j in i + 1..n {
            let v = ev.combine(&feats[i], &feats[j]);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// `Σ_{i,j} c_i conj(c_j) K_ij`.
pub fn quadratic_form(g: &DMatrix<Complex64>, c: &[Complex64]) -> f64 {
    let n = c.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += c[i] * c[j].conj() * g[(i, j)];
        }
    }
    acc.re
}

/// Outcome class of a Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PositiveDefinite,
    PositiveSemiDefiniteDegenerate,
    Indefinite,
}

/// Spectrum summary of a Gram matrix plus a null-space witness when the
/// matrix is degenerate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub n: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub tol: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Complex64>>,
    /// Truncation degree of the kernel, when the matrix came from a scheme.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
}

/// Rotates `v` so its first component of maximal modulus is real positive,
/// then scales to unit norm.
fn normalize_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|z| z.norm() >= big * (1.0 - 1e-9)).copied() {
        let rot = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z = *z * rot / norm;
        }
    }
    v
}

/// Classifies a Hermitian matrix by its spectrum. `PositiveDefinite` iff
/// `λ_min > tol · max(1, λ_max)`; degenerate if `λ_min` is within that
/// threshold of zero; `Indefinite` below it.
pub fn pd_verdict(g: &DMatrix<Complex64>, tol: f64) -> Result<GramReport> {
    let n = g.nrows();
    if n != g.ncols() || n == 0 {
        return domain("Gram matrix must be square and non-empty");
    }
    let scale = g.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in i..n {
            if (g[(i, j)] - g[(j, i)].conj()).norm() > 1e-10 * scale {
                return domain(format!("matrix is not Hermitian at ({i}, {j})"));
            }
        }
    }
    let eig = nalgebra::SymmetricEigen::new(g.clone());
    let (mut lo, mut hi) = (0, 0);
    for i in 0..n {
        if eig.eigenvalues[i] < eig.eigenvalues[lo] {
            lo = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[hi] {
            hi = i;
        }
    }
    let (min, max) = (eig.eigenvalues[lo], eig.eigenvalues[hi]);
    let threshold = tol * max.max(1.0);
    let verdict = if min > threshold {
        Verdict::PositiveDefinite
    } else if min >= -threshold {
        Verdict::PositiveSemiDefiniteDegenerate
    } else {
        Verdict::Indefinite
    };
    let witness = (verdict == Verdict::PositiveSemiDefiniteDegenerate).then(|| {
        // v†Kv = λ_min, and Σ c_i conj(c_j) K_ij at c = conj(v) equals v†Kv.
        normalize_phase(eig.eigenvectors.column(lo).iter().map(|z| z.conj()).collect())
    });
    Ok(GramReport { n, min_eigenvalue: min, max_eigenvalue: max, tol, verdict, witness, k_max: None })
}

/// Gram matrix of a scheme on `pts` and its verdict at truncation `k_max`.
pub fn check_spd(s: &CoefficientScheme, pts: &[PolarPoint], tol: f64) -> Result<GramReport> {
    let g = gram_matrix(s, pts)?;
    let mut report = pd_verdict(&g, tol)?;
    report.k_max = Some(s.k_max());
    Ok(report)
}

/// Result of the collocation null-space search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSearch {
    pub rows: usize,
    pub points: usize,
    pub k_max: usize,
    pub tol: f64,
    pub smallest_singular_value: f64,
    pub largest_singular_value: f64,
    pub witness: Option<Vec<Complex64>>,
}

/// Searches for `c ≠ 0` with `Σ_ξ c_ξ Y_α(ξ) = 0` for every active `α`
/// (truncated at `k_max`) via the SVD of the collocation matrix. Returns a
/// unit witness iff `σ_min ≤ tol · σ_max`.
pub fn spd_witness_search(s: &CoefficientScheme, pts: &[PolarPoint], tol: f64) -> Result<WitnessSearch> {
    check_distinct(pts)?;
    let b = collocation_matrix(s, pts)?;
    let n = pts.len();
    let rows = b.nrows();
    if n == 0 {
        return domain("witness search needs at least one point");
    }
    // Zero rows leave the null space unchanged and give a full set of right
    // singular vectors when there are fewer active terms than points.
    let b = if rows < n { b.resize_vertically(n, Complex64::new(0.0, 0.0)) } else { b };
    let svd = nalgebra::SVD::new(b, false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let (mut lo, mut hi) = (0, 0);
    for i in 0..sv.len() {
        if sv[i] < sv[lo] {
            lo = i;
        }
        if sv[i] > sv[hi] {
            hi = i;
        }
    }
    let (smin, smax) = (sv[lo], sv[hi]);
    let witness = (smin <= tol * smax).then(|| normalize_phase(v_t.row(lo).iter().map(|z| z.conj()).collect()));
    Ok(WitnessSearch {
        rows,
        points: n,
        k_max: s.k_max(),
        tol,
        smallest_singular_value: smin,
        largest_singular_value: smax,
        witness,
    })
}

/// True iff two schemes with the same active set `F` get the same verdict
/// class (definite vs not) on `pts`.
pub fn scheme_invariance_check(s1: &CoefficientScheme, s2: &CoefficientScheme, pts: &[PolarPoint]) -> Result<bool> {
    if !s1.same_active_set(s2) {
        return domain("schemes do not share the same active set F");
    }
    let v1 = check_spd(s1, pts, DEFAULT_TOL)?.verdict == Verdict::PositiveDefinite;
    let v2 = check_spd(s2, pts, DEFAULT_TOL)?.verdict == Verdict::PositiveDefinite;
    Ok(v1 == v2)
}
